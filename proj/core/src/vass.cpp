// vass.cpp -- labelled VASS: parsing, oracle, amalgamation system.
#include "amalgam/vass.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "amalgam/transducer.hpp"

namespace amalgam {

namespace {

constexpr long kOmega = -1;  // ω marker inside Karp–Miller vectors

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<long> parse_vector(const std::string& tok, std::size_t dim,
                               std::size_t lineno) {
  if (tok.size() < 2 || tok.front() != '(' || tok.back() != ')')
    throw std::invalid_argument("vass parse error at line " +
                                std::to_string(lineno) + ": bad vector " + tok);
  std::vector<long> v;
  std::string cur;
  for (std::size_t i = 1; i + 1 < tok.size(); ++i) {
    if (tok[i] == ',') {
      v.push_back(std::stol(cur));
      cur.clear();
    } else {
      cur += tok[i];
    }
  }
  if (!cur.empty()) v.push_back(std::stol(cur));
  if (v.size() != dim)
    throw std::invalid_argument("vass parse error at line " +
                                std::to_string(lineno) + ": dimension mismatch");
  return v;
}

void add_state(Vass& v, const std::string& q) {
  if (std::find(v.states.begin(), v.states.end(), q) == v.states.end())
    v.states.push_back(q);
}

}  // namespace

Vass parse_vass(const std::string& text) {
  Vass v;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("vass parse error at line " +
                                  std::to_string(lineno) + ": missing ':'");
    std::string key = line.substr(0, colon);
    key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
    std::vector<std::string> toks = split_ws(line.substr(colon + 1));
    if (key == "dim") {
      v.dim = std::stoul(toks.at(0));
    } else if (key == "alphabet") {
      v.alphabet.insert(v.alphabet.end(), toks.begin(), toks.end());
    } else if (key == "initial") {
      for (auto& q : toks) { add_state(v, q); v.initial.push_back(q); }
    } else if (key == "final") {
      for (auto& q : toks) { add_state(v, q); v.final_states.push_back(q); }
    } else if (key == "trans") {
      if (toks.size() != 4)
        throw std::invalid_argument("vass parse error at line " +
                                    std::to_string(lineno) +
                                    ": trans expects 'from label (v) to'");
      add_state(v, toks[0]);
      add_state(v, toks[3]);
      v.transitions.push_back({toks[0], toks[1] == "_" ? "" : toks[1],
                               parse_vector(toks[2], v.dim, lineno), toks[3]});
    } else {
      throw std::invalid_argument("vass parse error at line " +
                                  std::to_string(lineno) + ": unknown key '" +
                                  key + "'");
    }
  }
  return v;
}

std::string serialize_vass(const Vass& v) {
  std::ostringstream os;
  os << "dim: " << v.dim << '\n';
  os << "alphabet:";
  for (const Letter& l : v.alphabet) os << ' ' << l;
  os << '\n' << "initial:";
  for (const auto& q : v.initial) os << ' ' << q;
  os << '\n' << "final:";
  for (const auto& q : v.final_states) os << ' ' << q;
  os << '\n';
  for (const VassTransition& t : v.transitions) {
    os << "trans: " << t.from << ' ' << (t.label.empty() ? "_" : t.label) << " (";
    for (std::size_t i = 0; i < t.delta.size(); ++i) {
      if (i) os << ',';
      os << t.delta[i];
    }
    os << ") " << t.to << '\n';
  }
  return os.str();
}

std::vector<std::string> karp_miller_coverable_states(const Vass& v) {
  using Vec = std::vector<long>;
  struct Node {
    std::string state;
    Vec vec;
    std::vector<std::size_t> ancestors;
  };
  auto leq = [](const Vec& a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (b[i] == kOmega) continue;
      if (a[i] == kOmega || a[i] > b[i]) return false;
    }
    return true;
  };
  std::vector<Node> nodes;
  std::deque<std::size_t> work;
  std::set<std::pair<std::string, Vec>> seen;
  for (const auto& q : v.initial) {
    Node n{q, Vec(v.dim, 0), {}};
    if (seen.insert({n.state, n.vec}).second) {
      nodes.push_back(n);
      work.push_back(nodes.size() - 1);
    }
  }
  while (!work.empty()) {
    std::size_t cur = work.front();
    work.pop_front();
    for (const VassTransition& t : v.transitions) {
      if (t.from != nodes[cur].state) continue;
      Vec nv = nodes[cur].vec;
      bool ok = true;
      for (std::size_t i = 0; i < v.dim; ++i) {
        if (nv[i] == kOmega) continue;
        nv[i] += t.delta[i];
        if (nv[i] < 0) { ok = false; break; }
      }
      if (!ok) continue;
      Node child{t.to, nv, nodes[cur].ancestors};
      child.ancestors.push_back(cur);
      // ω-acceleration against strictly dominated ancestors.
      for (std::size_t anc : child.ancestors) {
        if (nodes[anc].state != child.state) continue;
        if (leq(nodes[anc].vec, child.vec) && nodes[anc].vec != child.vec)
          for (std::size_t i = 0; i < v.dim; ++i)
            if (child.vec[i] != kOmega &&
                (nodes[anc].vec[i] == kOmega
                     ? false
                     : nodes[anc].vec[i] < child.vec[i]))
              child.vec[i] = kOmega;
      }
      // Drop if covered by an already-seen node of the same state.
      bool covered = false;
      for (const Node& n : nodes)
        if (n.state == child.state && leq(child.vec, n.vec)) { covered = true; break; }
      if (covered) continue;
      if (!seen.insert({child.state, child.vec}).second) continue;
      nodes.push_back(child);
      work.push_back(nodes.size() - 1);
    }
  }
  std::set<std::string> states;
  for (const Node& n : nodes) states.insert(n.state);
  return {states.begin(), states.end()};
}

namespace {

/// Bounded forward search for an accepting run; deterministic order.
std::optional<std::vector<std::size_t>> bounded_accepting_run(
    const Vass& v, long counter_bound, std::size_t max_len) {
  struct Conf {
    std::string state;
    std::vector<long> vec;
    std::vector<std::size_t> path;
  };
  std::deque<Conf> work;
  std::set<std::pair<std::string, std::vector<long>>> seen_accepting_check;
  for (const auto& q : v.initial) work.push_back({q, std::vector<long>(v.dim, 0), {}});
  auto is_final = [&](const Conf& c) {
    if (std::find(v.final_states.begin(), v.final_states.end(), c.state) ==
        v.final_states.end())
      return false;
    return std::all_of(c.vec.begin(), c.vec.end(), [](long x) { return x == 0; });
  };
  // Breadth-first by length gives the shortest certificate.
  std::set<std::tuple<std::string, std::vector<long>, std::size_t>> visited;
  while (!work.empty()) {
    Conf c = work.front();
    work.pop_front();
    if (is_final(c)) return c.path;
    if (c.path.size() == max_len) continue;
    for (std::size_t i = 0; i < v.transitions.size(); ++i) {
      const VassTransition& t = v.transitions[i];
      if (t.from != c.state) continue;
      Conf n = c;
      bool ok = true;
      for (std::size_t k = 0; k < v.dim; ++k) {
        n.vec[k] += t.delta[k];
        if (n.vec[k] < 0 || n.vec[k] > counter_bound) { ok = false; break; }
      }
      if (!ok) continue;
      n.state = t.to;
      n.path.push_back(i);
      // Revisit pruning keyed on remaining budget class would be unsound
      // for shortest-run search; key on (state, vec, len) instead.
      if (!visited.insert({n.state, n.vec, n.path.size()}).second) continue;
      work.push_back(std::move(n));
    }
  }
  return std::nullopt;
}

}  // namespace

Verdict vass_emptiness(const Vass& v, const Budget& budget) {
  if (auto path = bounded_accepting_run(v, budget.counter_bound,
                                        budget.max_run_length)) {
    std::ostringstream os;
    for (std::size_t i = 0; i < path->size(); ++i) {
      if (i) os << '.';
      os << (*path)[i];
    }
    return Verdict::pos({{"run", os.str()}});
  }
  std::vector<std::string> coverable = karp_miller_coverable_states(v);
  bool final_coverable = false;
  for (const auto& q : v.final_states)
    if (std::find(coverable.begin(), coverable.end(), q) != coverable.end())
      final_coverable = true;
  if (!final_coverable)
    return Verdict::neg({{"reason", "no final state coverable"},
                         {"coverable", coverable}});
  return Verdict::exhausted();
}

// ---------------------------------------------------------------------------
// VassSystem

namespace {

class VassRunData final : public RunData {
 public:
  std::vector<std::size_t> trans;
  std::vector<std::vector<long>> confs;  ///< confs[i] = counters after i steps
  std::vector<std::string> states;       ///< states[i] = control after i steps
  std::string ser;
  std::string serialize() const override { return ser; }
  std::size_t size() const override { return trans.size(); }
};

std::string serialize_indices(const std::vector<std::size_t>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << '.';
    os << v[i];
  }
  return os.str();
}

const VassRunData& as_vass_run(const Run& r) {
  auto* p = dynamic_cast<const VassRunData*>(r.get());
  if (!p) throw std::invalid_argument("run does not belong to a VASS system");
  return *p;
}

bool vec_leq(const std::vector<long>& a, const std::vector<long>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

}  // namespace

VassSystem::VassSystem(Vass v, std::string name)
    : v_(std::move(v)), name_(std::move(name)) {}

Run VassSystem::make_run(const std::vector<std::size_t>& transition_indices) const {
  auto rd = std::make_shared<VassRunData>();
  rd->trans = transition_indices;
  rd->ser = serialize_indices(transition_indices);
  std::vector<long> vec(v_.dim, 0);
  std::string cur;
  rd->confs.push_back(vec);
  for (std::size_t k = 0; k < transition_indices.size(); ++k) {
    const VassTransition& t = v_.transitions.at(transition_indices[k]);
    if (k == 0) {
      if (std::find(v_.initial.begin(), v_.initial.end(), t.from) == v_.initial.end())
        throw std::invalid_argument("run does not start in an initial state");
      rd->states.push_back(t.from);
    } else if (t.from != cur) {
      throw std::invalid_argument("run states do not chain");
    }
    for (std::size_t i = 0; i < v_.dim; ++i) {
      vec[i] += t.delta[i];
      if (vec[i] < 0) throw std::invalid_argument("run drops a counter below zero");
    }
    cur = t.to;
    rd->states.push_back(cur);
    rd->confs.push_back(vec);
  }
  if (transition_indices.empty()) {
    bool ok = false;
    for (const auto& q : v_.initial)
      if (std::find(v_.final_states.begin(), v_.final_states.end(), q) !=
          v_.final_states.end())
        ok = true;
    if (!ok) throw std::invalid_argument("empty run not accepting");
    rd->states.push_back(v_.initial.empty() ? "" : v_.initial.front());
  } else {
    if (std::find(v_.final_states.begin(), v_.final_states.end(), cur) ==
        v_.final_states.end())
      throw std::invalid_argument("run does not end in a final state");
    if (!std::all_of(vec.begin(), vec.end(), [](long x) { return x == 0; }))
      throw std::invalid_argument("run does not end with zero counters");
  }
  return rd;
}

std::vector<Run> VassSystem::enumerate_runs(std::size_t max_size) const {
  std::vector<Run> out;
  std::vector<std::size_t> seq;
  std::vector<long> vec(v_.dim, 0);
  std::function<void(const std::string&, std::size_t)> rec =
      [&](const std::string& state, std::size_t len) {
        if (std::find(v_.final_states.begin(), v_.final_states.end(), state) !=
                v_.final_states.end() &&
            std::all_of(vec.begin(), vec.end(), [](long x) { return x == 0; }))
          out.push_back(make_run(seq));
        if (len == max_size) return;
        for (std::size_t i = 0; i < v_.transitions.size(); ++i) {
          const VassTransition& t = v_.transitions[i];
          if (t.from != state) continue;
          bool ok = true;
          for (std::size_t k = 0; k < v_.dim; ++k) {
            vec[k] += t.delta[k];
            if (vec[k] < 0) ok = false;
          }
          if (ok) {
            seq.push_back(i);
            rec(t.to, len + 1);
            seq.pop_back();
          }
          for (std::size_t k = 0; k < v_.dim; ++k) vec[k] -= t.delta[k];
        }
      };
  for (const auto& q0 : v_.initial) rec(q0, 0);
  std::sort(out.begin(), out.end(), [](const Run& x, const Run& y) {
    if (x->size() != y->size()) return x->size() < y->size();
    return x->serialize() < y->serialize();
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Run& x, const Run& y) {
                          return x->serialize() == y->serialize();
                        }),
            out.end());
  return out;
}

Decomposition VassSystem::canon(const Run& rho) const {
  const VassRunData& r = as_vass_run(rho);
  Decomposition d;
  d.reserve(r.trans.size());
  for (std::size_t i : r.trans) d.push_back(v_.transitions.at(i).label);
  return d;
}

std::vector<MonotoneMap> VassSystem::admissible_embeddings(const Run& rho,
                                                           const Run& sigma) const {
  const VassRunData& r = as_vass_run(rho);
  const VassRunData& s = as_vass_run(sigma);
  // As for NFA runs, boundary gap segments must be control-state loops, so
  // the runs have to agree on their start and end control states.
  auto start_of = [&](const VassRunData& x) -> std::string {
    if (!x.trans.empty()) return v_.transitions.at(x.trans.front()).from;
    for (const auto& q : v_.initial)
      if (std::find(v_.final_states.begin(), v_.final_states.end(), q) !=
          v_.final_states.end())
        return q;
    return v_.initial.empty() ? std::string{} : v_.initial.front();
  };
  auto end_of = [&](const VassRunData& x) -> std::string {
    return x.trans.empty() ? start_of(x)
                           : v_.transitions.at(x.trans.back()).to;
  };
  if (start_of(r) != start_of(s) || end_of(r) != end_of(s)) return {};
  return enumerate_embeddings_by_predicate(
      r.trans.size(), s.trans.size(), [&](std::size_t i, std::size_t j) {
        return r.trans[i - 1] == s.trans[j - 1] &&
               vec_leq(r.confs[i - 1], s.confs[j - 1]) &&
               vec_leq(r.confs[i], s.confs[j]);
      });
}

AmalgamResult VassSystem::amalgamate(const Run& rho0, const MonotoneMap& f,
                                     const Run& rho1, const MonotoneMap& g,
                                     const Run& rho2, std::size_t gap) const {
  const VassRunData& r0 = as_vass_run(rho0);
  const VassRunData& r1 = as_vass_run(rho1);
  const VassRunData& r2 = as_vass_run(rho2);
  std::size_t n = r0.trans.size();
  if (f.domain_len() != n || g.domain_len() != n || gap > n)
    throw std::invalid_argument("vass amalgamate: bad arguments");
  std::vector<std::size_t> out;
  std::vector<std::size_t> img1(r1.trans.size()), img2(r2.trans.size());
  auto seg = [&](const MonotoneMap& h, std::size_t total, std::size_t j,
                 std::size_t* lo, std::size_t* hi) {
    *lo = (j == 0) ? 1 : h(j) + 1;
    *hi = (j == n) ? total : h(j + 1) - 1;
  };
  for (std::size_t j = 0; j <= n; ++j) {
    std::size_t lo1, hi1, lo2, hi2;
    seg(f, r1.trans.size(), j, &lo1, &hi1);
    seg(g, r2.trans.size(), j, &lo2, &hi2);
    (void)gap;  // ρ1 segment first everywhere; realizes G_{i,f}·G_{i,g}.
    for (std::size_t k = lo1; k <= hi1; ++k) {
      img1[k - 1] = out.size() + 1;
      out.push_back(r1.trans[k - 1]);
    }
    for (std::size_t k = lo2; k <= hi2; ++k) {
      img2[k - 1] = out.size() + 1;
      out.push_back(r2.trans[k - 1]);
    }
    if (j < n) {
      img1[f(j + 1) - 1] = out.size() + 1;
      img2[g(j + 1) - 1] = out.size() + 1;
      out.push_back(r0.trans[j]);
    }
  }
  AmalgamResult res;
  res.rho3 = make_run(out);  // validates chaining and nonnegativity
  res.f_prime = MonotoneMap{img1, out.size()};
  res.g_prime = MonotoneMap{img2, out.size()};
  return res;
}

Verdict VassSystem::emptiness(const Budget& budget) const {
  return vass_emptiness(v_, budget);
}

Run VassSystem::parse_run(const std::string& text) const {
  std::vector<std::size_t> idx;
  std::string cur;
  for (char c : text) {
    if (c == '.') {
      if (!cur.empty()) idx.push_back(std::stoul(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) idx.push_back(std::stoul(cur));
  return make_run(idx);
}

Vass vass_transduce(const Vass& v, const Transducer& t) {
  if (t.has_boundary_outputs())
    throw std::invalid_argument("vass_transduce: boundary outputs unsupported");
  Vass r;
  r.dim = v.dim;
  r.alphabet = t.output_alphabet;
  auto name = [](const std::string& q, const std::string& p) { return q + "|" + p; };
  for (const auto& q : v.states)
    for (const auto& p : t.states) r.states.push_back(name(q, p));
  for (const auto& q : v.initial)
    for (const auto& p : t.initial) r.initial.push_back(name(q, p));
  for (const auto& q : v.final_states)
    for (const auto& p : t.final_states) r.final_states.push_back(name(q, p));
  std::size_t fresh = 0;
  std::vector<long> zero(v.dim, 0);
  for (const VassTransition& tv : v.transitions) {
    if (tv.label.empty()) {
      for (const auto& p : t.states)
        r.transitions.push_back({name(tv.from, p), "", tv.delta, name(tv.to, p)});
      continue;
    }
    for (const auto& tt : t.transitions) {
      if (tt.in != tv.label) continue;
      // Expand the output word; the counter update fires on the first step.
      std::string cur = name(tv.from, tt.from);
      if (tt.out.empty()) {
        r.transitions.push_back({cur, "", tv.delta, name(tv.to, tt.to)});
        continue;
      }
      for (std::size_t i = 0; i < tt.out.size(); ++i) {
        std::string nxt = (i + 1 == tt.out.size())
                              ? name(tv.to, tt.to)
                              : "x" + std::to_string(fresh++);
        if (nxt != name(tv.to, tt.to) &&
            std::find(r.states.begin(), r.states.end(), nxt) == r.states.end())
          r.states.push_back(nxt);
        r.transitions.push_back({cur, tt.out[i], i == 0 ? tv.delta : zero, nxt});
        cur = nxt;
      }
    }
  }
  return r;
}

std::shared_ptr<const System> VassSystem::transduce(const Transducer& t) const {
  return std::make_shared<VassSystem>(vass_transduce(v_, t), name_ + "+T");
}

}  // namespace amalgam
