// nfa.cpp -- NFA algebra and the NFA amalgamation system.
#include "amalgam/nfa.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "amalgam/transducer.hpp"

namespace amalgam {

std::size_t Nfa::state_index(const std::string& q) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == q) return i;
  throw std::invalid_argument("unknown state: " + q);
}

bool Nfa::has_state(const std::string& q) const {
  return std::find(states.begin(), states.end(), q) != states.end();
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

void add_state(Nfa& a, const std::string& q) {
  if (!a.has_state(q)) a.states.push_back(q);
}

// ε-closure of a state set.
std::set<std::size_t> eps_closure(const Nfa& a, std::set<std::size_t> s) {
  std::vector<std::size_t> stack(s.begin(), s.end());
  while (!stack.empty()) {
    std::size_t q = stack.back();
    stack.pop_back();
    for (const NfaTransition& t : a.transitions)
      if (t.label.empty() && a.state_index(t.from) == q) {
        std::size_t r = a.state_index(t.to);
        if (s.insert(r).second) stack.push_back(r);
      }
  }
  return s;
}

}  // namespace

Nfa parse_nfa(const std::string& text) {
  Nfa a;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto colon = line.find(':');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (colon == std::string::npos)
      throw std::invalid_argument("nfa parse error at line " +
                                  std::to_string(lineno) + ": missing ':'");
    std::string key = line.substr(0, colon);
    key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
    std::vector<std::string> toks = split_ws(line.substr(colon + 1));
    if (key == "alphabet") {
      a.alphabet.insert(a.alphabet.end(), toks.begin(), toks.end());
    } else if (key == "initial") {
      for (auto& q : toks) { add_state(a, q); a.initial.push_back(q); }
    } else if (key == "final") {
      for (auto& q : toks) { add_state(a, q); a.final_states.push_back(q); }
    } else if (key == "trans") {
      if (toks.size() != 3)
        throw std::invalid_argument("nfa parse error at line " +
                                    std::to_string(lineno) +
                                    ": trans expects 'from label to'");
      add_state(a, toks[0]);
      add_state(a, toks[2]);
      a.transitions.push_back({toks[0], toks[1] == "_" ? "" : toks[1], toks[2]});
    } else {
      throw std::invalid_argument("nfa parse error at line " +
                                  std::to_string(lineno) + ": unknown key '" +
                                  key + "'");
    }
  }
  return a;
}

std::string serialize_nfa(const Nfa& a) {
  std::ostringstream os;
  os << "alphabet:";
  for (const Letter& l : a.alphabet) os << ' ' << l;
  os << '\n';
  os << "initial:";
  for (const auto& q : a.initial) os << ' ' << q;
  os << '\n';
  os << "final:";
  for (const auto& q : a.final_states) os << ' ' << q;
  os << '\n';
  for (const NfaTransition& t : a.transitions)
    os << "trans: " << t.from << ' ' << (t.label.empty() ? "_" : t.label) << ' '
       << t.to << '\n';
  return os.str();
}

bool nfa_accepts(const Nfa& a, const Word& w) {
  std::set<std::size_t> cur;
  for (const auto& q : a.initial) cur.insert(a.state_index(q));
  cur = eps_closure(a, cur);
  for (const Letter& l : w) {
    std::set<std::size_t> next;
    for (const NfaTransition& t : a.transitions)
      if (t.label == l && cur.count(a.state_index(t.from)))
        next.insert(a.state_index(t.to));
    cur = eps_closure(a, next);
    if (cur.empty()) return false;
  }
  for (const auto& q : a.final_states)
    if (cur.count(a.state_index(q))) return true;
  return false;
}

std::optional<Word> nfa_nonempty_witness(const Nfa& a) {
  // BFS over state sets is unnecessary: BFS over states suffices.
  std::map<std::size_t, Word> best;
  std::queue<std::size_t> bfs;
  for (const auto& q : a.initial) {
    std::size_t i = a.state_index(q);
    if (!best.count(i)) { best[i] = {}; bfs.push(i); }
  }
  while (!bfs.empty()) {
    std::size_t q = bfs.front();
    bfs.pop();
    // Expand deterministically: transitions in declaration order.
    for (const NfaTransition& t : a.transitions) {
      if (a.state_index(t.from) != q) continue;
      std::size_t r = a.state_index(t.to);
      if (best.count(r)) continue;
      Word w = best[q];
      if (!t.label.empty()) w.push_back(t.label);
      best[r] = std::move(w);
      bfs.push(r);
    }
  }
  std::optional<Word> out;
  for (const auto& q : a.final_states) {
    std::size_t i = a.state_index(q);
    auto it = best.find(i);
    if (it == best.end()) continue;
    if (!out || it->second.size() < out->size() ||
        (it->second.size() == out->size() && it->second < *out))
      out = it->second;
  }
  return out;
}

std::vector<Word> nfa_enumerate_words(const Nfa& a, std::size_t maxlen) {
  std::vector<Word> out;
  std::vector<Letter> sigma = a.alphabet;
  std::sort(sigma.begin(), sigma.end());
  // Breadth-first over words by length, membership-checked; fine at desk
  // scale for the small alphabets used in tests and analyses.
  std::vector<Word> layer{{}};
  for (std::size_t len = 0; len <= maxlen; ++len) {
    for (const Word& w : layer)
      if (nfa_accepts(a, w)) out.push_back(w);
    if (len == maxlen) break;
    std::vector<Word> next;
    next.reserve(layer.size() * sigma.size());
    for (const Word& w : layer)
      for (const Letter& l : sigma) {
        Word w2 = w;
        w2.push_back(l);
        next.push_back(std::move(w2));
      }
    layer = std::move(next);
  }
  return out;
}

namespace {

Nfa rename_disjoint(const Nfa& a, const std::string& prefix) {
  Nfa r = a;
  auto ren = [&](const std::string& q) { return prefix + q; };
  for (auto& q : r.states) q = ren(q);
  for (auto& q : r.initial) q = ren(q);
  for (auto& q : r.final_states) q = ren(q);
  for (auto& t : r.transitions) { t.from = ren(t.from); t.to = ren(t.to); }
  return r;
}

std::vector<Letter> merge_alphabets(const std::vector<Letter>& a,
                                    const std::vector<Letter>& b) {
  std::vector<Letter> out = a;
  for (const Letter& l : b)
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  return out;
}

}  // namespace

Nfa nfa_union(const Nfa& a, const Nfa& b) {
  Nfa x = rename_disjoint(a, "u0_");
  Nfa y = rename_disjoint(b, "u1_");
  Nfa r;
  r.alphabet = merge_alphabets(a.alphabet, b.alphabet);
  r.states = x.states;
  r.states.insert(r.states.end(), y.states.begin(), y.states.end());
  r.transitions = x.transitions;
  r.transitions.insert(r.transitions.end(), y.transitions.begin(),
                       y.transitions.end());
  r.initial = x.initial;
  r.initial.insert(r.initial.end(), y.initial.begin(), y.initial.end());
  r.final_states = x.final_states;
  r.final_states.insert(r.final_states.end(), y.final_states.begin(),
                        y.final_states.end());
  return r;
}

Nfa nfa_intersection(const Nfa& a, const Nfa& b) {
  // Product over ε-free determinized forms keeps the construction simple
  // and exact.
  Nfa da = nfa_determinize(a), db = nfa_determinize(b);
  Nfa r;
  r.alphabet = merge_alphabets(a.alphabet, b.alphabet);
  auto name = [](std::size_t i, std::size_t j) {
    return "p" + std::to_string(i) + "_" + std::to_string(j);
  };
  for (std::size_t i = 0; i < da.states.size(); ++i)
    for (std::size_t j = 0; j < db.states.size(); ++j)
      r.states.push_back(name(i, j));
  for (const auto& qa : da.initial)
    for (const auto& qb : db.initial)
      r.initial.push_back(name(da.state_index(qa), db.state_index(qb)));
  for (const auto& qa : da.final_states)
    for (const auto& qb : db.final_states)
      r.final_states.push_back(name(da.state_index(qa), db.state_index(qb)));
  for (const NfaTransition& ta : da.transitions)
    for (const NfaTransition& tb : db.transitions)
      if (ta.label == tb.label)
        r.transitions.push_back(
            {name(da.state_index(ta.from), db.state_index(tb.from)), ta.label,
             name(da.state_index(ta.to), db.state_index(tb.to))});
  return r;
}

Nfa nfa_determinize(const Nfa& a) {
  std::vector<Letter> sigma = a.alphabet;
  std::sort(sigma.begin(), sigma.end());
  sigma.erase(std::unique(sigma.begin(), sigma.end()), sigma.end());

  std::set<std::size_t> start;
  for (const auto& q : a.initial) start.insert(a.state_index(q));
  start = eps_closure(a, start);

  std::map<std::set<std::size_t>, std::size_t> ids;
  std::vector<std::set<std::size_t>> order;
  auto intern = [&](const std::set<std::size_t>& s) {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    std::size_t id = order.size();
    ids[s] = id;
    order.push_back(s);
    return id;
  };

  Nfa d;
  d.alphabet = sigma;
  intern(start);
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::set<std::size_t> cur = order[i];
    for (const Letter& l : sigma) {
      std::set<std::size_t> next;
      for (const NfaTransition& t : a.transitions)
        if (t.label == l && cur.count(a.state_index(t.from)))
          next.insert(a.state_index(t.to));
      next = eps_closure(a, next);
      std::size_t j = intern(next);
      d.transitions.push_back({"d" + std::to_string(i), l, "d" + std::to_string(j)});
    }
  }
  for (std::size_t i = 0; i < order.size(); ++i) d.states.push_back("d" + std::to_string(i));
  d.initial = {"d0"};
  std::set<std::size_t> fin;
  for (const auto& q : a.final_states) fin.insert(a.state_index(q));
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t f : order[i])
      if (fin.count(f)) { d.final_states.push_back("d" + std::to_string(i)); break; }
  return d;
}

Nfa nfa_complement(const Nfa& a) {
  Nfa d = nfa_determinize(a);
  std::set<std::string> fin(d.final_states.begin(), d.final_states.end());
  Nfa r = d;
  r.final_states.clear();
  for (const auto& q : d.states)
    if (!fin.count(q)) r.final_states.push_back(q);
  return r;
}

bool nfa_equivalent(const Nfa& a, const Nfa& b) {
  Nfa d1 = nfa_intersection(a, nfa_complement(b));
  if (nfa_nonempty_witness(d1)) return false;
  Nfa d2 = nfa_intersection(b, nfa_complement(a));
  return !nfa_nonempty_witness(d2).has_value();
}

Nfa nfa_empty(std::vector<Letter> alphabet) {
  Nfa a;
  a.alphabet = std::move(alphabet);
  a.states = {"q0"};
  a.initial = {"q0"};
  return a;
}

Nfa nfa_epsilon(std::vector<Letter> alphabet) {
  Nfa a = nfa_empty(std::move(alphabet));
  a.final_states = {"q0"};
  return a;
}

Nfa nfa_single_word(std::vector<Letter> alphabet, const Word& w) {
  Nfa a;
  a.alphabet = std::move(alphabet);
  for (std::size_t i = 0; i <= w.size(); ++i) a.states.push_back("q" + std::to_string(i));
  a.initial = {"q0"};
  a.final_states = {"q" + std::to_string(w.size())};
  for (std::size_t i = 0; i < w.size(); ++i)
    a.transitions.push_back({"q" + std::to_string(i), w[i], "q" + std::to_string(i + 1)});
  return a;
}

Nfa nfa_universal(std::vector<Letter> alphabet) {
  Nfa a = nfa_epsilon(alphabet);
  for (const Letter& l : a.alphabet) a.transitions.push_back({"q0", l, "q0"});
  return a;
}

Nfa nfa_word_star_product(std::vector<Letter> alphabet,
                          const std::vector<Word>& words) {
  Nfa a;
  a.alphabet = std::move(alphabet);
  std::size_t next = 0;
  auto fresh = [&] { return "s" + std::to_string(next++); };
  std::string hub = fresh();
  a.states.push_back(hub);
  a.initial = {hub};
  std::string prev = hub;
  for (const Word& w : words) {
    // Cycle for w* anchored at 'prev', then ε-advance to a new hub.
    std::string at = prev;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      std::string nxt = fresh();
      a.states.push_back(nxt);
      a.transitions.push_back({at, w[i], nxt});
      at = nxt;
    }
    if (!w.empty()) a.transitions.push_back({at, w.back(), prev});
    std::string hub2 = fresh();
    a.states.push_back(hub2);
    a.transitions.push_back({prev, "", hub2});
    prev = hub2;
  }
  a.final_states = {prev};
  return a;
}

Nfa nfa_at_least_k_blocks(const std::vector<Letter>& letters, std::size_t k) {
  Nfa a;
  a.alphabet = letters;
  std::size_t id = 0;
  auto fresh = [&] { return "k" + std::to_string(id++); };
  std::string cur = fresh();
  a.states.push_back(cur);
  a.initial = {cur};
  for (const Letter& l : letters) {
    // Block: exactly ≥ k occurrences of l, then move on.
    for (std::size_t i = 0; i < k; ++i) {
      std::string nxt = fresh();
      a.states.push_back(nxt);
      a.transitions.push_back({cur, l, nxt});
      cur = nxt;
    }
    a.transitions.push_back({cur, l, cur});
  }
  a.final_states = {cur};
  return a;
}

// ---------------------------------------------------------------------------
// NfaSystem

namespace {

/// Run payload: accepting transition-index sequence.
class NfaRunData final : public RunData {
 public:
  std::vector<std::size_t> trans;
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

const NfaRunData& as_nfa_run(const Run& r) {
  auto* p = dynamic_cast<const NfaRunData*>(r.get());
  if (!p) throw std::invalid_argument("run does not belong to an NFA system");
  return *p;
}

}  // namespace

NfaSystem::NfaSystem(Nfa a, std::string name) : a_(std::move(a)), name_(std::move(name)) {}

Run NfaSystem::make_run(const std::vector<std::size_t>& transition_indices) const {
  auto rd = std::make_shared<NfaRunData>();
  rd->trans = transition_indices;
  rd->ser = serialize_indices(transition_indices);
  // Validate.
  std::string cur;
  for (std::size_t k = 0; k < transition_indices.size(); ++k) {
    const NfaTransition& t = a_.transitions.at(transition_indices[k]);
    if (k == 0) {
      if (std::find(a_.initial.begin(), a_.initial.end(), t.from) == a_.initial.end())
        throw std::invalid_argument("run does not start in an initial state");
    } else if (t.from != cur) {
      throw std::invalid_argument("run states do not chain");
    }
    cur = t.to;
  }
  if (transition_indices.empty()) {
    bool ok = false;
    for (const auto& q : a_.initial)
      if (std::find(a_.final_states.begin(), a_.final_states.end(), q) !=
          a_.final_states.end())
        ok = true;
    if (!ok) throw std::invalid_argument("empty run not accepting");
  } else if (std::find(a_.final_states.begin(), a_.final_states.end(), cur) ==
             a_.final_states.end()) {
    throw std::invalid_argument("run does not end in a final state");
  }
  return rd;
}

std::vector<Run> NfaSystem::enumerate_runs(std::size_t max_size) const {
  std::vector<Run> out;
  std::vector<std::size_t> seq;
  // Depth-first over transition sequences; indices ascending gives the
  // lexicographic tie-break for equal sizes after the final sort.
  std::function<void(const std::string*, std::size_t)> rec =
      [&](const std::string* state, std::size_t len) {
        if (std::find(a_.final_states.begin(), a_.final_states.end(), *state) !=
            a_.final_states.end()) {
          auto rd = std::make_shared<NfaRunData>();
          rd->trans = seq;
          rd->ser = serialize_indices(seq);
          out.push_back(rd);
        }
        if (len == max_size) return;
        for (std::size_t i = 0; i < a_.transitions.size(); ++i)
          if (a_.transitions[i].from == *state) {
            seq.push_back(i);
            rec(&a_.transitions[i].to, len + 1);
            seq.pop_back();
          }
      };
  // Distinct initial states can yield the same empty run only if duplicated
  // in the initial list; dedupe at the end.
  for (const auto& q0 : a_.initial) {
    seq.clear();
    rec(&q0, 0);
  }
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

Decomposition NfaSystem::canon(const Run& rho) const {
  const NfaRunData& r = as_nfa_run(rho);
  Decomposition d;
  d.reserve(r.trans.size());
  for (std::size_t i : r.trans) d.push_back(a_.transitions.at(i).label);
  return d;
}

std::vector<MonotoneMap> NfaSystem::admissible_embeddings(const Run& rho,
                                                          const Run& sigma) const {
  const NfaRunData& r = as_nfa_run(rho);
  const NfaRunData& s = as_nfa_run(sigma);
  // Every gap segment of sigma must be a loop at the state where it is
  // inserted.  Interior gaps are loops automatically because mapped
  // positions carry the same transition; the two boundary segments are
  // loops exactly when the runs share start and end states.
  auto start_of = [&](const NfaRunData& x) -> std::string {
    if (!x.trans.empty()) return a_.transitions.at(x.trans.front()).from;
    for (const auto& q : a_.initial)
      if (std::find(a_.final_states.begin(), a_.final_states.end(), q) !=
          a_.final_states.end())
        return q;
    return a_.initial.empty() ? std::string{} : a_.initial.front();
  };
  auto end_of = [&](const NfaRunData& x) -> std::string {
    return x.trans.empty() ? start_of(x) : a_.transitions.at(x.trans.back()).to;
  };
  if (start_of(r) != start_of(s) || end_of(r) != end_of(s)) return {};
  return enumerate_embeddings_by_predicate(
      r.trans.size(), s.trans.size(),
      [&](std::size_t i, std::size_t j) { return r.trans[i - 1] == s.trans[j - 1]; });
}

AmalgamResult NfaSystem::amalgamate(const Run& rho0, const MonotoneMap& f,
                                    const Run& rho1, const MonotoneMap& g,
                                    const Run& rho2, std::size_t gap) const {
  const NfaRunData& r0 = as_nfa_run(rho0);
  const NfaRunData& r1 = as_nfa_run(rho1);
  const NfaRunData& r2 = as_nfa_run(rho2);
  std::size_t n = r0.trans.size();
  if (f.domain_len() != n || g.domain_len() != n || gap > n)
    throw std::invalid_argument("nfa amalgamate: bad arguments");

  std::vector<std::size_t> out;
  std::vector<std::size_t> img1, img2;  // images of rho1/rho2 positions in rho3
  img1.resize(r1.trans.size());
  img2.resize(r2.trans.size());
  // Gap segment boundaries: treat f(0)=0, f(n+1)=m+1.
  auto seg = [&](const MonotoneMap& h, const NfaRunData& r, std::size_t j,
                 std::size_t* lo, std::size_t* hi) {
    *lo = (j == 0) ? 1 : h(j) + 1;
    *hi = (j == n) ? r.trans.size() : h(j + 1) - 1;
  };
  for (std::size_t j = 0; j <= n; ++j) {
    std::size_t lo1, hi1, lo2, hi2;
    seg(f, r1, j, &lo1, &hi1);
    seg(g, r2, j, &lo2, &hi2);
    // ρ1's gap loop first at every gap; this also realizes G_{i,f}·G_{i,g}
    // at the chosen gap.
    (void)gap;
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
  res.rho3 = make_run(out);
  res.f_prime = MonotoneMap{img1, out.size()};
  res.g_prime = MonotoneMap{img2, out.size()};
  return res;
}

Verdict NfaSystem::emptiness(const Budget&) const {
  auto w = nfa_nonempty_witness(a_);
  if (!w) return Verdict::neg({{"reason", "no accepting path"}});
  return Verdict::pos({{"word", word_str(*w)}});
}

Run NfaSystem::parse_run(const std::string& text) const {
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

std::shared_ptr<const System> NfaSystem::transduce(const Transducer& t) const {
  return std::make_shared<NfaSystem>(apply_to_nfa(a_, t), name_ + "+T");
}

}  // namespace amalgam
