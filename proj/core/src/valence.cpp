// valence.cpp -- graph monoids and valence automata: Turing-pattern
// detection, PD decomposition, the rewriting simulator, and compilation into
// NFAs, counter extensions, and state-pair grammars.
#include "amalgam/valence.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "amalgam/counter.hpp"
#include "amalgam/grammar.hpp"

namespace amalgam {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void parse_fail(const char* what, std::size_t lineno,
                             const std::string& detail) {
  throw std::invalid_argument(std::string(what) + " parse error at line " +
                              std::to_string(lineno) + ": " + detail);
}

// `v` / `a_v` for a_v, with a `~` prefix for the inverse generator.
ValenceLetter parse_valence_token(const std::string& tok, std::size_t lineno) {
  std::string body = tok;
  ValenceLetter vl;
  if (!body.empty() && body[0] == '~') {
    vl.bar = true;
    body.erase(0, 1);
  }
  if (body.rfind("a_", 0) == 0) body.erase(0, 2);
  if (body.empty()) parse_fail("valence automaton", lineno, "empty generator");
  vl.vertex = body;
  return vl;
}

std::string valence_token_str(const ValenceLetter& vl) {
  return (vl.bar ? "~a_" : "a_") + vl.vertex;
}

}  // namespace

bool StorageGraph::has_vertex(const Letter& v) const {
  return std::find(vertices.begin(), vertices.end(), v) != vertices.end();
}

bool StorageGraph::adjacent(const Letter& u, const Letter& v) const {
  if (u == v) return loops.count(u) > 0;
  return edges.count({std::min(u, v), std::max(u, v)}) > 0;
}

StorageGraph parse_storage_graph(const std::string& text) {
  StorageGraph g;
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
      parse_fail("storage graph", lineno, "missing ':'");
    std::string key = line.substr(0, colon);
    key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
    std::vector<std::string> toks = split_ws(line.substr(colon + 1));
    if (key == "vertices") {
      for (auto& v : toks)
        if (!g.has_vertex(v)) g.vertices.push_back(v);
    } else if (key == "loops") {
      for (auto& v : toks) {
        if (!g.has_vertex(v)) parse_fail("storage graph", lineno, "unknown vertex '" + v + "'");
        g.loops.insert(v);
      }
    } else if (key == "edges") {
      for (auto& e : toks) {
        auto dash = e.find('-');
        if (dash == std::string::npos)
          parse_fail("storage graph", lineno, "edge '" + e + "' lacks '-'");
        std::string u = e.substr(0, dash), v = e.substr(dash + 1);
        if (!g.has_vertex(u) || !g.has_vertex(v))
          parse_fail("storage graph", lineno, "unknown vertex in edge '" + e + "'");
        if (u == v)
          g.loops.insert(u);
        else
          g.edges.insert({std::min(u, v), std::max(u, v)});
      }
    } else {
      parse_fail("storage graph", lineno, "unknown key '" + key + "'");
    }
  }
  return g;
}

std::string serialize_storage_graph(const StorageGraph& g) {
  std::ostringstream os;
  os << "vertices:";
  for (const Letter& v : g.vertices) os << ' ' << v;
  os << '\n';
  if (!g.loops.empty()) {
    os << "loops:";
    for (const Letter& v : g.loops) os << ' ' << v;
    os << '\n';
  }
  if (!g.edges.empty()) {
    os << "edges:";
    for (const auto& [u, v] : g.edges) os << ' ' << u << '-' << v;
    os << '\n';
  }
  return os.str();
}

ValenceAutomaton parse_valence_automaton(const std::string& text) {
  ValenceAutomaton a;
  auto add_state = [&a](const std::string& q) {
    if (std::find(a.states.begin(), a.states.end(), q) == a.states.end())
      a.states.push_back(q);
  };
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
      parse_fail("valence automaton", lineno, "missing ':'");
    std::string key = line.substr(0, colon);
    key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
    std::vector<std::string> toks = split_ws(line.substr(colon + 1));
    if (key == "alphabet") {
      a.alphabet.insert(a.alphabet.end(), toks.begin(), toks.end());
    } else if (key == "initial") {
      if (toks.size() != 1)
        parse_fail("valence automaton", lineno, "initial expects one state");
      add_state(toks[0]);
      a.initial = toks[0];
    } else if (key == "final") {
      for (auto& q : toks) {
        add_state(q);
        a.final_states.insert(q);
      }
    } else if (key == "trans") {
      if (toks.size() != 3)
        parse_fail("valence automaton", lineno, "trans expects 'from label to'");
      add_state(toks[0]);
      add_state(toks[2]);
      Word input;
      if (toks[1] != "_") input.push_back(toks[1]);
      a.edges.push_back({toks[0], input, {}, toks[2]});
    } else if (key == "val") {
      // val: from input / x1 x2 ... to
      if (toks.size() < 4)
        parse_fail("valence automaton", lineno,
                   "val expects 'from input / tokens to'");
      if (toks[2] != "/")
        parse_fail("valence automaton", lineno, "val expects '/' after the input");
      add_state(toks.front());
      add_state(toks.back());
      ValenceEdge e;
      e.from = toks.front();
      if (toks[1] != "_") e.input.push_back(toks[1]);
      for (std::size_t i = 3; i + 1 < toks.size(); ++i)
        if (toks[i] != "_")
          e.valence.push_back(parse_valence_token(toks[i], lineno));
      e.to = toks.back();
      a.edges.push_back(std::move(e));
    } else {
      parse_fail("valence automaton", lineno, "unknown key '" + key + "'");
    }
  }
  return a;
}

std::string serialize_valence_automaton(const ValenceAutomaton& a) {
  std::ostringstream os;
  os << "alphabet:";
  for (const Letter& l : a.alphabet) os << ' ' << l;
  os << '\n';
  os << "initial: " << a.initial << '\n';
  os << "final:";
  for (const auto& q : a.final_states) os << ' ' << q;
  os << '\n';
  for (const ValenceEdge& e : a.edges) {
    os << "val: " << e.from << ' '
       << (e.input.empty() ? std::string("_") : e.input.front()) << " /";
    if (e.valence.empty()) os << " _";
    for (const ValenceLetter& vl : e.valence) os << ' ' << valence_token_str(vl);
    os << ' ' << e.to << '\n';
  }
  return os.str();
}

bool has_turing_pattern(const StorageGraph& g) {
  const std::size_t n = g.vertices.size();
  // Induced P4 or C4 in the loop-free graph, by exhaustive 4-subsets.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        for (std::size_t l = k + 1; l < n; ++l) {
          const Letter* q[4] = {&g.vertices[i], &g.vertices[j], &g.vertices[k],
                                &g.vertices[l]};
          std::size_t deg[4] = {0, 0, 0, 0};
          std::size_t m = 0;
          for (std::size_t x = 0; x < 4; ++x)
            for (std::size_t y = x + 1; y < 4; ++y)
              if (*q[x] != *q[y] && g.adjacent(*q[x], *q[y])) {
                ++m;
                ++deg[x];
                ++deg[y];
              }
          std::vector<std::size_t> d(deg, deg + 4);
          std::sort(d.begin(), d.end());
          // C4: four edges, all degrees two.  P4: three edges with degree
          // multiset {1,1,2,2} (the only such graph on four vertices is the
          // path; the star has a degree-3 vertex, the triangle-plus-isolated
          // graph has a degree-0 vertex).
          if (m == 4 && d == std::vector<std::size_t>{2, 2, 2, 2}) return true;
          if (m == 3 && d == std::vector<std::size_t>{1, 1, 2, 2}) return true;
        }
  return false;
}

std::string HierarchyExpr::str() const {
  switch (kind) {
    case Kind::Reg:
      return "REG";
    case Kind::PlusN:
      return "PLUS_N(" + children.front().str() + ", " +
             std::to_string(counters) + ")";
    case Kind::Alg: {
      std::string s = "ALG(";
      for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) s += ", ";
        s += children[i].str();
      }
      return s + ")";
    }
  }
  return "REG";
}

namespace {

// Connected components of the induced subgraph, ordered by least member
// (member order = position in g.vertices).
std::vector<std::vector<Letter>> components_of(const StorageGraph& g,
                                               const std::vector<Letter>& vs) {
  std::vector<std::vector<Letter>> comps;
  std::set<Letter> seen;
  for (const Letter& root : vs) {
    if (seen.count(root)) continue;
    std::vector<Letter> comp;
    std::vector<Letter> stack{root};
    seen.insert(root);
    while (!stack.empty()) {
      Letter v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (const Letter& u : vs)
        if (!seen.count(u) && u != v && g.adjacent(u, v)) {
          seen.insert(u);
          stack.push_back(u);
        }
    }
    // Keep the declared vertex order within the component.
    std::sort(comp.begin(), comp.end(), [&vs](const Letter& x, const Letter& y) {
      return std::find(vs.begin(), vs.end(), x) < std::find(vs.begin(), vs.end(), y);
    });
    comps.push_back(std::move(comp));
  }
  return comps;
}

HierarchyExpr decompose_subset(const StorageGraph& g,
                               const std::vector<Letter>& vs) {
  HierarchyExpr e;
  e.vertices = vs;
  if (vs.empty()) {
    e.kind = HierarchyExpr::Kind::Reg;
    return e;
  }
  std::vector<std::vector<Letter>> comps = components_of(g, vs);
  if (comps.size() > 1) {
    e.kind = HierarchyExpr::Kind::Alg;
    for (const auto& comp : comps) e.children.push_back(decompose_subset(g, comp));
    return e;
  }
  // Connected: strip the first universal vertex.
  for (const Letter& u : vs) {
    bool universal = true;
    for (const Letter& v : vs)
      if (v != u && !g.adjacent(u, v)) {
        universal = false;
        break;
      }
    if (!universal) continue;
    e.kind = HierarchyExpr::Kind::PlusN;
    e.vertex = u;
    e.counters = g.loops.count(u) ? 2 : 1;
    std::vector<Letter> rest;
    for (const Letter& v : vs)
      if (v != u) rest.push_back(v);
    e.children.push_back(decompose_subset(g, rest));
    return e;
  }
  // A connected P4/C4-free graph is the comparability graph of a tree and
  // always has a universal vertex; reaching this point indicates a gap.
  throw std::runtime_error(
      "decompose_pd: connected component without a universal vertex");
}

}  // namespace

HierarchyExpr decompose_pd(const StorageGraph& g) {
  if (has_turing_pattern(g))
    throw std::invalid_argument("decompose_pd: graph contains an induced P4 or C4");
  return decompose_subset(g, g.vertices);
}

namespace {

using ValWord = std::vector<ValenceLetter>;

// Shortest-then-lexicographically-least word reachable from w by cancelling
// adjacent a_v ~a_v pairs and swapping adjacent commuting generators.
ValWord canonical_valence(const StorageGraph& g, const ValWord& w,
                          std::map<ValWord, ValWord>& cache) {
  auto it = cache.find(w);
  if (it != cache.end()) return it->second;
  ValWord best = w;
  std::set<ValWord> seen{w};
  std::queue<ValWord> todo;
  todo.push(w);
  while (!todo.empty()) {
    ValWord cur = todo.front();
    todo.pop();
    if (cur.size() < best.size() || (cur.size() == best.size() && cur < best))
      best = cur;
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      if (!cur[i].bar && cur[i + 1].bar && cur[i].vertex == cur[i + 1].vertex) {
        ValWord next(cur.begin(), cur.begin() + i);
        next.insert(next.end(), cur.begin() + i + 2, cur.end());
        if (seen.insert(next).second) todo.push(next);
      }
      if (cur[i] != cur[i + 1] && g.adjacent(cur[i].vertex, cur[i + 1].vertex)) {
        ValWord next = cur;
        std::swap(next[i], next[i + 1]);
        if (seen.insert(next).second) todo.push(next);
      }
    }
  }
  cache.emplace(w, best);
  return best;
}

}  // namespace

bool simulate_valence_membership(const ValenceAutomaton& a,
                                 const StorageGraph& g, const Word& w,
                                 std::size_t length_bound) {
  for (const ValenceEdge& e : a.edges)
    for (const ValenceLetter& vl : e.valence)
      if (!g.has_vertex(vl.vertex))
        throw std::invalid_argument("simulate_valence_membership: generator '" +
                                    valence_token_str(vl) +
                                    "' references an unknown vertex");
  std::map<ValWord, ValWord> cache;
  using Config = std::tuple<std::string, std::size_t, ValWord>;
  std::set<Config> seen;
  std::queue<Config> todo;
  Config start{a.initial, 0, {}};
  seen.insert(start);
  todo.push(start);
  while (!todo.empty()) {
    auto [q, pos, val] = todo.front();
    todo.pop();
    if (pos == w.size() && val.empty() && a.final_states.count(q)) return true;
    for (const ValenceEdge& e : a.edges) {
      if (e.from != q) continue;
      if (pos + e.input.size() > w.size()) continue;
      if (!std::equal(e.input.begin(), e.input.end(), w.begin() + pos)) continue;
      ValWord next = val;
      next.insert(next.end(), e.valence.begin(), e.valence.end());
      next = canonical_valence(g, next, cache);
      if (next.size() > length_bound) continue;
      Config c{e.to, pos + e.input.size(), std::move(next)};
      if (seen.insert(c).second) todo.push(c);
    }
  }
  return false;
}

namespace {

// A normalized step: at most one input letter ("" = none) and at most one
// valence generator.
struct NormEdge {
  std::string from;
  Letter input;  // "" when the step reads nothing
  std::optional<ValenceLetter> val;
  std::string to;
};

struct NormAutomaton {
  std::vector<std::string> states;
  std::vector<NormEdge> edges;
};

NormAutomaton normalize(const ValenceAutomaton& a) {
  NormAutomaton n;
  n.states = a.states;
  auto add_state = [&n](std::string q) {
    n.states.push_back(std::move(q));
  };
  for (std::size_t ei = 0; ei < a.edges.size(); ++ei) {
    const ValenceEdge& e = a.edges[ei];
    std::size_t steps = std::max<std::size_t>(
        {e.input.size(), e.valence.size(), 1});
    std::string prev = e.from;
    for (std::size_t k = 0; k < steps; ++k) {
      std::string cur = k + 1 == steps
                            ? e.to
                            : e.from + "#" + std::to_string(ei) + "." +
                                  std::to_string(k);
      if (k + 1 != steps) add_state(cur);
      NormEdge step;
      step.from = prev;
      step.input = k < e.input.size() ? e.input[k] : Letter{};
      if (k < e.valence.size()) step.val = e.valence[k];
      step.to = cur;
      n.edges.push_back(std::move(step));
      prev = cur;
    }
  }
  return n;
}

struct CompileCtx {
  const StorageGraph& g;
  std::vector<std::string> states;
};

SystemPtr compile_expr(const CompileCtx& ctx, const HierarchyExpr& expr,
                       const std::string& initial,
                       const std::vector<std::string>& finals,
                       const std::vector<NormEdge>& edges,
                       const std::vector<Letter>& alphabet,
                       const std::string& name) {
  switch (expr.kind) {
    case HierarchyExpr::Kind::Reg: {
      Nfa a;
      a.alphabet = alphabet;
      a.states = ctx.states;
      a.initial = {initial};
      a.final_states = finals;
      for (const NormEdge& e : edges) {
        if (e.val)
          throw std::logic_error("compile_valence: unconsumed generator '" +
                                 valence_token_str(*e.val) + "'");
        a.transitions.push_back({e.from, e.input, e.to});
      }
      return std::make_shared<NfaSystem>(std::move(a), name);
    }
    case HierarchyExpr::Kind::PlusN: {
      const Letter& v = expr.vertex;
      const bool looped = expr.counters == 2;
      std::vector<NormEdge> work = edges;
      std::size_t tau_begin = work.size();
      if (looped)
        // Balancing self-loops: a looped vertex is a Z-counter realized as
        // two N-counters, with silent steps decrementing both in lockstep.
        for (const std::string& q : ctx.states)
          work.push_back({q, Letter{}, std::nullopt, q});
      std::vector<NormEdge> child_edges;
      std::vector<Letter> child_alphabet;
      TameMorphism eta;
      eta.dim = expr.counters;
      AlphabeticMorphism alpha;
      for (std::size_t i = 0; i < work.size(); ++i) {
        const NormEdge& e = work[i];
        Letter t = "t" + std::to_string(i);
        UnitUpdateWord upd;
        std::optional<ValenceLetter> child_val = e.val;
        if (i >= tau_begin) {
          upd = {-1, -2};
        } else if (e.val && e.val->vertex == v) {
          upd = e.val->bar ? (looped ? UnitUpdateWord{+2} : UnitUpdateWord{-1})
                           : UnitUpdateWord{+1};
          child_val.reset();
        }
        eta.images[t] = upd;
        alpha[t] = e.input;
        child_alphabet.push_back(t);
        child_edges.push_back({e.from, t, child_val, e.to});
      }
      SystemPtr base = compile_expr(ctx, expr.children.front(), initial, finals,
                                    child_edges, child_alphabet, name + ".base");
      return build_counter_extension(base, eta, alpha, name);
    }
    case HierarchyExpr::Kind::Alg: {
      const std::size_t k = expr.children.size();
      std::vector<std::set<Letter>> comp(k);
      for (std::size_t i = 0; i < k; ++i)
        comp[i].insert(expr.children[i].vertices.begin(),
                       expr.children[i].vertices.end());
      auto nt_name = [](std::size_t i, const std::string& p,
                        const std::string& q) {
        return "A" + std::to_string(i) + "_" + p + "_" + q;
      };
      CGrammar grammar;
      grammar.terminals = alphabet;
      grammar.start = "S";
      grammar.nonterminals.push_back("S");
      for (std::size_t i = 0; i < k; ++i)
        for (const std::string& p : ctx.states)
          for (const std::string& q : ctx.states)
            grammar.nonterminals.push_back(nt_name(i, p, q));
      // Start rules: one factor-i derivation from the initial state to a
      // final state.
      {
        Nfa s;
        s.states = {"s0", "s1"};
        s.initial = {"s0"};
        s.final_states = {"s1"};
        for (std::size_t i = 0; i < k; ++i)
          for (const std::string& f : finals) {
            Letter nt = nt_name(i, initial, f);
            s.alphabet.push_back(nt);
            s.transitions.push_back({"s0", nt, "s1"});
          }
        grammar.inner["S"] = std::make_shared<NfaSystem>(std::move(s), name + ".S");
      }
      for (std::size_t i = 0; i < k; ++i) {
        // The factor-i edge set: valence-free steps, factor-i generators,
        // and jumps that delegate a reduced-to-one segment to another factor.
        std::vector<NormEdge> factor_edges;
        std::vector<Letter> factor_alphabet = alphabet;
        for (const NormEdge& e : edges)
          if (!e.val || comp[i].count(e.val->vertex)) factor_edges.push_back(e);
        for (std::size_t j = 0; j < k; ++j) {
          if (j == i) continue;
          for (const std::string& r : ctx.states)
            for (const std::string& r2 : ctx.states) {
              Letter nt = nt_name(j, r, r2);
              factor_alphabet.push_back(nt);
              factor_edges.push_back({r, nt, std::nullopt, r2});
            }
        }
        for (const std::string& p : ctx.states)
          for (const std::string& q : ctx.states) {
            std::string nt = nt_name(i, p, q);
            grammar.inner[nt] =
                compile_expr(ctx, expr.children[i], p, {q}, factor_edges,
                             factor_alphabet, name + "." + nt);
          }
      }
      return std::make_shared<GrammarSystem>(std::move(grammar), name);
    }
  }
  throw std::logic_error("compile_valence: unreachable");
}

}  // namespace

SystemPtr compile_valence(const ValenceAutomaton& a, const StorageGraph& g,
                          const std::string& name) {
  for (const ValenceEdge& e : a.edges)
    for (const ValenceLetter& vl : e.valence)
      if (!g.has_vertex(vl.vertex))
        throw std::invalid_argument("compile_valence: generator '" +
                                    valence_token_str(vl) +
                                    "' references an unknown vertex");
  HierarchyExpr expr = decompose_pd(g);
  NormAutomaton n = normalize(a);
  CompileCtx ctx{g, n.states};
  std::vector<std::string> finals(a.final_states.begin(), a.final_states.end());
  return compile_expr(ctx, expr, a.initial, finals, n.edges, a.alphabet, name);
}

}  // namespace amalgam
