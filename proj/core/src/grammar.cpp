#include "amalgam/grammar.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "amalgam/nfa.hpp"
#include "amalgam/transducer.hpp"

namespace amalgam {

bool CGrammar::is_nonterminal(const Letter& l) const {
  return std::find(nonterminals.begin(), nonterminals.end(), l) !=
         nonterminals.end();
}

// ---------------------------------------------------------------------------
// Derivation-tree run nodes.  A node owns an inner run (the applied rule word)
// and one child per nonterminal occurrence in that run's yield.  All canonical
// bookkeeping (wrapped decomposition length, block starts) is cached here.
// ---------------------------------------------------------------------------
namespace {

class TreeRunData final : public RunData {
 public:
  std::string nt;
  Run inner;
  std::vector<Run> children;
  Decomposition inner_canon;
  std::vector<std::size_t> nt_pos;  // 1-based inner-canon positions of NTs
  std::vector<std::size_t> block;   // block[j-1] = start slot of factor j
  std::vector<std::size_t> width;   // width[j-1] = slot width of factor j
  std::size_t canon_len = 0;
  std::size_t sz = 0;
  std::string ser;

  std::string serialize() const override { return ser; }
  std::size_t size() const override { return sz; }
};

const TreeRunData& as_tree(const Run& r) {
  auto* p = dynamic_cast<const TreeRunData*>(r.get());
  if (!p) throw std::invalid_argument("expected a derivation-tree run");
  return *p;
}

// Child index (0-based) of the NT factor at inner-canon position pos.
std::size_t child_index(const TreeRunData& t, std::size_t pos) {
  auto it = std::find(t.nt_pos.begin(), t.nt_pos.end(), pos);
  if (it == t.nt_pos.end())
    throw std::invalid_argument("position is not a nonterminal factor");
  return static_cast<std::size_t>(it - t.nt_pos.begin());
}

}  // namespace

GrammarSystem::GrammarSystem(CGrammar g, std::string name)
    : g_(std::move(g)), name_(std::move(name)) {
  for (const auto& n : g_.nonterminals)
    if (!g_.inner.count(n))
      throw std::invalid_argument("nonterminal without inner system: " + n);
}

Run GrammarSystem::make_tree(const std::string& nt, const Run& inner_run,
                             const std::vector<Run>& children) const {
  auto it = g_.inner.find(nt);
  if (it == g_.inner.end())
    throw std::invalid_argument("unknown nonterminal: " + nt);
  auto node = std::make_shared<TreeRunData>();
  node->nt = nt;
  node->inner = inner_run;
  node->children = children;
  node->inner_canon = it->second->canon(inner_run);
  for (std::size_t j = 1; j <= node->inner_canon.size(); ++j)
    if (g_.is_nonterminal(node->inner_canon[j - 1])) node->nt_pos.push_back(j);
  if (node->nt_pos.size() != children.size())
    throw std::invalid_argument("child count does not match nonterminal "
                                "occurrences in the rule word");
  std::size_t at = 2;  // slot 1 is the leading padding factor
  node->sz = 1 + inner_run->size();
  std::size_t ci = 0;
  std::string cser;
  for (std::size_t j = 1; j <= node->inner_canon.size(); ++j) {
    node->block.push_back(at);
    std::size_t w = 1;
    if (g_.is_nonterminal(node->inner_canon[j - 1])) {
      const auto& ch = as_tree(children[ci]);
      w = ch.canon_len + 2;
      node->sz += ch.sz;
      if (ci) cser += ",";
      cser += ch.ser;
      ++ci;
    }
    node->width.push_back(w);
    at += w;
  }
  node->canon_len = at;  // blocks end at at-1; trailing padding at slot `at`
  node->ser = "(" + nt + ":" + inner_run->serialize() + ")[" + cser + "]";
  return node;
}

const std::string& GrammarSystem::tree_nt(const Run& tree) const {
  return as_tree(tree).nt;
}
Run GrammarSystem::tree_inner(const Run& tree) const {
  return as_tree(tree).inner;
}
std::vector<Run> GrammarSystem::tree_children(const Run& tree) const {
  return as_tree(tree).children;
}

Run GrammarSystem::subtree(const Run& tree,
                           const std::vector<std::size_t>& path) const {
  Run cur = tree;
  for (std::size_t i : path) {
    const auto& t = as_tree(cur);
    if (i >= t.children.size()) throw std::out_of_range("bad tree path");
    cur = t.children[i];
  }
  return cur;
}

std::size_t GrammarSystem::ix_offset(const Run& tree,
                                     const std::vector<std::size_t>& path) const {
  std::size_t off = 0;
  Run cur = tree;
  for (std::size_t i : path) {
    const auto& t = as_tree(cur);
    if (i >= t.children.size()) throw std::out_of_range("bad tree path");
    off += t.block[t.nt_pos[i] - 1];  // child slots start right after the
                                      // block's left padding factor
    cur = t.children[i];
  }
  return off;
}

Decomposition GrammarSystem::canon(const Run& rho) const {
  const auto& t = as_tree(rho);
  Decomposition out;
  out.push_back("");
  std::size_t ci = 0;
  for (std::size_t j = 1; j <= t.inner_canon.size(); ++j) {
    if (g_.is_nonterminal(t.inner_canon[j - 1])) {
      out.push_back("");
      Decomposition sub = canon(t.children[ci++]);
      out.insert(out.end(), sub.begin(), sub.end());
      out.push_back("");
    } else {
      out.push_back(t.inner_canon[j - 1]);
    }
  }
  out.push_back("");
  assert(out.size() == t.canon_len);
  return out;
}

// ---------------------------------------------------------------------------
// Structural embeddings and their index materialization.
// ---------------------------------------------------------------------------

std::vector<TreeEmbedding> GrammarSystem::tree_embeddings(const Run& t1r,
                                                          const Run& t2r) const {
  const auto& t1 = as_tree(t1r);
  std::vector<TreeEmbedding> out;
  // Enumerate candidate subtree positions of t2 in preorder.
  std::vector<std::pair<std::vector<std::size_t>, Run>> stack{{{}, t2r}};
  std::vector<std::pair<std::vector<std::size_t>, Run>> pre;
  while (!stack.empty()) {
    auto [p, r] = stack.back();
    stack.pop_back();
    pre.push_back({p, r});
    const auto& t = as_tree(r);
    for (std::size_t i = t.children.size(); i-- > 0;) {
      auto q = p;
      q.push_back(i);
      stack.push_back({q, t.children[i]});
    }
  }
  std::sort(pre.begin(), pre.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  auto inner_sys = g_.inner.at(t1.nt);
  for (const auto& [p, subr] : pre) {
    const auto& sub = as_tree(subr);
    if (sub.nt != t1.nt) continue;
    for (const auto& phi : inner_sys->admissible_embeddings(t1.inner, sub.inner)) {
      // Per-child embedding alternatives; factor preservation of phi ensures
      // the image factor of each NT position is the same nonterminal.
      std::vector<std::vector<TreeEmbedding>> alts;
      bool ok = true;
      for (std::size_t i = 0; i < t1.nt_pos.size(); ++i) {
        std::size_t tgt = child_index(sub, phi(t1.nt_pos[i]));
        auto sube = tree_embeddings(t1.children[i], sub.children[tgt]);
        if (sube.empty()) {
          ok = false;
          break;
        }
        alts.push_back(std::move(sube));
      }
      if (!ok) continue;
      std::vector<std::size_t> pick(alts.size(), 0);
      while (true) {
        TreeEmbedding e;
        e.path = p;
        e.inner = phi;
        for (std::size_t i = 0; i < alts.size(); ++i)
          e.children.push_back(alts[i][pick[i]]);
        out.push_back(std::move(e));
        std::size_t i = alts.size();
        while (i > 0 && ++pick[i - 1] == alts[i - 1].size()) pick[--i] = 0;
        if (i == 0) break;
      }
      if (alts.empty()) continue;  // single combination already emitted
    }
  }
  return out;
}

MonotoneMap GrammarSystem::materialize(const Run& t1r, const Run& t2r,
                                       const TreeEmbedding& e) const {
  const auto& t1 = as_tree(t1r);
  Run subr = subtree(t2r, e.path);
  const auto& sub = as_tree(subr);
  std::size_t ix = ix_offset(t2r, e.path);
  MonotoneMap m;
  m.target_len = as_tree(t2r).canon_len;
  m.image.resize(t1.canon_len, 0);
  m.image[0] = ix + 1;                          // leading padding factor
  m.image[t1.canon_len - 1] = ix + sub.canon_len;  // trailing padding factor
  std::size_t ci = 0;
  for (std::size_t j = 1; j <= t1.inner_canon.size(); ++j) {
    std::size_t src = t1.block[j - 1];
    std::size_t tj = e.inner(j);
    std::size_t tstart = sub.block[tj - 1];
    if (!g_.is_nonterminal(t1.inner_canon[j - 1])) {
      m.image[src - 1] = ix + tstart;
      continue;
    }
    std::size_t tw = sub.width[tj - 1];
    m.image[src - 1] = ix + tstart;                 // left padding
    m.image[src + t1.width[j - 1] - 2] = ix + tstart + tw - 1;  // right padding
    std::size_t tci = child_index(sub, tj);
    MonotoneMap cm = materialize(t1.children[ci], sub.children[tci],
                                 e.children[ci]);
    for (std::size_t k = 1; k <= cm.image.size(); ++k)
      m.image[src + k - 1] = ix + tstart + cm(k);
    ++ci;
  }
  return m;
}

std::vector<MonotoneMap> GrammarSystem::admissible_embeddings(
    const Run& rho, const Run& sigma) const {
  std::vector<MonotoneMap> out;
  for (const auto& e : tree_embeddings(rho, sigma))
    out.push_back(materialize(rho, sigma, e));
  std::sort(out.begin(), out.end(),
            [](const MonotoneMap& a, const MonotoneMap& b) {
              return a.image < b.image;
            });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const MonotoneMap& a, const MonotoneMap& b) {
                          return a.image == b.image;
                        }),
            out.end());
  return out;
}

Run GrammarSystem::tree_substitute(const Run& pi,
                                   const std::vector<std::size_t>& p,
                                   const Run& tau) const {
  if (p.empty()) {
    if (as_tree(pi).nt != as_tree(tau).nt)
      throw std::invalid_argument("substitution must preserve the root label");
    return tau;
  }
  const auto& t = as_tree(pi);
  auto kids = t.children;
  kids[p[0]] = tree_substitute(kids[p[0]],
                               std::vector<std::size_t>(p.begin() + 1, p.end()),
                               tau);
  return make_tree(t.nt, t.inner, kids);
}

// ---------------------------------------------------------------------------
// Tree amalgamation.
// ---------------------------------------------------------------------------

struct GrammarSystem::StructuralAmalgam {
  Run tree;
  TreeEmbedding f;  // first run into the amalgam
  TreeEmbedding g;  // second run into the amalgam
};

namespace {

TreeEmbedding identity_tree_embedding(const TreeRunData& t,
                                      const GrammarSystem& sys);

TreeEmbedding identity_tree_embedding_run(const Run& r,
                                          const GrammarSystem& sys) {
  return identity_tree_embedding(as_tree(r), sys);
}

TreeEmbedding identity_tree_embedding(const TreeRunData& t,
                                      const GrammarSystem& sys) {
  TreeEmbedding e;
  e.inner = identity_map(t.inner_canon.size());
  for (const auto& c : t.children)
    e.children.push_back(identity_tree_embedding_run(c, sys));
  return e;
}

// Embedding of `tree` into tree-with-subtree-at-`path`-replaced, where the
// old subtree embeds into the replacement via `sub`.
TreeEmbedding spine_embedding(const Run& tree,
                              const std::vector<std::size_t>& path,
                              const TreeEmbedding& sub,
                              const GrammarSystem& sys) {
  if (path.empty()) return sub;
  const auto& t = as_tree(tree);
  TreeEmbedding e;
  e.inner = identity_map(t.inner_canon.size());
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    if (i == path[0])
      e.children.push_back(spine_embedding(
          t.children[i],
          std::vector<std::size_t>(path.begin() + 1, path.end()), sub, sys));
    else
      e.children.push_back(identity_tree_embedding_run(t.children[i], sys));
  }
  return e;
}

// Locates a wrapped-gap index within a node: either strictly inside the block
// of child `child` (with translated child gap) or at root level between
// blocks (with the inner-run gap index).
struct GapLoc {
  bool in_child = false;
  std::size_t child = 0;
  std::size_t child_gap = 0;
  std::size_t inner_gap = 0;
};

GapLoc classify_gap(const TreeRunData& t, const CGrammar& g, std::size_t x) {
  GapLoc loc;
  std::size_t ci = 0;
  std::size_t ig = 0;
  for (std::size_t j = 1; j <= t.inner_canon.size(); ++j) {
    std::size_t b = t.block[j - 1];
    std::size_t w = t.width[j - 1];
    if (g.is_nonterminal(t.inner_canon[j - 1])) {
      if (x >= b && x <= b + w - 2) {
        loc.in_child = true;
        loc.child = ci;
        loc.child_gap = x - b;
        return loc;
      }
      ++ci;
    }
    if (b + w - 1 <= x) ig = j;
  }
  loc.inner_gap = ig;
  return loc;
}

}  // namespace

GrammarSystem::StructuralAmalgam GrammarSystem::amalg_structural(
    const Run& t0r, const TreeEmbedding& femb, const Run& t1r,
    const TreeEmbedding& gemb, const Run& t2r,
    std::optional<std::size_t> gap) const {
  const auto& t0 = as_tree(t0r);
  Run pi1 = subtree(t1r, femb.path);
  Run pi2 = subtree(t2r, gemb.path);
  const auto& p1 = as_tree(pi1);
  const auto& p2 = as_tree(pi2);
  auto inner_sys = g_.inner.at(t0.nt);

  std::size_t x = gap.value_or(0);
  bool tail_order = gap.has_value() && x == t0.canon_len;  // second run outer
  GapLoc loc;
  if (gap.has_value() && x > 0 && x < t0.canon_len)
    loc = classify_gap(t0, g_, x);

  AmalgamResult inner = inner_sys->amalgamate(
      t0.inner, femb.inner, p1.inner, gemb.inner, p2.inner,
      loc.in_child ? 0 : loc.inner_gap);

  // Assemble the amalgam node's children from the three provenance cases.
  Decomposition c3 = inner_sys->canon(inner.rho3);
  TreeEmbedding f0, g0;
  f0.inner = inner.f_prime;
  g0.inner = inner.g_prime;
  std::vector<Run> kids;
  for (std::size_t j3 = 1; j3 <= c3.size(); ++j3) {
    if (!g_.is_nonterminal(c3[j3 - 1])) continue;
    std::size_t xp = preimage(inner.f_prime, j3);
    std::size_t yp = preimage(inner.g_prime, j3);
    if (xp && yp) {
      std::size_t x0 = preimage(femb.inner, xp);
      if (!x0 || gemb.inner(x0) != yp)
        throw std::logic_error("amalgam image intersection is not the base");
      std::size_t k = child_index(t0, x0);
      std::optional<std::size_t> cg;
      if (loc.in_child && loc.child == k) cg = loc.child_gap;
      else if (gap.has_value()) cg = 0;
      StructuralAmalgam rec = amalg_structural(
          t0.children[k], femb.children[k], p1.children[child_index(p1, xp)],
          gemb.children[k], p2.children[child_index(p2, yp)], cg);
      kids.push_back(rec.tree);
      f0.children.push_back(std::move(rec.f));
      g0.children.push_back(std::move(rec.g));
    } else if (xp) {
      const Run& c = p1.children[child_index(p1, xp)];
      kids.push_back(c);
      f0.children.push_back(identity_tree_embedding_run(c, *this));
    } else if (yp) {
      const Run& c = p2.children[child_index(p2, yp)];
      kids.push_back(c);
      g0.children.push_back(identity_tree_embedding_run(c, *this));
    } else {
      throw std::logic_error("amalgam nonterminal without provenance");
    }
  }
  Run pi = make_tree(t0.nt, inner.rho3, kids);

  StructuralAmalgam res;
  if (!tail_order) {
    // First run is the outer context: t3 = t1[p <- t2[p' <- pi]].
    Run x2 = tree_substitute(t2r, gemb.path, pi);
    res.tree = tree_substitute(t1r, femb.path, x2);
    TreeEmbedding at_p = f0;
    at_p.path = gemb.path;
    // When femb.path is empty, spine_embedding returns at_p itself and its
    // path into the substituted subtree must survive.
    res.f = spine_embedding(t1r, femb.path, at_p, *this);
    res.g = spine_embedding(t2r, gemb.path, g0, *this);
    res.g.path = femb.path;
  } else {
    // Second run is the outer context: t3 = t2[p' <- t1[p <- pi]].
    Run x1 = tree_substitute(t1r, femb.path, pi);
    res.tree = tree_substitute(t2r, gemb.path, x1);
    TreeEmbedding at_p = g0;
    at_p.path = femb.path;
    res.g = spine_embedding(t2r, gemb.path, at_p, *this);
    res.f = spine_embedding(t1r, femb.path, f0, *this);
    res.f.path = gemb.path;
  }
  return res;
}

AmalgamResult GrammarSystem::amalgamate(const Run& rho0, const MonotoneMap& f,
                                        const Run& rho1, const MonotoneMap& g,
                                        const Run& rho2,
                                        std::size_t gap) const {
  auto find_structural = [&](const Run& a, const Run& b,
                             const MonotoneMap& m) -> TreeEmbedding {
    for (const auto& e : tree_embeddings(a, b))
      if (materialize(a, b, e).image == m.image) return e;
    throw std::invalid_argument("map is not an admissible tree embedding");
  };
  TreeEmbedding fe = find_structural(rho0, rho1, f);
  TreeEmbedding ge = find_structural(rho0, rho2, g);
  if (gap > as_tree(rho0).canon_len) throw std::out_of_range("bad gap index");
  StructuralAmalgam s = amalg_structural(rho0, fe, rho1, ge, rho2, gap);
  AmalgamResult out;
  out.rho3 = s.tree;
  out.f_prime = materialize(rho1, s.tree, s.f);
  out.g_prime = materialize(rho2, s.tree, s.g);
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration, emptiness, parsing, transduction.
// ---------------------------------------------------------------------------

std::vector<Run> GrammarSystem::enumerate_runs(std::size_t max_size) const {
  std::map<std::pair<std::string, std::size_t>, std::vector<Run>> memo;
  std::function<std::vector<Run>(const std::string&, std::size_t)> gen =
      [&](const std::string& nt, std::size_t budget) -> std::vector<Run> {
    auto key = std::make_pair(nt, budget);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    memo[key] = {};  // guards against left recursion within a budget level
    std::vector<Run> out;
    if (budget == 0) {
      memo[key] = out;
      return out;
    }
    auto inner_sys = g_.inner.at(nt);
    for (const auto& r : inner_sys->enumerate_runs(budget - 1)) {
      Decomposition c = inner_sys->canon(r);
      std::vector<std::string> nts;
      for (const auto& f : c)
        if (g_.is_nonterminal(f)) nts.push_back(f);
      std::size_t rest = budget - 1 - r->size();
      if (nts.size() > rest) continue;  // each child costs at least one node
      std::vector<std::vector<Run>> combos{{}};
      std::vector<std::vector<Run>> next;
      for (std::size_t i = 0; i < nts.size() && !combos.empty(); ++i) {
        next.clear();
        for (const auto& pref : combos) {
          std::size_t used = 0;
          for (const auto& pr : pref) used += pr->size();
          std::size_t left = rest - used - (nts.size() - 1 - i);
          for (const auto& ch : gen(nts[i], left)) {
            auto ext = pref;
            ext.push_back(ch);
            next.push_back(std::move(ext));
          }
        }
        combos.swap(next);
      }
      for (const auto& kids : combos) out.push_back(make_tree(nt, r, kids));
    }
    std::sort(out.begin(), out.end(), [](const Run& a, const Run& b) {
      if (a->size() != b->size()) return a->size() < b->size();
      return a->serialize() < b->serialize();
    });
    memo[key] = out;
    return out;
  };
  return gen(g_.start, max_size);
}

Verdict GrammarSystem::emptiness(const Budget& budget) const {
  // Productive-nonterminal fixpoint: a nonterminal is productive when its
  // inner language restricted to (terminals + productive nonterminals)* is
  // nonempty.  Inner emptiness may itself be three-valued.
  std::set<std::string> productive;
  std::size_t steps = 0;
  bool exhausted = false;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& nt : g_.nonterminals) {
      if (productive.count(nt)) continue;
      std::vector<Letter> allowed = g_.terminals;
      for (const auto& p : productive) allowed.push_back(p);
      Nfa filt = nfa_universal(allowed);
      auto filtered = g_.inner.at(nt)->transduce(filter_transducer(filt));
      Verdict v = filtered->emptiness(budget);
      steps += v.steps_used;
      if (v.value == VerdictValue::Positive) {
        productive.insert(nt);
        changed = true;
      } else if (v.value == VerdictValue::BudgetExhausted) {
        exhausted = true;
      }
    }
  }
  if (productive.count(g_.start)) {
    // Re-derive a witness tree by bounded enumeration for the certificate.
    for (std::size_t s = 1; s <= budget.max_run_size; ++s) {
      auto runs = enumerate_runs(s);
      if (!runs.empty()) {
        nlohmann::json cert;
        cert["run"] = runs.front()->serialize();
        cert["yield"] = word_str(decomposition_yield(canon(runs.front())));
        return Verdict::pos(cert, steps);
      }
    }
    nlohmann::json cert;
    cert["note"] = "start symbol productive; witness exceeds run-size budget";
    return Verdict::pos(cert, steps);
  }
  if (exhausted) return Verdict::exhausted(steps);
  nlohmann::json cert;
  cert["productive"] = std::vector<std::string>(productive.begin(),
                                                productive.end());
  cert["reason"] = "start symbol is not productive";
  return Verdict::neg(cert, steps);
}

Run GrammarSystem::parse_run(const std::string& text) const {
  // Format: (NT:innerser)[child,child,...] with nesting.
  std::function<Run(const std::string&, std::size_t&)> rec =
      [&](const std::string& s, std::size_t& i) -> Run {
    auto fail = [&]() -> Run {
      throw std::invalid_argument("malformed tree run: " + text);
    };
    if (i >= s.size() || s[i] != '(') return fail();
    ++i;
    std::size_t colon = s.find(':', i);
    if (colon == std::string::npos) return fail();
    std::string nt = s.substr(i, colon - i);
    i = colon + 1;
    int depth = 0;
    std::size_t start = i;
    while (i < s.size() && !(depth == 0 && s[i] == ')')) {
      if (s[i] == '(' || s[i] == '[') ++depth;
      if (s[i] == ')' || s[i] == ']') --depth;
      ++i;
    }
    if (i >= s.size()) return fail();
    std::string innerser = s.substr(start, i - start);
    ++i;
    if (i >= s.size() || s[i] != '[') return fail();
    ++i;
    std::vector<Run> kids;
    while (i < s.size() && s[i] != ']') {
      kids.push_back(rec(s, i));
      if (i < s.size() && s[i] == ',') ++i;
    }
    if (i >= s.size()) return fail();
    ++i;  // ']'
    auto it = g_.inner.find(nt);
    if (it == g_.inner.end())
      throw std::invalid_argument("unknown nonterminal in run: " + nt);
    return make_tree(nt, it->second->parse_run(innerser), kids);
  };
  std::size_t i = 0;
  Run r = rec(text, i);
  if (i != text.size())
    throw std::invalid_argument("trailing characters in tree run: " + text);
  if (as_tree(r).nt != g_.start)
    throw std::invalid_argument("tree run is not rooted at the start symbol");
  return r;
}

std::shared_ptr<const System> GrammarSystem::transduce(
    const Transducer& t) const {
  // Triple construction: nonterminals <p,A,q> derive the T-outputs of words
  // derived from A along a transducer path from p to q.
  CGrammar out;
  out.terminals = t.output_alphabet;
  auto triple = [](const std::string& p, const std::string& a,
                   const std::string& q) {
    return "<" + p + "," + a + "," + q + ">";
  };
  for (const auto& p : t.states)
    for (const auto& a : g_.nonterminals)
      for (const auto& q : t.states)
        out.nonterminals.push_back(triple(p, a, q));
  out.nonterminals.push_back("S'");
  out.start = "S'";

  for (const auto& p : t.states) {
    for (const auto& a : g_.nonterminals) {
      for (const auto& q : t.states) {
        // Lifted transducer over N + terminals: terminal letters follow T,
        // nonterminal letters jump between arbitrary states emitting triples.
        Transducer lift;
        lift.states = t.states;
        lift.input_alphabet = g_.terminals;
        for (const auto& n : g_.nonterminals) lift.input_alphabet.push_back(n);
        lift.output_alphabet = out.terminals;
        for (const auto& n : out.nonterminals) lift.output_alphabet.push_back(n);
        lift.initial = {p};
        lift.final_states = {q};
        lift.transitions = t.transitions;
        for (const auto& n : g_.nonterminals)
          for (const auto& r : t.states)
            for (const auto& s : t.states)
              lift.transitions.push_back({r, n, {triple(r, n, s)}, s});
        out.inner[triple(p, a, q)] = g_.inner.at(a)->transduce(lift);
      }
    }
  }
  // Start rules: initial output, a start triple, final output.
  std::vector<Word> words;
  for (const auto& q0 : t.initial) {
    for (const auto& qf : t.final_states) {
      Word w;
      auto io = t.initial_output.find(q0);
      if (io != t.initial_output.end())
        w.insert(w.end(), io->second.begin(), io->second.end());
      w.push_back(triple(q0, g_.start, qf));
      auto fo = t.final_output.find(qf);
      if (fo != t.final_output.end())
        w.insert(w.end(), fo->second.begin(), fo->second.end());
      words.push_back(w);
    }
  }
  Nfa start_nfa = nfa_empty(out.terminals);
  for (const auto& n : out.nonterminals) start_nfa.alphabet.push_back(n);
  {
    std::size_t wi = 0;
    for (const auto& w : words) {
      std::string prev = "w" + std::to_string(wi) + "_0";
      start_nfa.states.push_back(prev);
      start_nfa.initial.push_back(prev);
      for (std::size_t i = 0; i < w.size(); ++i) {
        std::string nxt = "w" + std::to_string(wi) + "_" + std::to_string(i + 1);
        start_nfa.states.push_back(nxt);
        start_nfa.transitions.push_back({prev, w[i], nxt});
        prev = nxt;
      }
      start_nfa.final_states.push_back(prev);
      ++wi;
    }
    if (words.empty()) {
      start_nfa.states.push_back("w0_0");
      start_nfa.initial.push_back("w0_0");
    }
  }
  out.inner["S'"] = std::make_shared<NfaSystem>(start_nfa, id() + ".start");
  return std::make_shared<GrammarSystem>(std::move(out), id() + ".T");
}

// ---------------------------------------------------------------------------
// Parsing the grammar text format.
// ---------------------------------------------------------------------------

CGrammar parse_cgrammar(
    const std::string& text,
    const std::function<SystemPtr(const std::string&)>& loader) {
  CGrammar g;
  std::vector<std::pair<std::string, std::string>> rule_lines;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("grammar line " + std::to_string(lineno) +
                                  ": expected 'key: value'");
    std::string key = line.substr(0, colon);
    std::string val = line.substr(colon + 1);
    std::size_t vb = val.find_first_not_of(" \t");
    val = vb == std::string::npos ? "" : val.substr(vb);
    if (key == "start") {
      g.start = val;
    } else {
      g.nonterminals.push_back(key);
      rule_lines.push_back({key, val});
    }
  }
  if (g.start.empty())
    throw std::invalid_argument("grammar is missing a start line");
  std::set<Letter> terms;
  for (const auto& [nt, rhs] : rule_lines) {
    if (!rhs.empty() && rhs[0] == '@') continue;
    std::istringstream rs(rhs);
    std::string tok;
    while (rs >> tok)
      if (tok != "|" && tok != "_" &&
          std::find(g.nonterminals.begin(), g.nonterminals.end(), tok) ==
              g.nonterminals.end())
        terms.insert(tok);
  }
  g.terminals.assign(terms.begin(), terms.end());
  for (const auto& [nt, rhs] : rule_lines) {
    if (!rhs.empty() && rhs[0] == '@') {
      g.inner[nt] = loader(rhs.substr(1));
      continue;
    }
    // Finite language: one chain of states per alternative.
    Nfa n;
    n.alphabet = g.terminals;
    for (const auto& x : g.nonterminals) n.alphabet.push_back(x);
    std::vector<std::vector<std::string>> alts{{}};
    std::istringstream rs(rhs);
    std::string tok;
    while (rs >> tok) {
      if (tok == "|") alts.push_back({});
      else if (tok != "_") alts.back().push_back(tok);
    }
    std::size_t ai = 0;
    for (const auto& alt : alts) {
      std::string prev = nt + "_" + std::to_string(ai) + "_0";
      n.states.push_back(prev);
      n.initial.push_back(prev);
      if (alt.empty()) {
        // A single silent step keeps the empty rule visible in the
        // canonical decomposition.
        std::string nxt = nt + "_" + std::to_string(ai) + "_1";
        n.states.push_back(nxt);
        n.transitions.push_back({prev, "", nxt});
        prev = nxt;
      }
      for (std::size_t i = 0; i < alt.size(); ++i) {
        std::string nxt = nt + "_" + std::to_string(ai) + "_" +
                          std::to_string(i + 1);
        n.states.push_back(nxt);
        n.transitions.push_back({prev, alt[i], nxt});
        prev = nxt;
      }
      n.final_states.push_back(prev);
      ++ai;
    }
    g.inner[nt] = std::make_shared<NfaSystem>(n, "rules." + nt);
  }
  return g;
}

}  // namespace amalgam
