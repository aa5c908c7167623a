// system.cpp -- gap words, axiom harness, decorations, dovetailing.
#include "amalgam/system.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace amalgam {

Verdict Verdict::pos(nlohmann::json cert, std::uint64_t steps) {
  return Verdict{VerdictValue::Positive, std::move(cert), steps};
}
Verdict Verdict::neg(nlohmann::json cert, std::uint64_t steps) {
  return Verdict{VerdictValue::Negative, std::move(cert), steps};
}
Verdict Verdict::exhausted(std::uint64_t steps) {
  return Verdict{VerdictValue::BudgetExhausted, nullptr, steps};
}

const char* verdict_name(VerdictValue v) {
  switch (v) {
    case VerdictValue::Positive: return "Positive";
    case VerdictValue::Negative: return "Negative";
    default: return "BudgetExhausted";
  }
}

std::vector<std::size_t> yield_positions(const Decomposition& dec) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dec.size(); ++i)
    if (!dec[i].empty()) out.push_back(i + 1);
  return out;
}

GapProfile gap_words(const System& s, const Run& rho, const Run& sigma,
                     const MonotoneMap& f) {
  Decomposition cu = s.canon(rho);
  Decomposition cv = s.canon(sigma);
  if (f.domain_len() != cu.size() || f.target_len != cv.size())
    throw std::invalid_argument("gap_words: map does not fit decompositions");
  for (std::size_t i = 1; i <= cu.size(); ++i)
    if (cv[f(i) - 1] != cu[i - 1])
      throw std::invalid_argument("gap_words: factor mismatch under map");

  auto slice = [&](std::size_t lo, std::size_t hi) {  // positions lo..hi
    Word w;
    for (std::size_t j = lo; j <= hi && j >= 1; ++j)
      if (!cv[j - 1].empty()) w.push_back(cv[j - 1]);
    return w;
  };
  std::size_t n = cu.size(), m = cv.size();
  GapProfile p;
  p.embedding = f;
  if (n == 0) {
    p.gaps.push_back(slice(1, m));
    return p;
  }
  p.gaps.push_back(f(1) >= 2 ? slice(1, f(1) - 1) : Word{});
  for (std::size_t i = 1; i < n; ++i)
    p.gaps.push_back(f(i) + 1 <= f(i + 1) - 1 ? slice(f(i) + 1, f(i + 1) - 1)
                                              : Word{});
  p.gaps.push_back(f(n) + 1 <= m ? slice(f(n) + 1, m) : Word{});
  return p;
}

namespace {

std::string describe(const Run& r) { return r->serialize(); }

Word concat(const Word& a, const Word& b) {
  Word w = a;
  w.insert(w.end(), b.begin(), b.end());
  return w;
}

}  // namespace

AxiomReport check_amalgamation_axioms(const System& s, const Budget& budget) {
  AxiomReport rep;
  std::vector<Run> runs = s.enumerate_runs(budget.max_run_size);

  // Cache embedding sets.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<MonotoneMap>> emb;
  auto embeds = [&](std::size_t a, std::size_t b) -> const std::vector<MonotoneMap>& {
    auto key = std::make_pair(a, b);
    auto it = emb.find(key);
    if (it == emb.end())
      it = emb.emplace(key, s.admissible_embeddings(runs[a], runs[b])).first;
    return it->second;
  };

  // (a) Every admissible embedding is a factor-respecting word embedding,
  // and composition closure holds.
  for (std::size_t a = 0; a < runs.size(); ++a) {
    for (std::size_t b = 0; b < runs.size(); ++b) {
      const auto& eab = embeds(a, b);
      ++rep.pairs_checked;
      for (const MonotoneMap& f : eab) {
        if (!f.strictly_monotone()) {
          rep.violations.push_back("non-monotone embedding " + describe(runs[a]) +
                                   " -> " + describe(runs[b]));
          continue;
        }
        try {
          (void)gap_words(s, runs[a], runs[b], f);
        } catch (const std::exception& e) {
          rep.violations.push_back(std::string("embedding not factor-respecting: ") +
                                   e.what());
        }
      }
      if (eab.empty()) continue;
      for (std::size_t c = 0; c < runs.size(); ++c) {
        const auto& ebc = embeds(b, c);
        if (ebc.empty()) continue;
        const auto& eac = embeds(a, c);
        for (const MonotoneMap& f : eab)
          for (const MonotoneMap& g : ebc) {
            MonotoneMap h = compose_maps(f, g);
            if (std::find(eac.begin(), eac.end(), h) == eac.end())
              rep.violations.push_back("composition not admissible: " +
                                       describe(runs[a]) + " -> " +
                                       describe(runs[b]) + " -> " +
                                       describe(runs[c]));
          }
      }
    }
  }

  // (b) Amalgamation: for every rho0 ⊴_f rho1, rho0 ⊴_g rho2 and every gap.
  for (std::size_t a = 0; a < runs.size(); ++a) {
    std::size_t n = s.canon(runs[a]).size();
    for (std::size_t b = 0; b < runs.size(); ++b) {
      const auto& eab = embeds(a, b);
      if (eab.empty()) continue;
      for (std::size_t c = 0; c < runs.size(); ++c) {
        const auto& eac = embeds(a, c);
        if (eac.empty()) continue;
        for (const MonotoneMap& f : eab)
          for (const MonotoneMap& g : eac)
            for (std::size_t i = 0; i <= n; ++i) {
              ++rep.triples_checked;
              AmalgamResult res;
              try {
                res = s.amalgamate(runs[a], f, runs[b], g, runs[c], i);
              } catch (const std::exception& e) {
                rep.violations.push_back(std::string("amalgamate threw: ") +
                                         e.what());
                continue;
              }
              // f', g' admissible and h = f'∘f = g'∘g.
              GapProfile pf, pg, ph, p1, p2;
              try {
                p1 = gap_words(s, runs[b], res.rho3, res.f_prime);
                p2 = gap_words(s, runs[c], res.rho3, res.g_prime);
                pf = gap_words(s, runs[a], runs[b], f);
                pg = gap_words(s, runs[a], runs[c], g);
              } catch (const std::exception& e) {
                rep.violations.push_back(std::string("amalgam embeddings invalid: ") +
                                         e.what());
                continue;
              }
              MonotoneMap h1 = compose_maps(f, res.f_prime);
              MonotoneMap h2 = compose_maps(g, res.g_prime);
              if (!(h1 == h2)) {
                rep.violations.push_back("f'∘f != g'∘g for base " +
                                         describe(runs[a]));
                continue;
              }
              ph = gap_words(s, runs[a], res.rho3, h1);
              // Returned embeddings must themselves be admissible.
              const auto& eb3 = s.admissible_embeddings(runs[b], res.rho3);
              const auto& ec3 = s.admissible_embeddings(runs[c], res.rho3);
              if (std::find(eb3.begin(), eb3.end(), res.f_prime) == eb3.end())
                rep.violations.push_back("f' not admissible for base " +
                                         describe(runs[a]));
              if (std::find(ec3.begin(), ec3.end(), res.g_prime) == ec3.end())
                rep.violations.push_back("g' not admissible for base " +
                                         describe(runs[a]));
              for (std::size_t j = 0; j <= n; ++j) {
                const Word& gj = ph.gaps[j];
                Word fg = concat(pf.gaps[j], pg.gaps[j]);
                Word gf = concat(pg.gaps[j], pf.gaps[j]);
                if (j == i) {
                  if (gj != fg)
                    rep.violations.push_back(
                        "chosen-gap equation failed at gap " + std::to_string(j) +
                        " base " + describe(runs[a]) + ": got " + word_str(gj) +
                        " want " + word_str(fg));
                } else if (gj != fg && gj != gf) {
                  rep.violations.push_back(
                      "gap equation failed at gap " + std::to_string(j) +
                      " base " + describe(runs[a]) + ": got " + word_str(gj));
                }
              }
            }
      }
    }
  }
  return rep;
}

std::vector<Word> sample_gap_language(const System& s, const Run& rho,
                                      std::size_t i, const Budget& budget) {
  std::size_t n = s.canon(rho).size();
  if (i > n) throw std::out_of_range("sample_gap_language: gap index");
  std::set<Word> seen;
  for (const Run& sigma : s.enumerate_runs(budget.max_run_size))
    for (const MonotoneMap& f : s.admissible_embeddings(rho, sigma))
      seen.insert(gap_words(s, rho, sigma, f).gaps[i]);
  return {seen.begin(), seen.end()};
}

std::vector<MonotoneMap> decorated_embeddings(
    const System& s, const DecoratedRun& a, const DecoratedRun& b,
    const std::function<bool(const std::string&, const std::string&)>& x_leq) {
  Decomposition ca = s.canon(a.base), cb = s.canon(b.base);
  std::vector<std::size_t> ya = yield_positions(ca), yb = yield_positions(cb);
  if (a.decoration.size() != ya.size() || b.decoration.size() != yb.size())
    throw std::invalid_argument("decorated_embeddings: decoration length mismatch");
  // Map canon position -> yield index (0 if an ε factor).
  auto yield_index = [](const std::vector<std::size_t>& ys, std::size_t pos) {
    auto it = std::lower_bound(ys.begin(), ys.end(), pos);
    if (it == ys.end() || *it != pos) return std::size_t{0};
    return static_cast<std::size_t>(it - ys.begin()) + 1;
  };
  std::vector<MonotoneMap> out;
  for (const MonotoneMap& f : s.admissible_embeddings(a.base, b.base)) {
    bool ok = true;
    for (std::size_t i = 1; i <= f.domain_len() && ok; ++i) {
      std::size_t ia = yield_index(ya, i);
      if (ia == 0) continue;  // ε factor carries no decoration
      std::size_t ib = yield_index(yb, f(i));
      if (ib == 0 || !x_leq(a.decoration[ia - 1], b.decoration[ib - 1])) ok = false;
    }
    if (ok) out.push_back(f);
  }
  return out;
}

Verdict dovetail(const StepProc& positive_proc, const StepProc& negative_proc,
                 std::uint64_t max_steps) {
  // A procedure may emit a BudgetExhausted verdict to signal it has
  // saturated its own bounds; it is then withdrawn from scheduling, and the
  // overall result is exhausted only when both sides have saturated.
  std::uint64_t pos_stage = 0, neg_stage = 0;
  bool pos_done = false, neg_done = false;
  for (std::uint64_t step = 0; step < max_steps; ++step) {
    if (pos_done && neg_done) return Verdict::exhausted(step);
    bool pick_pos = (step % 2 == 0 && !pos_done) || neg_done;
    if (pick_pos) {
      if (auto v = positive_proc(pos_stage++)) {
        if (v->value == VerdictValue::BudgetExhausted) {
          pos_done = true;
          continue;
        }
        v->steps_used = step + 1;
        return *v;
      }
    } else {
      if (auto v = negative_proc(neg_stage++)) {
        if (v->value == VerdictValue::BudgetExhausted) {
          neg_done = true;
          continue;
        }
        v->steps_used = step + 1;
        return *v;
      }
    }
  }
  return Verdict::exhausted(max_steps);
}

}  // namespace amalgam
