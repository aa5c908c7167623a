#include "amalgam/analyses.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "amalgam/transducer.hpp"

namespace amalgam {

std::vector<std::size_t> parikh(const Word& w,
                                const std::vector<Letter>& letters) {
  std::vector<std::size_t> counts(letters.size(), 0);
  for (const auto& a : w) {
    auto it = std::find(letters.begin(), letters.end(), a);
    if (it != letters.end()) ++counts[it - letters.begin()];
  }
  return counts;
}

namespace {

// Bounded search for a run whose yield escapes the given regular language;
// used for shape preconditions (L ⊆ a1*⋯an*, L ⊆ a*).
std::optional<Word> bounded_escape(const SystemPtr& s, const Nfa& shape,
                                   std::size_t max_size) {
  for (const auto& r : s->enumerate_runs(max_size)) {
    Word y = s->yield_of(r);
    if (!nfa_accepts(shape, y)) return y;
  }
  return std::nullopt;
}

std::vector<Word> letter_words(const std::vector<Letter>& letters) {
  std::vector<Word> out;
  for (const auto& a : letters) out.push_back(Word{a});
  return out;
}

}  // namespace

Verdict decide_sup(const SystemPtr& s, const std::vector<Letter>& letters,
                   const Budget& budget) {
  if (letters.empty()) {
    // Zero designated letters: the block intersection is the language
    // itself, so SUP degenerates to nonemptiness.
    return s->emptiness(budget);
  }
  std::vector<Letter> alpha = s->alphabet();
  for (const auto& a : letters)
    if (std::find(alpha.begin(), alpha.end(), a) == alpha.end())
      alpha.push_back(a);
  Nfa shape = nfa_word_star_product(alpha, letter_words(letters));
  if (auto esc = bounded_escape(s, shape, budget.max_run_size))
    throw std::invalid_argument("language is not contained in the block "
                                "shape: found " + word_str(*esc));

  StepProc positive = [&](std::uint64_t t) -> std::optional<Verdict> {
    if (t > budget.max_run_size) return Verdict::exhausted();
    auto runs = s->enumerate_runs(static_cast<std::size_t>(t));
    for (const auto& rho : runs) {
      std::vector<std::size_t> pr = parikh(s->yield_of(rho), letters);
      for (const auto& sigma : runs) {
        std::vector<std::size_t> ps = parikh(s->yield_of(sigma), letters);
        bool strict = true;
        for (std::size_t i = 0; i < letters.size(); ++i)
          if (ps[i] <= pr[i]) {
            strict = false;
            break;
          }
        if (!strict) continue;
        if (s->admissible_embeddings(rho, sigma).empty()) continue;
        nlohmann::json cert;
        cert["rho"] = rho->serialize();
        cert["sigma"] = sigma->serialize();
        cert["parikh_rho"] = pr;
        cert["parikh_sigma"] = ps;
        return Verdict::pos(cert);
      }
    }
    return std::nullopt;
  };
  std::uint64_t neg_cap = std::max<std::uint64_t>(16, 4 * budget.max_run_size);
  StepProc negative = [&](std::uint64_t k) -> std::optional<Verdict> {
    if (k > neg_cap) return Verdict::exhausted();
    Nfa blocks = nfa_at_least_k_blocks(letters, static_cast<std::size_t>(k));
    auto filtered = s->transduce(filter_transducer(blocks));
    Verdict v = filtered->emptiness(budget);
    if (v.value == VerdictValue::Negative) {
      nlohmann::json cert;
      cert["k"] = k;
      cert["emptiness"] = v.certificate;
      return Verdict::neg(cert);
    }
    return std::nullopt;
  };
  return dovetail(positive, negative, budget.max_steps);
}

Verdict bounded_expression_inclusion(const SystemPtr& s,
                                     const std::vector<Word>& words,
                                     const Budget& budget) {
  std::vector<Letter> alpha = s->alphabet();
  for (const auto& w : words)
    for (const auto& a : w)
      if (std::find(alpha.begin(), alpha.end(), a) == alpha.end())
        alpha.push_back(a);
  Nfa expr = words.empty() ? nfa_epsilon(alpha)
                           : nfa_word_star_product(alpha, words);
  auto filtered = s->transduce(filter_transducer(nfa_complement(expr)));
  Verdict v = filtered->emptiness(budget);
  std::vector<std::string> expr_strs;
  for (const auto& w : words) expr_strs.push_back(word_str(w));
  if (v.value == VerdictValue::Negative) {
    nlohmann::json cert;
    cert["expression"] = expr_strs;
    cert["emptiness"] = v.certificate;
    return Verdict::pos(cert, v.steps_used);
  }
  if (v.value == VerdictValue::Positive) {
    nlohmann::json cert;
    cert["expression"] = expr_strs;
    cert["escape"] = v.certificate;
    return Verdict::neg(cert, v.steps_used);
  }
  return Verdict::exhausted(v.steps_used);
}

namespace {

bool primitive_word(const Word& w) {
  for (std::size_t p = 1; p <= w.size() / 2; ++p) {
    if (w.size() % p) continue;
    bool periodic = true;
    for (std::size_t i = p; i < w.size() && periodic; ++i)
      if (w[i] != w[i - p]) periodic = false;
    if (periodic) return false;
  }
  return true;
}

// All nonempty words of the given length over a sorted alphabet, lex order.
std::vector<Word> words_of_length(const std::vector<Letter>& alpha,
                                  std::size_t len) {
  std::vector<Word> out{{}};
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<Word> next;
    for (const auto& w : out)
      for (const auto& a : alpha) {
        Word v = w;
        v.push_back(a);
        next.push_back(std::move(v));
      }
    out.swap(next);
  }
  return out;
}

bool prefix_of(const Word& a, const Word& b) {
  if (a.size() > b.size()) return false;
  return std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

Verdict decide_boundedness(const SystemPtr& s, const Budget& budget) {
  std::vector<Letter> alpha = s->alphabet();
  std::sort(alpha.begin(), alpha.end());
  // Cached sample yields for a cheap necessary pre-check of candidate
  // expressions.
  std::vector<Word> sample;
  for (const auto& r : s->enumerate_runs(budget.max_run_size))
    sample.push_back(s->yield_of(r));

  std::uint64_t pos_cap = std::max<std::uint64_t>(6, budget.max_run_size);
  StepProc positive = [&](std::uint64_t t) -> std::optional<Verdict> {
    if (t > pos_cap) return Verdict::exhausted();
    // Stage t: all expressions w1*⋯wk* with total length exactly t,
    // ordered by part count then lexicographically.
    std::vector<std::vector<Word>> tuples;
    if (t == 0) {
      tuples.push_back({});
    } else {
      std::function<void(std::size_t, std::vector<Word>&)> rec =
          [&](std::size_t rest, std::vector<Word>& acc) {
            if (rest == 0) {
              tuples.push_back(acc);
              return;
            }
            for (std::size_t len = 1; len <= rest; ++len)
              for (const auto& w : words_of_length(alpha, len)) {
                if (!primitive_word(w)) continue;
                if (!acc.empty() && acc.back() == w) continue;
                acc.push_back(w);
                rec(rest - len, acc);
                acc.pop_back();
              }
          };
      std::vector<Word> acc;
      rec(static_cast<std::size_t>(t), acc);
      std::stable_sort(tuples.begin(), tuples.end(),
                       [](const auto& a, const auto& b) {
                         return a.size() < b.size();
                       });
    }
    for (const auto& words : tuples) {
      Nfa expr = words.empty() ? nfa_epsilon(alpha)
                               : nfa_word_star_product(alpha, words);
      bool covers = true;
      for (const auto& y : sample)
        if (!nfa_accepts(expr, y)) {
          covers = false;
          break;
        }
      if (!covers) continue;
      Verdict inc = bounded_expression_inclusion(s, words, budget);
      if (inc.value == VerdictValue::Positive)
        return Verdict::pos(inc.certificate);
    }
    return std::nullopt;
  };

  StepProc negative = [&](std::uint64_t t) -> std::optional<Verdict> {
    if (t > budget.max_run_size) return Verdict::exhausted();
    auto runs = s->enumerate_runs(static_cast<std::size_t>(t));
    for (const auto& rho0 : runs) {
      for (const auto& rho1 : runs) {
        if (rho1->size() < rho0->size()) continue;
        for (const auto& rho2 : runs) {
          if (rho2->size() < rho0->size()) continue;
          // Only examine triples with a maximal-size member at this stage so
          // stages partition the search space.
          if (std::max(rho1->size(), rho2->size()) !=
                  static_cast<std::size_t>(t) &&
              rho0->size() != static_cast<std::size_t>(t))
            continue;
          for (const auto& f : s->admissible_embeddings(rho0, rho1)) {
            GapProfile pf = gap_words(*s, rho0, rho1, f);
            for (const auto& g : s->admissible_embeddings(rho0, rho2)) {
              GapProfile pg = gap_words(*s, rho0, rho2, g);
              for (std::size_t i = 0; i < pf.gaps.size(); ++i) {
                const Word& u = pf.gaps[i];
                const Word& v = pg.gaps[i];
                if (prefix_of(u, v) || prefix_of(v, u)) continue;
                nlohmann::json cert;
                cert["rho0"] = rho0->serialize();
                cert["rho1"] = rho1->serialize();
                cert["rho2"] = rho2->serialize();
                cert["f"] = f.image;
                cert["g"] = g.image;
                cert["gap"] = i;
                cert["gap_f"] = word_str(u);
                cert["gap_g"] = word_str(v);
                return Verdict::neg(cert);
              }
            }
          }
        }
      }
    }
    return std::nullopt;
  };
  return dovetail(positive, negative, budget.max_steps);
}

RegularResult compute_unary_regular(const SystemPtr& s, const Budget& budget) {
  std::vector<Letter> alpha = s->alphabet();
  Letter a = alpha.empty() ? "a" : alpha.front();
  Nfa astar = nfa_word_star_product(alpha.empty() ? std::vector<Letter>{a}
                                                  : alpha,
                                    {Word{a}});
  if (auto esc = bounded_escape(s, astar, budget.max_run_size))
    throw std::invalid_argument("language is not unary: found " +
                                word_str(*esc));

  for (std::size_t t = 0; t <= budget.max_run_size; ++t) {
    auto runs = s->enumerate_runs(t);
    std::vector<std::size_t> base_lens;
    for (const auto& r : runs) base_lens.push_back(s->yield_of(r).size());
    // Triples (rho, sigma, tau) with rho embedding into both, deduplicated
    // by (base length, period, period).
    std::set<std::array<std::size_t, 3>> keys;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      for (std::size_t j = 0; j < runs.size(); ++j) {
        if (base_lens[j] < base_lens[i]) continue;
        if (i != j && s->admissible_embeddings(runs[i], runs[j]).empty())
          continue;
        for (std::size_t k = j; k < runs.size(); ++k) {
          if (base_lens[k] < base_lens[i]) continue;
          if (i != k && s->admissible_embeddings(runs[i], runs[k]).empty())
            continue;
          std::size_t p = base_lens[j] - base_lens[i];
          std::size_t q = base_lens[k] - base_lens[i];
          if (p == 0 && q == 0) continue;
          keys.insert({base_lens[i], std::min(p, q), std::max(p, q)});
        }
      }
    }
    // Build S(F,T): the finite yields plus base + p·N + q·N cones.
    Nfa result = nfa_empty({a});
    for (std::size_t l : std::set<std::size_t>(base_lens.begin(),
                                               base_lens.end()))
      result = nfa_union(result, nfa_single_word({a}, Word(l, a)));
    for (const auto& key : keys) {
      auto [l, p, q] = key;
      Nfa cone;
      cone.alphabet = {a};
      std::string prev = "c0";
      cone.states.push_back(prev);
      cone.initial.push_back(prev);
      for (std::size_t i = 0; i < l; ++i) {
        std::string nxt = "c" + std::to_string(i + 1);
        cone.states.push_back(nxt);
        cone.transitions.push_back({prev, a, nxt});
        prev = nxt;
      }
      for (std::size_t period : {p, q}) {
        if (period == 0) continue;
        std::string back = prev;
        std::string cur = prev;
        for (std::size_t i = 1; i < period; ++i) {
          std::string nxt = back + "p" + std::to_string(i);
          cone.states.push_back(nxt);
          cone.transitions.push_back({cur, a, nxt});
          cur = nxt;
        }
        cone.transitions.push_back({cur, a, back});
      }
      cone.final_states.push_back(prev);
      result = nfa_union(result, cone);
    }
    auto filtered = s->transduce(filter_transducer(nfa_complement(result)));
    Verdict v = filtered->emptiness(budget);
    if (v.value == VerdictValue::Negative) {
      nlohmann::json cert;
      cert["witness_sizes"] = t;
      cert["base_lengths"] = base_lens;
      nlohmann::json triples = nlohmann::json::array();
      for (const auto& key : keys)
        triples.push_back({key[0], key[1], key[2]});
      cert["triples"] = triples;
      cert["inclusion"] = v.certificate;
      return {Verdict::pos(cert), result};
    }
  }
  return {Verdict::exhausted(), nfa_empty({a})};
}

// ---------------------------------------------------------------------------
// Subword ideals and downward closures.
// ---------------------------------------------------------------------------

std::string SubwordIdeal::str() const {
  std::string out;
  for (const auto& atom : atoms) {
    if (!out.empty()) out += " ";
    if (std::holds_alternative<Letter>(atom)) {
      out += "(" + std::get<Letter>(atom) + "+e)";
    } else {
      out += "{";
      bool first = true;
      for (const auto& l : std::get<std::set<Letter>>(atom)) {
        if (!first) out += ",";
        out += l;
        first = false;
      }
      out += "}*";
    }
  }
  return out.empty() ? "(e)" : out;
}

bool SubwordIdeal::member(const Word& w) const {
  std::vector<bool> reach(w.size() + 1, false);
  reach[0] = true;
  for (const auto& atom : atoms) {
    std::vector<bool> next(w.size() + 1, false);
    if (std::holds_alternative<Letter>(atom)) {
      const Letter& a = std::get<Letter>(atom);
      for (std::size_t i = 0; i <= w.size(); ++i) {
        if (!reach[i]) continue;
        next[i] = true;
        if (i < w.size() && w[i] == a) next[i + 1] = true;
      }
    } else {
      const auto& gamma = std::get<std::set<Letter>>(atom);
      for (std::size_t i = 0; i <= w.size(); ++i) {
        if (!reach[i]) continue;
        std::size_t j = i;
        next[j] = true;
        while (j < w.size() && gamma.count(w[j])) next[++j] = true;
      }
    }
    reach.swap(next);
  }
  return reach[w.size()];
}

Nfa ideal_to_nfa(const SubwordIdeal& ideal,
                 const std::vector<Letter>& alphabet) {
  Nfa n;
  n.alphabet = alphabet;
  std::string prev = "s0";
  n.states.push_back(prev);
  n.initial.push_back(prev);
  std::size_t i = 0;
  for (const auto& atom : ideal.atoms) {
    std::string nxt = "s" + std::to_string(++i);
    n.states.push_back(nxt);
    if (std::holds_alternative<Letter>(atom)) {
      n.transitions.push_back({prev, std::get<Letter>(atom), nxt});
      n.transitions.push_back({prev, "", nxt});
    } else {
      for (const auto& l : std::get<std::set<Letter>>(atom))
        n.transitions.push_back({prev, l, prev});
      n.transitions.push_back({prev, "", nxt});
    }
    prev = nxt;
  }
  n.final_states.push_back(prev);
  return n;
}

Transducer ideal_round_transducer(const SubwordIdeal& ideal,
                                  const std::vector<Letter>& alphabet,
                                  std::vector<Letter>& markers_out) {
  Transducer t;
  t.input_alphabet = alphabet;
  std::size_t s = ideal.atoms.size();
  // Marker letter per Γ*-atom, in atom order.
  std::map<std::size_t, Letter> marker;
  markers_out.clear();
  for (std::size_t j = 1; j <= s; ++j)
    if (std::holds_alternative<std::set<Letter>>(ideal.atoms[j - 1])) {
      Letter m = "%" + std::to_string(marker.size() + 1);
      marker[j] = m;
      markers_out.push_back(m);
      t.output_alphabet.push_back(m);
    }
  auto boundary = [](std::size_t j) { return "b" + std::to_string(j); };
  auto cyc = [](std::size_t j, std::size_t p) {
    return "c" + std::to_string(j) + "_" + std::to_string(p);
  };
  for (std::size_t j = 0; j <= s; ++j) t.states.push_back(boundary(j));
  // Cycle-start transitions for an atom from a given state.
  auto start_atom = [&](const std::string& from, std::size_t j) {
    const auto& gamma = std::get<std::set<Letter>>(ideal.atoms[j - 1]);
    std::vector<Letter> gs(gamma.begin(), gamma.end());
    if (gs.size() == 1) {
      t.transitions.push_back({from, gs[0], {marker.at(j)}, boundary(j)});
    } else {
      t.transitions.push_back({from, gs[0], {}, cyc(j, 1)});
    }
  };
  for (std::size_t j = 0; j <= s; ++j) {
    if (j >= 1 && std::holds_alternative<std::set<Letter>>(ideal.atoms[j - 1]))
      start_atom(boundary(j), j);  // further rounds of the same atom
    for (std::size_t jj = j + 1; jj <= s; ++jj) {
      if (std::holds_alternative<Letter>(ideal.atoms[jj - 1])) {
        // Mandatory letter atom: matched, never skipped.
        t.transitions.push_back(
            {boundary(j), std::get<Letter>(ideal.atoms[jj - 1]), {},
             boundary(jj)});
        break;
      }
      start_atom(boundary(j), jj);  // Γ*-atoms may contribute zero rounds
    }
  }
  // Mid-cycle states and matches.
  for (std::size_t j = 1; j <= s; ++j) {
    if (!std::holds_alternative<std::set<Letter>>(ideal.atoms[j - 1]))
      continue;
    const auto& gamma = std::get<std::set<Letter>>(ideal.atoms[j - 1]);
    std::vector<Letter> gs(gamma.begin(), gamma.end());
    for (std::size_t p = 1; p + 1 <= gs.size(); ++p) {
      t.states.push_back(cyc(j, p));
      bool last = (p + 1 == gs.size());
      t.transitions.push_back({cyc(j, p), gs[p],
                               last ? Word{marker.at(j)} : Word{},
                               last ? boundary(j) : cyc(j, p + 1)});
    }
  }
  // Free skips anywhere.
  for (const auto& q : t.states)
    for (const auto& a : alphabet) t.transitions.push_back({q, a, {}, q});
  t.initial = {boundary(0)};
  // Accept at any boundary whose remaining atoms are all Γ*.
  bool tail_star = true;
  for (std::size_t j = s;; --j) {
    if (tail_star) t.final_states.push_back(boundary(j));
    if (j == 0) break;
    if (std::holds_alternative<Letter>(ideal.atoms[j - 1])) tail_star = false;
  }
  std::reverse(t.final_states.begin(), t.final_states.end());
  return t;
}

DcResult compute_downward_closure(const SystemPtr& s, const Budget& budget) {
  std::vector<Letter> alpha = s->alphabet();
  std::sort(alpha.begin(), alpha.end());
  std::vector<Word> sample;
  for (const auto& r : s->enumerate_runs(budget.max_run_size))
    sample.push_back(s->yield_of(r));
  std::sort(sample.begin(), sample.end());
  sample.erase(std::unique(sample.begin(), sample.end()), sample.end());

  // Atom choices in canonical order: single letters, then letter sets by
  // (size, lexicographic).
  std::vector<IdealAtom> atom_choices;
  for (const auto& a : alpha) atom_choices.push_back(a);
  {
    std::vector<std::set<Letter>> sets;
    for (std::size_t mask = 1; mask < (1u << alpha.size()); ++mask) {
      std::set<Letter> g;
      for (std::size_t i = 0; i < alpha.size(); ++i)
        if (mask & (1u << i)) g.insert(alpha[i]);
      sets.push_back(std::move(g));
    }
    std::sort(sets.begin(), sets.end(),
              [](const std::set<Letter>& a, const std::set<Letter>& b) {
                if (a.size() != b.size()) return a.size() < b.size();
                return a < b;
              });
    for (auto& g : sets) atom_choices.push_back(std::move(g));
  }

  // Ideals with exactly k atoms, lexicographic in choice indices, generated
  // on demand; caches for sample-membership masks and per-ideal SUP.
  std::vector<SubwordIdeal> ideals;
  std::vector<std::size_t> count_of;
  std::vector<std::vector<bool>> mask_of;
  std::vector<std::optional<VerdictValue>> sup_of;
  std::vector<nlohmann::json> sup_cert_of;
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> range_of_count;
  auto ensure_count = [&](std::size_t k) {
    if (range_of_count.count(k)) return;
    std::size_t lo = ideals.size();
    std::vector<std::size_t> pick(k, 0);
    while (true) {
      SubwordIdeal ideal;
      for (std::size_t i = 0; i < k; ++i)
        ideal.atoms.push_back(atom_choices[pick[i]]);
      std::vector<bool> mask;
      for (const auto& w : sample) mask.push_back(ideal.member(w));
      ideals.push_back(std::move(ideal));
      count_of.push_back(k);
      mask_of.push_back(std::move(mask));
      sup_of.push_back(std::nullopt);
      sup_cert_of.push_back({});
      if (k == 0) break;
      std::size_t i = k;
      while (i > 0 && ++pick[i - 1] == atom_choices.size()) pick[--i] = 0;
      if (i == 0) break;
    }
    range_of_count[k] = {lo, ideals.size()};
  };

  std::uint64_t steps = 0;
  bool exhausted_seen = false;
  auto verify_ideal = [&](std::size_t idx) -> VerdictValue {
    if (!sup_of[idx]) {
      std::vector<Letter> markers;
      Transducer t = ideal_round_transducer(ideals[idx], alpha, markers);
      Verdict v = decide_sup(s->transduce(t), markers, budget);
      steps += v.steps_used + 1;
      sup_of[idx] = v.value;
      sup_cert_of[idx] = v.certificate;
    }
    return *sup_of[idx];
  };

  for (std::size_t total = 0; steps <= budget.max_steps; ++total) {
    // Enumerate unions as nondecreasing index sequences with the given
    // total atom count.
    for (std::size_t k = 0; k <= total; ++k) ensure_count(k);
    std::vector<std::vector<std::size_t>> unions;
    std::function<void(std::size_t, std::size_t, std::vector<std::size_t>&)>
        rec = [&](std::size_t rest, std::size_t min_idx,
                  std::vector<std::size_t>& acc) {
          if (rest == 0) {
            if (!acc.empty()) unions.push_back(acc);
            return;
          }
          for (std::size_t k = 1; k <= rest; ++k) {
            auto [lo, hi] = range_of_count[k];
            for (std::size_t idx = std::max(lo, min_idx); idx < hi; ++idx) {
              acc.push_back(idx);
              rec(rest - k, idx, acc);
              acc.pop_back();
            }
          }
        };
    std::vector<std::size_t> acc;
    if (total == 0) {
      // The union of zero ideals covers only the empty language; the ideal
      // {ε} (zero atoms) covers languages containing only ε.
      ensure_count(0);
      unions.push_back({});
      auto [lo, hi] = range_of_count[0];
      for (std::size_t idx = lo; idx < hi; ++idx) unions.push_back({idx});
    } else {
      rec(total, 0, acc);
    }
    for (const auto& u : unions) {
      ++steps;
      // Necessary condition first: every sampled yield lies in the union.
      bool covers = true;
      for (std::size_t wi = 0; wi < sample.size() && covers; ++wi) {
        bool in = false;
        for (std::size_t idx : u)
          if (mask_of[idx][wi]) {
            in = true;
            break;
          }
        covers = in;
      }
      if (!covers) continue;
      // Reject quickly on any member already known not to be below L.
      bool bad = false;
      for (std::size_t idx : u)
        if (sup_of[idx] && *sup_of[idx] != VerdictValue::Positive) {
          bad = true;
          break;
        }
      if (bad) continue;
      for (std::size_t idx : u) {
        VerdictValue v = verify_ideal(idx);
        if (v != VerdictValue::Positive) {
          if (v == VerdictValue::BudgetExhausted) exhausted_seen = true;
          bad = true;
          break;
        }
      }
      if (bad) continue;
      // Exact inclusion L ⊆ D.
      Nfa d = nfa_empty(alpha);
      for (std::size_t idx : u)
        d = nfa_union(d, ideal_to_nfa(ideals[idx], alpha));
      auto filtered = s->transduce(filter_transducer(nfa_complement(d)));
      Verdict v = filtered->emptiness(budget);
      steps += v.steps_used + 1;
      if (v.value == VerdictValue::BudgetExhausted) {
        exhausted_seen = true;
        continue;
      }
      if (v.value == VerdictValue::Positive) continue;
      DcResult res;
      res.nfa = d;
      nlohmann::json cert;
      nlohmann::json parts = nlohmann::json::array();
      for (std::size_t idx : u) {
        res.ideals.push_back(ideals[idx]);
        nlohmann::json p;
        p["ideal"] = ideals[idx].str();
        p["sup"] = sup_cert_of[idx];
        parts.push_back(p);
      }
      cert["ideals"] = parts;
      cert["inclusion"] = v.certificate;
      res.verdict = Verdict::pos(cert, steps);
      return res;
    }
    if (steps > budget.max_steps) break;
  }
  DcResult res;
  res.verdict = Verdict::exhausted(steps);
  res.nfa = nfa_empty(alpha);
  (void)exhausted_seen;
  return res;
}

}  // namespace amalgam
