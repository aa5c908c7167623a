// analyses.hpp -- generic decision procedures over amalgamation systems:
// simultaneous unboundedness (SUP), language boundedness, effective
// regularity of unary languages, and subword downward closures via SUP.
#pragma once

#include <set>
#include <variant>

#include "amalgam/nfa.hpp"
#include "amalgam/system.hpp"

namespace amalgam {

/// Letter counts with respect to a designated letter list.
std::vector<std::size_t> parikh(const Word& w, const std::vector<Letter>& letters);

/// SUP: given L(S) ⊆ a1*⋯an*, is L ∩ a1^{≥k}⋯an^{≥k} nonempty for every k?
/// Positive certificate: a run pair ρ ⊴ σ with strictly increasing counts of
/// every designated letter.  Negative certificate: the failing threshold k.
/// Throws when the language is detectably not of the required shape.
Verdict decide_sup(const SystemPtr& s, const std::vector<Letter>& letters,
                   const Budget& budget);

/// Whether L(S) ⊆ w1*⋯wk* (exactness inherited from S's emptiness oracle).
Verdict bounded_expression_inclusion(const SystemPtr& s,
                                     const std::vector<Word>& words,
                                     const Budget& budget);

/// Boundedness: is L(S) ⊆ w1*⋯wk* for some words w1…wk?  Positive
/// certificate: the expression.  Negative certificate: runs ρ0 ⊴ ρ1, ρ0 ⊴ ρ2
/// with prefix-incomparable words in a common gap.
Verdict decide_boundedness(const SystemPtr& s, const Budget& budget);

/// Result of a computation whose payload is a regular language.
struct RegularResult {
  Verdict verdict;  ///< Positive when nfa below is the certified answer
  Nfa nfa;
};

/// Effective regularity for unary languages: returns an NFA with
/// L(S) = L(nfa), built from a verified witness (F, T) of base runs and
/// embedded run triples.  Requires L(S) ⊆ a* for a single letter a.
RegularResult compute_unary_regular(const SystemPtr& s, const Budget& budget);

/// One ideal atom: a single letter a denotes (a + ε); a letter set Γ
/// denotes Γ*.
using IdealAtom = std::variant<Letter, std::set<Letter>>;

/// A subword ideal: a concatenation of atoms.
struct SubwordIdeal {
  std::vector<IdealAtom> atoms;

  std::string str() const;
  bool member(const Word& w) const;
  std::size_t atom_count() const { return atoms.size(); }
};

Nfa ideal_to_nfa(const SubwordIdeal& ideal, const std::vector<Letter>& alphabet);

/// Downward-closure result: the ideal union and its NFA.
struct DcResult {
  Verdict verdict;
  std::vector<SubwordIdeal> ideals;
  Nfa nfa;
};

/// Computes a regular representation of the subword downward closure of
/// L(S): enumerates ideal unions D (by total atom count, then
/// lexicographically), certifies each ideal I ⊆ L↓ through the SUP
/// reduction, and checks L ⊆ D through S's emptiness oracle.
DcResult compute_downward_closure(const SystemPtr& s, const Budget& budget);

/// The SUP reduction for one ideal: a transducer whose image of L lies in
/// m1*⋯mr* (one marker per Γ*-atom) such that I ⊆ L↓ iff the markers are
/// simultaneously unbounded.  Exposed for tests.
Transducer ideal_round_transducer(const SubwordIdeal& ideal,
                                  const std::vector<Letter>& alphabet,
                                  std::vector<Letter>& markers_out);

}  // namespace amalgam
