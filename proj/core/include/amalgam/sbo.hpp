// sbo.hpp -- the simple block order over priority alphabets: comparators,
// the order transducer, the border transformation, ideal algebra,
// pseudo-ideal reduction, witness search, and downward closures.
#pragma once

#include <map>

#include "amalgam/analyses.hpp"
#include "amalgam/nfa.hpp"
#include "amalgam/system.hpp"
#include "amalgam/transducer.hpp"

namespace amalgam {

/// Priorities are given by an ordered letter list: order[i] has priority i.
/// The plain priority alphabet [0,d] is {"0", ..., "d"}.
std::vector<Letter> priority_alphabet(std::size_t d);

/// Rank of a letter within an order; throws when absent.
std::size_t priority_rank(const std::vector<Letter>& order, const Letter& l);

/// Simple block order, with the transducer semantics: skipping a letter
/// forbids emitting subsequent strictly-lower letters until a letter of
/// equal or higher priority is emitted.
bool sbo_leq(const Word& u, const Word& v, const std::vector<Letter>& order);

/// The rational transducer realizing {u : sbo_leq(u, v)} = outputs on v.
Transducer sbo_transducer(const std::vector<Letter>& order);

/// Priority order comparator: u ≤ v iff v = v1u1⋯vnun where u = u1⋯un and
/// every letter of vi has priority at most that of ui.
bool po_leq(const Word& u, const Word& v, const std::vector<Letter>& order);

/// Block order comparator: recursive block embedding with the first block
/// anchored to the first and the last to the last.
bool bo_leq(const Word& u, const Word& v, const std::vector<Letter>& order);

/// Bordered letters: for base letter l, primed(l) and epsmark(l) with
/// l < primed(l) < epsmark(l) < next letter.
Letter primed(const Letter& l);
Letter epsmark(const Letter& l);
/// The bordered order 0 < 0' < 0^e < 1 < ... for the base order.
std::vector<Letter> bordered_order(const std::vector<Letter>& order);

/// The recursive border transformation over the base order.
Word border(const Word& w, const std::vector<Letter>& order);

/// NFA for the bordered shape language (union over all top priorities).
Nfa border_shape_nfa(const std::vector<Letter>& order);

// ---------------------------------------------------------------------------
// Ideals of the simple block order.
// ---------------------------------------------------------------------------

struct SboIdeal;

/// An atom at some priority letter a: I·a (mandatory), (I·a + ε), or (D·a)*
/// with D a finite union of lower ideals.  Mandatory atoms only arise inside
/// the intersection algebra and pseudo-ideals.
struct SboAtom {
  enum class Kind { Mand, Opt, Star };
  Kind kind = Kind::Opt;
  std::vector<SboIdeal> parts;  ///< union members (one for Mand/Opt)
};

/// An ideal: either a base l^{<=n} / l^* (atoms empty), or a sequence of
/// atoms at a common letter followed by a lower-priority tail.
struct SboIdeal {
  bool is_base = true;
  Letter letter;                     ///< base letter, or the atoms' letter
  std::optional<std::size_t> bound;  ///< base: n for l^{<=n}, none for l^*
  std::vector<SboAtom> atoms;
  std::shared_ptr<const SboIdeal> tail;  ///< null means {ε}

  std::string str() const;
  std::size_t size() const;  ///< node count, used for enumeration order
};

SboIdeal sbo_base_bounded(const Letter& l, std::size_t n);
SboIdeal sbo_base_star(const Letter& l);
SboIdeal sbo_epsilon();

/// Parses the bracketed syntax, e.g. `((0* 1)* 0^{<=2})`:
///   l^{<=n}   bounded base        l*   star base
///   (seq l)*  star atom (union members separated by |)
///   (seq l)?  optional atom       (seq l)  mandatory atom
/// Juxtaposition concatenates; a trailing non-atom item is the tail.
SboIdeal parse_sbo_ideal(const std::string& text);

Nfa sbo_ideal_to_nfa(const SboIdeal& ideal, const std::vector<Letter>& order);

/// Membership of a word in the ideal's language.
bool sbo_ideal_member(const SboIdeal& ideal, const Word& w);

/// Whether the ideal is in pseudo form: bases, mandatory-atom sequences,
/// and single-part stars (each optionally followed by a pseudo tail).
bool sbo_is_pseudo(const SboIdeal& ideal);

/// Intersection as a finite union of ideals (may be empty only when
/// mandatory atoms are involved).
std::vector<SboIdeal> sbo_ideal_intersection(const SboIdeal& a,
                                             const SboIdeal& b,
                                             const std::vector<Letter>& order);

/// Result of reducing an ideal to pseudo-ideals: the transducer chain to
/// apply to the system and the pseudo-ideals over the extended order.
struct SboReduction {
  std::vector<Letter> order;        ///< extended priority order
  std::vector<Transducer> chain;    ///< apply in sequence
  std::vector<SboIdeal> pseudos;    ///< all must be included for I ⊆ L↓
};

SboReduction pseudoideal_reduction(const SboIdeal& ideal,
                                   const std::vector<Letter>& order);

/// Searches for an I-witness certifying J ⊆ L(S) for a pseudo-ideal J,
/// where S recognizes a ⪯_S-downward-closed language over the order.
Verdict find_I_witness(const SystemPtr& s, const SboIdeal& pseudo,
                       const std::vector<Letter>& order, const Budget& budget);

/// Downward-closure result for the simple block order.
struct SboDcResult {
  Verdict verdict;
  std::vector<SboIdeal> ideals;
  Nfa nfa;
};

/// Simple-block downward closure of L(S) over the priority alphabet [0,d].
SboDcResult compute_sbo_dc(const SystemPtr& s, std::size_t d,
                           const Budget& budget);

/// Enumerates all ideals over the order with the given node-count size,
/// deterministic order; exposed for the DC loop and tests.
std::vector<SboIdeal> enumerate_sbo_ideals(const std::vector<Letter>& order,
                                           std::size_t size);

}  // namespace amalgam
