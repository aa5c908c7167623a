// wqo.hpp -- order-theoretic primitives: strictly monotone maps, scattered
// word embeddings over quasi-ordered alphabets, homeomorphic tree embedding.
#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace amalgam {

/// A single letter. Letters are nonempty strings; the empty string is
/// reserved for the empty-word factor in canonical decompositions.
using Letter = std::string;
/// A word over some alphabet.
using Word = std::vector<Letter>;
/// One factor of a canonical decomposition: a letter or "" (the empty word).
using Factor = std::string;
/// A canonical decomposition: a sequence of factors.
using Decomposition = std::vector<Factor>;

/// Concatenates the non-empty factors of a decomposition into the yield.
Word decomposition_yield(const Decomposition& dec);

/// Renders a word for diagnostics; letters joined by interpuncts when any
/// letter has more than one character, plain concatenation otherwise.
std::string word_str(const Word& w);

/// A strictly monotone map [1, domain_len] -> [1, target_len], stored as the
/// 1-based image sequence.
struct MonotoneMap {
  std::vector<std::size_t> image;
  std::size_t target_len = 0;

  std::size_t domain_len() const { return image.size(); }
  std::size_t operator()(std::size_t i) const { return image.at(i - 1); }
  bool strictly_monotone() const;
  bool operator==(const MonotoneMap& o) const = default;
};

/// The identity map on [1, n].
MonotoneMap identity_map(std::size_t n);

/// Composition g∘f: first f, then g. Throws on length mismatch.
MonotoneMap compose_maps(const MonotoneMap& f, const MonotoneMap& g);

/// Whether index j lies in the image of f.
bool in_image(const MonotoneMap& f, std::size_t j);
/// Preimage of j under f (1-based); 0 when j is not in the image.
std::size_t preimage(const MonotoneMap& f, std::size_t j);

/// A quasi-ordered finite alphabet given as an explicit relation; infinite
/// orders are passed around as plain predicates instead.
struct OrderedAlphabet {
  std::vector<Letter> elements;
  std::function<bool(const Letter&, const Letter&)> leq;

  /// Equality order over the given letters.
  static OrderedAlphabet equality(std::vector<Letter> elems);
  /// Validates reflexivity and transitivity exhaustively; throws on failure.
  void validate() const;
};

/// Position-level embedding enumeration: all strictly monotone maps
/// [1,n] -> [1,m] with pos_leq(i, j) for every mapped pair, in lexicographic
/// image order.
std::vector<MonotoneMap> enumerate_embeddings_by_predicate(
    std::size_t n, std::size_t m,
    const std::function<bool(std::size_t, std::size_t)>& pos_leq);

/// All scattered-word embeddings of u into v with u(i) ≤ v(f(i)).
std::vector<MonotoneMap> enumerate_word_embeddings(const Word& u, const Word& v,
                                                   const OrderedAlphabet& alpha);

/// Existence-only subsequence check (dynamic programming; no enumeration).
bool word_embeds(const Word& u, const Word& v,
                 const std::function<bool(const Letter&, const Letter&)>& leq);

/// A finite ordered tree with letter labels.
struct LabelledTree {
  Letter label;
  std::vector<LabelledTree> children;
};

/// Homeomorphic tree embedding: t1 ≤_T t2 iff some subtree of t2 has a
/// root label ≥ t1's and children into which t1's children embed as a
/// subsequence (recursively).
bool tree_embeds_homeomorphic(const LabelledTree& t1, const LabelledTree& t2,
                              const OrderedAlphabet& alpha);

}  // namespace amalgam
