// counter.hpp -- partially blind counters: tame effect morphisms, the
// nonnegative-zero-effect language N_d, and the decorated counter extension.
#pragma once

#include <map>

#include "amalgam/system.hpp"

namespace amalgam {

/// A unit-update word over U_d = {0} + {±e_i}, stored as signed coordinate
/// indices: +i increments counter i, -i decrements it, 0 is the zero update.
using UnitUpdateWord = std::vector<int>;

/// Componentwise sum of the updates.
std::vector<long> effect(const UnitUpdateWord& w, std::size_t dim);

/// Membership in N_d: every prefix has nonnegative effect and the total
/// effect is zero.
bool nd_member(const UnitUpdateWord& w, std::size_t dim);

/// A per-letter effect morphism into unit-update words.
struct TameMorphism {
  std::size_t dim = 0;
  std::map<Letter, UnitUpdateWord> images;

  UnitUpdateWord apply(const Word& w) const;
};

/// Tameness: in each image, every increment of a coordinate occurs before
/// every decrement of that coordinate.
bool is_tame(const TameMorphism& eta);

/// An alphabetic relabeling; the empty string erases a letter.
using AlphabeticMorphism = std::map<Letter, Letter>;

/// The counter extension S_{eta,alpha}: accepting decorated runs over
/// counter-valuation pairs, with canon relabeled by alpha.
SystemPtr build_counter_extension(const SystemPtr& base,
                                  const TameMorphism& eta,
                                  const AlphabeticMorphism& alpha,
                                  const std::string& name = "counter-ext");

/// Parsed form of the extension descriptor file.
struct CounterDescriptor {
  SystemPtr base;
  TameMorphism eta;
  AlphabeticMorphism alpha;
};

/// Parses the descriptor format:
///   base: @file
///   dim: 1
///   eta: a -> +1
///   alpha: a -> x     (or `_` to erase)
CounterDescriptor parse_counter_descriptor(
    const std::string& text,
    const std::function<SystemPtr(const std::string&)>& loader);

}  // namespace amalgam
