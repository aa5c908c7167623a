// support.hpp -- shared test utilities: fixture loading and independent
// regular-language oracles used to cross-check the semi-decision procedures.
#pragma once

#include <string>
#include <vector>

#include "amalgam/nfa.hpp"
#include "amalgam/system.hpp"

namespace testsupport {

using namespace amalgam;

/// Absolute path of a file under tests/fixtures.
std::string fixture_path(const std::string& name);
std::string read_fixture(const std::string& name);

/// Loads a system fixture by extension (.nfa, .vass, .cfg, .cext); grammar
/// and descriptor @references resolve inside the fixture directory.
SystemPtr load_fixture(const std::string& name);

/// Word from a compact string, one letter per character.
Word w(const std::string& s);
/// All words over the alphabet with length <= maxlen, by (length, lex).
std::vector<Word> all_words(const std::vector<Letter>& alphabet,
                            std::size_t maxlen);
/// Yields of all runs of s up to the run-size cap, deduplicated, restricted
/// to lengths <= maxlen.
std::vector<Word> sample_yields(const System& s, std::size_t max_run_size,
                                std::size_t maxlen);

/// Exact SUP oracle for regular languages: L(a) must satisfy
/// L ⊆ a1*…an*; SUP holds iff L ∩ a1^{≥k}…an^{≥k} ≠ ∅ at k = |Q|+1
/// (loops pump any larger k).  Throws if the shape constraint fails.
bool regular_sup_oracle(const Nfa& a, const std::vector<Letter>& letters);

/// Exact boundedness oracle for regular languages, via growth: L is
/// unbounded iff the trim determinization has a state with two distinct
/// equal-length cycle words (exponential growth criterion).
bool regular_bounded_oracle(const Nfa& a);

/// Brute-force subword downward closure of `language`, restricted to words
/// of length <= maxlen.
std::vector<Word> subword_closure(const std::vector<Word>& language,
                                  std::size_t maxlen);

}  // namespace testsupport
