// nfa.hpp -- nondeterministic finite automata: text format, regular-language
// algebra, and the NFA amalgamation system over transition sequences.
#pragma once

#include <optional>

#include "amalgam/system.hpp"

namespace amalgam {

struct NfaTransition {
  std::string from;
  Factor label;  ///< letter of Σ or "" for ε
  std::string to;
  bool operator==(const NfaTransition&) const = default;
};

struct Nfa {
  std::vector<Letter> alphabet;
  std::vector<std::string> states;
  std::vector<NfaTransition> transitions;
  std::vector<std::string> initial;
  std::vector<std::string> final_states;

  std::size_t state_index(const std::string& q) const;
  bool has_state(const std::string& q) const;
};

/// Parses the line-based text format ('#' comments):
///   alphabet: a b
///   initial: q0
///   final: qf
///   trans: q0 a q1        (ε written _)
Nfa parse_nfa(const std::string& text);
std::string serialize_nfa(const Nfa& a);

bool nfa_accepts(const Nfa& a, const Word& w);
/// Shortest accepted word (lexicographic tie-break), if any.
std::optional<Word> nfa_nonempty_witness(const Nfa& a);
/// All accepted words of length ≤ maxlen, sorted by (length, lex).
std::vector<Word> nfa_enumerate_words(const Nfa& a, std::size_t maxlen);

/// Standard algebra. Inputs may contain ε transitions; determinize and
/// complement produce ε-free automata over the given alphabet.
Nfa nfa_union(const Nfa& a, const Nfa& b);
Nfa nfa_intersection(const Nfa& a, const Nfa& b);
Nfa nfa_determinize(const Nfa& a);
Nfa nfa_complement(const Nfa& a);
/// Semantic equivalence via product/complement (exact).
bool nfa_equivalent(const Nfa& a, const Nfa& b);

/// Builders.
Nfa nfa_empty(std::vector<Letter> alphabet);
Nfa nfa_epsilon(std::vector<Letter> alphabet);
Nfa nfa_single_word(std::vector<Letter> alphabet, const Word& w);
Nfa nfa_universal(std::vector<Letter> alphabet);
/// w1*·w2*⋯wk* as a chain of word cycles.
Nfa nfa_word_star_product(std::vector<Letter> alphabet,
                          const std::vector<Word>& words);
/// a1^{≥k} a2^{≥k} ⋯ an^{≥k} inside a1*⋯an*.
Nfa nfa_at_least_k_blocks(const std::vector<Letter>& letters, std::size_t k);

/// The NFA instance of the amalgamation-system contract: runs are accepting
/// transition sequences, embeddings are equality word embeddings on the
/// transition alphabet, amalgamation splices gap loops.
class NfaSystem final : public System {
 public:
  explicit NfaSystem(Nfa a, std::string name = "nfa");

  std::string id() const override { return name_; }
  std::vector<Letter> alphabet() const override { return a_.alphabet; }
  std::vector<Run> enumerate_runs(std::size_t max_size) const override;
  Decomposition canon(const Run& rho) const override;
  std::vector<MonotoneMap> admissible_embeddings(const Run& rho,
                                                 const Run& sigma) const override;
  AmalgamResult amalgamate(const Run& rho0, const MonotoneMap& f, const Run& rho1,
                           const MonotoneMap& g, const Run& rho2,
                           std::size_t gap) const override;
  Verdict emptiness(const Budget& budget) const override;
  Run parse_run(const std::string& text) const override;
  std::shared_ptr<const System> transduce(const Transducer& t) const override;

  const Nfa& nfa() const { return a_; }
  /// Run from an explicit transition-index sequence (validated).
  Run make_run(const std::vector<std::size_t>& transition_indices) const;

 private:
  Nfa a_;
  std::string name_;
};

}  // namespace amalgam
