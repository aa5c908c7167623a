// system.hpp -- the abstract amalgamation-system contract: runs, canonical
// decompositions, admissible embeddings, gap words, amalgamation, and the
// axiom-checking / scheduling harness shared by all concrete systems.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "amalgam/wqo.hpp"

namespace amalgam {

struct Transducer;  // trio layer; see transducer.hpp

/// Work limits for semi-decision procedures and bounded oracles.
struct Budget {
  std::uint64_t max_steps = 100000;  ///< scheduler step limit
  std::size_t max_run_size = 6;      ///< run enumeration size cap
  long counter_bound = 64;           ///< VASS forward-search counter cap
  std::size_t max_run_length = 64;   ///< VASS forward-search length cap
};

enum class VerdictValue { Positive, Negative, BudgetExhausted };

/// Outcome of a (semi-)decision: three-valued, with a checkable certificate
/// for the decided cases.
struct Verdict {
  VerdictValue value = VerdictValue::BudgetExhausted;
  nlohmann::json certificate;
  std::uint64_t steps_used = 0;

  bool positive() const { return value == VerdictValue::Positive; }
  bool negative() const { return value == VerdictValue::Negative; }
  bool decided() const { return value != VerdictValue::BudgetExhausted; }
  static Verdict pos(nlohmann::json cert, std::uint64_t steps = 0);
  static Verdict neg(nlohmann::json cert, std::uint64_t steps = 0);
  static Verdict exhausted(std::uint64_t steps = 0);
};

const char* verdict_name(VerdictValue v);

/// System-specific run payload. Implementations are immutable.
class RunData {
 public:
  virtual ~RunData() = default;
  /// Deterministic textual form; used for tie-breaks and certificates.
  virtual std::string serialize() const = 0;
  /// Size used for fair (nondecreasing) enumeration.
  virtual std::size_t size() const = 0;
};

using Run = std::shared_ptr<const RunData>;

/// An admissible embedding together with its gap words G_0..G_n.
struct GapProfile {
  MonotoneMap embedding;
  std::vector<Word> gaps;
};

/// Result of amalgamating rho1 and rho2 over rho0.
struct AmalgamResult {
  Run rho3;
  MonotoneMap f_prime;  ///< embedding of rho1 into rho3
  MonotoneMap g_prime;  ///< embedding of rho2 into rho3
};

/// Abstract amalgamation system: a run set with canonical decompositions,
/// admissible embeddings closed under composition, and concatenative
/// amalgamation. Implementations are immutable and safely shareable.
class System : public std::enable_shared_from_this<System> {
 public:
  virtual ~System() = default;

  virtual std::string id() const = 0;
  virtual std::vector<Letter> alphabet() const = 0;

  /// All runs of size ≤ max_size, sorted by (size, serialize()).
  virtual std::vector<Run> enumerate_runs(std::size_t max_size) const = 0;

  virtual Decomposition canon(const Run& rho) const = 0;

  /// Admissible embeddings, lexicographic on the image.
  virtual std::vector<MonotoneMap> admissible_embeddings(const Run& rho,
                                                         const Run& sigma) const = 0;

  /// Concatenative amalgamation at the chosen gap i (0 ≤ i ≤ |rho0|_can):
  /// the result satisfies f'∘f = g'∘g and the gap-word equations.
  virtual AmalgamResult amalgamate(const Run& rho0, const MonotoneMap& f,
                                   const Run& rho1, const MonotoneMap& g,
                                   const Run& rho2, std::size_t gap) const = 0;

  /// Three-valued language emptiness.
  virtual Verdict emptiness(const Budget& budget) const = 0;

  /// Parses a run from its serialized form (certificate re-checking).
  virtual Run parse_run(const std::string& text) const = 0;

  /// Image of this system under a one-letter-per-step transducer. The
  /// default wraps the system with finite-state decorations; concrete
  /// systems override with structural products where exact emptiness is
  /// available.
  virtual std::shared_ptr<const System> transduce(const Transducer& t) const;

  /// Yield of a run (concatenation of its canonical factors).
  Word yield_of(const Run& rho) const { return decomposition_yield(canon(rho)); }
};

using SystemPtr = std::shared_ptr<const System>;

/// Computes the gap words of f ∈ E(rho, sigma). Throws when f is not a
/// factor-respecting embedding of the canonical decompositions.
GapProfile gap_words(const System& s, const Run& rho, const Run& sigma,
                     const MonotoneMap& f);

/// Result of the amalgamation axiom sweep.
struct AxiomReport {
  std::uint64_t pairs_checked = 0;
  std::uint64_t triples_checked = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks composition closure and the amalgamation gap equations on all
/// runs enumerable within the budget's size cap.
AxiomReport check_amalgamation_axioms(const System& s, const Budget& budget);

/// Budgeted sample of the gap language {G_{i,f} : rho ⊴_f sigma}.
std::vector<Word> sample_gap_language(const System& s, const Run& rho,
                                      std::size_t i, const Budget& budget);

/// A run decorated letter-for-letter over its yield positions.
struct DecoratedRun {
  Run base;
  std::vector<std::string> decoration;  ///< one element per yield letter
};

/// Admissible embeddings of the base runs that respect the decoration
/// order pointwise over yield positions.
std::vector<MonotoneMap> decorated_embeddings(
    const System& s, const DecoratedRun& a, const DecoratedRun& b,
    const std::function<bool(const std::string&, const std::string&)>& x_leq);

/// A resumable semi-decision procedure: step(t) performs bounded work for
/// stage t and may emit a verdict.
using StepProc = std::function<std::optional<Verdict>(std::uint64_t)>;

/// Deterministic round-robin interleaving of two semi-deciders.
Verdict dovetail(const StepProc& positive_proc, const StepProc& negative_proc,
                 std::uint64_t max_steps);

/// Indices of yield positions within a decomposition (1-based canon
/// positions of the non-empty factors).
std::vector<std::size_t> yield_positions(const Decomposition& dec);

}  // namespace amalgam
