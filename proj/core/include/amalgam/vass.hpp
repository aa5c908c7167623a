// vass.hpp -- labelled vector addition systems with states: text format,
// bounded emptiness oracle with Karp–Miller coverability, and the VASS
// amalgamation system over configuration-annotated runs.
#pragma once

#include "amalgam/system.hpp"

namespace amalgam {

struct VassTransition {
  std::string from;
  Factor label;  ///< letter or "" for ε
  std::vector<long> delta;
  std::string to;
  bool operator==(const VassTransition&) const = default;
};

struct Vass {
  std::size_t dim = 0;
  std::vector<Letter> alphabet;
  std::vector<std::string> states;
  std::vector<VassTransition> transitions;
  std::vector<std::string> initial;
  std::vector<std::string> final_states;
};

/// Parses the line-based format: as the NFA format plus
///   dim: 3
///   trans: q0 a (1,0,-1) q1
Vass parse_vass(const std::string& text);
std::string serialize_vass(const Vass& v);

/// Bounded forward search + Karp–Miller coverability; Positive with a run
/// certificate, Negative when no final control state is coverable at all,
/// BudgetExhausted otherwise.
Verdict vass_emptiness(const Vass& v, const Budget& budget);

/// Karp–Miller: the set of control states appearing in the coverability
/// tree (ω-accelerated).
std::vector<std::string> karp_miller_coverable_states(const Vass& v);

/// Runs start at q0(0), stay nonnegative, end at qf(0); embeddings compare
/// configurations componentwise and transitions by equality.
class VassSystem final : public System {
 public:
  explicit VassSystem(Vass v, std::string name = "vass");

  std::string id() const override { return name_; }
  std::vector<Letter> alphabet() const override { return v_.alphabet; }
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

  const Vass& vass() const { return v_; }
  Run make_run(const std::vector<std::size_t>& transition_indices) const;

 private:
  Vass v_;
  std::string name_;
};

}  // namespace amalgam
