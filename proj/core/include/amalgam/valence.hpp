// valence.hpp -- graph monoids and valence automata: storage graphs,
// Turing-pattern detection, PD-class decomposition, compilation into the
// Reg / +N / Alg hierarchy, and a brute-force rewriting simulator.
#pragma once

#include <set>

#include "amalgam/nfa.hpp"
#include "amalgam/system.hpp"

namespace amalgam {

/// A finite undirected storage graph; self-loops are kept separately.
struct StorageGraph {
  std::vector<Letter> vertices;
  std::set<Letter> loops;
  std::set<std::pair<Letter, Letter>> edges;  ///< normalized: first < second

  bool has_vertex(const Letter& v) const;
  /// True for distinct adjacent vertices, and for u == v when u is looped.
  bool adjacent(const Letter& u, const Letter& v) const;
};

/// Parses the line-based format ('#' comments):
///   vertices: v1 v2
///   loops: v1
///   edges: v1-v2
StorageGraph parse_storage_graph(const std::string& text);
std::string serialize_storage_graph(const StorageGraph& g);

/// One generator of X_Gamma: a_v (bar = false) or the right inverse
/// \bar a_v (bar = true).
struct ValenceLetter {
  Letter vertex;
  bool bar = false;
  auto operator<=>(const ValenceLetter&) const = default;
};

struct ValenceEdge {
  std::string from;
  Word input;                          ///< possibly empty input word
  std::vector<ValenceLetter> valence;  ///< word over X_Gamma
  std::string to;
};

struct ValenceAutomaton {
  std::vector<std::string> states;
  std::vector<Letter> alphabet;
  std::vector<ValenceEdge> edges;
  std::string initial;
  std::set<std::string> final_states;
};

/// Parses the NFA text format extended with valence edges:
///   val: q0 a / a_v1 a_v1 q1
/// The input is a single letter or `_`; valence tokens are `v` / `a_v` for
/// a_v and `~v` / `~a_v` for the inverse, or `_` for the empty word.
ValenceAutomaton parse_valence_automaton(const std::string& text);
std::string serialize_valence_automaton(const ValenceAutomaton& a);

/// True iff the loop-free graph contains P4 or C4 as an induced subgraph.
bool has_turing_pattern(const StorageGraph& g);

/// Compilation skeleton: REG | PLUS_N(term, d) | ALG(terms).
struct HierarchyExpr {
  enum class Kind { Reg, PlusN, Alg };
  Kind kind = Kind::Reg;
  std::size_t counters = 0;            ///< PlusN: 1 (unlooped) or 2 (looped)
  Letter vertex;                       ///< PlusN: the stripped vertex
  std::vector<HierarchyExpr> children; ///< PlusN: one; Alg: the components
  std::vector<Letter> vertices;        ///< vertices handled at or below here

  std::string str() const;
};

/// Recursive PD decomposition: several connected components become an ALG
/// node over the components; a connected graph yields its least universal
/// vertex as a PLUS_N layer (two counters when the vertex is looped); the
/// empty graph is REG.  Throws std::invalid_argument when the graph has a
/// Turing pattern, and std::runtime_error when a component unexpectedly has
/// no universal vertex.
HierarchyExpr decompose_pd(const StorageGraph& g);

/// Brute-force oracle: does some accepting path read w with a valence word
/// that rewrites to the empty word (cancellation a_v \bar a_v -> eps plus
/// commutations along edges and loops)?  Valence words longer than
/// length_bound are pruned.
bool simulate_valence_membership(const ValenceAutomaton& a,
                                 const StorageGraph& g, const Word& w,
                                 std::size_t length_bound);

/// Realizes the decomposition as an amalgamation system: the empty graph is
/// the underlying NFA, a universal vertex becomes a counter extension (two
/// counters with balancing self-loops for a looped vertex), and several
/// components become a C-grammar whose nonterminals are state pairs with
/// valence automata over the factor monoids as inner languages.
SystemPtr compile_valence(const ValenceAutomaton& a, const StorageGraph& g,
                          const std::string& name = "valence");

}  // namespace amalgam
