// grammar.hpp -- C-grammars and derivation trees as amalgamation systems;
// plain CFGs are the special case of finite inner languages.
#pragma once

#include <map>

#include "amalgam/system.hpp"

namespace amalgam {

/// A grammar whose right-hand sides per nonterminal form the language of an
/// inner amalgamation system over N ∪ Σ.
struct CGrammar {
  std::vector<std::string> nonterminals;
  std::vector<Letter> terminals;
  std::string start;
  std::map<std::string, SystemPtr> inner;  ///< one system per nonterminal

  bool is_nonterminal(const Letter& l) const;
};

/// Parses the grammar format:
///   start: S
///   S: a S b | _
///   A: @inner.nfa
/// The loader resolves @file references to inner systems.
CGrammar parse_cgrammar(
    const std::string& text,
    const std::function<SystemPtr(const std::string&)>& loader);

/// A structural tree embedding: a subtree path, an inner-run embedding, and
/// one embedding per child, in bijection with the materialized index maps.
struct TreeEmbedding {
  std::vector<std::size_t> path;  ///< 0-based child indices
  MonotoneMap inner;
  std::vector<TreeEmbedding> children;
};

class GrammarSystem final : public System {
 public:
  explicit GrammarSystem(CGrammar g, std::string name = "grammar");

  std::string id() const override { return name_; }
  std::vector<Letter> alphabet() const override { return g_.terminals; }
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

  const CGrammar& grammar() const { return g_; }

  /// Builds a derivation-tree run node (children per nonterminal occurrence
  /// in the inner run's yield, in order).
  Run make_tree(const std::string& nt, const Run& inner_run,
                const std::vector<Run>& children) const;
  /// Tree accessors.
  const std::string& tree_nt(const Run& tree) const;
  Run tree_inner(const Run& tree) const;
  std::vector<Run> tree_children(const Run& tree) const;
  /// Subtree at a path (0-based child indices).
  Run subtree(const Run& tree, const std::vector<std::size_t>& path) const;
  /// Offset of the subtree's decomposition inside the root's.
  std::size_t ix_offset(const Run& tree, const std::vector<std::size_t>& path) const;
  /// Structural embeddings of t1 into t2, preorder path order.
  std::vector<TreeEmbedding> tree_embeddings(const Run& t1, const Run& t2) const;
  /// Index map induced by a structural embedding.
  MonotoneMap materialize(const Run& t1, const Run& t2,
                          const TreeEmbedding& e) const;
  /// pi with the subtree at p replaced by tau (same root nonterminal).
  Run tree_substitute(const Run& pi, const std::vector<std::size_t>& p,
                      const Run& tau) const;

 private:
  struct StructuralAmalgam;
  StructuralAmalgam amalg_structural(const Run& t0, const TreeEmbedding& f,
                                     const Run& t1, const TreeEmbedding& g,
                                     const Run& t2,
                                     std::optional<std::size_t> gap) const;

  CGrammar g_;
  std::string name_;
};

}  // namespace amalgam
