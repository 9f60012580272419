#pragma once

// Equality inference over polynomial definitions:
//   x1 = x1', ..., xn = xn', y = f(x1..xn), y' = f(x1'..xn')  |-  y = y'
// Union-find with a proof forest for explanations and a signature table
// keyed by definition bodies rewritten to class representatives.

#include "zpsmt/theory.hpp"

#include <functional>
#include <optional>
#include <unordered_map>

namespace zpsmt {

struct DerivedEquality {
  VarId a;
  VarId b;
  Explanation because;
};

class EquivModule {
public:
  explicit EquivModule(const Field &field);

  /// Registers y = body.  `reason` is empty for axioms (monomial
  /// definitions).  `trail_index` tags the change for backtracking.
  void register_definition(VarId y, const Polynomial &body,
                           std::optional<Lit> reason,
                           std::size_t trail_index);
  /// Records x = x' justified by `reason`.
  void merge(VarId x, VarId x2, Lit reason, std::size_t trail_index);
  /// Interprets an asserted equation (original variables) as merges and
  /// definitions.
  void assert_equation(const Polynomial &poly, Lit reason,
                       std::size_t trail_index);

  void backtrack(std::size_t trail_size);

  /// Equalities derived by congruence since the last call.
  std::vector<DerivedEquality> take_derived();

  VarId find(VarId v) const;
  bool same(VarId a, VarId b) const { return find(a) == find(b); }
  /// Literals justifying a = b (which must hold).
  Explanation explain(VarId a, VarId b) const;

  std::uint64_t derived_count() const { return derived_total_; }

private:
  struct Def {
    VarId y;
    Polynomial body;
    std::optional<Lit> reason;
    Polynomial key;
    bool live = true;
  };
  struct ProofEdge {
    std::optional<VarId> parent;
    // Either a literal or a congruence between two definitions.
    std::optional<Lit> lit;
    std::size_t def1 = 0, def2 = 0;
  };

  void ensure(VarId v);
  Polynomial canonical(const Polynomial &body) const;
  void union_classes(VarId a, VarId b, ProofEdge edge, std::size_t tag);
  void rekey(std::size_t def, std::size_t tag);
  void insert_or_collide(std::size_t def, std::size_t tag);
  void process_pending(std::size_t tag);
  void explain_into(VarId a, VarId b, std::vector<Lit> &out, int depth) const;
  void log(std::size_t tag, std::function<void()> undo) {
    undo_.push_back({tag, std::move(undo)});
  }

  const Field &field_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::vector<std::vector<std::uint32_t>> members_;
  std::vector<ProofEdge> proof_;
  std::vector<std::vector<std::size_t>> uses_; // var -> defs whose body has it
  std::vector<Def> defs_;
  std::vector<std::size_t> sticky_; // axioms, never undone
  std::unordered_map<Polynomial, std::size_t, PolynomialHash> table_;
  std::vector<std::pair<std::size_t, std::size_t>> pending_; // congruent defs
  std::vector<std::pair<std::size_t, std::function<void()>>> undo_;
  std::vector<DerivedEquality> derived_;
  std::uint64_t derived_total_ = 0;
};

} // namespace zpsmt
