#pragma once

// Splits asserted equations whose polynomial visibly factors into the
// disjunction of its factors' equations.

#include "zpsmt/theory.hpp"

#include <unordered_set>

namespace zpsmt {

/// (not source) or disjuncts[0] = 0 or disjuncts[1] = 0 or ...
struct InferredClause {
  AtomId source;
  Lit source_lit;
  std::vector<Polynomial> disjuncts;
};

/// Factor equations for f = 0, tried in order: product of roots, common
/// variable with a linear quotient, product of two linear polynomials.
std::optional<std::vector<Polynomial>> split_equation(const Field &field,
                                                      const Polynomial &f);

class ClauseInferModule {
public:
  explicit ClauseInferModule(const AtomTable &atoms) : atoms_(atoms) {}

  /// Clauses for positive trail entries not handled before in this solve.
  std::vector<InferredClause> infer(const TheoryTrail &trail);
  void reset() { done_.clear(); }

private:
  const AtomTable &atoms_;
  std::unordered_set<AtomId> done_;
};

} // namespace zpsmt
