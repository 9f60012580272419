#pragma once

// Syntactic factoring patterns used by clause inference and bound
// deduction.  None of these is a general factorization algorithm.

#include "zpsmt/poly.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace zpsmt {

/// Roots of a univariate quadratic a*x^2 + b*x + c (a != 0), ascending;
/// a double root is reported twice.  nullopt when the discriminant is a
/// non-residue or `f` is not a univariate quadratic.
std::optional<std::pair<FieldElement, FieldElement>>
factor_quadratic_univariate(const Field &field, const Polynomial &f);

struct CommonFactor {
  VarId var;
  Polynomial quotient;
};

/// A variable dividing every term of `f` (the largest one under `order`),
/// together with f / var.
std::optional<CommonFactor>
extract_common_variable(const Field &field, const Polynomial &f,
                        const MonomialOrder &order = MonomialOrder::grevlex());

struct RootFactor {
  VarId var;
  FieldElement root;
  friend bool operator==(const RootFactor &, const RootFactor &) = default;
};

/// Recognizes f = c * (x1 - a1) * ... * (xn - an) where the xi are either
/// pairwise distinct, or all the same variable.  The returned factors
/// multiply back to `f` up to the nonzero scalar c.
std::optional<std::vector<RootFactor>>
match_product_of_roots(const Field &field, const Polynomial &f);

/// Splits a total-degree-2 polynomial into two linear factors,
/// f = c * first * second, both factors monic.
std::optional<std::pair<Polynomial, Polynomial>>
factor_two_linear(const Field &field, const Polynomial &f);

} // namespace zpsmt
