#pragma once

// Sparse multivariate polynomials over Z_p.

#include "zpsmt/field.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace zpsmt {

struct VarId {
  std::uint32_t index = 0;
  friend auto operator<=>(const VarId &, const VarId &) = default;
};

} // namespace zpsmt

template <> struct std::hash<zpsmt::VarId> {
  std::size_t operator()(const zpsmt::VarId &v) const noexcept {
    return std::hash<std::uint32_t>{}(v.index);
  }
};

namespace zpsmt {

enum class VarKind : std::uint8_t { original, monomial, slack, rabinowitsch };

/// Dense registry of variables.  Ids are handed out once and never reused.
class VarTable {
public:
  VarId add(std::string name, VarKind kind);
  std::size_t size() const { return names_.size(); }
  const std::string &name(VarId v) const { return names_.at(v.index); }
  VarKind kind(VarId v) const { return kinds_.at(v.index); }
  std::optional<VarId> find(std::string_view name) const;
  /// Name for printing; ids beyond the table get a synthetic name.
  std::string display(VarId v) const;

private:
  std::vector<std::string> names_;
  std::vector<VarKind> kinds_;
  std::unordered_map<std::string, VarId> by_name_;
};

class Monomial {
public:
  struct Power {
    VarId var;
    std::uint32_t exp;
    friend bool operator==(const Power &, const Power &) = default;
  };

  Monomial() = default;
  static Monomial of(VarId v, std::uint32_t exp = 1);
  /// Powers need not be sorted or merged; zero exponents are dropped.
  static Monomial from_powers(std::vector<Power> powers);

  std::span<const Power> powers() const { return powers_; }
  bool is_one() const { return powers_.empty(); }
  std::uint32_t degree() const { return degree_; }
  std::uint32_t exponent(VarId v) const;
  bool contains(VarId v) const { return exponent(v) != 0; }
  /// True for a single variable with exponent one.
  bool is_variable() const {
    return powers_.size() == 1 && powers_[0].exp == 1;
  }

  bool divides(const Monomial &other) const;
  /// other / *this; requires divides(other).
  Monomial quotient_of(const Monomial &other) const;
  Monomial lcm(const Monomial &other) const;
  bool coprime(const Monomial &other) const;

  friend Monomial operator*(const Monomial &a, const Monomial &b);
  friend bool operator==(const Monomial &a, const Monomial &b) {
    return a.powers_ == b.powers_;
  }

  std::size_t hash() const;

private:
  std::vector<Power> powers_; // ascending by variable index
  std::uint32_t degree_ = 0;
};

struct MonomialHash {
  std::size_t operator()(const Monomial &m) const { return m.hash(); }
};

/// Graded reverse lexicographic or pure lexicographic order.  Variables
/// listed in `precedence` come first (largest first); the rest follow by
/// ascending index, so by default a lower index means a larger variable.
class MonomialOrder {
public:
  enum class Kind { grevlex, lex };

  MonomialOrder() = default;
  explicit MonomialOrder(Kind kind, std::vector<VarId> precedence = {});

  static MonomialOrder grevlex() { return MonomialOrder(Kind::grevlex); }
  static MonomialOrder lex(std::vector<VarId> precedence = {}) {
    return MonomialOrder(Kind::lex, std::move(precedence));
  }

  Kind kind() const { return kind_; }
  bool is_default() const {
    return kind_ == Kind::grevlex && precedence_.empty();
  }
  std::strong_ordering compare(const Monomial &a, const Monomial &b) const;
  bool greater(const Monomial &a, const Monomial &b) const {
    return compare(a, b) == std::strong_ordering::greater;
  }

private:
  std::uint32_t rank(VarId v) const;

  Kind kind_ = Kind::grevlex;
  std::vector<VarId> precedence_;
  std::unordered_map<VarId, std::uint32_t> rank_;
};

struct Term {
  Monomial mono;
  FieldElement coeff;
};

/// Terms are stored without zero coefficients, sorted descending by the
/// default grevlex order, so the default leading term is terms().front().
class Polynomial {
public:
  Polynomial() = default;

  static Polynomial constant(const FieldElement &c);
  static Polynomial variable(VarId v);
  static Polynomial monomial(Monomial m, FieldElement c);
  /// Sorts and merges like terms.
  static Polynomial from_terms(const Field &field, std::vector<Term> terms);
  /// Terms must already be sorted descending with nonzero coefficients.
  static Polynomial from_sorted(std::vector<Term> terms);

  const std::vector<Term> &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one());
  }
  /// Coefficient of the monomial 1.
  FieldElement constant_term() const;
  FieldElement coefficient(const Monomial &m) const;
  std::uint32_t degree() const;
  std::uint32_t degree_in(VarId v) const;
  bool is_linear() const { return degree() <= 1; }
  std::vector<VarId> vars() const;
  bool contains(VarId v) const;

  /// Leading term under the default order.
  const Term &leading() const { return terms_.front(); }
  /// Index of the leading term under an arbitrary order.
  std::size_t leading_index(const MonomialOrder &order) const;

  std::size_t hash() const;
  friend bool operator==(const Polynomial &a, const Polynomial &b);

private:
  friend Polynomial add(const Field &, const Polynomial &, const Polynomial &);
  std::vector<Term> terms_;
};

struct PolynomialHash {
  std::size_t operator()(const Polynomial &p) const { return p.hash(); }
};

Polynomial add(const Field &field, const Polynomial &a, const Polynomial &b);
Polynomial sub(const Field &field, const Polynomial &a, const Polynomial &b);
Polynomial neg(const Field &field, const Polynomial &a);
Polynomial mul(const Field &field, const Polynomial &a, const Polynomial &b);
Polynomial scale(const Field &field, const FieldElement &c,
                 const Polynomial &a);
Polynomial mul_term(const Field &field, const Polynomial &a,
                    const Monomial &m, const FieldElement &c);
Polynomial pow(const Field &field, const Polynomial &a, unsigned e);

/// Scales so the default-order leading coefficient is 1.  Zero stays zero.
Polynomial make_monic(const Field &field, const Polynomial &a);

/// Replaces every occurrence of `v` by `value`.
Polynomial substitute(const Field &field, const Polynomial &a, VarId v,
                      const Polynomial &value);

class UnboundVariable : public std::out_of_range {
public:
  explicit UnboundVariable(VarId v)
      : std::out_of_range("unbound variable #" + std::to_string(v.index)),
        var(v) {}
  VarId var;
};

using Assignment = std::unordered_map<VarId, FieldElement>;

/// Throws UnboundVariable if some variable of `f` is missing.
FieldElement evaluate(const Field &field, const Polynomial &f,
                      const Assignment &sigma);

struct Division {
  Polynomial remainder;
  std::vector<Polynomial> cofactors;
};

/// Multivariate division: f = sum(cofactors[i] * divisors[i]) + remainder,
/// with no remainder term divisible by a leading monomial of `divisors`.
Division reduce(const Field &field, const Polynomial &f,
                std::span<const Polynomial> divisors,
                const MonomialOrder &order);

/// `3*x^2*y + 6`, variables by name.
std::string to_string(const Polynomial &f, const VarTable &vars);

class PolyParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parses the debug format (with parentheses, '-', '^').  Unknown names are
/// added to `vars` as original variables.
Polynomial parse_polynomial(std::string_view text, const Field &field,
                            VarTable &vars);

} // namespace zpsmt
