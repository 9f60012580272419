#pragma once

// Arithmetic in the prime field Z_p.
//
// A FieldElement is a bare canonical residue; the modulus lives in a Field
// object that is passed explicitly to every operation.  A solver instance
// works over exactly one prime, fixed when the input is parsed.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace zpsmt {

using Integer = mpz_class;
using Rational = mpq_class;

class ZeroInverse : public std::domain_error {
public:
  ZeroInverse() : std::domain_error("inverse of zero in Z_p") {}
};

class NotPrime : public std::invalid_argument {
public:
  explicit NotPrime(const std::string &what) : std::invalid_argument(what) {}
};

/// A validated prime modulus.
class Prime {
public:
  /// Throws NotPrime unless `value` passes trial division and 40 rounds of
  /// Miller-Rabin.
  explicit Prime(Integer value);

  const Integer &value() const { return value_; }
  bool operator==(const Prime &) const = default;

private:
  Integer value_;
};

/// Canonical residue in [0, p-1].
struct FieldElement {
  Integer residue;

  FieldElement() = default;
  explicit FieldElement(Integer r) : residue(std::move(r)) {}

  bool is_zero() const { return residue == 0; }
  bool is_one() const { return residue == 1; }
  std::string str() const { return residue.get_str(); }

  friend bool operator==(const FieldElement &a, const FieldElement &b) {
    return a.residue == b.residue;
  }
  friend bool operator!=(const FieldElement &a, const FieldElement &b) {
    return !(a == b);
  }
  friend bool operator<(const FieldElement &a, const FieldElement &b) {
    return a.residue < b.residue;
  }
};

std::size_t hash_integer(const Integer &z);

struct FieldElementHash {
  std::size_t operator()(const FieldElement &e) const {
    return hash_integer(e.residue);
  }
};

class Field {
public:
  explicit Field(Prime p);

  const Integer &modulus() const { return p_; }
  const Prime &prime() const { return prime_; }

  FieldElement zero() const { return FieldElement{}; }
  FieldElement one() const { return FieldElement(Integer(1)); }

  /// Reduces an arbitrary (possibly negative) integer to its residue.
  FieldElement from_integer(const Integer &z) const;
  FieldElement from_long(long z) const { return from_integer(Integer(z)); }

  FieldElement add(const FieldElement &a, const FieldElement &b) const;
  FieldElement sub(const FieldElement &a, const FieldElement &b) const;
  FieldElement mul(const FieldElement &a, const FieldElement &b) const;
  FieldElement neg(const FieldElement &a) const;
  FieldElement pow(const FieldElement &a, const Integer &e) const;
  FieldElement pow(const FieldElement &a, unsigned long e) const;

  /// Multiplicative inverse; throws ZeroInverse for a = 0.
  FieldElement inverse(const FieldElement &a) const;
  FieldElement div(const FieldElement &a, const FieldElement &b) const {
    return mul(a, inverse(b));
  }

  /// Euler's criterion: 0 for zero, +1 for nonzero squares, -1 otherwise.
  int legendre(const FieldElement &a) const;

  /// Tonelli-Shanks.  Returns (r, p - r) with r the smaller representative,
  /// (0, 0) for zero and nullopt for non-residues.
  std::optional<std::pair<FieldElement, FieldElement>>
  sqrt(const FieldElement &a) const;

  /// Signed representative: a if a <= (p-1)/2, else a - p.
  Integer balanced(const FieldElement &a) const;

  /// Lift of a rational a/b; nullopt when p divides b.
  std::optional<FieldElement> from_rational(const Rational &q) const;

private:
  Prime prime_;
  Integer p_;
  Integer half_;   // (p-1)/2
  std::uint64_t small_ = 0; // p when it fits in 32 bits, else 0
};

} // namespace zpsmt
