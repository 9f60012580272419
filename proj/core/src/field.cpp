#include "zpsmt/field.hpp"

#include <array>

namespace zpsmt {

namespace {

constexpr std::array<unsigned, 25> kSmallPrimes = {
    2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
    43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

bool is_probable_prime(const Integer &n) {
  if (n < 2)
    return false;
  for (unsigned q : kSmallPrimes) {
    if (n == q)
      return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), q))
      return false;
  }
  return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

} // namespace

std::size_t hash_integer(const Integer &z) {
  std::size_t h = static_cast<std::size_t>(mpz_sgn(z.get_mpz_t()) + 1);
  const std::size_t limbs = mpz_size(z.get_mpz_t());
  for (std::size_t i = 0; i < limbs; ++i)
    h = h * 1000003u ^ static_cast<std::size_t>(mpz_getlimbn(z.get_mpz_t(), i));
  return h;
}

Prime::Prime(Integer value) : value_(std::move(value)) {
  if (!is_probable_prime(value_))
    throw NotPrime("not a prime: " + value_.get_str());
}

Field::Field(Prime p) : prime_(std::move(p)), p_(prime_.value()) {
  half_ = (p_ - 1) / 2;
  if (mpz_sizeinbase(p_.get_mpz_t(), 2) <= 32)
    small_ = p_.get_ui();
}

FieldElement Field::from_integer(const Integer &z) const {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), z.get_mpz_t(), p_.get_mpz_t());
  return FieldElement(std::move(r));
}

FieldElement Field::add(const FieldElement &a, const FieldElement &b) const {
  Integer r = a.residue + b.residue;
  if (r >= p_)
    r -= p_;
  return FieldElement(std::move(r));
}

FieldElement Field::sub(const FieldElement &a, const FieldElement &b) const {
  Integer r = a.residue - b.residue;
  if (r < 0)
    r += p_;
  return FieldElement(std::move(r));
}

FieldElement Field::mul(const FieldElement &a, const FieldElement &b) const {
  if (small_ != 0)
    return FieldElement(Integer(a.residue.get_ui() * b.residue.get_ui() % small_));
  Integer r = a.residue * b.residue;
  mpz_mod(r.get_mpz_t(), r.get_mpz_t(), p_.get_mpz_t());
  return FieldElement(std::move(r));
}

FieldElement Field::neg(const FieldElement &a) const {
  if (a.is_zero())
    return a;
  return FieldElement(p_ - a.residue);
}

FieldElement Field::pow(const FieldElement &a, const Integer &e) const {
  Integer r;
  mpz_powm(r.get_mpz_t(), a.residue.get_mpz_t(), e.get_mpz_t(),
           p_.get_mpz_t());
  return FieldElement(std::move(r));
}

FieldElement Field::pow(const FieldElement &a, unsigned long e) const {
  Integer r;
  mpz_powm_ui(r.get_mpz_t(), a.residue.get_mpz_t(), e, p_.get_mpz_t());
  return FieldElement(std::move(r));
}

FieldElement Field::inverse(const FieldElement &a) const {
  if (a.is_zero())
    throw ZeroInverse();
  Integer r;
  mpz_invert(r.get_mpz_t(), a.residue.get_mpz_t(), p_.get_mpz_t());
  return FieldElement(std::move(r));
}

int Field::legendre(const FieldElement &a) const {
  if (a.is_zero())
    return 0;
  if (p_ == 2)
    return 1;
  FieldElement e = pow(a, half_);
  return e.is_one() ? 1 : -1;
}

std::optional<std::pair<FieldElement, FieldElement>>
Field::sqrt(const FieldElement &a) const {
  if (a.is_zero())
    return std::make_pair(zero(), zero());
  if (p_ == 2)
    return std::make_pair(a, a);
  if (legendre(a) != 1)
    return std::nullopt;

  // p - 1 = q * 2^s with q odd.
  Integer q = p_ - 1;
  unsigned long s = 0;
  while (mpz_even_p(q.get_mpz_t())) {
    q /= 2;
    ++s;
  }

  FieldElement root;
  if (s == 1) {
    root = pow(a, (p_ + 1) / 4);
  } else {
    FieldElement z = from_long(2);
    while (legendre(z) != -1)
      z = add(z, one());
    FieldElement c = pow(z, q);
    FieldElement t = pow(a, q);
    root = pow(a, (q + 1) / 2);
    unsigned long m = s;
    while (!t.is_one()) {
      // Least i with t^(2^i) = 1.
      unsigned long i = 0;
      FieldElement t2 = t;
      while (!t2.is_one()) {
        t2 = mul(t2, t2);
        ++i;
      }
      FieldElement b = c;
      for (unsigned long j = 0; j + i + 1 < m; ++j)
        b = mul(b, b);
      m = i;
      c = mul(b, b);
      t = mul(t, c);
      root = mul(root, b);
    }
  }
  FieldElement other = neg(root);
  if (other < root)
    std::swap(root, other);
  return std::make_pair(std::move(root), std::move(other));
}

Integer Field::balanced(const FieldElement &a) const {
  if (a.residue <= half_)
    return a.residue;
  return a.residue - p_;
}

std::optional<FieldElement> Field::from_rational(const Rational &q) const {
  FieldElement den = from_integer(q.get_den());
  if (den.is_zero())
    return std::nullopt;
  return mul(from_integer(q.get_num()), inverse(den));
}

} // namespace zpsmt
