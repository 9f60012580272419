#pragma once

// Brute-force reference implementations for tests.  Nothing here calls
// into the library's arithmetic; instances are generated and evaluated on
// plain machine integers.

#include "zpsmt/poly.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace zpsmt::oracle {

using u64 = std::uint64_t;

bool is_prime(u64 n);
/// Primes up to and including `limit`.
std::vector<u64> primes_up_to(u64 limit);

/// Z_p on u64 with p small enough that products fit.
struct NaiveField {
  u64 p;

  u64 reduce(long long z) const;
  u64 add(u64 a, u64 b) const { return (a + b) % p; }
  u64 sub(u64 a, u64 b) const { return (a + p - b) % p; }
  u64 mul(u64 a, u64 b) const { return (a * b) % p; }
  u64 neg(u64 a) const { return (p - a) % p; }
  u64 pow(u64 a, u64 e) const;
  /// Linear search; nullopt for zero.
  std::optional<u64> inverse(u64 a) const;
  /// Every r with r*r = a, ascending.
  std::vector<u64> square_roots(u64 a) const;
  long long balanced(u64 a) const { return a <= (p - 1) / 2 ? (long long)a : (long long)a - (long long)p; }
};

/// Evaluates a library polynomial term by term on u64 residues; values are
/// indexed by variable id and missing ids read as 0.
u64 eval(const NaiveField &f, const Polynomial &poly, const std::vector<u64> &values);

/// Calls `visit` on every vector in {0..p-1}^n until it returns true.
/// Returns whether some call returned true.
bool enumerate(u64 p, std::size_t n, const std::function<bool(const std::vector<u64> &)> &visit);

// ---------------------------------------------------------------------------
// Random QF_FF instances: a CNF over atoms lhs = rhs.

struct RawTerm {
  long long coeff;
  std::vector<unsigned> exps; // one per variable
};

struct RawAtom {
  std::vector<RawTerm> lhs;
  long long rhs;
};

struct RawLit {
  unsigned atom;
  bool positive;
};

struct RawInstance {
  u64 p;
  unsigned vars;
  std::vector<RawAtom> atoms;
  std::vector<std::vector<RawLit>> clauses;

  std::string smtlib() const;
  std::string var_name(unsigned i) const { return "v" + std::to_string(i); }
  bool atom_holds(unsigned atom, const std::vector<u64> &x) const;
  bool holds(const std::vector<u64> &x) const;
  /// A model by exhaustive enumeration, if any.
  std::optional<std::vector<u64>> brute_force() const;
};

struct InstanceShape {
  std::vector<u64> primes{5, 7, 13};
  unsigned max_vars = 4;
  unsigned max_atoms = 5;
  unsigned max_degree = 3;
  unsigned max_terms = 4;
};

RawInstance random_instance(std::mt19937_64 &rng, const InstanceShape &shape = {});

/// Random polynomial over variables 0..nvars-1 with coefficients in Z_p.
Polynomial random_polynomial(std::mt19937_64 &rng, const Field &field, unsigned nvars,
                             unsigned max_terms, unsigned max_degree);

} // namespace zpsmt::oracle
