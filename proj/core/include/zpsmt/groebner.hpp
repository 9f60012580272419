#pragma once

// Buchberger's algorithm with cofactor tracking, so that 1 in the ideal
// comes with a certificate 1 = sum(c_i * f_i) over the input generators.

#include "zpsmt/theory.hpp"

namespace zpsmt {

struct GroebnerOptions {
  MonomialOrder order = MonomialOrder::grevlex();
  unsigned max_pairs = 10000;
  Deadline deadline;
};

struct GroebnerResult {
  enum class Status { basis, unit, budget } status = Status::budget;
  /// Reduced basis (status basis only).
  std::vector<Polynomial> basis;
  /// 1 = sum(certificate[i] * generators[i]) (status unit only).
  std::vector<Polynomial> certificate;
  unsigned pairs = 0;
};

GroebnerResult groebner(const Field &field,
                        const std::vector<Polynomial> &generators,
                        const GroebnerOptions &options = {});

bool verify_certificate(const Field &field,
                        const std::vector<Polynomial> &generators,
                        const std::vector<Polynomial> &certificate);

/// Ideal of the current trail: f for f = 0 and u*f - 1 for f != 0, where u
/// is a fresh variable numbered past the variable table.
struct TrailIdeal {
  std::vector<Polynomial> generators;
  std::vector<Lit> lits;
  std::vector<bool> positive;
};
TrailIdeal trail_ideal(const AtomTable &atoms, const TheoryTrail &trail);

class GroebnerModule {
public:
  GroebnerModule(const AtomTable &atoms, GroebnerOptions options)
      : atoms_(atoms), opt_(std::move(options)) {}

  enum class Outcome { open, conflict, budget };
  Outcome check(const TheoryTrail &trail, Explanation &conflict,
                const Deadline &deadline);

  /// Reduced basis from the last check that finished without a conflict.
  const std::vector<Polynomial> &basis() const { return basis_; }
  std::uint64_t certificate_checks() const { return cert_checks_; }

private:
  const AtomTable &atoms_;
  GroebnerOptions opt_;
  std::vector<Polynomial> basis_;
  std::uint64_t cert_checks_ = 0;
};

} // namespace zpsmt
