#pragma once

// Integer reasoning over canonical residues.  Bounds on the integer
// representatives of field variables are deduced from asserted literals;
// linear literals whose integer value provably stays inside (-p, p) then
// hold over the integers as well, so an integer-infeasible set of them
// refutes the field literals.

#include "zpsmt/lia.hpp"
#include "zpsmt/theory.hpp"

#include <string>
#include <unordered_map>

namespace zpsmt {

/// lo <= canonical residue of v <= hi.
struct VarRange {
  Integer lo, hi;
  Explanation lo_why, hi_why;
};

class Ranges {
public:
  explicit Ranges(const Field &field) : field_(&field) {}
  VarRange get(VarId v) const;
  bool trivial(VarId v) const;
  /// Tightens; returns true when something changed.
  bool tighten_lo(VarId v, const Integer &lo, Explanation why);
  bool tighten_hi(VarId v, const Integer &hi, Explanation why);
  const std::unordered_map<VarId, VarRange> &all() const { return ranges_; }

private:
  const Field *field_;
  std::unordered_map<VarId, VarRange> ranges_;
};

/// A linear form sum(coeff * var) + constant over field elements.
struct LinearForm {
  std::vector<std::pair<VarId, FieldElement>> terms;
  FieldElement constant;
};
LinearForm linear_form(const Polynomial &linear);

/// Integer interval of sum(balanced coeff * var) + balanced constant under
/// `ranges`, together with the bound literals it relies on.
struct IntegerSpan {
  Integer lo, hi;
  Explanation why;
};
IntegerSpan integer_span(const Field &field, const LinearForm &form,
                         const FieldElement &scale, const Ranges &ranges);

struct BoundDeduction {
  Ranges ranges;
  std::optional<Explanation> empty_domain;
};
BoundDeduction deduce_bounds(const AtomTable &atoms, const TheoryTrail &trail,
                             unsigned max_sweeps = 100);

/// An integer problem whose tags index `supports`.
struct LiaEncoding {
  LiaProblem problem;
  std::vector<Explanation> supports;
  std::unordered_map<VarId, std::uint32_t> var_of;
};

struct IntLinearOptions {
  bool overflow_encoding = false;
  /// Command line of an external QF_LIA solver reading a file argument;
  /// empty for the built-in solver.
  std::string external_solver;
  unsigned max_sweeps = 100;
  unsigned max_shared_pairs = 256;
};

LiaEncoding encode_lia(const AtomTable &atoms, const TheoryTrail &trail,
                       const Ranges &ranges, const IntLinearOptions &options);

/// Runs an external solver on `problem` written as SMT-LIB QF_LIA.
LiaResult solve_lia_external(const LiaProblem &problem,
                             const std::string &command, double timeout_s);

class IntLinearModule {
public:
  IntLinearModule(const AtomTable &atoms, IntLinearOptions options)
      : atoms_(atoms), opt_(std::move(options)) {}

  enum class Outcome { consistent, conflict, unknown };
  Outcome check(const TheoryTrail &trail, Explanation &conflict,
                const Deadline &deadline = {});

  /// Ranges computed by the most recent check.
  const Ranges *last_ranges() const { return ranges_ ? &*ranges_ : nullptr; }

private:
  const AtomTable &atoms_;
  IntLinearOptions opt_;
  std::vector<Lit> cached_trail_;
  bool cache_valid_ = false;
  Outcome cached_outcome_ = Outcome::consistent;
  Explanation cached_conflict_;
  std::optional<Ranges> ranges_;
};

} // namespace zpsmt
