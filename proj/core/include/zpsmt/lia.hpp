#pragma once

// Small linear integer arithmetic solver: bound propagation, GCD test,
// bounded rational simplex and branch-and-bound, with constraint cores.
//
// Every constraint carries a tag; an unsat answer reports a set of tags
// whose constraints are jointly infeasible.  Tag kFree marks constraints
// that never need explaining.

#include "zpsmt/field.hpp"
#include "zpsmt/theory.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace zpsmt {

using LiaTag = std::uint32_t;
inline constexpr LiaTag kFreeTag = 0xffffffffu;

struct LiaTerm {
  std::uint32_t var;
  Integer coeff;
};

/// sum(terms) + constant  (= 0 | != 0 | <= 0)
struct LiaConstraint {
  enum class Kind { eq, neq, le } kind = Kind::eq;
  std::vector<LiaTerm> terms;
  Integer constant;
  LiaTag tag = kFreeTag;
};

struct LiaBound {
  std::uint32_t var;
  bool upper;
  Integer value;
  LiaTag tag;
};

struct LiaProblem {
  std::uint32_t num_vars = 0;
  /// Every variable needs a finite lower and upper bound with tag kFree
  /// or a real tag; further bounds may follow.
  std::vector<LiaBound> bounds;
  std::vector<LiaConstraint> constraints;

  std::uint32_t add_var() { return num_vars++; }
};

struct LiaLimits {
  unsigned max_nodes = 5000;
  unsigned max_depth = 400;
  Deadline deadline;
  bool minimize_core = true;
};

struct LiaResult {
  enum class Status { sat, unsat, unknown } status = Status::unknown;
  std::set<LiaTag> core;
  std::vector<Integer> model;
  unsigned nodes = 0;
};

LiaResult solve_lia(const LiaProblem &problem, const LiaLimits &limits = {});

/// Problem keeping only constraints and bounds whose tag is free or in
/// `keep`.
LiaProblem restrict_lia(const LiaProblem &problem, const std::set<LiaTag> &keep);

} // namespace zpsmt
