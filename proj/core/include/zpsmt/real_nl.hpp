#pragma once

// Model construction by lifting: field coefficients are read as balanced
// integers, a solution is searched over Q(sqrt(D)) by elimination and
// small-value branching, and candidate solutions are mapped back into Z_p.
// Candidates are only accepted after validation, so this never refutes.

#include "zpsmt/theory.hpp"

#include <functional>
#include <random>
#include <string>

namespace zpsmt {

struct RealNlOptions {
  unsigned pool_tries = 64;
  unsigned max_nodes = 2000;
  std::uint64_t seed = 0;
  /// Command line of an external QF_NRA solver reading a file argument.
  std::string external_solver;
};

using AcceptFn = std::function<bool(const Assignment &)>;

/// Searches for an assignment of the variables of `eqs` and `diseqs` with
/// eqs = 0 and diseqs != 0 after lifting, returning the first lifted
/// candidate that `accept` approves.
std::optional<Assignment> find_lifted_solution(
    const Field &field, const std::vector<Polynomial> &eqs,
    const std::vector<Polynomial> &diseqs, const AcceptFn &accept,
    const RealNlOptions &options, const Deadline &deadline = {});

/// The same system handed to an external solver as QF_NRA.
std::optional<Assignment> solve_nra_external(
    const Field &field, const std::vector<Polynomial> &eqs,
    const std::vector<Polynomial> &diseqs, const AcceptFn &accept,
    const std::string &command, double timeout_s);

/// True when every trail literal holds under `sigma` (missing original
/// variables read as 0).
bool trail_holds(const AtomTable &atoms, const TheoryTrail &trail,
                 const Assignment &sigma);

class RealNlModule {
public:
  RealNlModule(const AtomTable &atoms, RealNlOptions options)
      : atoms_(atoms), opt_(std::move(options)) {}

  /// A validated model of the trail over original variables.  `basis` is a
  /// reduced Groebner basis of the trail ideal (may be empty).
  std::optional<Assignment> check(const TheoryTrail &trail,
                                  const std::vector<Polynomial> &basis,
                                  const Deadline &deadline);

private:
  const AtomTable &atoms_;
  RealNlOptions opt_;
};

} // namespace zpsmt
