#pragma once

// One-call entry point: parsed script in, verdict and model out.

#include "zpsmt/orchestrator.hpp"
#include "zpsmt/smtlib.hpp"

#include <string>
#include <string_view>

namespace zpsmt {

struct SolverOptions {
  ModuleSet modules = ModuleSet::all();
  std::uint64_t seed = 0;
  /// Wall-clock limit in seconds; 0 for none.
  double timeout = 0;
  /// "grevlex" or "lex".
  std::string gb_order = "grevlex";
  bool randomize_values = false;
  bool overflow_encoding = false;
  bool restarts = true;
  /// External solver command lines (empty: built-in procedures).
  std::string lia_solver;
  std::string nra_solver;
};

enum class Verdict { sat, unsat, unknown };
const char *verdict_name(Verdict v);

struct SolveResult {
  Verdict verdict = Verdict::unknown;
  /// Every declared field constant (sat only).
  Assignment model;
  /// Value of every declared Bool constant (sat only).
  std::vector<bool> bools;
  TheoryStats theory;
  SatStats sat;
  std::size_t atoms = 0;
  double seconds = 0;
};

/// Throws std::invalid_argument for bad options.
SolveResult solve(const Script &script, const SolverOptions &options = {});

/// Evaluates every assertion of `script` under the result's model.
bool model_satisfies(const Script &script, const SolveResult &result);

/// Re-parses `text` and evaluates it under the result's model, matching
/// variables by name.  Independent of any state kept by the solver.
bool model_satisfies_source(std::string_view text, const Script &solved,
                            const SolveResult &result);

} // namespace zpsmt
