#include "zpsmt/solver.hpp"

#include <algorithm>
#include <stdexcept>

namespace zpsmt {

const char *verdict_name(Verdict v) {
  switch (v) {
  case Verdict::sat:
    return "sat";
  case Verdict::unsat:
    return "unsat";
  case Verdict::unknown:
    break;
  }
  return "unknown";
}

SolveResult solve(const Script &script, const SolverOptions &options) {
  const Clock::time_point start = Clock::now();
  const Field field = script_field(script);
  VarTable vars = script.vars;
  AtomTable atoms(field, vars);
  const Deadline deadline = Deadline::after(options.timeout);

  SatOptions sat_opt;
  sat_opt.seed = options.seed;
  sat_opt.restarts = options.restarts;
  sat_opt.should_stop = [deadline] { return deadline.expired(); };
  SatSolver sat(sat_opt);

  OrchestratorOptions orch_opt;
  orch_opt.modules = options.modules;
  orch_opt.deadline = deadline;
  orch_opt.linear.randomize_values = options.randomize_values;
  orch_opt.linear.seed = options.seed;
  orch_opt.int_linear.overflow_encoding = options.overflow_encoding;
  orch_opt.int_linear.external_solver = options.lia_solver;
  orch_opt.real_nl.seed = options.seed;
  orch_opt.real_nl.external_solver = options.nra_solver;
  if (options.gb_order == "lex")
    orch_opt.groebner.order = MonomialOrder::lex();
  else if (options.gb_order != "grevlex")
    throw std::invalid_argument("unknown monomial order '" + options.gb_order + "'");
  Orchestrator orch(atoms, sat, orch_opt);
  sat.set_theory(&orch);

  constexpr BoolVar kNone = 0xffffffffu;
  std::vector<BoolVar> bool_vars(script.bool_names.size(), kNone);
  CnfSink sink;
  sink.atom_var = [&](AtomId id) { return orch.var_for_atom(id); };
  sink.bool_var = [&](std::uint32_t i) {
    if (bool_vars.at(i) == kNone)
      bool_vars[i] = sat.new_var(false);
    return bool_vars[i];
  };
  sink.fresh_var = [&] { return sat.new_var(false); };

  SolveResult result;
  bool consistent = true;
  for (auto &clause : clausify(script.formula, script.assertions, atoms, sink))
    consistent = sat.add_clause(std::move(clause)) && consistent;

  SatResult r = consistent ? sat.solve() : SatResult::unsat;
  switch (r) {
  case SatResult::sat:
    result.verdict = Verdict::sat;
    break;
  case SatResult::unsat:
    result.verdict = Verdict::unsat;
    break;
  case SatResult::unknown:
    result.verdict = Verdict::unknown;
    break;
  }

  if (result.verdict == Verdict::sat) {
    for (std::uint32_t i = 0; i < script.vars.size(); ++i) {
      VarId v{i};
      auto it = orch.model().find(v);
      result.model[v] = it == orch.model().end() ? FieldElement() : it->second;
    }
    result.bools.resize(script.bool_names.size(), false);
    for (std::size_t i = 0; i < bool_vars.size(); ++i)
      if (bool_vars[i] != kNone)
        result.bools[i] = sat.value(bool_vars[i]) == LBool::true_;
    if (!model_satisfies(script, result))
      throw std::logic_error("model does not satisfy the input formula");
  }
  result.theory = orch.stats();
  result.sat = sat.stats();
  result.atoms = atoms.size();
  result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

bool model_satisfies(const Script &script, const SolveResult &result) {
  const Field field = script_field(script);
  std::vector<bool> bools = result.bools;
  bools.resize(script.bool_names.size(), false);
  for (NodeId a : script.assertions)
    if (!evaluate(field, script.formula, a, result.model, bools))
      return false;
  return true;
}

bool model_satisfies_source(std::string_view text, const Script &solved,
                            const SolveResult &result) {
  Script fresh = parse_script(text);
  SolveResult mapped;
  for (std::uint32_t i = 0; i < fresh.vars.size(); ++i) {
    VarId v{i};
    auto old = solved.vars.find(fresh.vars.name(v));
    if (!old || !result.model.count(*old))
      return false;
    mapped.model[v] = result.model.at(*old);
  }
  mapped.bools.resize(fresh.bool_names.size());
  for (std::size_t i = 0; i < fresh.bool_names.size(); ++i) {
    auto it = std::find(solved.bool_names.begin(), solved.bool_names.end(),
                        fresh.bool_names[i]);
    if (it == solved.bool_names.end())
      return false;
    mapped.bools[i] = result.bools[static_cast<std::size_t>(it - solved.bool_names.begin())];
  }
  return model_satisfies(fresh, mapped);
}

} // namespace zpsmt
