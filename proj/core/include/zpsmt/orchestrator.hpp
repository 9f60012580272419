#pragma once

// The theory solver handed to the SAT engine: keeps the trail of asserted
// atoms and runs the enabled sub-modules in a fixed order on every check.

#include "zpsmt/clause_infer.hpp"
#include "zpsmt/equiv.hpp"
#include "zpsmt/groebner.hpp"
#include "zpsmt/int_linear.hpp"
#include "zpsmt/linear_ff.hpp"
#include "zpsmt/real_nl.hpp"

#include <array>
#include <string>

namespace zpsmt {

enum class ModuleId : unsigned {
  linear_ff,
  equiv,
  int_linear,
  clause_infer,
  groebner,
  real_nl,
};
inline constexpr std::size_t kModuleCount = 6;

const char *module_name(ModuleId m);

/// A set of enabled modules.
class ModuleSet {
public:
  ModuleSet() = default;
  static ModuleSet all() { return ModuleSet(0x3f); }
  static ModuleSet none() { return ModuleSet(0); }
  /// Incremental configuration n in 1..6: groebner, then linear-ff, equiv,
  /// int-linear, clause-infer and real-nl added one at a time.
  static ModuleSet configuration(int n);
  /// "C3.4" / "3.4" / "4" style configuration names, "all", or a comma
  /// separated list of module names.  Throws std::invalid_argument.
  static ModuleSet parse(const std::string &text);

  bool has(ModuleId m) const { return bits_ & bit(m); }
  ModuleSet with(ModuleId m) const { return ModuleSet(bits_ | bit(m)); }
  ModuleSet without(ModuleId m) const { return ModuleSet(bits_ & ~bit(m)); }
  std::string str() const;
  bool operator==(const ModuleSet &) const = default;

private:
  explicit ModuleSet(unsigned bits) : bits_(bits) {}
  static unsigned bit(ModuleId m) { return 1u << static_cast<unsigned>(m); }
  unsigned bits_ = 0x3f;
};

struct ModuleStats {
  std::uint64_t calls = 0;
  std::uint64_t nonfinal_calls = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t clauses = 0;
  double seconds = 0;
};

struct TheoryStats {
  std::array<ModuleStats, kModuleCount> modules{};
  std::uint64_t equiv_derived = 0;
  std::uint64_t gb_certificate_checks = 0;
  std::uint64_t models_validated = 0;
  /// Module whose candidate became the last sat model.
  std::optional<ModuleId> model_source;

  ModuleStats &operator[](ModuleId m) { return modules[static_cast<unsigned>(m)]; }
  const ModuleStats &operator[](ModuleId m) const {
    return modules[static_cast<unsigned>(m)];
  }
};

struct OrchestratorOptions {
  ModuleSet modules = ModuleSet::all();
  LinearModule::Options linear;
  IntLinearOptions int_linear;
  GroebnerOptions groebner;
  RealNlOptions real_nl;
  double groebner_budget = 5;
  double real_nl_budget = 5;
  double int_linear_budget = 2;
  Deadline deadline;
};

class Orchestrator final : public Theory {
public:
  Orchestrator(AtomTable &atoms, SatSolver &sat, OrchestratorOptions options);

  /// The Boolean variable standing for atom `id`, created on first use.
  BoolVar var_for_atom(AtomId id);
  std::optional<AtomId> atom_of(BoolVar v) const;

  void on_assign(Lit lit, int level) override;
  void on_backtrack(int level) override;
  TheoryStatus check(bool final, std::vector<Lit> &conflict) override;
  void explain(Lit propagated, std::vector<Lit> &out) override;

  /// Model over original variables from the last sat answer.
  const Assignment &model() const { return model_; }
  const TheoryStats &stats() const { return stats_; }
  const TheoryTrail &trail() const { return trail_; }

private:
  enum class Step { next, stop };

  Step sync_and_equiv(bool final, TheoryStatus &status, std::vector<Lit> &conflict);
  Step run_linear(bool final, TheoryStatus &status, std::vector<Lit> &conflict);
  Step run_int_linear(bool final, TheoryStatus &status, std::vector<Lit> &conflict);
  Step run_clause_infer(bool final, TheoryStatus &status);
  Step run_final(TheoryStatus &status, std::vector<Lit> &conflict);

  /// Queues `lit` with reason `because`; false when lit is already false
  /// (then `conflict` is filled).
  bool propagate(Lit lit, const Explanation &because, ModuleId by,
                 std::vector<Lit> &conflict);
  Lit atom_lit(AtomId id, bool positive) {
    return Lit::make(var_for_atom(id), !positive);
  }
  bool accept_model(const Assignment &sigma);
  ModuleStats &begin(ModuleId m, bool final);

  AtomTable &atoms_;
  SatSolver &sat_;
  OrchestratorOptions opt_;
  TheoryTrail trail_;
  LinearModule linear_;
  EquivModule equiv_;
  IntLinearModule int_linear_;
  ClauseInferModule clause_infer_;
  GroebnerModule groebner_;
  RealNlModule real_nl_;

  std::size_t linear_done_ = 0;
  std::size_t equiv_done_ = 0;
  std::size_t defs_synced_ = 0;
  std::vector<BoolVar> atom_var_;
  std::unordered_map<BoolVar, AtomId> var_atom_;
  std::unordered_map<std::uint32_t, Explanation> reasons_;
  Assignment model_;
  TheoryStats stats_;
};

} // namespace zpsmt
