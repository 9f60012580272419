#include "zpsmt/orchestrator.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace zpsmt {

namespace {

constexpr BoolVar kNoVar = 0xffffffffu;

constexpr std::array<const char *, kModuleCount> kNames{
    "linear-ff", "equiv", "int-linear", "clause-infer", "groebner", "real-nl"};

// Adds the wall time of a scope to a module's counter.
class Timer {
public:
  explicit Timer(ModuleStats &stats) : stats_(stats), start_(Clock::now()) {}
  ~Timer() {
    stats_.seconds += std::chrono::duration<double>(Clock::now() - start_).count();
  }

private:
  ModuleStats &stats_;
  Clock::time_point start_;
};

} // namespace

const char *module_name(ModuleId m) { return kNames[static_cast<unsigned>(m)]; }

ModuleSet ModuleSet::configuration(int n) {
  static constexpr std::array<ModuleId, 6> kOrder{
      ModuleId::groebner,   ModuleId::linear_ff,    ModuleId::equiv,
      ModuleId::int_linear, ModuleId::clause_infer, ModuleId::real_nl};
  if (n < 1 || n > 6)
    throw std::invalid_argument("module configuration must be 1..6");
  ModuleSet s = none();
  for (int i = 0; i < n; ++i)
    s = s.with(kOrder[static_cast<std::size_t>(i)]);
  return s;
}

ModuleSet ModuleSet::parse(const std::string &text) {
  if (text.empty() || text == "all")
    return all();
  std::string t = text;
  if (t.size() > 1 && (t[0] == 'C' || t[0] == 'c'))
    t = t.substr(1);
  if (t.rfind("3.", 0) == 0)
    t = t.substr(2);
  if (t.size() == 1 && t[0] >= '1' && t[0] <= '6')
    return configuration(t[0] - '0');

  ModuleSet s = none();
  std::istringstream in(text);
  std::string name;
  while (std::getline(in, name, ',')) {
    auto it = std::find(kNames.begin(), kNames.end(), name);
    if (it == kNames.end())
      throw std::invalid_argument("unknown module '" + name + "'");
    s = s.with(static_cast<ModuleId>(it - kNames.begin()));
  }
  return s;
}

std::string ModuleSet::str() const {
  std::string out;
  for (std::size_t i = 0; i < kModuleCount; ++i) {
    if (!has(static_cast<ModuleId>(i)))
      continue;
    if (!out.empty())
      out += ',';
    out += kNames[i];
  }
  return out.empty() ? "none" : out;
}

Orchestrator::Orchestrator(AtomTable &atoms, SatSolver &sat,
                           OrchestratorOptions options)
    : atoms_(atoms), sat_(sat), opt_(std::move(options)),
      linear_(atoms, opt_.linear), equiv_(atoms.field()),
      int_linear_(atoms, opt_.int_linear), clause_infer_(atoms),
      groebner_(atoms, opt_.groebner), real_nl_(atoms, opt_.real_nl) {}

BoolVar Orchestrator::var_for_atom(AtomId id) {
  if (atom_var_.size() <= id)
    atom_var_.resize(id + 1, kNoVar);
  if (atom_var_[id] == kNoVar) {
    BoolVar v = sat_.new_var(true);
    atom_var_[id] = v;
    var_atom_.emplace(v, id);
  }
  return atom_var_[id];
}

std::optional<AtomId> Orchestrator::atom_of(BoolVar v) const {
  auto it = var_atom_.find(v);
  if (it == var_atom_.end())
    return std::nullopt;
  return it->second;
}

void Orchestrator::on_assign(Lit lit, int level) {
  auto atom = atom_of(lit.var());
  if (!atom)
    return;
  trail_.push({*atom, !lit.negated(), lit, level});
}

void Orchestrator::on_backtrack(int level) {
  const std::size_t size = trail_.pop_above(level);
  if (opt_.modules.has(ModuleId::linear_ff))
    linear_.backtrack(size);
  if (opt_.modules.has(ModuleId::equiv))
    equiv_.backtrack(size);
  linear_done_ = std::min(linear_done_, size);
  equiv_done_ = std::min(equiv_done_, size);
}

void Orchestrator::explain(Lit propagated, std::vector<Lit> &out) {
  auto it = reasons_.find(propagated.code);
  if (it == reasons_.end())
    throw std::logic_error("no reason recorded for a theory propagation");
  out = it->second;
}

ModuleStats &Orchestrator::begin(ModuleId m, bool final) {
  ModuleStats &s = stats_[m];
  ++s.calls;
  if (!final)
    ++s.nonfinal_calls;
  return s;
}

bool Orchestrator::propagate(Lit lit, const Explanation &because, ModuleId by,
                             std::vector<Lit> &conflict) {
  switch (sat_.value(lit)) {
  case LBool::true_:
    return true;
  case LBool::false_:
    conflict = because;
    conflict.push_back(~lit);
    return false;
  case LBool::undef:
    break;
  }
  reasons_[lit.code] = because;
  sat_.theory_propagate(lit);
  ++stats_[by].propagations;
  return true;
}

bool Orchestrator::accept_model(const Assignment &sigma) {
  ++stats_.models_validated;
  if (!trail_holds(atoms_, trail_, sigma))
    return false;
  model_.clear();
  for (std::uint32_t i = 0; i < atoms_.vars().size(); ++i) {
    VarId v{i};
    if (atoms_.vars().kind(v) != VarKind::original)
      continue;
    auto it = sigma.find(v);
    model_[v] = it == sigma.end() ? FieldElement() : it->second;
  }
  return true;
}

Orchestrator::Step Orchestrator::sync_and_equiv(bool final, TheoryStatus &status,
                                                std::vector<Lit> &conflict) {
  if (opt_.modules.has(ModuleId::linear_ff))
    linear_.sync();
  if (!opt_.modules.has(ModuleId::equiv))
    return Step::next;

  ModuleStats &st = begin(ModuleId::equiv, final);
  Timer timer(st);
  for (; equiv_done_ < trail_.size(); ++equiv_done_) {
    const TrailEntry &e = trail_[equiv_done_];
    if (e.positive)
      equiv_.assert_equation(atoms_.atom(e.atom).poly, e.lit, equiv_done_);
  }
  // Monomial definitions are axioms; registering them after the trail
  // entries keeps the undo tags ordered.
  const auto &defs = atoms_.definitions();
  for (; defs_synced_ < defs.size(); ++defs_synced_)
    equiv_.register_definition(
        defs[defs_synced_].var,
        Polynomial::monomial(defs[defs_synced_].mono, atoms_.field().one()),
        std::nullopt, trail_.size());

  bool progress = false;
  for (DerivedEquality &d : equiv_.take_derived()) {
    ++stats_.equiv_derived;
    Polynomial diff = sub(atoms_.field(), atoms_.expand(d.a), atoms_.expand(d.b));
    auto interned = atoms_.intern(diff);
    if (interned.kind == AtomTable::Interned::Kind::truth)
      continue;
    if (interned.kind == AtomTable::Interned::Kind::falsity) {
      conflict = d.because;
      ++st.conflicts;
      status = TheoryStatus::conflict;
      return Step::stop;
    }
    Lit lit = atom_lit(interned.id, true);
    if (sat_.value(lit) == LBool::true_)
      continue;
    if (!propagate(lit, d.because, ModuleId::equiv, conflict)) {
      ++st.conflicts;
      status = TheoryStatus::conflict;
      return Step::stop;
    }
    progress = true;
  }
  if (progress) {
    // Let the SAT engine digest the new literals first.
    status = TheoryStatus::consistent;
    return Step::stop;
  }
  return Step::next;
}

Orchestrator::Step Orchestrator::run_linear(bool final, TheoryStatus &status,
                                            std::vector<Lit> &conflict) {
  ModuleStats &st = begin(ModuleId::linear_ff, final);
  Timer timer(st);
  for (; linear_done_ < trail_.size(); ++linear_done_) {
    if (auto why = linear_.assert_literal(trail_[linear_done_], linear_done_)) {
      conflict = std::move(*why);
      ++st.conflicts;
      status = TheoryStatus::conflict;
      return Step::stop;
    }
  }
  Explanation why;
  LinearModule::Outcome o = linear_.heavy_check(why, opt_.deadline);
  if (o == LinearModule::Outcome::conflict) {
    conflict = std::move(why);
    ++st.conflicts;
    status = TheoryStatus::conflict;
    return Step::stop;
  }
  if (o == LinearModule::Outcome::sat_candidate && final &&
      linear_.spurious_definitions().empty() && accept_model(linear_.model())) {
    stats_.model_source = ModuleId::linear_ff;
    status = TheoryStatus::sat;
    return Step::stop;
  }
  if (o != LinearModule::Outcome::sat_candidate)
    return Step::next;

  std::vector<bool> assigned(atoms_.size(), false);
  for (const TrailEntry &e : trail_)
    assigned[e.atom] = true;
  bool progress = false;
  for (const DomainFact &f : linear_.propagate(assigned)) {
    Lit lit;
    if (f.equal) {
      auto interned = atoms_.intern_domain(f.var, f.value);
      if (interned.kind != AtomTable::Interned::Kind::atom)
        continue;
      lit = atom_lit(interned.id, true);
    } else {
      auto id = atoms_.find_domain(f.var, f.value);
      if (!id)
        continue;
      lit = atom_lit(*id, false);
    }
    if (sat_.value(lit) == LBool::undef)
      progress = true;
    if (!propagate(lit, f.because, ModuleId::linear_ff, conflict)) {
      ++st.conflicts;
      status = TheoryStatus::conflict;
      return Step::stop;
    }
  }
  if (progress) {
    status = TheoryStatus::consistent;
    return Step::stop;
  }
  return Step::next;
}

Orchestrator::Step Orchestrator::run_int_linear(bool final, TheoryStatus &status,
                                                std::vector<Lit> &conflict) {
  ModuleStats &st = begin(ModuleId::int_linear, final);
  Timer timer(st);
  Explanation why;
  Deadline d = Deadline::earliest(opt_.deadline, Deadline::after(opt_.int_linear_budget));
  if (int_linear_.check(trail_, why, d) == IntLinearModule::Outcome::conflict) {
    conflict = std::move(why);
    ++st.conflicts;
    status = TheoryStatus::conflict;
    return Step::stop;
  }
  return Step::next;
}

Orchestrator::Step Orchestrator::run_clause_infer(bool final, TheoryStatus &status) {
  ModuleStats &st = begin(ModuleId::clause_infer, final);
  Timer timer(st);
  bool added = false;
  for (const InferredClause &c : clause_infer_.infer(trail_)) {
    std::vector<Lit> clause{~c.source_lit};
    bool tautology = false;
    for (const Polynomial &f : c.disjuncts) {
      auto interned = atoms_.intern(f);
      if (interned.kind == AtomTable::Interned::Kind::truth)
        tautology = true;
      else if (interned.kind == AtomTable::Interned::Kind::atom)
        clause.push_back(atom_lit(interned.id, true));
    }
    if (tautology)
      continue;
    std::sort(clause.begin(), clause.end());
    clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
    sat_.add_theory_lemma(std::move(clause));
    ++st.clauses;
    added = true;
  }
  if (added) {
    status = TheoryStatus::consistent;
    return Step::stop;
  }
  return Step::next;
}

Orchestrator::Step Orchestrator::run_final(TheoryStatus &status,
                                           std::vector<Lit> &conflict) {
  std::vector<Polynomial> basis;
  if (opt_.modules.has(ModuleId::groebner)) {
    ModuleStats &st = begin(ModuleId::groebner, true);
    Timer timer(st);
    Explanation why;
    Deadline d = Deadline::earliest(opt_.deadline, Deadline::after(opt_.groebner_budget));
    auto o = groebner_.check(trail_, why, d);
    stats_.gb_certificate_checks = groebner_.certificate_checks();
    if (o == GroebnerModule::Outcome::conflict) {
      conflict = std::move(why);
      ++st.conflicts;
      status = TheoryStatus::conflict;
      return Step::stop;
    }
    basis = groebner_.basis();
  }
  if (opt_.modules.has(ModuleId::real_nl)) {
    ModuleStats &st = begin(ModuleId::real_nl, true);
    Timer timer(st);
    Deadline d = Deadline::earliest(opt_.deadline, Deadline::after(opt_.real_nl_budget));
    if (auto m = real_nl_.check(trail_, basis, d); m && accept_model(*m)) {
      stats_.model_source = ModuleId::real_nl;
      status = TheoryStatus::sat;
      return Step::stop;
    }
  }
  status = TheoryStatus::unknown;
  return Step::stop;
}

TheoryStatus Orchestrator::check(bool final, std::vector<Lit> &conflict) {
  TheoryStatus status = TheoryStatus::consistent;
  if (sync_and_equiv(final, status, conflict) == Step::stop)
    return status;
  if (opt_.modules.has(ModuleId::linear_ff) &&
      run_linear(final, status, conflict) == Step::stop)
    return status;
  if (opt_.modules.has(ModuleId::int_linear) &&
      run_int_linear(final, status, conflict) == Step::stop)
    return status;
  if (opt_.modules.has(ModuleId::clause_infer) &&
      run_clause_infer(final, status) == Step::stop)
    return status;
  if (!final)
    return TheoryStatus::consistent;
  run_final(status, conflict);
  return status;
}

} // namespace zpsmt
