// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
//
//   C1  regression instances, total under 10 s
//   C2  random instances vs exhaustive enumeration, under 2 min
//   C3  every Groebner conflict carries a verified certificate
//   C4  every sat verdict survives model validation from the source text
//   C5  property suites, under 1 min
//   C6  groebner/real-nl only at final checks; ablation is monotone
//   C7  x^2 = 3 over Z_7 is unknown, never unsat

#include "oracle.hpp"

#include "zpsmt/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace zpsmt;

namespace {

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct Instance {
  std::string name;
  std::string text;
  Verdict expected;
};

std::vector<Instance> load_regression() {
  std::vector<Instance> out;
  for (const auto &e : fs::directory_iterator(ZPSMT_REGRESSION_DIR)) {
    if (e.path().extension() != ".smt2")
      continue;
    std::ifstream in(e.path());
    std::stringstream s;
    s << in.rdbuf();
    std::string stem = e.path().stem().string();
    Verdict v = stem.ends_with("_unsat") ? Verdict::unsat
                : stem.ends_with("_sat") ? Verdict::sat
                                         : Verdict::unknown;
    out.push_back({stem, s.str(), v});
  }
  std::sort(out.begin(), out.end(), [](auto &a, auto &b) { return a.name < b.name; });
  return out;
}

/// Totals collected across every solve in the run, for C3, C4 and C6.
struct Ledger {
  std::uint64_t solves = 0;
  std::uint64_t gb_conflicts = 0;
  std::uint64_t gb_checks = 0;
  std::uint64_t sat_verdicts = 0;
  std::uint64_t sat_validated = 0;
  std::uint64_t nonfinal_calls = 0;
  std::vector<std::string> errors;
};
Ledger ledger;

SolveResult run(const std::string &name, const std::string &text, SolverOptions opt) {
  Script script = parse_script(text);
  SolveResult r;
  try {
    r = solve(script, opt);
  } catch (const std::exception &e) {
    ledger.errors.push_back(name + ": " + e.what());
    r.verdict = Verdict::unknown;
    return r;
  }
  ++ledger.solves;
  ledger.gb_conflicts += r.theory[ModuleId::groebner].conflicts;
  ledger.gb_checks += r.theory.gb_certificate_checks;
  ledger.nonfinal_calls += r.theory[ModuleId::groebner].nonfinal_calls +
                           r.theory[ModuleId::real_nl].nonfinal_calls;
  if (r.verdict == Verdict::sat) {
    ++ledger.sat_verdicts;
    if (model_satisfies_source(text, script, r))
      ++ledger.sat_validated;
    else
      ledger.errors.push_back(name + ": model fails validation");
  }
  return r;
}

int failures = 0;

void report(bool ok, const char *id, const std::string &text) {
  std::cout << (ok ? "PASS" : "FAIL") << "  " << id << "  " << text << std::endl;
  if (!ok)
    ++failures;
}

void note(const std::string &text) { std::cout << "      " << text << std::endl; }

// ---------------------------------------------------------------------------

void criterion_regression(const std::vector<Instance> &suite) {
  double t0 = now_s();
  unsigned ok = 0, total = 0;
  std::vector<std::string> bad;
  for (const Instance &inst : suite) {
    if (inst.expected == Verdict::unknown)
      continue;
    ++total;
    SolveResult r = run(inst.name, inst.text, {});
    bool good = r.verdict == inst.expected;
    if (inst.name.starts_with("circuit"))
      good = good && r.theory.equiv_derived >= 4;
    if (inst.name.starts_with("bitsum") && inst.expected == Verdict::unsat)
      good = good && r.theory[ModuleId::int_linear].conflicts > 0 &&
             r.theory[ModuleId::groebner].calls == 0;
    if (inst.name.starts_with("shared_w"))
      good = good && r.theory[ModuleId::int_linear].conflicts > 0;
    if (good)
      ++ok;
    else
      bad.push_back(inst.name + " -> " + verdict_name(r.verdict));
  }
  // The retracted variant again with only the non-linear modules, so the
  // model has to come from lifting.
  SolverOptions nl;
  nl.modules = ModuleSet::none().with(ModuleId::groebner).with(ModuleId::real_nl);
  for (const Instance &inst : suite)
    if (inst.name == "ex1_retracted_sat") {
      ++total;
      SolveResult r = run(inst.name + "[groebner,real-nl]", inst.text, nl);
      if (r.verdict == Verdict::sat && r.theory.model_source == ModuleId::real_nl)
        ++ok;
      else
        bad.push_back(inst.name + " not lifted by real-nl");
    }
  double secs = now_s() - t0;
  std::ostringstream s;
  s << "regression suite: " << ok << "/" << total << " in " << secs << " s";
  report(ok == total && secs < 10, "C1", s.str());
  for (const auto &b : bad)
    note(b);
}

void criterion_oracle() {
  double t0 = now_s();
  std::mt19937_64 rng(20240611);
  unsigned n = 500, disagree = 0, bad_unknown = 0, unknown = 0, sats = 0;
  for (unsigned i = 0; i < n; ++i) {
    oracle::RawInstance inst = oracle::random_instance(rng);
    auto truth = inst.brute_force();
    SolverOptions opt;
    opt.timeout = 20;
    std::string text = inst.smtlib();
    SolveResult r = run("random#" + std::to_string(i), text, opt);
    sats += truth.has_value();
    if (r.verdict == Verdict::unknown) {
      ++unknown;
      bad_unknown += !truth;
    } else if ((r.verdict == Verdict::sat) != truth.has_value()) {
      ++disagree;
      note("disagreement on random#" + std::to_string(i) + ":\n" + text);
    }
    if (r.verdict == Verdict::sat) {
      std::vector<oracle::u64> x(inst.vars);
      Script s = parse_script(text);
      for (unsigned v = 0; v < inst.vars; ++v)
        x[v] = r.model.at(*s.vars.find(inst.var_name(v))).residue.get_ui();
      if (!inst.holds(x))
        ledger.errors.push_back("random#" + std::to_string(i) + ": oracle rejects model");
    }
  }
  double secs = now_s() - t0;
  std::ostringstream s;
  s << "oracle equivalence: " << n << " instances (" << sats << " sat by enumeration), "
    << disagree << " disagreements, " << unknown << " unknown (" << bad_unknown
    << " on unsat) in " << secs << " s";
  report(disagree == 0 && bad_unknown == 0 && secs < 120, "C2", s.str());

  // Groebner-only runs give the certificate check more conflicts to see.
  std::mt19937_64 rng2(77);
  SolverOptions gb;
  gb.modules = ModuleSet::configuration(1);
  gb.timeout = 10;
  for (unsigned i = 0; i < 200; ++i) {
    oracle::RawInstance inst = oracle::random_instance(rng2);
    run("random-gb#" + std::to_string(i), inst.smtlib(), gb);
  }
}

void criterion_certificates() {
  std::ostringstream s;
  s << "Groebner certificates: " << ledger.gb_checks << " verified for " << ledger.gb_conflicts
    << " conflicts over " << ledger.solves << " solves";
  bool thrown = std::any_of(ledger.errors.begin(), ledger.errors.end(), [](auto &e) {
    return e.find("certificate") != std::string::npos;
  });
  report(ledger.gb_conflicts > 0 && ledger.gb_checks == ledger.gb_conflicts && !thrown, "C3",
         s.str());
}

void criterion_models(const std::vector<Instance> &suite) {
  // The in-process count, plus the command-line gate on the sat instances.
  unsigned cli_ok = 0, cli_total = 0;
  for (const auto &e : fs::directory_iterator(ZPSMT_REGRESSION_DIR)) {
    std::string stem = e.path().stem().string();
    if (!stem.ends_with("_sat") || stem.ends_with("_unsat"))
      continue;
    ++cli_total;
    std::string cmd = std::string("\"") + ZPSMT_CLI + "\" --validate-model \"" +
                      e.path().string() + "\" > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    if (status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 10)
      ++cli_ok;
  }
  (void)suite;
  std::ostringstream s;
  s << "model validation: " << ledger.sat_validated << "/" << ledger.sat_verdicts
    << " in-process, " << cli_ok << "/" << cli_total << " via --validate-model";
  report(ledger.sat_verdicts > 0 && ledger.sat_validated == ledger.sat_verdicts &&
             cli_ok == cli_total,
         "C4", s.str());
}

void criterion_properties() {
  double t0 = now_s();
  std::string cmd = std::string("\"") + ZPSMT_PROPERTY_BIN +
                    "\" --gtest_brief=1 > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  double secs = now_s() - t0;
  bool ok = status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0;
  std::ostringstream s;
  s << "property suites: " << (ok ? "all passed" : "failures") << " in " << secs << " s";
  report(ok && secs < 60, "C5", s.str());
}

void criterion_orchestration(const std::vector<Instance> &suite) {
  std::map<int, std::set<std::string>> solved;
  for (int n = 1; n <= 6; ++n) {
    SolverOptions opt;
    opt.modules = ModuleSet::configuration(n);
    opt.timeout = 3;
    for (const Instance &inst : suite) {
      SolveResult r = run(inst.name + "[C3." + std::to_string(n) + "]", inst.text, opt);
      if (r.verdict != Verdict::unknown && r.verdict == inst.expected)
        solved[n].insert(inst.name);
    }
  }
  bool monotone = true;
  std::ostringstream counts;
  for (int n = 1; n <= 6; ++n) {
    counts << (n > 1 ? " " : "") << "C3." << n << "=" << solved[n].size();
    if (n > 1)
      for (const auto &name : solved[n - 1])
        if (!solved[n].count(name)) {
          monotone = false;
          note("C3." + std::to_string(n) + " loses " + name);
        }
  }
  std::ostringstream s;
  s << "orchestration: nonfinal groebner/real-nl calls " << ledger.nonfinal_calls
    << ", ablation " << counts.str();
  report(ledger.nonfinal_calls == 0 && monotone, "C6", s.str());
}

void criterion_nonresidue() {
  const char *text = "(declare-fun x () (_ FiniteField 7))\n"
                     "(assert (= (ff.mul x x) #f3m7))\n";
  bool never_unsat = true;
  Verdict base = Verdict::sat;
  for (int n = 1; n <= 6; ++n)
    for (std::uint64_t seed : {0u, 1u, 2u}) {
      SolverOptions opt;
      opt.modules = ModuleSet::configuration(n);
      opt.seed = seed;
      SolveResult r = run("x^2=3", text, opt);
      never_unsat = never_unsat && r.verdict != Verdict::unsat;
      if (n == 6 && seed == 0)
        base = r.verdict;
    }
  report(never_unsat && base == Verdict::unknown, "C7",
         std::string("x^2 = 3 over Z_7: ") + verdict_name(base) + ", never unsat");
}

} // namespace

int main() {
  std::vector<Instance> suite = load_regression();
  criterion_regression(suite);
  criterion_oracle();
  criterion_orchestration(suite);
  criterion_certificates();
  criterion_models(suite);
  criterion_properties();
  criterion_nonresidue();
  if (!ledger.errors.empty()) {
    note("solver errors:");
    for (const auto &e : ledger.errors)
      note("  " + e);
  }
  return failures == 0 && ledger.errors.empty() ? 0 : 1;
}
