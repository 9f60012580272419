// zpsmt: command-line front end.
//
//   zpsmt [options] FILE.smt2        solve one script
//   zpsmt [options] --bench DIR      solve every .smt2 under DIR, emit CSV
//
// Exit codes: 10 sat, 20 unsat, 0 unknown, 1 error.

#include "zpsmt/solver.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace zpsmt;

namespace {

constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;
constexpr int kExitUnknown = 0;
constexpr int kExitError = 1;

struct RunConfig {
  std::string input;
  std::string bench_dir;
  std::string csv_path;
  std::string modules = "all";
  bool stats = false;
  bool validate_model = false;
  bool dump_model = false;
  SolverOptions solver;
};

int exit_code(Verdict v) {
  switch (v) {
  case Verdict::sat:
    return kExitSat;
  case Verdict::unsat:
    return kExitUnsat;
  case Verdict::unknown:
    break;
  }
  return kExitUnknown;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void print_model(std::ostream &out, const Script &script, const SolveResult &r) {
  const Field field = script_field(script);
  out << "(\n";
  for (std::uint32_t i = 0; i < script.vars.size(); ++i) {
    VarId v{i};
    out << "  (define-fun " << script.vars.name(v) << " () (_ FiniteField "
        << field.modulus().get_str() << ") #f" << r.model.at(v).str() << ")\n";
  }
  for (std::size_t i = 0; i < script.bool_names.size(); ++i)
    out << "  (define-fun " << script.bool_names[i] << " () Bool "
        << (r.bools[i] ? "true" : "false") << ")\n";
  out << ")\n";
}

void print_stats(std::ostream &out, const SolveResult &r) {
  out << "; " << std::left << std::setw(14) << "module" << std::right
      << std::setw(8) << "calls" << std::setw(10) << "nonfinal" << std::setw(10)
      << "conflicts" << std::setw(8) << "props" << std::setw(9) << "clauses"
      << std::setw(10) << "time_s" << "\n";
  for (std::size_t i = 0; i < kModuleCount; ++i) {
    const ModuleStats &m = r.theory.modules[i];
    out << "; " << std::left << std::setw(14) << module_name(static_cast<ModuleId>(i))
        << std::right << std::setw(8) << m.calls << std::setw(10) << m.nonfinal_calls
        << std::setw(10) << m.conflicts << std::setw(8) << m.propagations
        << std::setw(9) << m.clauses << std::setw(10) << std::fixed
        << std::setprecision(4) << m.seconds << "\n";
  }
  out << "; equiv-derived " << r.theory.equiv_derived << "\n"
      << "; gb-certificate-checks " << r.theory.gb_certificate_checks << "\n";
  if (r.theory.model_source)
    out << "; model-from " << module_name(*r.theory.model_source) << "\n";
  out      << "; sat decisions " << r.sat.decisions << " conflicts " << r.sat.conflicts
      << " theory-conflicts " << r.sat.theory_conflicts << " restarts "
      << r.sat.restarts << " unknown-leaves " << r.sat.unknown_leaves << "\n"
      << "; atoms " << r.atoms << " time " << std::setprecision(4) << r.seconds
      << "\n";
}

int run_single(const RunConfig &cfg) {
  std::string text = read_file(cfg.input);
  Script script = parse_script(text);
  SolveResult r = solve(script, cfg.solver);
  std::cout << verdict_name(r.verdict) << "\n";
  if (r.verdict == Verdict::sat) {
    if (cfg.validate_model && !model_satisfies_source(text, script, r)) {
      std::cerr << "error: model fails validation against the input\n";
      return kExitError;
    }
    bool wants = cfg.dump_model ||
                 std::find(script.commands.begin(), script.commands.end(),
                           Command::get_model) != script.commands.end();
    if (wants)
      print_model(std::cout, script, r);
  }
  if (cfg.stats)
    print_stats(std::cout, r);
  return exit_code(r.verdict);
}

void csv_header(std::ostream &out) {
  out << "file,verdict,time_s";
  for (std::size_t i = 0; i < kModuleCount; ++i) {
    std::string m = module_name(static_cast<ModuleId>(i));
    std::replace(m.begin(), m.end(), '-', '_');
    out << ',' << m << "_calls," << m << "_conflicts," << m << "_propagations,"
        << m << "_clauses," << m << "_time_s";
  }
  out << ",equiv_derived,gb_certificate_checks,sat_decisions,sat_conflicts\n";
}

int run_bench(const RunConfig &cfg) {
  std::vector<fs::path> files;
  for (const auto &entry : fs::recursive_directory_iterator(cfg.bench_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".smt2")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::ofstream file_out;
  if (!cfg.csv_path.empty()) {
    file_out.open(cfg.csv_path);
    if (!file_out)
      throw std::runtime_error("cannot write " + cfg.csv_path);
  }
  std::ostream &out = cfg.csv_path.empty() ? std::cout : file_out;
  csv_header(out);
  for (const fs::path &path : files) {
    std::string name = fs::relative(path, cfg.bench_dir).string();
    try {
      std::string text = read_file(path.string());
      Script script = parse_script(text);
      SolveResult r = solve(script, cfg.solver);
      std::string verdict = verdict_name(r.verdict);
      if (r.verdict == Verdict::sat && cfg.validate_model &&
          !model_satisfies_source(text, script, r))
        verdict = "invalid-model";
      out << name << ',' << verdict << ',' << std::fixed << std::setprecision(4)
          << r.seconds;
      for (const ModuleStats &m : r.theory.modules)
        out << ',' << m.calls << ',' << m.conflicts << ',' << m.propagations << ','
            << m.clauses << ',' << m.seconds;
      out << ',' << r.theory.equiv_derived << ',' << r.theory.gb_certificate_checks
          << ',' << r.sat.decisions << ',' << r.sat.conflicts << "\n";
    } catch (const std::exception &e) {
      std::cerr << name << ": " << e.what() << "\n";
      out << name << ",error,0";
      for (std::size_t i = 0; i < kModuleCount; ++i)
        out << ",0,0,0,0,0";
      out << ",0,0,0,0\n";
    }
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"SMT solver for quantifier-free prime-field constraints"};
  RunConfig cfg;
  app.add_option("input", cfg.input, "SMT-LIB 2 script");
  app.add_option("--bench", cfg.bench_dir, "Solve every .smt2 file under a directory")
      ->check(CLI::ExistingDirectory);
  app.add_option("--csv", cfg.csv_path, "Write the batch CSV here instead of stdout");
  app.add_option("--timeout", cfg.solver.timeout, "Wall-clock limit in seconds (0: none)");
  app.add_option("--seed", cfg.solver.seed, "Random seed");
  app.add_option("--modules", cfg.modules,
                 "C3.1..C3.6, 'all', or a comma list of module names");
  app.add_option("--gb-order", cfg.solver.gb_order, "Monomial order for Groebner bases")
      ->check(CLI::IsMember({"grevlex", "lex"}));
  app.add_flag("--stats", cfg.stats, "Print per-module statistics");
  app.add_flag("--validate-model", cfg.validate_model,
               "Re-evaluate sat models against the re-parsed input");
  app.add_flag("--dump-model", cfg.dump_model, "Print the model even without (get-model)");
  app.add_flag("--randomize-values", cfg.solver.randomize_values,
               "Randomize initial values in the linear module");
  app.add_flag("--overflow-encoding", cfg.solver.overflow_encoding,
               "Encode overflowing linear literals with quotient variables");
  bool no_restarts = false;
  app.add_flag("--no-restarts", no_restarts, "Disable SAT restarts");
  app.add_option("--lia-solver", cfg.solver.lia_solver,
                 "External QF_LIA solver command (reads a file argument)");
  app.add_option("--nra-solver", cfg.solver.nra_solver,
                 "External QF_NRA solver command (reads a file argument)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }
  cfg.solver.restarts = !no_restarts;

  try {
    cfg.solver.modules = ModuleSet::parse(cfg.modules);
    if (!cfg.bench_dir.empty())
      return run_bench(cfg);
    if (cfg.input.empty()) {
      std::cerr << "error: no input file\n";
      return kExitError;
    }
    return run_single(cfg);
  } catch (const ParseError &e) {
    std::cerr << cfg.input << ":" << e.what() << "\n";
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitError;
}
