#include "zpsmt/groebner.hpp"
#include "zpsmt/solver.hpp"

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <string>

using namespace zpsmt;

namespace {

const char *kBn254 =
    "21888242871839275222246405745257275088548364400416034343698204186575808495617";

std::string slurp(const std::string &name) {
  std::ifstream in(std::string(ZPSMT_REGRESSION_DIR) + "/" + name + ".smt2");
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void BM_FieldMul(benchmark::State &state, const char *modulus) {
  Field f{Prime(Integer(modulus))};
  FieldElement a = f.from_long(123456789), b = f.from_long(987654321);
  for (auto _ : state) {
    a = f.mul(a, b);
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK_CAPTURE(BM_FieldMul, p257, "257");
BENCHMARK_CAPTURE(BM_FieldMul, bn254, kBn254);

void BM_PolyMul(benchmark::State &state) {
  Field f{Prime(Integer(257))};
  VarTable vars;
  Polynomial a = parse_polynomial("x^2 + 3*x*y + y^2 + 5*z + 1", f, vars);
  Polynomial p = Polynomial::constant(f.one());
  for (long i = 0; i < state.range(0); ++i)
    p = mul(f, p, a);
  for (auto _ : state)
    benchmark::DoNotOptimize(mul(f, p, a));
  state.counters["terms"] = static_cast<double>(p.terms().size());
}
BENCHMARK(BM_PolyMul)->Arg(1)->Arg(3)->Arg(5);

// Bit-decomposition ideal: two 4-bit sums agree but their low bits differ.
void BM_GroebnerBitsum(benchmark::State &state) {
  Field f{Prime(Integer(257))};
  VarTable vars;
  auto P = [&](const char *t) { return parse_polynomial(t, f, vars); };
  std::vector<Polynomial> gens{
      P("x0^2 - x0"), P("x1^2 - x1"), P("x2^2 - x2"), P("x3^2 - x3"),
      P("y0^2 - y0"), P("y1^2 - y1"), P("y2^2 - y2"), P("y3^2 - y3"),
      P("s - x0 - 2*x1 - 4*x2 - 8*x3"), P("s - y0 - 2*y1 - 4*y2 - 8*y3"),
      P("u*(x0 - y0) - 1")};
  for (auto _ : state) {
    GroebnerResult r = groebner(f, gens);
    benchmark::DoNotOptimize(r.certificate);
  }
}
BENCHMARK(BM_GroebnerBitsum)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State &state, const char *name) {
  std::string text = slurp(name);
  for (auto _ : state) {
    SolveResult r = solve(parse_script(text));
    benchmark::DoNotOptimize(r.verdict);
  }
}
BENCHMARK_CAPTURE(BM_Solve, ex1, "ex1_unsat")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, circuit, "circuit_weak_safety_unsat")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, bitsum_n8, "bitsum_n8_p257_i0_unsat")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, factoring, "factoring_unsat")->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
