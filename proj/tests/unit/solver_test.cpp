#include "zpsmt/solver.hpp"

#include <gtest/gtest.h>

using namespace zpsmt;

namespace {

SolveResult run(const std::string &text, SolverOptions opt = {}) {
  Script s = parse_script(text);
  SolveResult r = solve(s, opt);
  if (r.verdict == Verdict::sat)
    EXPECT_TRUE(model_satisfies(s, r));
  return r;
}

const char *kExample1 = R"(
  (declare-fun x () (_ FiniteField 7))
  (assert (= (ff.mul x (ff.add x #f6m7)) #f0m7))
  (assert (not (= x #f0m7)))
  (assert (not (= x #f1m7)))
)";

} // namespace

TEST(Solve, TrivialEquality) {
  SolveResult r = run("(declare-fun x () (_ FiniteField 5)) (assert (= x x))");
  EXPECT_EQ(r.verdict, Verdict::sat);
  EXPECT_EQ(r.model.size(), 1u);
}

TEST(Solve, EmptyScriptIsSat) {
  EXPECT_EQ(run("").verdict, Verdict::sat);
  EXPECT_EQ(run("(assert false)").verdict, Verdict::unsat);
}

TEST(Solve, ExampleOneUnsatInEveryConfiguration) {
  for (int n = 1; n <= 6; ++n) {
    SolverOptions opt;
    opt.modules = ModuleSet::configuration(n);
    EXPECT_EQ(run(kExample1, opt).verdict, Verdict::unsat) << n;
  }
}

TEST(Solve, LinearSystemSat) {
  SolveResult r = run(R"(
    (declare-fun x () (_ FiniteField 13))
    (declare-fun y () (_ FiniteField 13))
    (assert (= (ff.add x (ff.mul #f2m13 y)) #f5m13))
    (assert (not (= x #f5m13)))
    (assert (not (= y #f0m13)))
  )");
  EXPECT_EQ(r.verdict, Verdict::sat);
}

TEST(Solve, BooleanStructure) {
  SolveResult r = run(R"(
    (declare-fun x () (_ FiniteField 7))
    (declare-const a Bool)
    (declare-const b Bool)
    (assert (xor a b))
    (assert (=> a (= x #f3m7)))
    (assert (=> b (= x #f4m7)))
    (assert (not (= (ff.mul x x) #f2m7)))
  )");
  // x^2 = 2 holds for both 3 and 4.
  EXPECT_EQ(r.verdict, Verdict::unsat);
}

TEST(Solve, NonResidueIsNeverUnsat) {
  SolveResult r = run(R"(
    (declare-fun x () (_ FiniteField 7))
    (assert (= (ff.mul x x) #f3m7))
  )");
  EXPECT_EQ(r.verdict, Verdict::unknown);
}

TEST(Solve, ModelSatisfiesRejectsBadModel) {
  Script s = parse_script("(declare-fun x () (_ FiniteField 5)) (assert (= x #f1m5))");
  SolveResult r = solve(s);
  ASSERT_EQ(r.verdict, Verdict::sat);
  r.model[*s.vars.find("x")] = FieldElement(Integer(2));
  EXPECT_FALSE(model_satisfies(s, r));
}

TEST(Solve, GroebnerAndRealNlOnlyAtFinalChecks) {
  SolveResult r = run(R"(
    (declare-fun x () (_ FiniteField 11))
    (declare-fun y () (_ FiniteField 11))
    (assert (or (= (ff.mul x y) #f1m11) (= (ff.mul x x y) #f2m11)))
    (assert (or (= (ff.add x y) #f3m11) (= (ff.mul y y) #f5m11)))
  )");
  EXPECT_NE(r.verdict, Verdict::unsat);
  EXPECT_EQ(r.theory[ModuleId::groebner].nonfinal_calls, 0u);
  EXPECT_EQ(r.theory[ModuleId::real_nl].nonfinal_calls, 0u);
}

TEST(ModuleSet, ParsesConfigurationsAndLists) {
  EXPECT_EQ(ModuleSet::parse("C3.1"), ModuleSet::none().with(ModuleId::groebner));
  EXPECT_EQ(ModuleSet::parse("3.6"), ModuleSet::all());
  EXPECT_EQ(ModuleSet::parse("all"), ModuleSet::all());
  EXPECT_EQ(ModuleSet::parse("groebner,real-nl"),
            ModuleSet::none().with(ModuleId::groebner).with(ModuleId::real_nl));
  EXPECT_THROW(ModuleSet::parse("C3.9"), std::invalid_argument);
  EXPECT_THROW(ModuleSet::parse("simplex"), std::invalid_argument);
  for (int n = 1; n < 6; ++n) {
    ModuleSet a = ModuleSet::configuration(n), b = ModuleSet::configuration(n + 1);
    for (unsigned m = 0; m < kModuleCount; ++m)
      if (a.has(static_cast<ModuleId>(m)))
        EXPECT_TRUE(b.has(static_cast<ModuleId>(m)));
  }
}
