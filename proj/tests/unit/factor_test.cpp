#include "zpsmt/clause_infer.hpp"
#include "zpsmt/factor.hpp"

#include <gtest/gtest.h>

using namespace zpsmt;

namespace {

struct FactorTest : ::testing::Test {
  Field f{Prime(Integer(7))};
  VarTable vars;
  Polynomial P(const char *text) { return parse_polynomial(text, f, vars); }
  VarId V(const char *name) { return *vars.find(name); }

  Polynomial product(const std::vector<Polynomial> &fs) {
    Polynomial acc = Polynomial::constant(f.one());
    for (const Polynomial &g : fs)
      acc = mul(f, acc, g);
    return acc;
  }
};

} // namespace

TEST_F(FactorTest, QuadraticRoots) {
  auto r = factor_quadratic_univariate(f, P("x^2 - 3*x + 2"));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->first.residue, 1);
  EXPECT_EQ(r->second.residue, 2);
  auto d = factor_quadratic_univariate(f, P("x^2 + 2*x + 1"));
  ASSERT_TRUE(d);
  EXPECT_EQ(d->first.residue, 6);
  EXPECT_EQ(d->second.residue, 6);
  EXPECT_FALSE(factor_quadratic_univariate(f, P("x^2 + 1")));
  EXPECT_FALSE(factor_quadratic_univariate(f, P("x*y + 1")));
}

TEST_F(FactorTest, CommonVariable) {
  auto c = extract_common_variable(f, P("x*y + x"));
  ASSERT_TRUE(c);
  EXPECT_EQ(c->var, V("x"));
  EXPECT_EQ(c->quotient, P("y + 1"));
  EXPECT_FALSE(extract_common_variable(f, P("x*y + 1")));
}

TEST_F(FactorTest, ProductOfRoots) {
  auto same = match_product_of_roots(f, P("x^2 - x"));
  ASSERT_TRUE(same);
  ASSERT_EQ(same->size(), 2u);
  auto distinct = match_product_of_roots(f, P("3*x*y - 6*x - 3*y + 6"));
  ASSERT_TRUE(distinct);
  ASSERT_EQ(distinct->size(), 2u);
  for (const RootFactor &r : *distinct)
    EXPECT_EQ(r.root.residue, r.var == V("x") ? 1 : 2);
  EXPECT_FALSE(match_product_of_roots(f, P("x^2 + 1")));
  EXPECT_FALSE(match_product_of_roots(f, P("x*y + z")));
}

TEST_F(FactorTest, TwoLinearFactors) {
  Polynomial g = P("x^2 - y^2 + x + y");
  auto split = factor_two_linear(f, g);
  ASSERT_TRUE(split);
  Polynomial prod = mul(f, split->first, split->second);
  EXPECT_EQ(make_monic(f, prod), make_monic(f, g));
  EXPECT_FALSE(factor_two_linear(f, P("x^2 + y^2 + 1")));
}

TEST_F(FactorTest, SplitEquationFactoringExample) {
  auto parts = split_equation(f, P("x*y + x"));
  ASSERT_TRUE(parts);
  ASSERT_EQ(parts->size(), 2u);
  EXPECT_EQ(make_monic(f, product(*parts)), P("x*y + x"));
}

TEST_F(FactorTest, SplitEquationRejectsIrreducible) {
  EXPECT_FALSE(split_equation(f, P("x^2 + 1")));
  EXPECT_FALSE(split_equation(f, P("x + y")));
  // A repeated root says nothing new.
  EXPECT_FALSE(split_equation(f, P("x^2 - 2*x + 1")));
}
