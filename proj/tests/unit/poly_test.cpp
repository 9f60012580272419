#include "zpsmt/poly.hpp"

#include <gtest/gtest.h>

using namespace zpsmt;

namespace {

struct PolyTest : ::testing::Test {
  Field f{Prime(Integer(7))};
  VarTable vars;
  Polynomial P(const char *text) { return parse_polynomial(text, f, vars); }
};

} // namespace

TEST_F(PolyTest, ParseMergesLikeTermsAndDropsZeros) {
  Polynomial a = P("x*y + 3*x*y - 4*y*x + 2");
  EXPECT_TRUE(a.is_constant());
  EXPECT_EQ(a.constant_term().residue, 2);
  EXPECT_TRUE(P("7*x").is_zero());
}

TEST_F(PolyTest, ArithmeticIdentities) {
  Polynomial a = P("x^2 + 2*x*y + 3");
  Polynomial b = P("y - x + 1");
  EXPECT_EQ(sub(f, add(f, a, b), b), a);
  EXPECT_EQ(mul(f, a, b), mul(f, b, a));
  EXPECT_TRUE(add(f, a, neg(f, a)).is_zero());
  EXPECT_EQ(pow(f, b, 2), mul(f, b, b));
}

TEST_F(PolyTest, GrevlexLeadingTerm) {
  P("x + y + z"); // fixes x > y > z
  Polynomial a = P("x*z^2 + x^2*y + y^3");
  // Degree 3 everywhere; grevlex breaks ties on the last variable.
  EXPECT_EQ(to_string(Polynomial::monomial(a.leading().mono, f.one()), vars), "x^2*y");
}

TEST_F(PolyTest, LexOrderWithPrecedence) {
  Polynomial a = P("x + y^5");
  VarId x = *vars.find("x"), y = *vars.find("y");
  auto lex_x = MonomialOrder::lex({x, y});
  auto lex_y = MonomialOrder::lex({y, x});
  EXPECT_TRUE(a.terms()[a.leading_index(lex_x)].mono == Monomial::of(x));
  EXPECT_TRUE(a.terms()[a.leading_index(lex_y)].mono == Monomial::of(y, 5));
  EXPECT_TRUE(a.terms()[a.leading_index(MonomialOrder::grevlex())].mono == Monomial::of(y, 5));
}

TEST_F(PolyTest, SubstituteAndEvaluate) {
  Polynomial a = P("x^2 + y");
  VarId x = *vars.find("x"), y = *vars.find("y");
  Polynomial b = substitute(f, a, x, P("y + 1"));
  EXPECT_EQ(b, P("y^2 + 3*y + 1"));
  Assignment sigma{{x, f.from_long(2)}, {y, f.from_long(5)}};
  EXPECT_EQ(evaluate(f, a, sigma).residue, 2);
  sigma.erase(y);
  EXPECT_THROW(evaluate(f, a, sigma), UnboundVariable);
}

TEST_F(PolyTest, MakeMonic) {
  Polynomial a = P("3*x + 6");
  EXPECT_EQ(make_monic(f, a), P("x + 2"));
  EXPECT_TRUE(make_monic(f, Polynomial()).is_zero());
}

TEST_F(PolyTest, ReduceByChain) {
  Polynomial fpoly = P("x^2*y + x*y^2 + y^2");
  std::vector<Polynomial> divs{P("x*y - 1"), P("y^2 - 1")};
  auto order = MonomialOrder::lex();
  Division d = reduce(f, fpoly, divs, order);
  Polynomial back = d.remainder;
  for (std::size_t i = 0; i < divs.size(); ++i)
    back = add(f, back, mul(f, d.cofactors[i], divs[i]));
  EXPECT_EQ(back, fpoly);
  // x + y + 1 is the textbook remainder for this order.
  EXPECT_EQ(d.remainder, P("x + y + 1"));
}

TEST_F(PolyTest, MonomialDivisibility) {
  VarId x = vars.add("a", VarKind::original), y = vars.add("b", VarKind::original);
  Monomial m1 = Monomial::from_powers({{x, 1}, {y, 2}});
  Monomial m2 = Monomial::from_powers({{y, 1}, {x, 3}, {y, 2}});
  EXPECT_TRUE(m1.divides(m2));
  EXPECT_FALSE(m2.divides(m1));
  EXPECT_EQ(m1.quotient_of(m2), Monomial::from_powers({{x, 2}, {y, 1}}));
  EXPECT_EQ(m1.lcm(Monomial::of(x, 4)), Monomial::from_powers({{x, 4}, {y, 2}}));
  EXPECT_FALSE(m1.coprime(m2));
  EXPECT_TRUE(Monomial::of(x).coprime(Monomial::of(y)));
}

TEST_F(PolyTest, ParseErrors) {
  EXPECT_THROW(P("x +"), PolyParseError);
  EXPECT_THROW(P("(x"), PolyParseError);
}
