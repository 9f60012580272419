#include "zpsmt/smtlib.hpp"

#include <gtest/gtest.h>

using namespace zpsmt;

TEST(SmtLib, ParsesDeclarationsAndCommands) {
  Script s = parse_script(R"(
    (set-logic QF_FF)
    (set-info :status unsat)
    (define-sort F () (_ FiniteField 7))
    (declare-fun x () F)
    (declare-const y F)
    (declare-const b Bool)
    (assert (= (ff.mul x y) (as ff1 F)))
    (assert (or b (not (= x #f3m7))))
    (check-sat)
    (get-model)
    (exit)
    (this is ignored)
  )");
  EXPECT_EQ(s.logic, "QF_FF");
  ASSERT_TRUE(s.field);
  EXPECT_EQ(s.field->modulus(), 7);
  EXPECT_EQ(s.vars.size(), 2u);
  EXPECT_EQ(s.bool_names, std::vector<std::string>{"b"});
  EXPECT_EQ(s.assertions.size(), 2u);
  EXPECT_EQ(s.commands, (std::vector<Command>{Command::check_sat, Command::get_model}));
}

TEST(SmtLib, EquationBecomesDifference) {
  Script s = parse_script(R"(
    (declare-fun x () (_ FiniteField 5))
    (assert (= (ff.add x (as ff2 (_ FiniteField 5))) (ff.neg x)))
  )");
  const Node &n = s.formula.node(s.assertions[0]);
  ASSERT_EQ(n.op, Op::poly_eq);
  // x + 2 + x = 2x + 2.
  VarId x = *s.vars.find("x");
  Field f = *s.field;
  Assignment sigma{{x, f.from_long(4)}};
  EXPECT_TRUE(evaluate(f, n.poly, sigma).is_zero());
}

TEST(SmtLib, DistinctAndLetAndIte) {
  Script s = parse_script(R"(
    (declare-fun x () (_ FiniteField 5))
    (declare-fun y () (_ FiniteField 5))
    (declare-fun c () Bool)
    (assert (let ((z (ff.mul x x))) (distinct z y #f1m5)))
    (assert (ite c (= x y) (=> (= x #f0m5) c)))
  )");
  EXPECT_EQ(s.assertions.size(), 2u);
}

TEST(SmtLib, DefaultFieldIsThree) {
  Script s = parse_script("(declare-const b Bool) (assert b)");
  EXPECT_FALSE(s.field);
  EXPECT_EQ(script_field(s).modulus(), 3);
}

TEST(SmtLib, SortErrors) {
  EXPECT_THROW(parse_script("(declare-fun x () (_ FiniteField 9))"), SortError);
  EXPECT_THROW(parse_script("(declare-fun x () (_ FiniteField 2))"), SortError);
  EXPECT_THROW(parse_script("(declare-fun x () (_ FiniteField 5))"
                            "(declare-fun y () (_ FiniteField 7))"),
               SortError);
  EXPECT_THROW(parse_script("(declare-fun x () (_ FiniteField 5)) (assert x)"), SortError);
  EXPECT_THROW(parse_script("(declare-fun x () (_ FiniteField 5)) (assert (= x 1))"), SortError);
}

TEST(SmtLib, UnsupportedFeatures) {
  EXPECT_THROW(parse_script("(push 1)"), UnsupportedFeature);
  EXPECT_THROW(parse_script("(declare-fun f (Bool) Bool)"), UnsupportedFeature);
  EXPECT_THROW(parse_script("(declare-fun x () Int)"), UnsupportedFeature);
  EXPECT_THROW(parse_script("(assert (forall ((x Bool)) x))"), UnsupportedFeature);
}

TEST(SmtLib, ParseErrorCarriesPosition) {
  try {
    parse_script("(set-logic QF_FF)\n(assert (= x");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line, 2);
    EXPECT_GE(e.column, 1);
  }
  EXPECT_THROW(parse_script("(declare-const b Bool) (assert (and b q))"), ParseError);
}

TEST(SmtLib, CommentsAndQuotedSymbols) {
  Script s = parse_script(R"(
    ; comment
    (declare-fun |odd name| () (_ FiniteField 3)) ; trailing
    (assert (= |odd name| #f2m3))
  )");
  EXPECT_TRUE(s.vars.find("odd name"));
}
