#include "zpsmt/field.hpp"

#include <gtest/gtest.h>

using namespace zpsmt;

namespace {

Field make_field(long p) { return Field(Prime(Integer(p))); }

const char *kBn254 =
    "21888242871839275222246405745257275088548364400416034343698204186575808495617";

} // namespace

TEST(Prime, RejectsCompositesAndUnits) {
  for (long n : {0L, 1L, 4L, 9L, 91L, 561L, 1105L})
    EXPECT_THROW(Prime(Integer(n)), NotPrime) << n;
  EXPECT_THROW(Prime(Integer(-7)), NotPrime);
}

TEST(Prime, AcceptsSmallAndLargePrimes) {
  for (long n : {2L, 3L, 5L, 7L, 101L, 65537L})
    EXPECT_NO_THROW(Prime(Integer(n))) << n;
  EXPECT_NO_THROW(Prime(Integer(kBn254)));
  Integer composite = Integer(kBn254) * 3;
  EXPECT_THROW(Prime{composite}, NotPrime);
}

TEST(Field, ReducesNegativeIntegers) {
  Field f = make_field(7);
  EXPECT_EQ(f.from_long(-1).residue, 6);
  EXPECT_EQ(f.from_long(-14).residue, 0);
  EXPECT_EQ(f.from_long(23).residue, 2);
}

TEST(Field, InverseOfZeroThrows) {
  Field f = make_field(13);
  EXPECT_THROW(f.inverse(f.zero()), ZeroInverse);
  EXPECT_EQ(f.mul(f.inverse(f.from_long(5)), f.from_long(5)), f.one());
}

TEST(Field, SqrtOrdersRootsAndRejectsNonResidues) {
  Field f = make_field(7);
  auto r = f.sqrt(f.from_long(2));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->first.residue, 3);
  EXPECT_EQ(r->second.residue, 4);
  EXPECT_FALSE(f.sqrt(f.from_long(3)));
  auto z = f.sqrt(f.zero());
  ASSERT_TRUE(z);
  EXPECT_TRUE(z->first.is_zero() && z->second.is_zero());
}

TEST(Field, SqrtInLargeField) {
  Field f{Prime(Integer(kBn254))};
  FieldElement a = f.from_long(123456789);
  FieldElement sq = f.mul(a, a);
  auto r = f.sqrt(sq);
  ASSERT_TRUE(r);
  EXPECT_EQ(f.mul(r->first, r->first), sq);
  EXPECT_TRUE(r->first == a || r->second == a);
}

TEST(Field, LegendreSymbol) {
  Field f = make_field(11);
  EXPECT_EQ(f.legendre(f.zero()), 0);
  EXPECT_EQ(f.legendre(f.from_long(4)), 1);
  EXPECT_EQ(f.legendre(f.from_long(2)), -1);
}

TEST(Field, BalancedRepresentative) {
  Field f = make_field(7);
  EXPECT_EQ(f.balanced(f.from_long(3)), 3);
  EXPECT_EQ(f.balanced(f.from_long(4)), -3);
  EXPECT_EQ(f.balanced(f.from_long(6)), -1);
}

TEST(Field, FromRational) {
  Field f = make_field(7);
  auto half = f.from_rational(Rational(1, 2));
  ASSERT_TRUE(half);
  EXPECT_EQ(half->residue, 4);
  EXPECT_FALSE(f.from_rational(Rational(1, 7)));
  EXPECT_EQ(f.from_rational(Rational(-3, 2))->residue, 2);
}

TEST(Field, PowMatchesFermat) {
  Field f = make_field(101);
  for (long a = 1; a < 101; ++a)
    EXPECT_EQ(f.pow(f.from_long(a), 100ul), f.one());
}
