#include "zpsmt/groebner.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace zpsmt;

namespace {

struct GroebnerTest : ::testing::Test {
  Field f{Prime(Integer(7))};
  VarTable vars;
  Polynomial P(const char *text) { return parse_polynomial(text, f, vars); }

  bool contains(const std::vector<Polynomial> &basis, const Polynomial &g) {
    return std::find(basis.begin(), basis.end(), make_monic(f, g)) != basis.end() ||
           std::find(basis.begin(), basis.end(), g) != basis.end();
  }
};

} // namespace

TEST_F(GroebnerTest, UnitIdealWithCertificate) {
  std::vector<Polynomial> gens{P("u*x - 1"), P("v*(x - 1) - 1"), P("x*(x - 1)")};
  GroebnerResult r = groebner(f, gens);
  ASSERT_EQ(r.status, GroebnerResult::Status::unit);
  EXPECT_TRUE(verify_certificate(f, gens, r.certificate));
}

TEST_F(GroebnerTest, RetractedBasisUnderLex) {
  P("x + u + v"); // interned first, so lex means x > u > v
  std::vector<Polynomial> gens{P("u*x - 1"), P("v*(x - 1) - 1")};
  GroebnerOptions opt;
  opt.order = MonomialOrder::lex();
  GroebnerResult r = groebner(f, gens, opt);
  ASSERT_EQ(r.status, GroebnerResult::Status::basis);
  ASSERT_EQ(r.basis.size(), 3u);
  EXPECT_TRUE(contains(r.basis, P("u*v + u - v")));
  EXPECT_TRUE(contains(r.basis, P("v*x - v - 1")));
  EXPECT_TRUE(contains(r.basis, P("u*x - 1")));
}

TEST_F(GroebnerTest, CertificateCheckRejectsWrongCofactors) {
  std::vector<Polynomial> gens{P("x"), P("x - 1")};
  GroebnerResult r = groebner(f, gens);
  ASSERT_EQ(r.status, GroebnerResult::Status::unit);
  EXPECT_TRUE(verify_certificate(f, gens, r.certificate));
  std::vector<Polynomial> bad = r.certificate;
  bad[0] = add(f, bad[0], Polynomial::constant(f.one()));
  EXPECT_FALSE(verify_certificate(f, gens, bad));
  bad.pop_back();
  EXPECT_FALSE(verify_certificate(f, gens, bad));
}

TEST_F(GroebnerTest, BudgetStops) {
  std::vector<Polynomial> gens{P("x^2*y - z"), P("x*y^2 - 1"), P("x*y*z - y")};
  GroebnerOptions opt;
  opt.max_pairs = 1;
  EXPECT_EQ(groebner(f, gens, opt).status, GroebnerResult::Status::budget);
}

TEST_F(GroebnerTest, TrailIdealUsesRabinowitschVariables) {
  AtomTable atoms(f, vars);
  Polynomial eq = P("x*y - 1"), ne = P("x - 2");
  AtomId a = atoms.intern(eq).id, b = atoms.intern(ne).id;
  TheoryTrail trail;
  trail.push({a, true, Lit::make(0), 0});
  trail.push({b, false, Lit::make(1, true), 0});
  TrailIdeal ideal = trail_ideal(atoms, trail);
  ASSERT_EQ(ideal.generators.size(), 2u);
  EXPECT_EQ(ideal.positive, (std::vector<bool>{true, false}));
  // The disequation becomes u*(x - 2) - 1 with u beyond every table entry.
  Polynomial g = ideal.generators[1];
  EXPECT_EQ(g.degree(), 2u);
  for (VarId v : g.vars())
    if (!(v == *vars.find("x")))
      EXPECT_GE(v.index, vars.size());
}

TEST_F(GroebnerTest, ModuleConflictIsVerified) {
  AtomTable atoms(f, vars);
  AtomId sq = atoms.intern(P("x^2 - x")).id;
  AtomId z = atoms.intern(P("x")).id;
  AtomId o = atoms.intern(P("x - 1")).id;
  TheoryTrail trail;
  trail.push({sq, true, Lit::make(0), 0});
  trail.push({z, false, Lit::make(1, true), 0});
  trail.push({o, false, Lit::make(2, true), 0});
  GroebnerModule module(atoms, {});
  Explanation conflict;
  EXPECT_EQ(module.check(trail, conflict, {}), GroebnerModule::Outcome::conflict);
  EXPECT_EQ(conflict.size(), 3u);
  EXPECT_EQ(module.certificate_checks(), 1u);
}
