#include "zpsmt/sat.hpp"

#include <gtest/gtest.h>

using namespace zpsmt;

namespace {

Lit pos(BoolVar v) { return Lit::make(v); }
Lit neg(BoolVar v) { return Lit::make(v, true); }

bool model_ok(const SatSolver &s, const std::vector<std::vector<Lit>> &cnf) {
  for (const auto &c : cnf) {
    bool any = false;
    for (Lit l : c)
      any = any || s.value(l) == LBool::true_;
    if (!any)
      return false;
  }
  return true;
}

/// Pigeons into holes; var(p, h) = p * holes + h.
std::vector<std::vector<Lit>> pigeonhole(unsigned pigeons, unsigned holes) {
  std::vector<std::vector<Lit>> cnf;
  for (unsigned p = 0; p < pigeons; ++p) {
    std::vector<Lit> c;
    for (unsigned h = 0; h < holes; ++h)
      c.push_back(pos(p * holes + h));
    cnf.push_back(c);
  }
  for (unsigned h = 0; h < holes; ++h)
    for (unsigned p = 0; p < pigeons; ++p)
      for (unsigned q = p + 1; q < pigeons; ++q)
        cnf.push_back({neg(p * holes + h), neg(q * holes + h)});
  return cnf;
}

/// Rejects any assignment with more than one of the theory-relevant
/// variables true, reporting conflicts at final check only.
struct AtMostOne : Theory {
  SatSolver *sat = nullptr;
  std::vector<Lit> trues;
  void on_assign(Lit l, int) override {
    if (!l.negated())
      trues.push_back(l);
  }
  void on_backtrack(int) override {
    std::erase_if(trues, [&](Lit l) { return sat->value(l) != LBool::true_; });
  }
  TheoryStatus check(bool final, std::vector<Lit> &conflict) override {
    if (trues.size() > 1) {
      conflict = {trues[0], trues[1]};
      return TheoryStatus::conflict;
    }
    return final ? TheoryStatus::sat : TheoryStatus::consistent;
  }
  void explain(Lit, std::vector<Lit> &) override {}
};

} // namespace

TEST(Sat, PigeonholeUnsat) {
  SatSolver s;
  auto cnf = pigeonhole(5, 4);
  for (unsigned i = 0; i < 20; ++i)
    s.new_var();
  for (auto c : cnf)
    s.add_clause(c);
  EXPECT_EQ(s.solve(), SatResult::unsat);
}

TEST(Sat, PigeonholeSat) {
  SatSolver s;
  auto cnf = pigeonhole(4, 4);
  for (unsigned i = 0; i < 16; ++i)
    s.new_var();
  for (auto c : cnf)
    s.add_clause(c);
  ASSERT_EQ(s.solve(), SatResult::sat);
  EXPECT_TRUE(model_ok(s, cnf));
}

TEST(Sat, EmptyClauseIsUnsat) {
  SatSolver s;
  s.new_var();
  EXPECT_FALSE(s.add_clause({}));
  EXPECT_EQ(s.solve(), SatResult::unsat);
}

TEST(Sat, TheoryConflictsPruneModels) {
  SatSolver s;
  AtMostOne th;
  th.sat = &s;
  for (int i = 0; i < 3; ++i)
    s.new_var(true);
  s.set_theory(&th);
  s.add_clause({pos(0), pos(1), pos(2)});
  s.add_clause({pos(0), pos(1)});
  ASSERT_EQ(s.solve(), SatResult::sat);
  int count = 0;
  for (BoolVar v = 0; v < 3; ++v)
    count += s.value(v) == LBool::true_;
  EXPECT_EQ(count, 1);
  EXPECT_NE(s.value(2), LBool::true_);

  SatSolver t;
  AtMostOne th2;
  th2.sat = &t;
  for (int i = 0; i < 2; ++i)
    t.new_var(true);
  t.set_theory(&th2);
  t.add_clause({pos(0)});
  t.add_clause({pos(1)});
  EXPECT_EQ(t.solve(), SatResult::unsat);
}
