#include "zpsmt/sat.hpp"

#include <algorithm>
#include <cassert>

namespace zpsmt {

namespace {

// Luby sequence 1 1 2 1 1 2 4 ...
double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i)
    r *= y;
  return r;
}

} // namespace

SatSolver::SatSolver(SatOptions options)
    : opt_(std::move(options)), rng_(opt_.seed) {}

BoolVar SatSolver::new_var(bool theory_relevant) {
  if (in_analysis_)
    throw IllegalReentry();
  auto v = static_cast<BoolVar>(assigns_.size());
  assigns_.push_back(LBool::undef);
  level_.push_back(0);
  reason_.push_back(kNoReason);
  theory_reason_.emplace_back();
  reason_fetched_.push_back(0);
  theory_var_.push_back(theory_relevant);
  phase_.push_back(false);
  // Tiny seeded noise breaks activity ties differently per seed.
  activity_.push_back(std::uniform_real_distribution<double>(0, 1e-6)(rng_));
  heap_pos_.push_back(-1);
  seen_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v;
}

LBool SatSolver::value(Lit l) const {
  LBool v = assigns_[l.var()];
  if (v == LBool::undef)
    return v;
  return (v == LBool::true_) != l.negated() ? LBool::true_ : LBool::false_;
}

bool SatSolver::add_clause(std::vector<Lit> lits) {
  assert(decision_level() == 0);
  if (unsat_)
    return false;
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<Lit> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == ~lits[i])
      return true; // tautology
    LBool v = value(lits[i]);
    if (v == LBool::true_)
      return true;
    if (v == LBool::undef)
      kept.push_back(lits[i]);
  }
  if (kept.empty()) {
    unsat_ = true;
    return false;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], kNoReason);
    if (propagate() != kNoReason) {
      unsat_ = true;
      return false;
    }
    return true;
  }
  attach(store_clause(std::move(kept), false));
  return true;
}

std::uint32_t SatSolver::store_clause(std::vector<Lit> lits, bool learnt) {
  clauses_.push_back(Clause{std::move(lits), learnt, 0});
  return static_cast<std::uint32_t>(clauses_.size() - 1);
}

void SatSolver::attach(std::uint32_t ci) {
  const auto &c = clauses_[ci].lits;
  assert(c.size() >= 2);
  watches_[c[0].code].push_back({ci, c[1]});
  watches_[c[1].code].push_back({ci, c[0]});
}

void SatSolver::enqueue(Lit l, std::uint32_t reason) {
  BoolVar v = l.var();
  assert(assigns_[v] == LBool::undef);
  assigns_[v] = l.negated() ? LBool::false_ : LBool::true_;
  level_[v] = decision_level();
  reason_[v] = reason;
  reason_fetched_[v] = 0;
  theory_reason_[v].clear();
  trail_.push_back(l);
  if (theory_ && theory_var_[v])
    theory_->on_assign(l, decision_level());
}

std::uint32_t SatSolver::propagate() {
  std::uint32_t conflict = kNoReason;
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    Lit false_lit = ~p;
    auto &ws = watches_[false_lit.code];
    std::size_t i = 0, j = 0;
    ++stats_.propagations;
    while (i < ws.size()) {
      Watch w = ws[i++];
      if (value(w.blocker) == LBool::true_) {
        ws[j++] = w;
        continue;
      }
      auto &c = clauses_[w.clause].lits;
      if (c[0] == false_lit)
        std::swap(c[0], c[1]);
      Lit first = c[0];
      if (first != w.blocker && value(first) == LBool::true_) {
        ws[j++] = {w.clause, first};
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (value(c[k]) != LBool::false_) {
          std::swap(c[1], c[k]);
          watches_[c[1].code].push_back({w.clause, first});
          moved = true;
          break;
        }
      }
      if (moved)
        continue;
      ws[j++] = {w.clause, first};
      if (value(first) == LBool::false_) {
        conflict = w.clause;
        qhead_ = trail_.size();
        while (i < ws.size())
          ws[j++] = ws[i++];
      } else {
        enqueue(first, w.clause);
      }
    }
    ws.resize(j);
    if (conflict != kNoReason)
      break;
  }
  return conflict;
}

void SatSolver::reason_lits(BoolVar v, std::vector<Lit> &out) {
  out.clear();
  std::uint32_t r = reason_[v];
  if (r == kTheoryReason) {
    if (!reason_fetched_[v]) {
      std::vector<Lit> ants;
      Lit implied = Lit::make(v, assigns_[v] == LBool::false_);
      theory_->explain(implied, ants);
      for (Lit a : ants) {
        assert(value(a) == LBool::true_);
        theory_reason_[v].push_back(~a);
      }
      reason_fetched_[v] = 1;
    }
    out = theory_reason_[v];
    return;
  }
  if (r == kNoReason)
    return;
  for (Lit l : clauses_[r].lits)
    if (l.var() != v)
      out.push_back(l);
}

void SatSolver::analyze(const std::vector<Lit> &conflict,
                        std::vector<Lit> &learnt, int &backjump) {
  in_analysis_ = true;
  learnt.assign(1, Lit{});
  int path = 0;
  std::size_t index = trail_.size();
  std::vector<Lit> clause = conflict;
  Lit p{};
  std::vector<BoolVar> touched;
  for (;;) {
    for (Lit q : clause) {
      BoolVar v = q.var();
      if (seen_[v] || level_[v] == 0)
        continue;
      seen_[v] = 1;
      touched.push_back(v);
      bump_var(v);
      if (level_[v] >= decision_level())
        ++path;
      else
        learnt.push_back(q);
    }
    do {
      --index;
    } while (!seen_[trail_[index].var()]);
    p = trail_[index];
    seen_[p.var()] = 0;
    if (--path <= 0)
      break;
    reason_lits(p.var(), clause);
  }
  learnt[0] = ~p;
  for (BoolVar v : touched)
    seen_[v] = 0;

  backjump = 0;
  if (learnt.size() > 1) {
    std::size_t best = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i)
      if (level_[learnt[i].var()] > level_[learnt[best].var()])
        best = i;
    std::swap(learnt[1], learnt[best]);
    backjump = level_[learnt[1].var()];
  }
  in_analysis_ = false;
}

void SatSolver::bump_var(BoolVar v) {
  activity_[v] += var_inc_;
  if (activity_[v] > 1e100) {
    for (double &a : activity_)
      a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[v] >= 0)
    heap_up(static_cast<std::size_t>(heap_pos_[v]));
}

void SatSolver::backtrack(int level) {
  if (decision_level() <= level)
    return;
  std::size_t stop = trail_lim_[level];
  for (std::size_t i = trail_.size(); i-- > stop;) {
    BoolVar v = trail_[i].var();
    phase_[v] = !trail_[i].negated();
    assigns_[v] = LBool::undef;
    reason_[v] = kNoReason;
    theory_reason_[v].clear();
    reason_fetched_[v] = 0;
    if (heap_pos_[v] < 0)
      heap_insert(v);
  }
  trail_.resize(stop);
  trail_lim_.resize(level);
  qhead_ = trail_.size();
  if (theory_)
    theory_->on_backtrack(level);
}

void SatSolver::learn(std::vector<Lit> learnt, int backjump) {
  backtrack(backjump);
  ++stats_.learnt;
  if (learnt.size() == 1) {
    enqueue(learnt[0], kNoReason);
    return;
  }
  std::uint32_t ci = store_clause(std::move(learnt), true);
  attach(ci);
  enqueue(clauses_[ci].lits[0], ci);
}

bool SatSolver::resolve_conflict(std::vector<Lit> conflict) {
  ++stats_.conflicts;
  int top = 0;
  for (Lit l : conflict) {
    assert(value(l) == LBool::false_);
    top = std::max(top, level_[l.var()]);
  }
  if (conflict.empty() || top == 0) {
    unsat_ = true;
    return false;
  }
  backtrack(top);
  std::vector<Lit> learnt;
  int backjump = 0;
  analyze(conflict, learnt, backjump);
  learn(std::move(learnt), backjump);
  decay_var_activity();
  return true;
}

bool SatSolver::add_clause_during_search(std::vector<Lit> lits) {
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  for (std::size_t i = 0; i + 1 < lits.size(); ++i)
    if (lits[i + 1] == ~lits[i])
      return true;
  if (lits.empty()) {
    unsat_ = true;
    return false;
  }
  // Non-false literals first, then false ones by decreasing level.
  auto rank = [&](Lit l) {
    LBool v = value(l);
    return v == LBool::false_ ? 1 : 0;
  };
  std::stable_sort(lits.begin(), lits.end(), [&](Lit a, Lit b) {
    int ra = rank(a), rb = rank(b);
    if (ra != rb)
      return ra < rb;
    if (ra == 1)
      return level_[a.var()] > level_[b.var()];
    return false;
  });
  std::size_t open = 0;
  while (open < lits.size() && value(lits[open]) != LBool::false_)
    ++open;

  if (lits.size() == 1) {
    if (open == 0)
      return resolve_conflict(lits);
    backtrack(0);
    if (value(lits[0]) == LBool::undef)
      enqueue(lits[0], kNoReason);
    return true;
  }
  if (open == 0)
    return resolve_conflict(lits);

  std::uint32_t ci = store_clause(lits, false);
  attach(ci);
  if (open == 1 && value(lits[0]) == LBool::undef) {
    backtrack(level_[lits[1].var()]);
    enqueue(clauses_[ci].lits[0], ci);
  }
  return true;
}

void SatSolver::add_theory_lemma(std::vector<Lit> lits) {
  if (in_analysis_)
    throw IllegalReentry();
  std::vector<Lit> key = lits;
  std::sort(key.begin(), key.end());
  key.erase(std::unique(key.begin(), key.end()), key.end());
  if (!lemma_log_.insert(key).second)
    return;
  pending_lemmas_.push_back(std::move(lits));
}

void SatSolver::theory_propagate(Lit lit) {
  if (in_analysis_)
    throw IllegalReentry();
  pending_props_.push_back(lit);
}

bool SatSolver::flush_theory_queue(bool &progress) {
  std::vector<Lit> props = std::move(pending_props_);
  std::vector<std::vector<Lit>> lemmas = std::move(pending_lemmas_);
  pending_props_.clear();
  pending_lemmas_.clear();

  // Propagations are only valid for the current assignment, so they go
  // first; a conflict among them invalidates the rest.
  for (Lit l : props) {
    LBool v = value(l);
    if (v == LBool::true_)
      continue;
    progress = true;
    if (v == LBool::undef) {
      ++stats_.theory_propagations;
      enqueue(l, kTheoryReason);
      continue;
    }
    std::vector<Lit> ants;
    theory_->explain(l, ants);
    std::vector<Lit> conflict{l};
    for (Lit a : ants)
      conflict.push_back(~a);
    ++stats_.theory_conflicts;
    if (!resolve_conflict(std::move(conflict)))
      return false;
    break;
  }
  for (auto &lemma : lemmas) {
    ++stats_.theory_lemmas;
    progress = true;
    if (!add_clause_during_search(std::move(lemma)))
      return false;
  }
  return true;
}

std::optional<Lit> SatSolver::pick_branch() {
  while (!heap_.empty()) {
    BoolVar v = heap_pop();
    if (assigns_[v] == LBool::undef)
      return Lit::make(v, !phase_[v]);
  }
  return std::nullopt;
}

SatResult SatSolver::solve() {
  auto finish_unsat = [&] {
    return incomplete_ ? SatResult::unknown : SatResult::unsat;
  };
  if (unsat_)
    return finish_unsat();
  if (propagate() != kNoReason) {
    unsat_ = true;
    return finish_unsat();
  }

  int restart_round = 0;
  std::uint64_t conflicts_at_restart = stats_.conflicts;
  auto restart_limit = [&] {
    return static_cast<std::uint64_t>(luby(2, restart_round) *
                                      opt_.restart_base);
  };
  std::vector<Lit> tconflict;

  auto run_check = [&](bool final, TheoryStatus &status) -> int {
    // 0: nothing happened, 1: state changed, -1: unsat.
    tconflict.clear();
    in_check_ = true;
    status = theory_->check(final, tconflict);
    in_check_ = false;
    if (status == TheoryStatus::conflict) {
      ++stats_.theory_conflicts;
      std::vector<Lit> clause;
      for (Lit l : tconflict)
        clause.push_back(~l);
      pending_props_.clear();
      bool ok = resolve_conflict(std::move(clause));
      bool ignored = false;
      if (ok)
        ok = flush_theory_queue(ignored);
      return ok ? 1 : -1;
    }
    bool progress = false;
    if (!flush_theory_queue(progress))
      return -1;
    return progress ? 1 : 0;
  };

  for (;;) {
    std::uint32_t confl = propagate();
    if (confl != kNoReason) {
      if (!resolve_conflict(clauses_[confl].lits))
        return finish_unsat();
      continue;
    }
    if (opt_.should_stop && opt_.should_stop())
      return SatResult::unknown;

    const bool full = trail_.size() == assigns_.size();
    if (theory_) {
      TheoryStatus status;
      int r = run_check(full, status);
      if (r < 0)
        return finish_unsat();
      if (r > 0)
        continue;
      if (full) {
        if (status == TheoryStatus::sat)
          return SatResult::sat;
        // Unknown (or no verdict) at a leaf: block this branch and go on.
        incomplete_ = true;
        ++stats_.unknown_leaves;
        if (++unknown_leaves_ > opt_.max_unknown_leaves ||
            decision_level() == 0)
          return SatResult::unknown;
        std::vector<Lit> block;
        for (int lvl = 1; lvl <= decision_level(); ++lvl)
          block.push_back(~trail_[trail_lim_[lvl - 1]]);
        if (!resolve_conflict(std::move(block)))
          return finish_unsat();
        continue;
      }
    } else if (full) {
      return SatResult::sat;
    }

    if (opt_.restarts &&
        stats_.conflicts - conflicts_at_restart >= restart_limit()) {
      ++restart_round;
      ++stats_.restarts;
      conflicts_at_restart = stats_.conflicts;
      backtrack(0);
      continue;
    }

    std::optional<Lit> next = pick_branch();
    if (!next)
      continue; // only theory-irrelevant bookkeeping left; loop re-checks
    ++stats_.decisions;
    trail_lim_.push_back(trail_.size());
    enqueue(*next, kNoReason);
  }
}

void SatSolver::heap_insert(BoolVar v) {
  heap_pos_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

void SatSolver::heap_up(std::size_t i) {
  BoolVar v = heap_[i];
  while (i > 0) {
    std::size_t parent = (i - 1) / 2;
    if (!heap_less(v, heap_[parent]))
      break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

void SatSolver::heap_down(std::size_t i) {
  BoolVar v = heap_[i];
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= heap_.size())
      break;
    if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child]))
      ++child;
    if (!heap_less(heap_[child], v))
      break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

BoolVar SatSolver::heap_pop() {
  BoolVar top = heap_.front();
  heap_pos_[top] = -1;
  BoolVar last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_down(0);
  }
  return top;
}

} // namespace zpsmt
