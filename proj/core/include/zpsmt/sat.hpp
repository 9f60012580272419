#pragma once

// CDCL SAT engine with hooks for a theory solver (DPLL(T)).

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

namespace zpsmt {

using BoolVar = std::uint32_t;

/// 2*var + sign, sign 1 meaning negated.
struct Lit {
  std::uint32_t code = 0;

  static Lit make(BoolVar v, bool negated = false) {
    return Lit{2 * v + (negated ? 1u : 0u)};
  }
  BoolVar var() const { return code >> 1; }
  bool negated() const { return code & 1; }
  Lit operator~() const { return Lit{code ^ 1u}; }
  friend bool operator==(Lit, Lit) = default;
  friend auto operator<=>(Lit, Lit) = default;
};

enum class LBool : std::uint8_t { false_, true_, undef };

class IllegalReentry : public std::logic_error {
public:
  IllegalReentry() : std::logic_error("theory callback during conflict analysis") {}
};

class SatSolver;

enum class TheoryStatus {
  consistent, // nothing to report beyond queued lemmas/propagations
  conflict,   // `conflict` holds literals that are true and jointly inconsistent
  sat,        // final check only: a validated model exists
  unknown,    // final check only: no verdict for this leaf
};

/// Implemented by the theory solver.  Every callback runs synchronously on
/// the SAT thread; lemmas and propagations are queued through SatSolver
/// and processed after check() returns.
class Theory {
public:
  virtual ~Theory() = default;
  /// A theory-relevant variable was assigned.
  virtual void on_assign(Lit lit, int level) = 0;
  /// Undo everything assigned above `level`.
  virtual void on_backtrack(int level) = 0;
  virtual TheoryStatus check(bool final, std::vector<Lit> &conflict) = 0;
  /// Antecedents (true literals) of a literal propagated by the theory.
  virtual void explain(Lit propagated, std::vector<Lit> &out) = 0;
};

struct SatStats {
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t theory_propagations = 0;
  std::uint64_t theory_conflicts = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learnt = 0;
  std::uint64_t theory_lemmas = 0;
  std::uint64_t unknown_leaves = 0;
};

struct SatOptions {
  std::uint64_t seed = 0;
  bool restarts = true;
  unsigned restart_base = 100;
  /// Leaves at which the theory answered unknown before giving up.
  unsigned max_unknown_leaves = 256;
  /// Checked between conflicts; returns true to abort with unknown.
  std::function<bool()> should_stop;
};

enum class SatResult { sat, unsat, unknown };

class SatSolver {
public:
  explicit SatSolver(SatOptions options = {});

  BoolVar new_var(bool theory_relevant = false);
  std::size_t num_vars() const { return assigns_.size(); }

  /// Adds an input clause (level 0, before solve).  Returns false when the
  /// clause set became trivially unsatisfiable.
  bool add_clause(std::vector<Lit> lits);

  void set_theory(Theory *theory) { theory_ = theory; }

  // Theory-side API, legal only inside Theory::check.
  /// Queues a clause implied by the input and theory.  Duplicates of a
  /// previously queued lemma are ignored.
  void add_theory_lemma(std::vector<Lit> lits);
  /// Queues a literal implied by the theory; Theory::explain is asked for
  /// its reason only if conflict analysis needs it.
  void theory_propagate(Lit lit);

  LBool value(Lit l) const;
  LBool value(BoolVar v) const { return assigns_[v]; }
  int level(BoolVar v) const { return level_[v]; }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  SatResult solve();
  /// True when an unknown leaf was blocked during the last solve.
  bool incomplete() const { return incomplete_; }
  const SatStats &stats() const { return stats_; }

private:
  static constexpr std::uint32_t kNoReason = 0xffffffffu;
  static constexpr std::uint32_t kTheoryReason = 0xfffffffeu;

  struct Clause {
    std::vector<Lit> lits;
    bool learnt = false;
    double activity = 0;
  };
  struct Watch {
    std::uint32_t clause;
    Lit blocker;
  };

  std::uint32_t store_clause(std::vector<Lit> lits, bool learnt);
  void attach(std::uint32_t ci);
  void enqueue(Lit l, std::uint32_t reason);
  std::uint32_t propagate(); // clause index of conflict or kNoReason
  void analyze(const std::vector<Lit> &conflict, std::vector<Lit> &learnt,
               int &backjump);
  void reason_lits(BoolVar v, std::vector<Lit> &out);
  void backtrack(int level);
  void bump_var(BoolVar v);
  void decay_var_activity() { var_inc_ /= 0.95; }
  std::optional<Lit> pick_branch();
  bool resolve_conflict(std::vector<Lit> conflict);
  bool add_clause_during_search(std::vector<Lit> lits);
  bool flush_theory_queue(bool &progress);
  void learn(std::vector<Lit> learnt, int backjump);

  // Heap of unassigned vars ordered by activity.
  void heap_insert(BoolVar v);
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  BoolVar heap_pop();
  bool heap_less(BoolVar a, BoolVar b) const {
    return activity_[a] > activity_[b] ||
           (activity_[a] == activity_[b] && a < b);
  }

  SatOptions opt_;
  Theory *theory_ = nullptr;
  std::mt19937_64 rng_;

  std::vector<Clause> clauses_;
  std::vector<std::vector<Watch>> watches_; // by literal code
  std::vector<LBool> assigns_;
  std::vector<int> level_;
  std::vector<std::uint32_t> reason_;
  std::vector<std::vector<Lit>> theory_reason_;
  std::vector<char> reason_fetched_;
  std::vector<bool> theory_var_;
  std::vector<bool> phase_;
  std::vector<double> activity_;
  double var_inc_ = 1.0;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<BoolVar> heap_;
  std::vector<int> heap_pos_;
  std::vector<char> seen_;

  std::vector<std::vector<Lit>> pending_lemmas_;
  std::vector<Lit> pending_props_;
  std::set<std::vector<Lit>> lemma_log_; // sorted, for dedup
  bool in_check_ = false;
  bool in_analysis_ = false;
  bool unsat_ = false;
  bool incomplete_ = false;
  unsigned unknown_leaves_ = 0;
  SatStats stats_;
};

} // namespace zpsmt
