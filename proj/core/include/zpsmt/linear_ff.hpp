#pragma once

// Tableau reasoning for domain constraints x = k / x != k against the
// linear definitions G, plus the final check of H.

#include "zpsmt/theory.hpp"

#include <map>
#include <optional>
#include <random>
#include <set>
#include <unordered_map>

namespace zpsmt {

/// Linear system in solved form: basic = sum(coeff * nonbasic).
class Tableau {
public:
  using Row = std::map<VarId, FieldElement>;

  explicit Tableau(const Field &field) : field_(&field) {}

  /// Adds basic = expr where `expr` may mention basic variables; they are
  /// substituted by their rows.  `basic` must be fresh to the tableau.
  void add_row(VarId basic, const Row &expr);
  /// Exchanges basic `x` with non-basic `y` (y must occur in x's row).
  void pivot(VarId x, VarId y);

  bool is_basic(VarId v) const { return rows_.count(v) != 0; }
  const Row &row(VarId basic) const { return rows_.at(basic); }
  const std::map<VarId, Row> &rows() const { return rows_; }
  /// Basic variables whose rows mention `v`.
  const std::set<VarId> &column(VarId v) const;

private:
  void link(VarId basic, VarId v) { cols_[v].insert(basic); }
  void unlink(VarId basic, VarId v);

  const Field *field_;
  std::map<VarId, Row> rows_;
  std::unordered_map<VarId, std::set<VarId>> cols_;
};

class Exhausted : public std::runtime_error {
public:
  Exhausted() : std::runtime_error("every residue is forbidden") {}
};

/// Smallest residue (starting the scan at `start`) not in `forbidden`.
FieldElement find_value_avoiding(const Field &field,
                                 const std::vector<FieldElement> &forbidden,
                                 const FieldElement &start = FieldElement());

/// A domain-constraint fact derived by propagation.
struct DomainFact {
  VarId var;
  FieldElement value;
  bool equal;
  Explanation because;
};

class LinearModule {
public:
  struct Options {
    unsigned max_iterations = 10000;
    bool randomize_values = false;
    std::uint64_t seed = 0;
  };

  LinearModule(AtomTable &atoms, Options options);

  /// Pulls slack rows created since the last call into the tableau.
  void sync();
  /// Lightweight check of one newly asserted literal.  On conflict the
  /// literal is not recorded.
  std::optional<Explanation> assert_literal(const TrailEntry &e,
                                            std::size_t trail_index);
  /// Undoes every literal with trail index >= `trail_size`.
  void backtrack(std::size_t trail_size);

  enum class Outcome { sat_candidate, conflict, unknown };
  Outcome heavy_check(Explanation &conflict, const Deadline &deadline = {});

  /// H definitions violated by the current solution.
  std::vector<Definition> spurious_definitions() const;

  std::vector<DomainFact> propagate(const std::vector<bool> &atom_assigned);

  FieldElement value(VarId v) const;
  /// sigma restricted to original variables.
  Assignment model() const;
  const Tableau &tableau() const { return tableau_; }
  /// Rows hold under sigma and non-basic variables meet their constraints.
  bool invariant_holds() const;

  std::uint64_t pivots() const { return pivots_; }

private:
  struct Fix {
    FieldElement value;
    Lit lit;
  };
  struct Diseq {
    FieldElement value;
    Lit lit;
  };
  struct Undo {
    std::size_t trail_index;
    VarId var;
    bool was_fix;
  };

  void update(VarId nonbasic, const FieldElement &v);
  FieldElement &sigma(VarId v);
  bool violates(VarId v, const FieldElement &value) const;
  bool in_diseqs(VarId v, const FieldElement &value) const;
  std::vector<FieldElement> diseq_values(VarId v) const;
  void explain_row(VarId basic, Explanation &out) const;
  FieldElement start_value();

  AtomTable &atoms_;
  const Field &field_;
  Options opt_;
  std::mt19937_64 rng_;
  Tableau tableau_;
  std::size_t rows_synced_ = 0;
  mutable std::vector<FieldElement> sigma_;
  std::unordered_map<VarId, Fix> fixed_;
  std::unordered_map<VarId, std::vector<Diseq>> diseqs_;
  std::vector<Undo> undo_;
  std::uint64_t pivots_ = 0;
};

} // namespace zpsmt
