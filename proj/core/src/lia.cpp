#include "zpsmt/lia.hpp"

#include <stdexcept>

namespace zpsmt {

namespace {

using Why = std::set<LiaTag>;

void join(Why &into, const Why &from) { into.insert(from.begin(), from.end()); }

Why single(LiaTag t) { return t == kFreeTag ? Why{} : Why{t}; }

Integer floor_div(const Integer &a, const Integer &b) {
  Integer q;
  if (b < 0) {
    Integer na = -a, nb = -b;
    mpz_fdiv_q(q.get_mpz_t(), na.get_mpz_t(), nb.get_mpz_t());
  } else {
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  }
  return q;
}

Integer ceil_div(const Integer &a, const Integer &b) {
  Integer q;
  if (b < 0) {
    Integer na = -a, nb = -b;
    mpz_cdiv_q(q.get_mpz_t(), na.get_mpz_t(), nb.get_mpz_t());
  } else {
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  }
  return q;
}

struct Bound {
  Integer value;
  Why why;
};

struct VarBounds {
  Bound lo, hi;
  bool fixed() const { return lo.value == hi.value; }
};

// lo <= sum(terms) <= hi
struct Row {
  std::vector<LiaTerm> terms;
  std::optional<Bound> lo, hi;
};

struct Diseq {
  std::vector<LiaTerm> terms;
  Integer constant;
  LiaTag tag;
};

struct Node {
  std::vector<VarBounds> vars;
  std::vector<Row> rows;
};

enum class Status { sat, unsat, unknown };

class Search {
public:
  Search(std::vector<Diseq> diseqs, const LiaLimits &limits)
      : diseqs_(std::move(diseqs)), limits_(limits) {}

  Status run(Node node, unsigned depth, Why &core, std::vector<Integer> &model);
  unsigned nodes() const { return nodes_; }

private:
  bool propagate(Node &node, Why &conflict) const;
  bool gcd_test(const Node &node, Why &conflict) const;
  enum class Lp { feasible, infeasible, unknown };
  Lp simplex(const Node &node, std::vector<Rational> &values,
             Why &conflict) const;

  std::vector<Diseq> diseqs_;
  const LiaLimits &limits_;
  unsigned nodes_ = 0;
  LiaTag next_branch_ = 0x80000000u;
};

// Contribution bounds of a*x and the bound side each one uses.
void contribution(const LiaTerm &t, const VarBounds &b, Integer &min,
                  Integer &max, const Why *&min_why, const Why *&max_why) {
  if (t.coeff > 0) {
    min = t.coeff * b.lo.value;
    max = t.coeff * b.hi.value;
    min_why = &b.lo.why;
    max_why = &b.hi.why;
  } else {
    min = t.coeff * b.hi.value;
    max = t.coeff * b.lo.value;
    min_why = &b.hi.why;
    max_why = &b.lo.why;
  }
}

bool Search::propagate(Node &node, Why &conflict) const {
  auto crossed = [&](std::uint32_t v) {
    const VarBounds &b = node.vars[v];
    if (b.lo.value <= b.hi.value)
      return false;
    conflict = b.lo.why;
    join(conflict, b.hi.why);
    return true;
  };

  for (int sweep = 0; sweep < 30; ++sweep) {
    bool changed = false;
    for (const Row &row : node.rows) {
      const std::size_t k = row.terms.size();
      std::vector<Integer> mins(k), maxs(k);
      std::vector<const Why *> min_whys(k), max_whys(k);
      Integer min_total = 0, max_total = 0;
      for (std::size_t i = 0; i < k; ++i) {
        contribution(row.terms[i], node.vars[row.terms[i].var], mins[i],
                     maxs[i], min_whys[i], max_whys[i]);
        min_total += mins[i];
        max_total += maxs[i];
      }
      if (row.hi && min_total > row.hi->value) {
        conflict = row.hi->why;
        for (const Why *w : min_whys)
          join(conflict, *w);
        return false;
      }
      if (row.lo && max_total < row.lo->value) {
        conflict = row.lo->why;
        for (const Why *w : max_whys)
          join(conflict, *w);
        return false;
      }
      for (std::size_t i = 0; i < k; ++i) {
        const LiaTerm &t = row.terms[i];
        auto others = [&](const std::vector<const Why *> &whys, const Why &side) {
          Why w = side;
          for (std::size_t j = 0; j < k; ++j)
            if (j != i)
              join(w, *whys[j]);
          return w;
        };
        if (row.hi) {
          // a*x <= hi - (min_total - min_i)
          Integer cap = row.hi->value - (min_total - mins[i]);
          VarBounds &b = node.vars[t.var];
          if (t.coeff > 0) {
            Integer nb = floor_div(cap, t.coeff);
            if (nb < b.hi.value) {
              b.hi = {nb, others(min_whys, row.hi->why)};
              changed = true;
            }
          } else {
            Integer nb = ceil_div(cap, t.coeff);
            if (nb > b.lo.value) {
              b.lo = {nb, others(min_whys, row.hi->why)};
              changed = true;
            }
          }
          if (crossed(t.var))
            return false;
        }
        if (row.lo) {
          // a*x >= lo - (max_total - max_i)
          Integer floor_ = row.lo->value - (max_total - maxs[i]);
          VarBounds &b = node.vars[t.var];
          if (t.coeff > 0) {
            Integer nb = ceil_div(floor_, t.coeff);
            if (nb > b.lo.value) {
              b.lo = {nb, others(max_whys, row.lo->why)};
              changed = true;
            }
          } else {
            Integer nb = floor_div(floor_, t.coeff);
            if (nb < b.hi.value) {
              b.hi = {nb, others(max_whys, row.lo->why)};
              changed = true;
            }
          }
          if (crossed(t.var))
            return false;
        }
      }
    }

    for (const Diseq &d : diseqs_) {
      Integer rest = d.constant;
      const LiaTerm *open = nullptr;
      std::size_t n_open = 0;
      for (const LiaTerm &t : d.terms) {
        const VarBounds &b = node.vars[t.var];
        if (b.fixed()) {
          rest += t.coeff * b.lo.value;
        } else {
          open = &t;
          ++n_open;
        }
      }
      auto fixed_why = [&] {
        Why w = single(d.tag);
        for (const LiaTerm &t : d.terms) {
          const VarBounds &b = node.vars[t.var];
          if (b.fixed()) {
            join(w, b.lo.why);
            join(w, b.hi.why);
          }
        }
        return w;
      };
      if (n_open == 0 && rest == 0) {
        conflict = fixed_why();
        return false;
      }
      if (n_open != 1)
        continue;
      // a*x + rest != 0
      Integer neg = -rest;
      if (neg % open->coeff != 0)
        continue;
      Integer banned = neg / open->coeff;
      VarBounds &b = node.vars[open->var];
      if (b.lo.value == banned) {
        Why w = fixed_why();
        join(w, b.lo.why);
        b.lo = {banned + 1, std::move(w)};
        changed = true;
      } else if (b.hi.value == banned) {
        Why w = fixed_why();
        join(w, b.hi.why);
        b.hi = {banned - 1, std::move(w)};
        changed = true;
      }
      if (crossed(open->var))
        return false;
    }
    if (!changed)
      break;
  }
  return true;
}

bool Search::gcd_test(const Node &node, Why &conflict) const {
  for (const Row &row : node.rows) {
    if (!row.lo || !row.hi || row.lo->value != row.hi->value)
      continue;
    Integer g = 0;
    Integer rhs = row.lo->value;
    for (const LiaTerm &t : row.terms) {
      const VarBounds &b = node.vars[t.var];
      if (b.fixed()) {
        rhs -= t.coeff * b.lo.value;
      } else {
        Integer a = abs(t.coeff);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
      }
    }
    if (g == 0 || rhs % g == 0)
      continue;
    conflict = row.lo->why;
    join(conflict, row.hi->why);
    for (const LiaTerm &t : row.terms) {
      const VarBounds &b = node.vars[t.var];
      if (b.fixed()) {
        join(conflict, b.lo.why);
        join(conflict, b.hi.why);
      }
    }
    return false;
  }
  return true;
}

// Bounded simplex in the style of general-form solvers: structural
// variables plus one basic variable per row, Bland's rule for pivoting.
Search::Lp Search::simplex(const Node &node, std::vector<Rational> &values,
                           Why &conflict) const {
  const std::size_t n = node.vars.size();
  const std::size_t m = node.rows.size();
  const std::size_t total = n + m;

  std::vector<std::optional<Rational>> lo(total), hi(total);
  std::vector<const Why *> lo_why(total), hi_why(total);
  static const Why kNone;
  for (std::size_t j = 0; j < n; ++j) {
    lo[j] = Rational(node.vars[j].lo.value);
    hi[j] = Rational(node.vars[j].hi.value);
    lo_why[j] = &node.vars[j].lo.why;
    hi_why[j] = &node.vars[j].hi.why;
  }
  for (std::size_t r = 0; r < m; ++r) {
    const Row &row = node.rows[r];
    lo_why[n + r] = hi_why[n + r] = &kNone;
    if (row.lo) {
      lo[n + r] = Rational(row.lo->value);
      lo_why[n + r] = &row.lo->why;
    }
    if (row.hi) {
      hi[n + r] = Rational(row.hi->value);
      hi_why[n + r] = &row.hi->why;
    }
  }

  // basic_of[r] = sum_j T[r][j] * x_j over non-basic j.
  std::vector<std::vector<Rational>> T(m, std::vector<Rational>(total));
  std::vector<std::size_t> basic_of(m);
  std::vector<Rational> beta(total);
  for (std::size_t j = 0; j < n; ++j)
    beta[j] = *lo[j];
  for (std::size_t r = 0; r < m; ++r) {
    basic_of[r] = n + r;
    for (const LiaTerm &t : node.rows[r].terms)
      T[r][t.var] += Rational(t.coeff);
    Rational v = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (sgn(T[r][j]) != 0)
        v += T[r][j] * beta[j];
    beta[n + r] = v;
  }
  std::vector<bool> is_basic(total, false);
  for (std::size_t r = 0; r < m; ++r)
    is_basic[n + r] = true;

  auto pivot_and_update = [&](std::size_t r, std::size_t j,
                              const Rational &target) {
    const std::size_t b = basic_of[r];
    Rational a = T[r][j];
    Rational theta = (target - beta[b]) / a;
    beta[b] = target;
    beta[j] += theta;
    for (std::size_t r2 = 0; r2 < m; ++r2)
      if (r2 != r && sgn(T[r2][j]) != 0)
        beta[basic_of[r2]] += T[r2][j] * theta;

    // Solve row r for x_j.
    std::vector<Rational> &row = T[r];
    Rational inv = 1 / a;
    for (std::size_t k = 0; k < total; ++k)
      if (sgn(row[k]) != 0)
        row[k] = -row[k] * inv;
    row[j] = 0;
    row[b] = inv;
    for (std::size_t r2 = 0; r2 < m; ++r2) {
      if (r2 == r || sgn(T[r2][j]) == 0)
        continue;
      Rational c = T[r2][j];
      T[r2][j] = 0;
      for (std::size_t k = 0; k < total; ++k)
        if (sgn(row[k]) != 0)
          T[r2][k] += c * row[k];
    }
    basic_of[r] = j;
    is_basic[b] = false;
    is_basic[j] = true;
  };

  for (unsigned iter = 0; iter < 20000; ++iter) {
    if ((iter & 63) == 63 && limits_.deadline.expired())
      return Lp::unknown;
    std::size_t best_row = m;
    for (std::size_t r = 0; r < m; ++r) {
      std::size_t b = basic_of[r];
      bool bad = (lo[b] && beta[b] < *lo[b]) || (hi[b] && beta[b] > *hi[b]);
      if (bad && (best_row == m || b < basic_of[best_row]))
        best_row = r;
    }
    if (best_row == m) {
      values.assign(beta.begin(), beta.begin() + static_cast<long>(n));
      return Lp::feasible;
    }
    const std::size_t r = best_row;
    const std::size_t b = basic_of[r];
    const bool raise = lo[b] && beta[b] < *lo[b];
    std::size_t enter = total;
    for (std::size_t j = 0; j < total; ++j) {
      if (is_basic[j] || sgn(T[r][j]) == 0)
        continue;
      bool up = (sgn(T[r][j]) > 0) == raise;
      bool room = up ? (!hi[j] || beta[j] < *hi[j]) : (!lo[j] || beta[j] > *lo[j]);
      if (room) {
        enter = j;
        break;
      }
    }
    if (enter == total) {
      conflict = raise ? *lo_why[b] : *hi_why[b];
      for (std::size_t j = 0; j < total; ++j) {
        if (is_basic[j] || sgn(T[r][j]) == 0)
          continue;
        bool up = (sgn(T[r][j]) > 0) == raise;
        join(conflict, up ? *hi_why[j] : *lo_why[j]);
      }
      return Lp::infeasible;
    }
    pivot_and_update(r, enter, raise ? *lo[b] : *hi[b]);
  }
  return Lp::unknown;
}

Status Search::run(Node node, unsigned depth, Why &core,
                   std::vector<Integer> &model) {
  if (++nodes_ > limits_.max_nodes || depth > limits_.max_depth ||
      limits_.deadline.expired())
    return Status::unknown;
  if (!propagate(node, core) || !gcd_test(node, core))
    return Status::unsat;

  std::vector<Rational> values;
  switch (simplex(node, values, core)) {
  case Lp::infeasible:
    return Status::unsat;
  case Lp::unknown:
    return Status::unknown;
  case Lp::feasible:
    break;
  }

  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j].get_den() == 1)
      continue;
    Integer f = floor_div(values[j].get_num(), values[j].get_den());
    Node left = node;
    left.vars[j].hi = {f, {}};
    Why c1;
    Status s1 = run(std::move(left), depth + 1, c1, model);
    if (s1 != Status::unsat)
      return s1;
    Node right = std::move(node);
    right.vars[j].lo = {f + 1, {}};
    Why c2;
    Status s2 = run(std::move(right), depth + 1, c2, model);
    if (s2 != Status::unsat)
      return s2;
    core = std::move(c1);
    join(core, c2);
    return Status::unsat;
  }

  std::vector<Integer> point(values.size());
  for (std::size_t j = 0; j < values.size(); ++j)
    point[j] = values[j].get_num();

  for (const Diseq &d : diseqs_) {
    Integer v = d.constant;
    for (const LiaTerm &t : d.terms)
      v += t.coeff * point[t.var];
    if (v != 0)
      continue;
    const LiaTag bl = next_branch_++, br = next_branch_++;
    Node left = node;
    left.rows.push_back({d.terms, std::nullopt, Bound{-d.constant - 1, {bl}}});
    Why c1;
    Status s1 = run(std::move(left), depth + 1, c1, model);
    if (s1 != Status::unsat)
      return s1;
    if (!c1.count(bl)) {
      core = std::move(c1);
      return Status::unsat;
    }
    Node right = std::move(node);
    right.rows.push_back({d.terms, Bound{-d.constant + 1, {br}}, std::nullopt});
    Why c2;
    Status s2 = run(std::move(right), depth + 1, c2, model);
    if (s2 != Status::unsat)
      return s2;
    if (!c2.count(br)) {
      core = std::move(c2);
      return Status::unsat;
    }
    c1.erase(bl);
    c2.erase(br);
    core = std::move(c1);
    join(core, c2);
    join(core, single(d.tag));
    return Status::unsat;
  }

  model = std::move(point);
  return Status::sat;
}

LiaResult solve_once(const LiaProblem &problem, const LiaLimits &limits) {
  Node node;
  node.vars.resize(problem.num_vars);
  std::vector<bool> has_lo(problem.num_vars), has_hi(problem.num_vars);
  for (const LiaBound &b : problem.bounds) {
    VarBounds &vb = node.vars.at(b.var);
    if (b.upper) {
      if (!has_hi[b.var] || b.value < vb.hi.value)
        vb.hi = {b.value, single(b.tag)};
      has_hi[b.var] = true;
    } else {
      if (!has_lo[b.var] || b.value > vb.lo.value)
        vb.lo = {b.value, single(b.tag)};
      has_lo[b.var] = true;
    }
  }
  for (std::uint32_t v = 0; v < problem.num_vars; ++v)
    if (!has_lo[v] || !has_hi[v])
      throw std::invalid_argument("lia: variable without finite bounds");

  std::vector<Diseq> diseqs;
  for (const LiaConstraint &c : problem.constraints) {
    switch (c.kind) {
    case LiaConstraint::Kind::eq:
      node.rows.push_back({c.terms, Bound{-c.constant, single(c.tag)},
                           Bound{-c.constant, single(c.tag)}});
      break;
    case LiaConstraint::Kind::le:
      node.rows.push_back({c.terms, std::nullopt, Bound{-c.constant, single(c.tag)}});
      break;
    case LiaConstraint::Kind::neq:
      diseqs.push_back({c.terms, c.constant, c.tag});
      break;
    }
  }

  LiaResult result;
  Search search(std::move(diseqs), limits);
  Why core;
  Status s = search.run(std::move(node), 0, core, result.model);
  result.nodes = search.nodes();
  switch (s) {
  case Status::sat:
    result.status = LiaResult::Status::sat;
    break;
  case Status::unsat:
    result.status = LiaResult::Status::unsat;
    result.core = std::move(core);
    break;
  case Status::unknown:
    result.status = LiaResult::Status::unknown;
    break;
  }
  return result;
}

} // namespace

LiaProblem restrict_lia(const LiaProblem &problem, const std::set<LiaTag> &keep) {
  auto kept = [&](LiaTag t) { return t == kFreeTag || keep.count(t) != 0; };
  LiaProblem out;
  out.num_vars = problem.num_vars;
  for (const LiaBound &b : problem.bounds)
    if (kept(b.tag))
      out.bounds.push_back(b);
  for (const LiaConstraint &c : problem.constraints)
    if (kept(c.tag))
      out.constraints.push_back(c);
  return out;
}

// Minimization is a refinement; a shorter core is not worth the budget of
// the check that found it.
constexpr double kMinimizeSeconds = 0.1;

LiaResult solve_lia(const LiaProblem &problem, const LiaLimits &limits) {
  LiaResult result = solve_once(problem, limits);
  if (result.status != LiaResult::Status::unsat || !limits.minimize_core)
    return result;

  // Deletion-based minimization.
  LiaLimits sub = limits;
  sub.minimize_core = false;
  sub.max_nodes = std::min(limits.max_nodes, 200u);
  sub.deadline = Deadline::earliest(limits.deadline, Deadline::after(kMinimizeSeconds));
  std::vector<LiaTag> order(result.core.begin(), result.core.end());
  for (LiaTag t : order) {
    if (!result.core.count(t) || sub.deadline.expired())
      continue;
    std::set<LiaTag> trial = result.core;
    trial.erase(t);
    LiaResult r = solve_once(restrict_lia(problem, trial), sub);
    if (r.status == LiaResult::Status::unsat)
      result.core = std::move(r.core);
  }
  return result;
}

} // namespace zpsmt
