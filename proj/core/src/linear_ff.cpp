#include "zpsmt/linear_ff.hpp"

#include <algorithm>
#include <cassert>

namespace zpsmt {

namespace {

const std::set<VarId> kEmptyColumn;

void add_into(const Field &f, Tableau::Row &row, VarId v,
              const FieldElement &c) {
  auto [it, inserted] = row.try_emplace(v, c);
  if (!inserted) {
    it->second = f.add(it->second, c);
    if (it->second.is_zero())
      row.erase(it);
  } else if (c.is_zero()) {
    row.erase(it);
  }
}

} // namespace

const std::set<VarId> &Tableau::column(VarId v) const {
  auto it = cols_.find(v);
  return it == cols_.end() ? kEmptyColumn : it->second;
}

void Tableau::unlink(VarId basic, VarId v) {
  auto it = cols_.find(v);
  if (it == cols_.end())
    return;
  it->second.erase(basic);
  if (it->second.empty())
    cols_.erase(it);
}

void Tableau::add_row(VarId basic, const Row &expr) {
  assert(!is_basic(basic) && column(basic).empty());
  Row r;
  for (const auto &[v, c] : expr) {
    if (auto it = rows_.find(v); it != rows_.end()) {
      for (const auto &[w, d] : it->second)
        add_into(*field_, r, w, field_->mul(c, d));
    } else {
      add_into(*field_, r, v, c);
    }
  }
  for (const auto &[v, c] : r)
    link(basic, v);
  rows_.emplace(basic, std::move(r));
}

void Tableau::pivot(VarId x, VarId y) {
  const Field &f = *field_;
  Row rx = std::move(rows_.at(x));
  rows_.erase(x);
  for (const auto &[v, c] : rx)
    unlink(x, v);

  // x = a*y + rest  =>  y = x/a - rest/a
  FieldElement inv = f.inverse(rx.at(y));
  Row ry;
  ry.emplace(x, inv);
  FieldElement minus_inv = f.neg(inv);
  for (const auto &[v, c] : rx)
    if (v != y)
      ry.emplace(v, f.mul(c, minus_inv));

  std::set<VarId> users = column(y);
  cols_.erase(y);
  for (VarId b : users) {
    Row &rb = rows_.at(b);
    FieldElement c = rb.at(y);
    rb.erase(y);
    for (const auto &[v, d] : ry) {
      add_into(f, rb, v, f.mul(c, d));
      if (rb.count(v))
        link(b, v);
      else
        unlink(b, v);
    }
  }
  for (const auto &[v, c] : ry)
    link(y, v);
  rows_.emplace(y, std::move(ry));
}

FieldElement find_value_avoiding(const Field &field,
                                 const std::vector<FieldElement> &forbidden,
                                 const FieldElement &start) {
  if (Integer(forbidden.size()) >= field.modulus()) {
    std::vector<FieldElement> sorted = forbidden;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (Integer(sorted.size()) >= field.modulus())
      throw Exhausted();
  }
  FieldElement v = start;
  for (;;) {
    if (std::find(forbidden.begin(), forbidden.end(), v) == forbidden.end())
      return v;
    v = field.add(v, field.one());
  }
}

LinearModule::LinearModule(AtomTable &atoms, Options options)
    : atoms_(atoms), field_(atoms.field()), opt_(options), rng_(options.seed),
      tableau_(atoms.field()) {}

FieldElement &LinearModule::sigma(VarId v) {
  if (v.index >= sigma_.size())
    sigma_.resize(v.index + 1);
  return sigma_[v.index];
}

FieldElement LinearModule::value(VarId v) const {
  if (v.index >= sigma_.size())
    return FieldElement();
  return sigma_[v.index];
}

FieldElement LinearModule::start_value() {
  if (!opt_.randomize_values)
    return FieldElement();
  std::uniform_int_distribution<unsigned long> pick(0, 1ul << 30);
  return field_.from_integer(Integer(pick(rng_)));
}

void LinearModule::sync() {
  const auto &rows = atoms_.slack_rows();
  for (; rows_synced_ < rows.size(); ++rows_synced_) {
    const SlackRow &sr = rows[rows_synced_];
    Tableau::Row expr;
    for (const Term &t : sr.body.terms())
      expr.emplace(t.mono.powers()[0].var, t.coeff);
    tableau_.add_row(sr.slack, expr);
    FieldElement v;
    for (const auto &[w, c] : tableau_.row(sr.slack))
      v = field_.add(v, field_.mul(c, value(w)));
    sigma(sr.slack) = v;
  }
}

void LinearModule::update(VarId x, const FieldElement &v) {
  FieldElement delta = field_.sub(v, value(x));
  if (delta.is_zero())
    return;
  sigma(x) = v;
  for (VarId b : tableau_.column(x)) {
    const FieldElement &c = tableau_.row(b).at(x);
    sigma(b) = field_.add(value(b), field_.mul(c, delta));
  }
}

bool LinearModule::in_diseqs(VarId v, const FieldElement &value) const {
  auto it = diseqs_.find(v);
  if (it == diseqs_.end())
    return false;
  for (const Diseq &d : it->second)
    if (d.value == value)
      return true;
  return false;
}

bool LinearModule::violates(VarId v, const FieldElement &value) const {
  if (auto it = fixed_.find(v); it != fixed_.end() && it->second.value != value)
    return true;
  return in_diseqs(v, value);
}

std::vector<FieldElement> LinearModule::diseq_values(VarId v) const {
  std::vector<FieldElement> out;
  if (auto it = diseqs_.find(v); it != diseqs_.end())
    for (const Diseq &d : it->second)
      out.push_back(d.value);
  return out;
}

std::optional<Explanation>
LinearModule::assert_literal(const TrailEntry &e, std::size_t trail_index) {
  const Atom &a = atoms_.atom(e.atom);
  VarId x = a.dom_var;
  const FieldElement &k = a.dom_value;
  if (e.positive) {
    if (auto it = fixed_.find(x); it != fixed_.end())
      return Explanation{it->second.lit, e.lit};
    if (auto it = diseqs_.find(x); it != diseqs_.end())
      for (const Diseq &d : it->second)
        if (d.value == k)
          return Explanation{d.lit, e.lit};
    fixed_.emplace(x, Fix{k, e.lit});
    undo_.push_back({trail_index, x, true});
    if (!tableau_.is_basic(x))
      update(x, k);
    return std::nullopt;
  }

  if (auto it = fixed_.find(x); it != fixed_.end() && it->second.value == k)
    return Explanation{it->second.lit, e.lit};
  diseqs_[x].push_back(Diseq{k, e.lit});
  undo_.push_back({trail_index, x, false});
  if (!tableau_.is_basic(x) && !fixed_.count(x) && value(x) == k) {
    try {
      update(x, find_value_avoiding(field_, diseq_values(x), start_value()));
    } catch (const Exhausted &) {
      Explanation all;
      for (const Diseq &d : diseqs_[x])
        all.push_back(d.lit);
      diseqs_[x].pop_back();
      undo_.pop_back();
      return all;
    }
  }
  return std::nullopt;
}

void LinearModule::backtrack(std::size_t trail_size) {
  while (!undo_.empty() && undo_.back().trail_index >= trail_size) {
    const Undo &u = undo_.back();
    if (u.was_fix) {
      fixed_.erase(u.var);
    } else {
      auto it = diseqs_.find(u.var);
      it->second.pop_back();
      if (it->second.empty())
        diseqs_.erase(it);
    }
    undo_.pop_back();
  }
}

void LinearModule::explain_row(VarId basic, Explanation &out) const {
  for (const auto &[v, c] : tableau_.row(basic))
    if (auto it = fixed_.find(v); it != fixed_.end())
      out.push_back(it->second.lit);
}

LinearModule::Outcome LinearModule::heavy_check(Explanation &conflict,
                                                const Deadline &deadline) {
  for (unsigned iter = 0;; ++iter) {
    if (iter >= opt_.max_iterations || deadline.expired())
      return Outcome::unknown;

    // Smallest violated basic variable.
    VarId x;
    bool found = false;
    for (const auto &[b, row] : tableau_.rows()) {
      if (violates(b, value(b))) {
        x = b;
        found = true;
        break;
      }
    }
    if (!found)
      return Outcome::sat_candidate;

    const Tableau::Row &row = tableau_.row(x);
    std::vector<VarId> free;
    for (const auto &[v, c] : row)
      if (!fixed_.count(v))
        free.push_back(v);

    if (auto fx = fixed_.find(x);
        fx != fixed_.end() && fx->second.value != value(x)) {
      if (free.empty()) {
        conflict.clear();
        explain_row(x, conflict);
        conflict.push_back(fx->second.lit);
        return Outcome::conflict;
      }
      FieldElement k = fx->second.value;
      tableau_.pivot(x, free.front());
      ++pivots_;
      update(x, k);
      continue;
    }

    // sigma(x) hits one of x's disequations.
    const FieldElement current = value(x);
    if (free.empty()) {
      conflict.clear();
      explain_row(x, conflict);
      for (const Diseq &d : diseqs_.at(x))
        if (d.value == current) {
          conflict.push_back(d.lit);
          break;
        }
      return Outcome::conflict;
    }

    bool repaired = false;
    for (VarId y : free) {
      const FieldElement a = row.at(y);
      const FieldElement sy = value(y);
      const std::vector<FieldElement> dy = diseq_values(y);
      const std::size_t dx = diseqs_.at(x).size();
      // Pigeonhole: among dx + 1 values outside dy one keeps x clear.
      const std::size_t window = dx + dy.size() + 1 + 8;
      std::optional<FieldElement> fallback, preferred;
      FieldElement l = start_value();
      for (std::size_t tries = 0; tries < window; ++tries) {
        if (Integer(tries) >= field_.modulus())
          break;
        FieldElement cand = l;
        l = field_.add(l, field_.one());
        if (std::find(dy.begin(), dy.end(), cand) != dy.end())
          continue;
        FieldElement delta = field_.sub(cand, sy);
        FieldElement xv = field_.add(current, field_.mul(a, delta));
        if (in_diseqs(x, xv) || violates(x, xv))
          continue;
        if (!fallback)
          fallback = cand;
        bool clean = true;
        for (VarId b : tableau_.column(y)) {
          if (b == x)
            continue;
          FieldElement bv = field_.add(
              value(b), field_.mul(tableau_.row(b).at(y), delta));
          if (!violates(b, value(b)) && violates(b, bv)) {
            clean = false;
            break;
          }
        }
        if (clean) {
          preferred = cand;
          break;
        }
      }
      std::optional<FieldElement> pick = preferred ? preferred : fallback;
      if (pick) {
        update(y, *pick);
        repaired = true;
        break;
      }
    }
    if (repaired)
      continue;
    if (free.size() == 1) {
      // Every value of the single free variable is excluded.
      conflict.clear();
      explain_row(x, conflict);
      for (const Diseq &d : diseqs_.at(x))
        conflict.push_back(d.lit);
      if (auto it = diseqs_.find(free.front()); it != diseqs_.end())
        for (const Diseq &d : it->second)
          conflict.push_back(d.lit);
      return Outcome::conflict;
    }
    return Outcome::unknown;
  }
}

std::vector<Definition> LinearModule::spurious_definitions() const {
  std::vector<Definition> bad;
  for (const Definition &d : atoms_.definitions()) {
    FieldElement prod = field_.one();
    for (const auto &p : d.mono.powers())
      prod = field_.mul(prod, field_.pow(value(p.var), p.exp));
    if (prod != value(d.var))
      bad.push_back(d);
  }
  return bad;
}

std::vector<DomainFact>
LinearModule::propagate(const std::vector<bool> &atom_assigned) {
  std::vector<DomainFact> out;
  auto fixed_lit = [&](VarId v) -> const Fix * {
    auto it = fixed_.find(v);
    return it == fixed_.end() ? nullptr : &it->second;
  };

  // (a) x = k excludes every other registered value of x.
  for (const auto &[x, fix] : fixed_) {
    for (AtomId id : atoms_.atoms_on(x)) {
      if (id < atom_assigned.size() && atom_assigned[id])
        continue;
      const Atom &a = atoms_.atom(id);
      if (a.dom_value != fix.value)
        out.push_back({x, a.dom_value, false, {fix.lit}});
    }
  }

  // (b), (c) monomial variables from fixed factors.
  for (const Definition &d : atoms_.definitions()) {
    const Fix *self = fixed_lit(d.var);
    Explanation because;
    bool zero = false, all = true;
    FieldElement prod = field_.one();
    for (const auto &p : d.mono.powers()) {
      const Fix *f = fixed_lit(p.var);
      if (!f) {
        all = false;
        continue;
      }
      if (f->value.is_zero()) {
        zero = true;
        because = {f->lit};
        break;
      }
      because.push_back(f->lit);
      prod = field_.mul(prod, field_.pow(f->value, p.exp));
    }
    if (zero)
      prod = field_.zero();
    else if (!all)
      continue;
    if (self && self->value == prod)
      continue;
    out.push_back({d.var, prod, true, std::move(because)});
  }

  // (d) a row with exactly one unfixed variable determines it.
  for (const auto &[b, row] : tableau_.rows()) {
    std::optional<VarId> open;
    bool many = false;
    auto consider = [&](VarId v) {
      if (fixed_.count(v))
        return;
      if (open)
        many = true;
      open = v;
    };
    consider(b);
    for (const auto &[v, c] : row) {
      consider(v);
      if (many)
        break;
    }
    if (many || !open)
      continue;
    // 0 = -b + sum c_v v; solve for the open variable.
    FieldElement coeff, rest;
    Explanation because;
    auto contribute = [&](VarId v, const FieldElement &c) {
      if (v == *open) {
        coeff = c;
        return;
      }
      const Fix &f = fixed_.at(v);
      rest = field_.add(rest, field_.mul(c, f.value));
      because.push_back(f.lit);
    };
    contribute(b, field_.neg(field_.one()));
    for (const auto &[v, c] : row)
      contribute(v, c);
    FieldElement val = field_.neg(field_.div(rest, coeff));
    out.push_back({*open, val, true, std::move(because)});
  }
  return out;
}

Assignment LinearModule::model() const {
  Assignment m;
  for (std::uint32_t i = 0; i < atoms_.vars().size(); ++i) {
    VarId v{i};
    if (atoms_.vars().kind(v) == VarKind::original)
      m[v] = value(v);
  }
  return m;
}

bool LinearModule::invariant_holds() const {
  for (const auto &[b, row] : tableau_.rows()) {
    FieldElement v;
    for (const auto &[w, c] : row)
      v = field_.add(v, field_.mul(c, value(w)));
    if (v != value(b))
      return false;
  }
  for (const auto &[x, fix] : fixed_)
    if (!tableau_.is_basic(x) && value(x) != fix.value)
      return false;
  for (const auto &[x, ds] : diseqs_)
    if (!tableau_.is_basic(x) && in_diseqs(x, value(x)))
      return false;
  return true;
}

} // namespace zpsmt
