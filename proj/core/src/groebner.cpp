#include "zpsmt/groebner.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <stdexcept>

namespace zpsmt {

namespace {

// How an element was obtained. Cofactors over the generators are rebuilt from
// these records only when the ideal turns out to be the unit ideal.
struct Origin {
  std::size_t generator = 0; // for inputs
  std::size_t i = 0, j = 0;  // for S-polynomials: ma*f_i - mb*f_j
  Monomial ma, mb;
  std::vector<std::pair<std::size_t, Polynomial>> quotients;
  bool input = true;
  FieldElement scale;
};

struct Element {
  Polynomial f;
  Origin origin;
  Monomial lm;
  unsigned sugar;
};

struct Pair {
  std::size_t i, j;
  Monomial lcm;
  unsigned sugar;
};

const Term &lead(const Polynomial &f, const MonomialOrder &order) {
  return f.terms()[f.leading_index(order)];
}

class Buchberger {
public:
  Buchberger(const Field &field, std::size_t n_gens, const GroebnerOptions &opt)
      : field_(field), n_(n_gens), opt_(opt) {}

  // Returns true when the new element is a nonzero constant.
  bool insert(Polynomial f, Origin origin, unsigned sugar) {
    const Term &lt = lead(f, opt_.order);
    origin.scale = field_.inverse(lt.coeff);
    f = scale(field_, origin.scale, f);
    if (f.is_constant()) {
      unit_ = cofactors(origin);
      return true;
    }
    Monomial lm = lead(f, opt_.order).mono;
    const std::size_t k = elems_.size();
    elems_.push_back({std::move(f), std::move(origin), lm, sugar});
    for (std::size_t i = 0; i < k; ++i) {
      if (elems_[i].lm.coprime(lm))
        continue;
      Monomial l = elems_[i].lm.lcm(lm);
      unsigned s = std::max(elems_[i].sugar + l.degree() - elems_[i].lm.degree(),
                            sugar + l.degree() - lm.degree());
      queue_.push_back({i, k, l, s});
      queued_.insert({i, k});
    }
    return false;
  }

  GroebnerResult run() {
    GroebnerResult out;
    while (!queue_.empty()) {
      if (out.pairs >= opt_.max_pairs || opt_.deadline.expired()) {
        out.status = GroebnerResult::Status::budget;
        return out;
      }
      std::size_t best = 0;
      for (std::size_t q = 1; q < queue_.size(); ++q) {
        const Pair &a = queue_[q], &b = queue_[best];
        if (a.sugar < b.sugar ||
            (a.sugar == b.sugar && opt_.order.compare(a.lcm, b.lcm) < 0))
          best = q;
      }
      Pair pair = queue_[best];
      queue_.erase(queue_.begin() + static_cast<long>(best));
      queued_.erase({pair.i, pair.j});
      if (chain_criterion(pair))
        continue;
      ++out.pairs;

      const Element &a = elems_[pair.i], &b = elems_[pair.j];
      Monomial ma = a.lm.quotient_of(pair.lcm), mb = b.lm.quotient_of(pair.lcm);
      const FieldElement one = field_.one(), minus = field_.neg(field_.one());
      Polynomial s = add(field_, mul_term(field_, a.f, ma, one),
                         mul_term(field_, b.f, mb, minus));
      if (s.is_zero())
        continue;

      std::vector<Polynomial> divisors;
      divisors.reserve(elems_.size());
      for (const Element &e : elems_)
        divisors.push_back(e.f);
      Division div = reduce(field_, s, divisors, opt_.order);
      if (div.remainder.is_zero())
        continue;
      Origin origin;
      origin.input = false;
      origin.i = pair.i;
      origin.j = pair.j;
      origin.ma = std::move(ma);
      origin.mb = std::move(mb);
      for (std::size_t k = 0; k < elems_.size(); ++k)
        if (!div.cofactors[k].is_zero())
          origin.quotients.emplace_back(k, std::move(div.cofactors[k]));
      if (insert(std::move(div.remainder), std::move(origin), pair.sugar)) {
        out.status = GroebnerResult::Status::unit;
        out.certificate = std::move(unit_);
        return out;
      }
    }
    out.status = GroebnerResult::Status::basis;
    out.basis = reduced_basis();
    return out;
  }

  std::vector<Polynomial> unit() const { return unit_; }

private:
  std::vector<Polynomial> combine(const Origin &o,
                                  const std::vector<std::vector<Polynomial>> &cof) const {
    std::vector<Polynomial> out(n_);
    if (o.input) {
      out[o.generator] = Polynomial::constant(o.scale);
      return out;
    }
    // Accumulate every product term by monomial, then sort once.
    const FieldElement minus = field_.neg(o.scale);
    std::unordered_map<Monomial, FieldElement, MonomialHash> acc;
    auto emit = [&](const Polynomial &a, const Polynomial &b, const FieldElement &c) {
      for (const Term &x : a.terms()) {
        FieldElement xc = field_.mul(x.coeff, c);
        for (const Term &y : b.terms()) {
          FieldElement t = field_.mul(xc, y.coeff);
          auto [it, fresh] = acc.try_emplace(x.mono * y.mono, t);
          if (!fresh)
            it->second = field_.add(it->second, t);
        }
      }
    };
    const Polynomial ma = Polynomial::monomial(o.ma, field_.one());
    const Polynomial mb = Polynomial::monomial(o.mb, field_.one());
    for (std::size_t g = 0; g < n_; ++g) {
      acc.clear();
      emit(ma, cof[o.i][g], o.scale);
      emit(mb, cof[o.j][g], minus);
      for (const auto &[k, q] : o.quotients)
        emit(q, cof[k][g], minus);
      std::vector<Term> terms;
      terms.reserve(acc.size());
      for (auto &[m, c] : acc)
        if (!c.is_zero())
          terms.push_back({m, std::move(c)});
      out[g] = Polynomial::from_terms(field_, std::move(terms));
    }
    return out;
  }

  // Cofactors of a (not yet stored) element, touching only its ancestors.
  std::vector<Polynomial> cofactors(const Origin &target) const {
    std::vector<bool> need(elems_.size(), false);
    auto mark = [&](const Origin &o) {
      if (o.input)
        return;
      need[o.i] = need[o.j] = true;
      for (const auto &q : o.quotients)
        need[q.first] = true;
    };
    mark(target);
    for (std::size_t k = elems_.size(); k-- > 0;)
      if (need[k])
        mark(elems_[k].origin);
    std::vector<std::vector<Polynomial>> cof(elems_.size());
    for (std::size_t k = 0; k < elems_.size(); ++k)
      if (need[k])
        cof[k] = combine(elems_[k].origin, cof);
    return combine(target, cof);
  }

  bool chain_criterion(const Pair &p) const {
    for (std::size_t k = 0; k < elems_.size(); ++k) {
      if (k == p.i || k == p.j || !elems_[k].lm.divides(p.lcm))
        continue;
      auto key = [](std::size_t a, std::size_t b) {
        return std::make_pair(std::min(a, b), std::max(a, b));
      };
      if (!queued_.count(key(p.i, k)) && !queued_.count(key(p.j, k)))
        return true;
    }
    return false;
  }

  std::vector<Polynomial> reduced_basis() const {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < elems_.size(); ++i) {
      bool redundant = false;
      for (std::size_t j = 0; j < elems_.size() && !redundant; ++j) {
        if (i == j || !elems_[j].lm.divides(elems_[i].lm))
          continue;
        // Equal leading monomials: keep the earlier element.
        redundant = !(elems_[j].lm == elems_[i].lm) || j < i;
      }
      if (!redundant)
        keep.push_back(i);
    }
    std::vector<Polynomial> out;
    for (std::size_t i : keep) {
      std::vector<Polynomial> others;
      for (std::size_t j : keep)
        if (j != i)
          others.push_back(elems_[j].f);
      out.push_back(reduce(field_, elems_[i].f, others, opt_.order).remainder);
    }
    std::sort(out.begin(), out.end(), [&](const Polynomial &a, const Polynomial &b) {
      return opt_.order.greater(lead(a, opt_.order).mono, lead(b, opt_.order).mono);
    });
    return out;
  }

  const Field &field_;
  std::size_t n_;
  const GroebnerOptions &opt_;
  std::vector<Element> elems_;
  std::vector<Pair> queue_;
  std::set<std::pair<std::size_t, std::size_t>> queued_;
  std::vector<Polynomial> unit_;
};

} // namespace

GroebnerResult groebner(const Field &field,
                        const std::vector<Polynomial> &generators,
                        const GroebnerOptions &options) {
  const std::size_t n = generators.size();
  Buchberger bb(field, n, options);
  for (std::size_t g = 0; g < n; ++g) {
    if (generators[g].is_zero())
      continue;
    Origin origin;
    origin.generator = g;
    if (bb.insert(generators[g], std::move(origin), generators[g].degree())) {
      GroebnerResult out;
      out.status = GroebnerResult::Status::unit;
      out.certificate = bb.unit();
      return out;
    }
  }
  return bb.run();
}

bool verify_certificate(const Field &field,
                        const std::vector<Polynomial> &generators,
                        const std::vector<Polynomial> &certificate) {
  if (certificate.size() != generators.size())
    return false;
  Polynomial sum;
  for (std::size_t g = 0; g < generators.size(); ++g)
    sum = add(field, sum, mul(field, certificate[g], generators[g]));
  return sum == Polynomial::constant(field.one());
}

TrailIdeal trail_ideal(const AtomTable &atoms, const TheoryTrail &trail) {
  const Field &field = atoms.field();
  TrailIdeal out;
  std::uint32_t next = static_cast<std::uint32_t>(atoms.vars().size());
  for (const TrailEntry &e : trail) {
    const Polynomial &f = atoms.atom(e.atom).poly;
    if (e.positive) {
      out.generators.push_back(f);
    } else {
      VarId u{next++};
      out.generators.push_back(sub(field,
                                   mul_term(field, f, Monomial::of(u), field.one()),
                                   Polynomial::constant(field.one())));
    }
    out.lits.push_back(e.lit);
    out.positive.push_back(e.positive);
  }
  return out;
}

GroebnerModule::Outcome GroebnerModule::check(const TheoryTrail &trail,
                                              Explanation &conflict,
                                              const Deadline &deadline) {
  basis_.clear();
  TrailIdeal ideal = trail_ideal(atoms_, trail);
  GroebnerOptions opt = opt_;
  opt.deadline = Deadline::earliest(opt_.deadline, deadline);
  GroebnerResult r = groebner(atoms_.field(), ideal.generators, opt);
  switch (r.status) {
  case GroebnerResult::Status::budget:
    return Outcome::budget;
  case GroebnerResult::Status::basis:
    basis_ = std::move(r.basis);
    return Outcome::open;
  case GroebnerResult::Status::unit:
    break;
  }
  ++cert_checks_;
  if (!verify_certificate(atoms_.field(), ideal.generators, r.certificate))
    throw std::logic_error("groebner: certificate does not reduce to 1");
  conflict.clear();
  for (std::size_t g = 0; g < r.certificate.size(); ++g)
    if (!r.certificate[g].is_zero())
      conflict.push_back(ideal.lits[g]);
  std::sort(conflict.begin(), conflict.end());
  conflict.erase(std::unique(conflict.begin(), conflict.end()), conflict.end());
  return Outcome::conflict;
}

} // namespace zpsmt
