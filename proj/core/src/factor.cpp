#include "zpsmt/factor.hpp"

#include <algorithm>

namespace zpsmt {

namespace {

// Dense coefficient vector of a univariate polynomial, index = degree.
std::vector<FieldElement> univariate_coeffs(const Polynomial &f, VarId x) {
  std::vector<FieldElement> c(f.degree_in(x) + 1);
  for (const Term &t : f.terms())
    c[t.mono.exponent(x)] = t.coeff;
  return c;
}

std::optional<VarId> single_variable(const Polynomial &f) {
  std::vector<VarId> vs = f.vars();
  if (vs.size() != 1)
    return std::nullopt;
  return vs.front();
}

FieldElement horner(const Field &field, const std::vector<FieldElement> &c,
                    const FieldElement &x) {
  FieldElement acc;
  for (std::size_t i = c.size(); i-- > 0;)
    acc = field.add(field.mul(acc, x), c[i]);
  return acc;
}

// c / (x - alpha); requires alpha to be a root.
std::vector<FieldElement> deflate(const Field &field,
                                  const std::vector<FieldElement> &c,
                                  const FieldElement &alpha) {
  std::vector<FieldElement> q(c.size() - 1);
  FieldElement carry;
  for (std::size_t i = c.size(); i-- > 1;) {
    carry = field.add(c[i], field.mul(carry, alpha));
    q[i - 1] = carry;
  }
  return q;
}

std::optional<std::pair<FieldElement, FieldElement>>
quadratic_roots(const Field &field, const FieldElement &a,
                const FieldElement &b, const FieldElement &c) {
  FieldElement disc =
      field.sub(field.mul(b, b), field.mul(field.from_long(4), field.mul(a, c)));
  auto r = field.sqrt(disc);
  if (!r)
    return std::nullopt;
  FieldElement inv2a = field.inverse(field.add(a, a));
  FieldElement nb = field.neg(b);
  FieldElement x1 = field.mul(field.add(nb, r->first), inv2a);
  FieldElement x2 = field.mul(field.sub(nb, r->first), inv2a);
  if (x2 < x1)
    std::swap(x1, x2);
  return std::make_pair(x1, x2);
}

// Candidate roots for univariate peeling: every residue for small primes,
// otherwise the balanced window [-64, 64].
std::vector<FieldElement> root_candidates(const Field &field) {
  std::vector<FieldElement> out;
  if (field.modulus() <= 257) {
    for (long v = 0; v < field.modulus().get_si(); ++v)
      out.push_back(field.from_long(v));
    return out;
  }
  out.push_back(field.zero());
  for (long v = 1; v <= 64; ++v) {
    out.push_back(field.from_long(v));
    out.push_back(field.from_long(-v));
  }
  return out;
}

std::optional<std::vector<RootFactor>>
univariate_roots(const Field &field, const Polynomial &f, VarId x) {
  std::vector<FieldElement> c = univariate_coeffs(f, x);
  std::vector<RootFactor> roots;
  std::vector<FieldElement> candidates;
  while (c.size() > 1) {
    const std::size_t deg = c.size() - 1;
    if (deg == 1) {
      roots.push_back({x, field.neg(field.div(c[0], c[1]))});
      break;
    }
    if (deg == 2) {
      auto q = quadratic_roots(field, c[2], c[1], c[0]);
      if (!q)
        return std::nullopt;
      roots.push_back({x, q->first});
      roots.push_back({x, q->second});
      break;
    }
    std::optional<FieldElement> found;
    if (c[0].is_zero()) {
      found = field.zero();
    } else {
      if (candidates.empty())
        candidates = root_candidates(field);
      for (const FieldElement &a : candidates) {
        if (horner(field, c, a).is_zero()) {
          found = a;
          break;
        }
      }
    }
    if (!found)
      return std::nullopt;
    roots.push_back({x, *found});
    c = deflate(field, c, *found);
  }
  std::sort(roots.begin(), roots.end(),
            [](const RootFactor &a, const RootFactor &b) {
              return a.root < b.root;
            });
  return roots;
}

// Linear D with D*D == q, if any.
std::optional<Polynomial> linear_sqrt(const Field &field, const Polynomial &q) {
  if (q.is_zero())
    return Polynomial();
  if (q.is_constant()) {
    auto r = field.sqrt(q.constant_term());
    if (!r)
      return std::nullopt;
    return Polynomial::constant(r->first);
  }
  if (q.degree() != 2)
    return std::nullopt;
  const Term &lt = q.leading();
  if (lt.mono.powers().size() != 1 || lt.mono.powers()[0].exp != 2)
    return std::nullopt;
  VarId y = lt.mono.powers()[0].var;
  auto r = field.sqrt(lt.coeff);
  if (!r)
    return std::nullopt;
  FieldElement dy = r->first;
  FieldElement inv = field.inverse(field.add(dy, dy));
  std::vector<Term> terms{{Monomial::of(y), dy}};
  for (const Term &t : q.terms()) {
    if (t.mono.degree() == 2 && t.mono.exponent(y) == 1) {
      Monomial other = Monomial::of(y).quotient_of(t.mono);
      terms.push_back({other, field.mul(t.coeff, inv)});
    } else if (t.mono.degree() == 1 && t.mono.exponent(y) == 1) {
      terms.push_back({Monomial(), field.mul(t.coeff, inv)});
    }
  }
  Polynomial d = Polynomial::from_terms(field, std::move(terms));
  if (!(mul(field, d, d) == q))
    return std::nullopt;
  return d;
}

// Splits f = x * a + b where x occurs with degree one.
std::pair<Polynomial, Polynomial> split_linear_in(const Field &field,
                                                  const Polynomial &f,
                                                  VarId x) {
  std::vector<Term> with, without;
  for (const Term &t : f.terms()) {
    if (t.mono.contains(x))
      with.push_back({Monomial::of(x).quotient_of(t.mono), t.coeff});
    else
      without.push_back(t);
  }
  return {Polynomial::from_terms(field, std::move(with)),
          Polynomial::from_sorted(std::move(without))};
}

} // namespace

std::optional<std::pair<FieldElement, FieldElement>>
factor_quadratic_univariate(const Field &field, const Polynomial &f) {
  auto x = single_variable(f);
  if (!x || f.degree() != 2)
    return std::nullopt;
  std::vector<FieldElement> c = univariate_coeffs(f, *x);
  return quadratic_roots(field, c[2], c[1], c[0]);
}

std::optional<CommonFactor>
extract_common_variable(const Field &field, const Polynomial &f,
                        const MonomialOrder &order) {
  if (f.is_zero())
    return std::nullopt;
  std::vector<VarId> common;
  for (const auto &p : f.terms().front().mono.powers())
    common.push_back(p.var);
  for (const Term &t : f.terms()) {
    std::erase_if(common, [&](VarId v) { return !t.mono.contains(v); });
    if (common.empty())
      return std::nullopt;
  }
  VarId best = common.front();
  for (VarId v : common)
    if (order.greater(Monomial::of(v), Monomial::of(best)))
      best = v;
  Monomial xm = Monomial::of(best);
  std::vector<Term> q;
  q.reserve(f.terms().size());
  for (const Term &t : f.terms())
    q.push_back({xm.quotient_of(t.mono), t.coeff});
  return CommonFactor{best, Polynomial::from_terms(field, std::move(q))};
}

std::optional<std::vector<RootFactor>>
match_product_of_roots(const Field &field, const Polynomial &f) {
  if (f.is_constant())
    return std::nullopt;
  if (auto x = single_variable(f))
    return univariate_roots(field, f, *x);

  std::vector<RootFactor> out;
  Polynomial rest = f;
  while (!rest.is_constant()) {
    std::vector<VarId> vs = rest.vars();
    if (vs.size() == 1) {
      auto tail = univariate_roots(field, rest, vs.front());
      if (!tail || tail->size() != 1)
        return std::nullopt;
      out.push_back(tail->front());
      break;
    }
    VarId x = vs.front();
    if (rest.degree_in(x) != 1)
      return std::nullopt;
    auto [a, b] = split_linear_in(field, rest, x);
    // rest = (x - alpha) * a requires b = -alpha * a.
    const Term &lead = a.leading();
    FieldElement ratio = field.div(b.coefficient(lead.mono), lead.coeff);
    if (!(scale(field, ratio, a) == b))
      return std::nullopt;
    out.push_back({x, field.neg(ratio)});
    rest = a;
  }
  return out;
}

std::optional<std::pair<Polynomial, Polynomial>>
factor_two_linear(const Field &field, const Polynomial &f) {
  if (f.degree() != 2)
    return std::nullopt;
  const std::vector<VarId> vs = f.vars();

  for (VarId x : vs) {
    if (f.degree_in(x) != 2)
      continue;
    // f = a x^2 + b x + c with a constant.
    FieldElement a = f.coefficient(Monomial::of(x, 2));
    std::vector<Term> bt, ct;
    for (const Term &t : f.terms()) {
      std::uint32_t e = t.mono.exponent(x);
      if (e == 1)
        bt.push_back({Monomial::of(x).quotient_of(t.mono), t.coeff});
      else if (e == 0)
        ct.push_back(t);
    }
    Polynomial b = Polynomial::from_terms(field, std::move(bt));
    Polynomial c = Polynomial::from_sorted(std::move(ct));
    Polynomial disc = sub(field, mul(field, b, b),
                          scale(field, field.mul(field.from_long(4), a), c));
    auto d = linear_sqrt(field, disc);
    if (!d)
      return std::nullopt;
    Polynomial base = add(field, scale(field, field.add(a, a),
                                       Polynomial::variable(x)),
                          b);
    return std::make_pair(make_monic(field, sub(field, base, *d)),
                          make_monic(field, add(field, base, *d)));
  }

  // Every variable has degree <= 1: f = x * a + b with a linear.
  VarId x = f.leading().mono.powers().front().var;
  auto [a, b] = split_linear_in(field, f, x);
  if (a.is_constant() || a.degree() != 1)
    return std::nullopt;
  Polynomial divisor[] = {a};
  Division div = reduce(field, b, divisor, MonomialOrder::grevlex());
  if (!div.remainder.is_zero() || div.cofactors[0].degree() > 1)
    return std::nullopt;
  Polynomial other = add(field, Polynomial::variable(x), div.cofactors[0]);
  return std::make_pair(make_monic(field, a), make_monic(field, other));
}

} // namespace zpsmt
