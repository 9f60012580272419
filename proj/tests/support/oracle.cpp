#include "oracle.hpp"

#include <algorithm>
#include <sstream>

namespace zpsmt::oracle {

bool is_prime(u64 n) {
  if (n < 2)
    return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0)
      return false;
  return true;
}

std::vector<u64> primes_up_to(u64 limit) {
  std::vector<u64> out;
  for (u64 n = 2; n <= limit; ++n)
    if (is_prime(n))
      out.push_back(n);
  return out;
}

u64 NaiveField::reduce(long long z) const {
  long long m = static_cast<long long>(p);
  return static_cast<u64>(((z % m) + m) % m);
}

u64 NaiveField::pow(u64 a, u64 e) const {
  u64 r = 1 % p;
  for (u64 i = 0; i < e; ++i)
    r = mul(r, a);
  return r;
}

std::optional<u64> NaiveField::inverse(u64 a) const {
  for (u64 b = 1; b < p; ++b)
    if (mul(a, b) == 1)
      return b;
  return std::nullopt;
}

std::vector<u64> NaiveField::square_roots(u64 a) const {
  std::vector<u64> out;
  for (u64 r = 0; r < p; ++r)
    if (mul(r, r) == a % p)
      out.push_back(r);
  return out;
}

u64 eval(const NaiveField &f, const Polynomial &poly, const std::vector<u64> &values) {
  u64 sum = 0;
  for (const Term &t : poly.terms()) {
    u64 prod = t.coeff.residue.get_ui() % f.p;
    for (const auto &pw : t.mono.powers()) {
      u64 x = pw.var.index < values.size() ? values[pw.var.index] : 0;
      prod = f.mul(prod, f.pow(x, pw.exp));
    }
    sum = f.add(sum, prod);
  }
  return sum;
}

bool enumerate(u64 p, std::size_t n, const std::function<bool(const std::vector<u64> &)> &visit) {
  std::vector<u64> x(n, 0);
  while (true) {
    if (visit(x))
      return true;
    std::size_t i = 0;
    while (i < n && ++x[i] == p)
      x[i++] = 0;
    if (i == n)
      return false;
  }
}

// ---------------------------------------------------------------------------

namespace {

std::string render_term(const RawInstance &inst, const RawTerm &t, const std::string &sort) {
  NaiveField f{inst.p};
  u64 c = f.reduce(t.coeff);
  std::vector<std::string> factors;
  bool negate = false;
  long long b = f.balanced(c);
  if (b < 0 && (t.coeff & 1)) {
    negate = true;
    c = static_cast<u64>(-b);
  }
  if (c != 1)
    factors.push_back("(as ff" + std::to_string(c) + " " + sort + ")");
  for (unsigned v = 0; v < t.exps.size(); ++v)
    for (unsigned e = 0; e < t.exps[v]; ++e)
      factors.push_back(inst.var_name(v));
  std::string out;
  if (factors.empty())
    out = "(as ff1 " + sort + ")";
  else if (factors.size() == 1)
    out = factors[0];
  else {
    out = "(ff.mul";
    for (const auto &s : factors)
      out += " " + s;
    out += ")";
  }
  return negate ? "(ff.neg " + out + ")" : out;
}

} // namespace

std::string RawInstance::smtlib() const {
  std::string sort = "(_ FiniteField " + std::to_string(p) + ")";
  std::ostringstream s;
  s << "(set-logic QF_FF)\n";
  for (unsigned v = 0; v < vars; ++v)
    s << "(declare-fun " << var_name(v) << " () " << sort << ")\n";
  auto atom_text = [&](const RawAtom &a) {
    std::string lhs;
    if (a.lhs.empty())
      lhs = "(as ff0 " + sort + ")";
    else if (a.lhs.size() == 1)
      lhs = render_term(*this, a.lhs[0], sort);
    else {
      lhs = "(ff.add";
      for (const RawTerm &t : a.lhs)
        lhs += " " + render_term(*this, t, sort);
      lhs += ")";
    }
    NaiveField f{p};
    return "(= " + lhs + " (as ff" + std::to_string(f.reduce(a.rhs)) + " " + sort + "))";
  };
  for (const auto &clause : clauses) {
    std::vector<std::string> lits;
    for (const RawLit &l : clause) {
      std::string a = atom_text(atoms[l.atom]);
      lits.push_back(l.positive ? a : "(not " + a + ")");
    }
    s << "(assert ";
    if (lits.size() == 1)
      s << lits[0];
    else {
      s << "(or";
      for (const auto &l : lits)
        s << " " << l;
      s << ")";
    }
    s << ")\n";
  }
  s << "(check-sat)\n";
  return s.str();
}

bool RawInstance::atom_holds(unsigned atom, const std::vector<u64> &x) const {
  NaiveField f{p};
  u64 sum = 0;
  for (const RawTerm &t : atoms[atom].lhs) {
    u64 prod = f.reduce(t.coeff);
    for (unsigned v = 0; v < t.exps.size(); ++v)
      prod = f.mul(prod, f.pow(x[v], t.exps[v]));
    sum = f.add(sum, prod);
  }
  return sum == f.reduce(atoms[atom].rhs);
}

bool RawInstance::holds(const std::vector<u64> &x) const {
  for (const auto &clause : clauses) {
    bool any = false;
    for (const RawLit &l : clause)
      if (atom_holds(l.atom, x) == l.positive) {
        any = true;
        break;
      }
    if (!any)
      return false;
  }
  return true;
}

std::optional<std::vector<u64>> RawInstance::brute_force() const {
  std::optional<std::vector<u64>> found;
  enumerate(p, vars, [&](const std::vector<u64> &x) {
    if (!holds(x))
      return false;
    found = x;
    return true;
  });
  return found;
}

RawInstance random_instance(std::mt19937_64 &rng, const InstanceShape &shape) {
  auto pick = [&](unsigned lo, unsigned hi) {
    return std::uniform_int_distribution<unsigned>(lo, hi)(rng);
  };
  RawInstance inst;
  inst.p = shape.primes[pick(0, static_cast<unsigned>(shape.primes.size() - 1))];
  inst.vars = pick(1, shape.max_vars);
  unsigned n_atoms = pick(1, shape.max_atoms);
  for (unsigned a = 0; a < n_atoms; ++a) {
    RawAtom atom;
    unsigned n_terms = pick(1, shape.max_terms);
    for (unsigned t = 0; t < n_terms; ++t) {
      RawTerm term;
      term.coeff = pick(1, static_cast<unsigned>(inst.p - 1));
      term.exps.assign(inst.vars, 0);
      unsigned degree = pick(1, shape.max_degree);
      for (unsigned d = 0; d < degree; ++d)
        ++term.exps[pick(0, inst.vars - 1)];
      atom.lhs.push_back(std::move(term));
    }
    atom.rhs = pick(0, static_cast<unsigned>(inst.p - 1));
    inst.atoms.push_back(std::move(atom));
  }
  // Unit clauses for most atoms, a few short disjunctions mixed in.
  std::vector<unsigned> order(n_atoms);
  for (unsigned a = 0; a < n_atoms; ++a)
    order[a] = a;
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < order.size();) {
    std::vector<RawLit> clause;
    unsigned width = pick(0, 3) == 0 ? 2 : 1;
    for (unsigned k = 0; k < width && i < order.size(); ++k, ++i)
      clause.push_back({order[i], pick(0, 2) != 0});
    inst.clauses.push_back(std::move(clause));
  }
  return inst;
}

Polynomial random_polynomial(std::mt19937_64 &rng, const Field &field, unsigned nvars,
                             unsigned max_terms, unsigned max_degree) {
  auto pick = [&](unsigned lo, unsigned hi) {
    return std::uniform_int_distribution<unsigned>(lo, hi)(rng);
  };
  unsigned long p = field.modulus().get_ui();
  std::vector<Term> terms;
  unsigned n = pick(1, max_terms);
  for (unsigned t = 0; t < n; ++t) {
    std::vector<Monomial::Power> powers;
    unsigned degree = pick(0, max_degree);
    for (unsigned d = 0; d < degree; ++d)
      powers.push_back({VarId{pick(0, nvars - 1)}, 1});
    terms.push_back({Monomial::from_powers(std::move(powers)),
                     field.from_long(static_cast<long>(pick(1, static_cast<unsigned>(p - 1))))});
  }
  return Polynomial::from_terms(field, std::move(terms));
}

} // namespace zpsmt::oracle
