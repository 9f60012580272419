#include "zpsmt/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace zpsmt {

// ---------------------------------------------------------------------------
// VarTable

VarId VarTable::add(std::string name, VarKind kind) {
  VarId id{static_cast<std::uint32_t>(names_.size())};
  by_name_.emplace(name, id);
  names_.push_back(std::move(name));
  kinds_.push_back(kind);
  return id;
}

std::optional<VarId> VarTable::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end())
    return std::nullopt;
  return it->second;
}

std::string VarTable::display(VarId v) const {
  if (v.index < names_.size())
    return names_[v.index];
  return "_t" + std::to_string(v.index);
}

// ---------------------------------------------------------------------------
// Monomial

Monomial Monomial::of(VarId v, std::uint32_t exp) {
  Monomial m;
  if (exp != 0) {
    m.powers_.push_back({v, exp});
    m.degree_ = exp;
  }
  return m;
}

Monomial Monomial::from_powers(std::vector<Power> powers) {
  std::sort(powers.begin(), powers.end(),
            [](const Power &a, const Power &b) { return a.var < b.var; });
  Monomial m;
  for (const Power &p : powers) {
    if (p.exp == 0)
      continue;
    if (!m.powers_.empty() && m.powers_.back().var == p.var)
      m.powers_.back().exp += p.exp;
    else
      m.powers_.push_back(p);
    m.degree_ += p.exp;
  }
  return m;
}

std::uint32_t Monomial::exponent(VarId v) const {
  auto it = std::lower_bound(
      powers_.begin(), powers_.end(), v,
      [](const Power &p, VarId var) { return p.var < var; });
  if (it != powers_.end() && it->var == v)
    return it->exp;
  return 0;
}

bool Monomial::divides(const Monomial &other) const {
  if (degree_ > other.degree_)
    return false;
  std::size_t j = 0;
  for (const Power &p : powers_) {
    while (j < other.powers_.size() && other.powers_[j].var < p.var)
      ++j;
    if (j == other.powers_.size() || other.powers_[j].var != p.var ||
        other.powers_[j].exp < p.exp)
      return false;
  }
  return true;
}

Monomial Monomial::quotient_of(const Monomial &other) const {
  Monomial q;
  std::size_t i = 0;
  for (const Power &p : other.powers_) {
    std::uint32_t e = p.exp;
    if (i < powers_.size() && powers_[i].var == p.var) {
      e -= powers_[i].exp;
      ++i;
    }
    if (e != 0) {
      q.powers_.push_back({p.var, e});
      q.degree_ += e;
    }
  }
  return q;
}

Monomial Monomial::lcm(const Monomial &other) const {
  Monomial r;
  r.powers_.reserve(powers_.size() + other.powers_.size());
  std::size_t i = 0, j = 0;
  while (i < powers_.size() || j < other.powers_.size()) {
    Power p;
    if (j == other.powers_.size() ||
        (i < powers_.size() && powers_[i].var < other.powers_[j].var)) {
      p = powers_[i++];
    } else if (i == powers_.size() || other.powers_[j].var < powers_[i].var) {
      p = other.powers_[j++];
    } else {
      p = {powers_[i].var, std::max(powers_[i].exp, other.powers_[j].exp)};
      ++i;
      ++j;
    }
    r.powers_.push_back(p);
    r.degree_ += p.exp;
  }
  return r;
}

bool Monomial::coprime(const Monomial &other) const {
  std::size_t i = 0, j = 0;
  while (i < powers_.size() && j < other.powers_.size()) {
    if (powers_[i].var == other.powers_[j].var)
      return false;
    if (powers_[i].var < other.powers_[j].var)
      ++i;
    else
      ++j;
  }
  return true;
}

Monomial operator*(const Monomial &a, const Monomial &b) {
  Monomial r;
  r.powers_.reserve(a.powers_.size() + b.powers_.size());
  std::size_t i = 0, j = 0;
  while (i < a.powers_.size() || j < b.powers_.size()) {
    if (j == b.powers_.size() ||
        (i < a.powers_.size() && a.powers_[i].var < b.powers_[j].var)) {
      r.powers_.push_back(a.powers_[i++]);
    } else if (i == a.powers_.size() || b.powers_[j].var < a.powers_[i].var) {
      r.powers_.push_back(b.powers_[j++]);
    } else {
      r.powers_.push_back(
          {a.powers_[i].var, a.powers_[i].exp + b.powers_[j].exp});
      ++i;
      ++j;
    }
  }
  r.degree_ = a.degree_ + b.degree_;
  return r;
}

std::size_t Monomial::hash() const {
  std::size_t h = 0x9e3779b97f4a7c15ull;
  for (const Power &p : powers_)
    h = (h ^ (p.var.index * 0x100000001b3ull + p.exp)) * 0x5bd1e995u;
  return h;
}

// ---------------------------------------------------------------------------
// MonomialOrder

namespace {

struct RankedPower {
  std::uint32_t rank;
  std::uint32_t exp;
};

// Both inputs ascending by rank (rank 0 = most significant variable).
template <typename A, typename B, typename RankA, typename RankB>
std::strong_ordering compare_ranked(MonomialOrder::Kind kind, const A &a,
                                    const B &b, std::uint32_t deg_a,
                                    std::uint32_t deg_b, RankA rank_a,
                                    RankB rank_b) {
  using std::strong_ordering;
  if (kind == MonomialOrder::Kind::grevlex) {
    if (deg_a != deg_b)
      return deg_a <=> deg_b;
    // Scan from the least significant variable; smaller exponent wins.
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(a.size()) - 1;
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(b.size()) - 1;
    while (i >= 0 && j >= 0) {
      std::uint32_t ra = rank_a(a[i]), rb = rank_b(b[j]);
      if (ra == rb) {
        if (a[i].exp != b[j].exp)
          return a[i].exp < b[j].exp ? strong_ordering::greater
                                     : strong_ordering::less;
        --i;
        --j;
      } else if (ra > rb) {
        return strong_ordering::less;
      } else {
        return strong_ordering::greater;
      }
    }
    return strong_ordering::equal;
  }
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    std::uint32_t ra = rank_a(a[i]), rb = rank_b(b[j]);
    if (ra == rb) {
      if (a[i].exp != b[j].exp)
        return a[i].exp <=> b[j].exp;
      ++i;
      ++j;
    } else {
      return ra < rb ? strong_ordering::greater : strong_ordering::less;
    }
  }
  if (i < a.size())
    return strong_ordering::greater;
  if (j < b.size())
    return strong_ordering::less;
  return strong_ordering::equal;
}

} // namespace

MonomialOrder::MonomialOrder(Kind kind, std::vector<VarId> precedence)
    : kind_(kind), precedence_(std::move(precedence)) {
  for (std::uint32_t i = 0; i < precedence_.size(); ++i)
    rank_.emplace(precedence_[i], i);
}

std::uint32_t MonomialOrder::rank(VarId v) const {
  auto it = rank_.find(v);
  if (it != rank_.end())
    return it->second;
  return static_cast<std::uint32_t>(precedence_.size()) + v.index;
}

std::strong_ordering MonomialOrder::compare(const Monomial &a,
                                            const Monomial &b) const {
  if (precedence_.empty()) {
    auto by_index = [](const Monomial::Power &p) { return p.var.index; };
    return compare_ranked(kind_, a.powers(), b.powers(), a.degree(),
                          b.degree(), by_index, by_index);
  }
  auto ranked = [this](const Monomial &m) {
    std::vector<RankedPower> out;
    out.reserve(m.powers().size());
    for (const auto &p : m.powers())
      out.push_back({rank(p.var), p.exp});
    std::sort(out.begin(), out.end(),
              [](const RankedPower &x, const RankedPower &y) {
                return x.rank < y.rank;
              });
    return out;
  };
  auto ra = ranked(a), rb = ranked(b);
  auto by_rank = [](const RankedPower &p) { return p.rank; };
  return compare_ranked(kind_, ra, rb, a.degree(), b.degree(), by_rank,
                        by_rank);
}

// ---------------------------------------------------------------------------
// Polynomial

namespace {

const MonomialOrder &default_order() {
  static const MonomialOrder order = MonomialOrder::grevlex();
  return order;
}

bool term_greater(const Term &a, const Term &b) {
  return default_order().greater(a.mono, b.mono);
}

} // namespace

Polynomial Polynomial::constant(const FieldElement &c) {
  Polynomial p;
  if (!c.is_zero())
    p.terms_.push_back({Monomial(), c});
  return p;
}

Polynomial Polynomial::variable(VarId v) {
  Polynomial p;
  p.terms_.push_back({Monomial::of(v), FieldElement(Integer(1))});
  return p;
}

Polynomial Polynomial::monomial(Monomial m, FieldElement c) {
  Polynomial p;
  if (!c.is_zero())
    p.terms_.push_back({std::move(m), std::move(c)});
  return p;
}

Polynomial Polynomial::from_terms(const Field &field, std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), term_greater);
  Polynomial p;
  for (Term &t : terms) {
    if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
      p.terms_.back().coeff = field.add(p.terms_.back().coeff, t.coeff);
      if (p.terms_.back().coeff.is_zero())
        p.terms_.pop_back();
    } else if (!t.coeff.is_zero()) {
      p.terms_.push_back(std::move(t));
    }
  }
  return p;
}

Polynomial Polynomial::from_sorted(std::vector<Term> terms) {
  Polynomial p;
  p.terms_ = std::move(terms);
  return p;
}

FieldElement Polynomial::constant_term() const {
  if (!terms_.empty() && terms_.back().mono.is_one())
    return terms_.back().coeff;
  return FieldElement();
}

FieldElement Polynomial::coefficient(const Monomial &m) const {
  for (const Term &t : terms_)
    if (t.mono == m)
      return t.coeff;
  return FieldElement();
}

std::uint32_t Polynomial::degree() const {
  // Grevlex is graded, so the first term has maximal total degree.
  return terms_.empty() ? 0 : terms_.front().mono.degree();
}

std::uint32_t Polynomial::degree_in(VarId v) const {
  std::uint32_t d = 0;
  for (const Term &t : terms_)
    d = std::max(d, t.mono.exponent(v));
  return d;
}

std::vector<VarId> Polynomial::vars() const {
  std::vector<VarId> out;
  for (const Term &t : terms_)
    for (const auto &p : t.mono.powers())
      out.push_back(p.var);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Polynomial::contains(VarId v) const {
  for (const Term &t : terms_)
    if (t.mono.contains(v))
      return true;
  return false;
}

std::size_t Polynomial::leading_index(const MonomialOrder &order) const {
  if (order.is_default() || terms_.size() <= 1)
    return 0;
  std::size_t best = 0;
  for (std::size_t i = 1; i < terms_.size(); ++i)
    if (order.greater(terms_[i].mono, terms_[best].mono))
      best = i;
  return best;
}

std::size_t Polynomial::hash() const {
  std::size_t h = terms_.size();
  for (const Term &t : terms_)
    h = (h * 31 + t.mono.hash()) ^ hash_integer(t.coeff.residue);
  return h;
}

bool operator==(const Polynomial &a, const Polynomial &b) {
  if (a.terms_.size() != b.terms_.size())
    return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i)
    if (!(a.terms_[i].mono == b.terms_[i].mono) ||
        a.terms_[i].coeff != b.terms_[i].coeff)
      return false;
  return true;
}

Polynomial add(const Field &field, const Polynomial &a, const Polynomial &b) {
  Polynomial r;
  r.terms_.reserve(a.terms_.size() + b.terms_.size());
  std::size_t i = 0, j = 0;
  const auto &ta = a.terms_;
  const auto &tb = b.terms_;
  while (i < ta.size() && j < tb.size()) {
    auto c = default_order().compare(ta[i].mono, tb[j].mono);
    if (c == std::strong_ordering::greater) {
      r.terms_.push_back(ta[i++]);
    } else if (c == std::strong_ordering::less) {
      r.terms_.push_back(tb[j++]);
    } else {
      FieldElement s = field.add(ta[i].coeff, tb[j].coeff);
      if (!s.is_zero())
        r.terms_.push_back({ta[i].mono, std::move(s)});
      ++i;
      ++j;
    }
  }
  for (; i < ta.size(); ++i)
    r.terms_.push_back(ta[i]);
  for (; j < tb.size(); ++j)
    r.terms_.push_back(tb[j]);
  return r;
}

Polynomial neg(const Field &field, const Polynomial &a) {
  std::vector<Term> terms = a.terms();
  for (Term &t : terms)
    t.coeff = field.neg(t.coeff);
  // Negation keeps the order and introduces no zeros.
  return Polynomial::from_sorted(std::move(terms));
}

Polynomial sub(const Field &field, const Polynomial &a, const Polynomial &b) {
  return add(field, a, scale(field, field.neg(field.one()), b));
}

Polynomial scale(const Field &field, const FieldElement &c,
                 const Polynomial &a) {
  if (c.is_zero())
    return Polynomial();
  return mul_term(field, a, Monomial(), c);
}

Polynomial mul_term(const Field &field, const Polynomial &a,
                    const Monomial &m, const FieldElement &c) {
  if (c.is_zero())
    return Polynomial();
  // Multiplying every term by the same monomial preserves a monomial order,
  // so the result is already sorted.
  std::vector<Term> terms;
  terms.reserve(a.terms().size());
  for (const Term &t : a.terms())
    terms.push_back({t.mono * m, field.mul(t.coeff, c)});
  return Polynomial::from_sorted(std::move(terms));
}

Polynomial mul(const Field &field, const Polynomial &a, const Polynomial &b) {
  std::vector<Term> terms;
  terms.reserve(a.terms().size() * b.terms().size());
  for (const Term &x : a.terms())
    for (const Term &y : b.terms())
      terms.push_back({x.mono * y.mono, field.mul(x.coeff, y.coeff)});
  return Polynomial::from_terms(field, std::move(terms));
}

Polynomial pow(const Field &field, const Polynomial &a, unsigned e) {
  Polynomial result = Polynomial::constant(field.one());
  Polynomial base = a;
  while (e != 0) {
    if (e & 1u)
      result = mul(field, result, base);
    e >>= 1u;
    if (e != 0)
      base = mul(field, base, base);
  }
  return result;
}

Polynomial make_monic(const Field &field, const Polynomial &a) {
  if (a.is_zero() || a.leading().coeff.is_one())
    return a;
  return scale(field, field.inverse(a.leading().coeff), a);
}

Polynomial substitute(const Field &field, const Polynomial &a, VarId v,
                      const Polynomial &value) {
  if (!a.contains(v))
    return a;
  std::vector<Polynomial> powers{Polynomial::constant(field.one())};
  Polynomial result;
  for (const Term &t : a.terms()) {
    std::uint32_t e = t.mono.exponent(v);
    while (powers.size() <= e)
      powers.push_back(mul(field, powers.back(), value));
    std::vector<Monomial::Power> rest;
    for (const auto &p : t.mono.powers())
      if (p.var != v)
        rest.push_back(p);
    Monomial m = Monomial::from_powers(std::move(rest));
    result = add(field, result, mul_term(field, powers[e], m, t.coeff));
  }
  return result;
}

FieldElement evaluate(const Field &field, const Polynomial &f,
                      const Assignment &sigma) {
  FieldElement acc;
  for (const Term &t : f.terms()) {
    FieldElement v = t.coeff;
    for (const auto &p : t.mono.powers()) {
      auto it = sigma.find(p.var);
      if (it == sigma.end())
        throw UnboundVariable(p.var);
      v = field.mul(v, field.pow(it->second, static_cast<unsigned long>(p.exp)));
    }
    acc = field.add(acc, v);
  }
  return acc;
}

Division reduce(const Field &field, const Polynomial &f,
                std::span<const Polynomial> divisors,
                const MonomialOrder &order) {
  Division out;
  out.cofactors.assign(divisors.size(), Polynomial());
  std::vector<std::size_t> leads;
  leads.reserve(divisors.size());
  for (const Polynomial &g : divisors)
    leads.push_back(g.leading_index(order));

  Polynomial rest = f;
  while (!rest.is_zero()) {
    const Term lt = rest.terms()[rest.leading_index(order)];
    bool divided = false;
    for (std::size_t i = 0; i < divisors.size(); ++i) {
      const Term &gl = divisors[i].terms()[leads[i]];
      if (!gl.mono.divides(lt.mono))
        continue;
      Monomial q = gl.mono.quotient_of(lt.mono);
      FieldElement c = field.div(lt.coeff, gl.coeff);
      out.cofactors[i] =
          add(field, out.cofactors[i], Polynomial::monomial(q, c));
      rest = sub(field, rest, mul_term(field, divisors[i], q, c));
      divided = true;
      break;
    }
    if (!divided) {
      Polynomial t = Polynomial::monomial(lt.mono, lt.coeff);
      out.remainder = add(field, out.remainder, t);
      rest = sub(field, rest, t);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text format

std::string to_string(const Polynomial &f, const VarTable &vars) {
  if (f.is_zero())
    return "0";
  std::ostringstream out;
  bool first = true;
  for (const Term &t : f.terms()) {
    if (!first)
      out << " + ";
    first = false;
    bool need_star = false;
    if (!t.coeff.is_one() || t.mono.is_one()) {
      out << t.coeff.str();
      need_star = true;
    }
    for (const auto &p : t.mono.powers()) {
      if (need_star)
        out << '*';
      out << vars.display(p.var);
      if (p.exp != 1)
        out << '^' << p.exp;
      need_star = true;
    }
  }
  return out.str();
}

namespace {

class PolyParser {
public:
  PolyParser(std::string_view text, const Field &field, VarTable &vars)
      : text_(text), field_(field), vars_(vars) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip_ws();
    if (pos_ != text_.size())
      fail("trailing input");
    return p;
  }

private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string &msg) {
    throw PolyParseError(msg + " at offset " + std::to_string(pos_) +
                         " in '" + std::string(text_) + "'");
  }

  Polynomial expr() {
    Polynomial acc = term();
    for (;;) {
      if (eat('+'))
        acc = add(field_, acc, term());
      else if (eat('-'))
        acc = sub(field_, acc, term());
      else
        return acc;
    }
  }
  Polynomial term() {
    Polynomial acc = factor();
    while (eat('*'))
      acc = mul(field_, acc, factor());
    return acc;
  }
  Polynomial factor() {
    if (eat('-'))
      return neg(field_, factor());
    Polynomial base = atom();
    if (eat('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      if (start == pos_)
        fail("expected exponent");
      base = pow(field_, base,
                 static_cast<unsigned>(
                     std::stoul(std::string(text_.substr(start, pos_ - start)))));
    }
    return base;
  }
  Polynomial atom() {
    skip_ws();
    if (pos_ >= text_.size())
      fail("unexpected end");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (!eat(')'))
        fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      Integer z(std::string(text_.substr(start, pos_ - start)));
      return Polynomial::constant(field_.from_integer(z));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_' || text_[pos_] == '\'' || text_[pos_] == '!'))
        ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      auto v = vars_.find(name);
      if (!v)
        v = vars_.add(name, VarKind::original);
      return Polynomial::variable(*v);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  const Field &field_;
  VarTable &vars_;
};

} // namespace

Polynomial parse_polynomial(std::string_view text, const Field &field,
                            VarTable &vars) {
  return PolyParser(text, field, vars).parse();
}

} // namespace zpsmt
