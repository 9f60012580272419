#include "zpsmt/real_nl.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <unistd.h>
#include <unordered_map>

namespace zpsmt {

namespace {

// a + b*sqrt(D) for the radicand D of the current branch (b = 0 if none).
struct Num {
  Rational a, b;
  bool zero() const { return a == 0 && b == 0; }
};

struct Ctx {
  Rational radicand; // 0: no radicand yet

  Num add(const Num &x, const Num &y) const { return {x.a + y.a, x.b + y.b}; }
  Num neg(const Num &x) const { return {-x.a, -x.b}; }
  Num mul(const Num &x, const Num &y) const {
    return {x.a * y.a + x.b * y.b * radicand, x.a * y.b + x.b * y.a};
  }
  // Caller guarantees x != 0 (D is never a rational square).
  Num inv(const Num &x) const {
    Rational norm = x.a * x.a - x.b * x.b * radicand;
    return {x.a / norm, -x.b / norm};
  }
};

using QPoly = std::unordered_map<Monomial, Num, MonomialHash>;

void accumulate(QPoly &p, const Monomial &m, const Num &c, const Ctx &ctx) {
  if (c.zero())
    return;
  auto [it, fresh] = p.try_emplace(m, c);
  if (!fresh) {
    it->second = ctx.add(it->second, c);
    if (it->second.zero())
      p.erase(it);
  }
}

QPoly qmul(const QPoly &x, const QPoly &y, const Ctx &ctx) {
  QPoly out;
  for (const auto &[mx, cx] : x)
    for (const auto &[my, cy] : y)
      accumulate(out, mx * my, ctx.mul(cx, cy), ctx);
  return out;
}

QPoly qconst(const Num &c) {
  QPoly p;
  if (!c.zero())
    p.emplace(Monomial(), c);
  return p;
}

QPoly qsubst(const QPoly &p, VarId x, const QPoly &value, const Ctx &ctx) {
  QPoly out;
  std::vector<QPoly> powers{qconst({1, 0})};
  for (const auto &[m, c] : p) {
    std::uint32_t e = m.exponent(x);
    if (e == 0) {
      accumulate(out, m, c, ctx);
      continue;
    }
    while (powers.size() <= e)
      powers.push_back(qmul(powers.back(), value, ctx));
    std::vector<Monomial::Power> rest;
    for (const auto &pw : m.powers())
      if (pw.var != x)
        rest.push_back(pw);
    Monomial base = Monomial::from_powers(std::move(rest));
    for (const auto &[mv, cv] : powers[e])
      accumulate(out, base * mv, ctx.mul(c, cv), ctx);
  }
  return out;
}

std::vector<VarId> qvars(const QPoly &p) {
  std::vector<VarId> out;
  for (const auto &[m, c] : p)
    for (const auto &pw : m.powers())
      out.push_back(pw.var);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool is_constant(const QPoly &p) {
  return p.empty() || (p.size() == 1 && p.begin()->first.is_one());
}

bool rational_sqrt(const Rational &q, Rational &root) {
  if (q < 0)
    return false;
  Integer num = q.get_num(), den = q.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
    return false;
  Integer rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  root = Rational(rn, rd);
  root.canonicalize();
  return true;
}

QPoly lift(const Field &field, const Polynomial &f) {
  QPoly out;
  for (const Term &t : f.terms())
    out.emplace(t.mono, Num{Rational(field.balanced(t.coeff)), 0});
  return out;
}

const std::vector<Rational> &pool() {
  static const std::vector<Rational> values{0, 1, -1, 2, -2, Rational(1, 2)};
  return values;
}

struct State {
  Ctx ctx;
  std::vector<QPoly> eqs, diseqs;
  std::vector<std::pair<VarId, QPoly>> defs; // var = poly, evaluated in reverse
};

class Search {
public:
  Search(const Field &field, const AcceptFn &accept, const RealNlOptions &opt,
         const Deadline &deadline)
      : field_(field), accept_(accept), opt_(opt), deadline_(deadline),
        rng_(opt.seed) {}

  bool run(State s) {
    if (++nodes_ > opt_.max_nodes || deadline_.expired())
      return false;
    if (!simplify(s))
      return false;
    if (s.eqs.empty())
      return finish(s);

    // Linear elimination: x occurring only as c*x.
    std::size_t best_eq = s.eqs.size();
    VarId best_var{};
    for (std::size_t i = 0; i < s.eqs.size(); ++i) {
      for (VarId x : qvars(s.eqs[i])) {
        bool alone = true;
        for (const auto &[m, c] : s.eqs[i])
          if (m.contains(x) && !m.is_variable())
            alone = false;
        if (!alone)
          continue;
        if (best_eq == s.eqs.size() || s.eqs[i].size() < s.eqs[best_eq].size() ||
            (s.eqs[i].size() == s.eqs[best_eq].size() && x < best_var)) {
          best_eq = i;
          best_var = x;
        }
      }
    }
    if (best_eq < s.eqs.size()) {
      const QPoly &eq = s.eqs[best_eq];
      Num c = eq.at(Monomial::of(best_var));
      Num factor = s.ctx.neg(s.ctx.inv(c));
      QPoly value;
      for (const auto &[m, coeff] : eq)
        if (!(m == Monomial::of(best_var)))
          accumulate(value, m, s.ctx.mul(coeff, factor), s.ctx);
      return assign(std::move(s), best_var, value);
    }

    // Univariate equations.
    for (const QPoly &eq : s.eqs) {
      auto vs = qvars(eq);
      if (vs.size() != 1)
        continue;
      Ctx ctx = s.ctx;
      auto roots = univariate_roots(eq, vs[0], ctx);
      if (!roots)
        continue;
      for (const Num &r : *roots) {
        State branch = s;
        branch.ctx = ctx;
        if (assign(std::move(branch), vs[0], qconst(r)))
          return true;
      }
      return false;
    }

    // Branch on the most frequent variable.
    std::map<VarId, unsigned> count;
    for (const QPoly &eq : s.eqs)
      for (VarId v : qvars(eq))
        ++count[v];
    VarId pick = count.begin()->first;
    for (const auto &[v, n] : count)
      if (n > count[pick])
        pick = v;
    for (const Rational &q : pool()) {
      if (assign(s, pick, qconst({q, 0})))
        return true;
    }
    return false;
  }

  std::optional<Assignment> result() const { return found_; }

private:
  bool assign(State s, VarId x, const QPoly &value) {
    for (QPoly &eq : s.eqs)
      eq = qsubst(eq, x, value, s.ctx);
    for (QPoly &d : s.diseqs)
      d = qsubst(d, x, value, s.ctx);
    s.defs.emplace_back(x, value);
    return run(std::move(s));
  }

  static bool simplify(State &s) {
    std::vector<QPoly> eqs;
    for (QPoly &eq : s.eqs) {
      if (eq.empty())
        continue;
      if (is_constant(eq))
        return false;
      eqs.push_back(std::move(eq));
    }
    s.eqs = std::move(eqs);
    std::vector<QPoly> diseqs;
    for (QPoly &d : s.diseqs) {
      if (d.empty())
        return false;
      if (!is_constant(d))
        diseqs.push_back(std::move(d));
    }
    s.diseqs = std::move(diseqs);
    return true;
  }

  std::optional<std::vector<Num>> univariate_roots(const QPoly &eq, VarId x,
                                                   Ctx &ctx) const {
    std::vector<Num> c;
    for (const auto &[m, coeff] : eq) {
      std::uint32_t e = m.exponent(x);
      if (c.size() <= e)
        c.resize(e + 1);
      c[e] = coeff;
    }
    const std::size_t deg = c.size() - 1;
    if (deg == 1)
      return std::vector<Num>{ctx.mul(ctx.neg(c[0]), ctx.inv(c[1]))};
    if (deg == 2) {
      Num disc = ctx.add(ctx.mul(c[1], c[1]),
                         ctx.neg(ctx.mul(Num{4, 0}, ctx.mul(c[2], c[0]))));
      if (disc.b != 0)
        return std::nullopt;
      Num root_disc;
      Rational r;
      if (rational_sqrt(disc.a, r)) {
        root_disc = {r, 0};
      } else if (ctx.radicand == 0) {
        Integer n = disc.a.get_num() * disc.a.get_den();
        ctx.radicand = Rational(n);
        root_disc = {0, Rational(1, disc.a.get_den())};
      } else if (rational_sqrt(disc.a / ctx.radicand, r)) {
        root_disc = {0, r};
      } else {
        return std::nullopt;
      }
      Num inv2a = ctx.inv(ctx.mul(Num{2, 0}, c[2]));
      Num minus_b = ctx.neg(c[1]);
      Num r1 = ctx.mul(ctx.add(minus_b, ctx.neg(root_disc)), inv2a);
      Num r2 = ctx.mul(ctx.add(minus_b, root_disc), inv2a);
      if (root_disc.zero())
        return std::vector<Num>{r1};
      return std::vector<Num>{r1, r2};
    }
    std::vector<Num> roots;
    for (const Rational &q : pool()) {
      Num value{0, 0}, xp{1, 0};
      for (std::size_t e = 0; e <= deg; ++e) {
        value = ctx.add(value, ctx.mul(c[e], xp));
        xp = ctx.mul(xp, Num{q, 0});
      }
      if (value.zero())
        roots.push_back({q, 0});
    }
    return roots;
  }

  bool finish(const State &s) {
    std::vector<VarId> free;
    for (const QPoly &d : s.diseqs)
      for (VarId v : qvars(d))
        free.push_back(v);
    for (const auto &[x, value] : s.defs)
      for (VarId v : qvars(value))
        free.push_back(v);
    std::sort(free.begin(), free.end());
    free.erase(std::unique(free.begin(), free.end()), free.end());
    free.erase(std::remove_if(free.begin(), free.end(),
                              [&](VarId v) {
                                return std::any_of(s.defs.begin(), s.defs.end(),
                                                   [&](const auto &d) { return d.first == v; });
                              }),
               free.end());

    std::uniform_int_distribution<std::size_t> pick(0, pool().size() - 1);
    for (unsigned attempt = 0; attempt < std::max(1u, opt_.pool_tries); ++attempt) {
      if (deadline_.expired())
        return false;
      std::unordered_map<VarId, Num> values;
      for (VarId v : free)
        values[v] = attempt == 0 ? Num{} : Num{pool()[pick(rng_)], 0};
      auto eval = [&](const QPoly &p) {
        Num sum{};
        for (const auto &[m, c] : p) {
          Num term = c;
          for (const auto &pw : m.powers()) {
            Num base = values.count(pw.var) ? values[pw.var] : Num{};
            for (std::uint32_t e = 0; e < pw.exp; ++e)
              term = s.ctx.mul(term, base);
          }
          sum = s.ctx.add(sum, term);
        }
        return sum;
      };
      bool ok = std::all_of(s.diseqs.begin(), s.diseqs.end(),
                            [&](const QPoly &d) { return !eval(d).zero(); });
      if (!ok)
        continue;
      for (auto it = s.defs.rbegin(); it != s.defs.rend(); ++it)
        values[it->first] = eval(it->second);
      if (lift_and_accept(values, s.ctx))
        return true;
    }
    return false;
  }

  bool lift_and_accept(const std::unordered_map<VarId, Num> &values, const Ctx &ctx) {
    std::vector<std::optional<FieldElement>> roots{FieldElement()};
    bool irrational = std::any_of(values.begin(), values.end(),
                                  [](const auto &kv) { return kv.second.b != 0; });
    if (irrational) {
      auto d = field_.from_rational(ctx.radicand);
      if (!d)
        return false;
      auto sq = field_.sqrt(*d);
      if (!sq)
        return false;
      roots = {sq->first};
      if (sq->second != sq->first)
        roots.push_back(sq->second);
    }
    for (const auto &s : roots) {
      Assignment sigma;
      bool ok = true;
      for (const auto &[v, n] : values) {
        auto a = field_.from_rational(n.a);
        auto b = field_.from_rational(n.b);
        if (!a || !b) {
          ok = false;
          break;
        }
        sigma[v] = field_.add(*a, field_.mul(*b, *s));
      }
      if (ok && accept_(sigma)) {
        found_ = std::move(sigma);
        return true;
      }
    }
    return false;
  }

  const Field &field_;
  const AcceptFn &accept_;
  const RealNlOptions &opt_;
  const Deadline &deadline_;
  std::mt19937_64 rng_;
  unsigned nodes_ = 0;
  std::optional<Assignment> found_;
};

std::string real_term(const Field &field, const Polynomial &f) {
  if (f.is_zero())
    return "0.0";
  auto num = [](const Integer &z) {
    return z < 0 ? "(- " + Integer(-z).get_str() + ".0)" : z.get_str() + ".0";
  };
  std::string out = "(+ 0.0";
  for (const Term &t : f.terms()) {
    out += " (* " + num(field.balanced(t.coeff));
    for (const auto &pw : t.mono.powers())
      for (std::uint32_t e = 0; e < pw.exp; ++e)
        out += " v" + std::to_string(pw.var.index);
    out += ")";
  }
  return out + ")";
}

std::optional<Rational> parse_real(const std::string &text) {
  static const std::regex num(R"(\s*(\d+)(?:\.(\d+))?\s*)");
  static const std::regex neg(R"(\s*\(\s*-\s*(.+)\)\s*)");
  static const std::regex div(R"(\s*\(\s*/\s*(\S+)\s+(\S+)\s*\)\s*)");
  std::smatch m;
  if (std::regex_match(text, m, num)) {
    Rational q(Integer(m[1].str()));
    if (m[2].matched) {
      Integer scale;
      mpz_ui_pow_ui(scale.get_mpz_t(), 10, m[2].str().size());
      q += Rational(Integer(m[2].str()), scale);
      q.canonicalize();
    }
    return q;
  }
  if (std::regex_match(text, m, div)) {
    auto a = parse_real(m[1].str()), b = parse_real(m[2].str());
    if (a && b && *b != 0)
      return Rational(*a / *b);
    return std::nullopt;
  }
  if (std::regex_match(text, m, neg)) {
    if (auto a = parse_real(m[1].str()))
      return Rational(-*a);
  }
  return std::nullopt;
}

} // namespace

std::optional<Assignment> find_lifted_solution(
    const Field &field, const std::vector<Polynomial> &eqs,
    const std::vector<Polynomial> &diseqs, const AcceptFn &accept,
    const RealNlOptions &options, const Deadline &deadline) {
  State s;
  for (const Polynomial &f : eqs)
    s.eqs.push_back(lift(field, f));
  for (const Polynomial &f : diseqs)
    s.diseqs.push_back(lift(field, f));
  Search search(field, accept, options, deadline);
  if (search.run(std::move(s)))
    return search.result();
  return std::nullopt;
}

std::optional<Assignment> solve_nra_external(
    const Field &field, const std::vector<Polynomial> &eqs,
    const std::vector<Polynomial> &diseqs, const AcceptFn &accept,
    const std::string &command, double timeout_s) {
  std::vector<VarId> used;
  for (const auto *list : {&eqs, &diseqs})
    for (const Polynomial &f : *list)
      for (VarId v : f.vars())
        used.push_back(v);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());

  char path[] = "/tmp/zpsmt-nra-XXXXXX";
  int fd = mkstemp(path);
  if (fd < 0)
    return std::nullopt;
  close(fd);
  {
    std::ofstream out(path);
    out << "(set-option :produce-models true)\n(set-logic QF_NRA)\n";
    for (VarId v : used)
      out << "(declare-const v" << v.index << " Real)\n";
    for (const Polynomial &f : eqs)
      out << "(assert (= " << real_term(field, f) << " 0.0))\n";
    for (const Polynomial &f : diseqs)
      out << "(assert (not (= " << real_term(field, f) << " 0.0)))\n";
    out << "(check-sat)\n(get-model)\n";
  }
  std::string cmd = command;
  if (timeout_s > 0)
    cmd = "timeout " + std::to_string(static_cast<int>(timeout_s) + 1) + " " + cmd;
  cmd += std::string(" ") + path + " 2>/dev/null";
  std::string text;
  if (FILE *pipe = popen(cmd.c_str(), "r")) {
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0)
      text.append(buf, got);
    pclose(pipe);
  }
  std::remove(path);
  if (text.rfind("sat", 0) != 0)
    return std::nullopt;

  static const std::regex def(R"(\(define-fun\s+v(\d+)\s+\(\)\s+Real\s+((?:[^()]|\((?:[^()]|\([^()]*\))*\))+)\))");
  Assignment sigma;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), def);
       it != std::sregex_iterator(); ++it) {
    auto q = parse_real((*it)[2].str());
    if (!q)
      return std::nullopt;
    auto value = field.from_rational(*q);
    if (!value)
      return std::nullopt;
    sigma[VarId{static_cast<std::uint32_t>(std::stoul((*it)[1].str()))}] = *value;
  }
  if (accept(sigma))
    return sigma;
  return std::nullopt;
}

bool trail_holds(const AtomTable &atoms, const TheoryTrail &trail,
                 const Assignment &sigma) {
  const Field &field = atoms.field();
  for (const TrailEntry &e : trail) {
    const Polynomial &f = atoms.atom(e.atom).poly;
    FieldElement sum;
    for (const Term &t : f.terms()) {
      FieldElement term = t.coeff;
      for (const auto &pw : t.mono.powers()) {
        auto it = sigma.find(pw.var);
        FieldElement base = it == sigma.end() ? FieldElement() : it->second;
        term = field.mul(term, field.pow(base, static_cast<unsigned long>(pw.exp)));
      }
      sum = field.add(sum, term);
    }
    if (sum.is_zero() != e.positive)
      return false;
  }
  return true;
}

std::optional<Assignment> RealNlModule::check(const TheoryTrail &trail,
                                              const std::vector<Polynomial> &basis,
                                              const Deadline &deadline) {
  std::vector<Polynomial> eqs, diseqs;
  for (const TrailEntry &e : trail)
    (e.positive ? eqs : diseqs).push_back(atoms_.atom(e.atom).poly);

  const std::uint32_t n_orig = static_cast<std::uint32_t>(atoms_.vars().size());
  AcceptFn accept = [&](const Assignment &sigma) {
    return trail_holds(atoms_, trail, sigma);
  };
  auto restrict = [&](Assignment sigma) {
    Assignment out;
    for (auto &[v, value] : sigma)
      if (v.index < n_orig && atoms_.vars().kind(v) == VarKind::original)
        out.emplace(v, std::move(value));
    return out;
  };

  if (!opt_.external_solver.empty()) {
    double left = deadline.at == Clock::time_point::max()
                      ? 0
                      : std::chrono::duration<double>(deadline.at - Clock::now()).count();
    if (auto m = solve_nra_external(atoms_.field(), eqs, diseqs, accept, opt_.external_solver, left))
      return restrict(std::move(*m));
  }
  if (auto m = find_lifted_solution(atoms_.field(), eqs, diseqs, accept, opt_, deadline))
    return restrict(std::move(*m));
  if (!basis.empty()) {
    if (auto m = find_lifted_solution(atoms_.field(), basis, diseqs, accept, opt_, deadline))
      return restrict(std::move(*m));
  }
  return std::nullopt;
}

} // namespace zpsmt
