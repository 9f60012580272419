#include "zpsmt/int_linear.hpp"

#include "zpsmt/factor.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

namespace zpsmt {

namespace {

Explanation merged(Explanation a, const Explanation &b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

Integer floor_div(const Integer &a, const Integer &b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

} // namespace

VarRange Ranges::get(VarId v) const {
  if (auto it = ranges_.find(v); it != ranges_.end())
    return it->second;
  return VarRange{0, field_->modulus() - 1, {}, {}};
}

bool Ranges::trivial(VarId v) const {
  auto it = ranges_.find(v);
  return it == ranges_.end() ||
         (it->second.lo == 0 && it->second.hi == field_->modulus() - 1);
}

bool Ranges::tighten_lo(VarId v, const Integer &lo, Explanation why) {
  auto [it, fresh] = ranges_.try_emplace(v, get(v));
  if (lo <= it->second.lo)
    return false;
  it->second.lo = lo;
  it->second.lo_why = std::move(why);
  return true;
}

bool Ranges::tighten_hi(VarId v, const Integer &hi, Explanation why) {
  auto [it, fresh] = ranges_.try_emplace(v, get(v));
  if (hi >= it->second.hi)
    return false;
  it->second.hi = hi;
  it->second.hi_why = std::move(why);
  return true;
}

LinearForm linear_form(const Polynomial &linear) {
  LinearForm out;
  for (const Term &t : linear.terms()) {
    if (t.mono.is_one())
      out.constant = t.coeff;
    else
      out.terms.emplace_back(t.mono.powers()[0].var, t.coeff);
  }
  return out;
}

IntegerSpan integer_span(const Field &field, const LinearForm &form,
                         const FieldElement &scale, const Ranges &ranges) {
  IntegerSpan span;
  span.lo = span.hi = field.balanced(field.mul(scale, form.constant));
  for (const auto &[v, c] : form.terms) {
    Integer d = field.balanced(field.mul(scale, c));
    VarRange r = ranges.get(v);
    if (d == 0)
      continue;
    if (d > 0) {
      span.lo += d * r.lo;
      span.hi += d * r.hi;
    } else {
      span.lo += d * r.hi;
      span.hi += d * r.lo;
    }
    span.why = merged(std::move(span.why), r.lo_why);
    span.why = merged(std::move(span.why), r.hi_why);
  }
  return span;
}

BoundDeduction deduce_bounds(const AtomTable &atoms, const TheoryTrail &trail,
                             unsigned max_sweeps) {
  const Field &field = atoms.field();
  const Integer &p = field.modulus();
  BoundDeduction out{Ranges(field), std::nullopt};
  Ranges &ranges = out.ranges;

  auto check_empty = [&](VarId v) {
    VarRange r = ranges.get(v);
    if (r.lo > r.hi) {
      out.empty_domain = merged(r.lo_why, r.hi_why);
      return true;
    }
    return false;
  };

  // Root bounds from univariate products of linear factors.
  for (const TrailEntry &e : trail) {
    if (!e.positive)
      continue;
    const Atom &atom = atoms.atom(e.atom);
    auto roots = match_product_of_roots(field, atom.poly);
    if (!roots || roots->empty())
      continue;
    VarId x = roots->front().var;
    bool univariate = std::all_of(roots->begin(), roots->end(),
                                  [&](const RootFactor &f) { return f.var == x; });
    if (!univariate)
      continue;
    Integer lo = roots->front().root.residue, hi = lo;
    for (const RootFactor &f : *roots) {
      lo = std::min(lo, f.root.residue);
      hi = std::max(hi, f.root.residue);
    }
    ranges.tighten_lo(x, lo, {e.lit});
    ranges.tighten_hi(x, hi, {e.lit});
    if (check_empty(x))
      return out;
  }

  // x = E for every variable of an asserted linear equation, applied only
  // when E cannot wrap around the modulus.
  std::vector<std::pair<LinearForm, Lit>> equations;
  for (const TrailEntry &e : trail)
    if (e.positive)
      equations.emplace_back(linear_form(atoms.atom(e.atom).linear), e.lit);

  for (unsigned sweep = 0; sweep < max_sweeps; ++sweep) {
    bool changed = false;
    for (const auto &[form, lit] : equations) {
      for (std::size_t i = 0; i < form.terms.size(); ++i) {
        const auto &[x, c] = form.terms[i];
        // x = -(rest)/c
        FieldElement scale = field.neg(field.inverse(c));
        LinearForm rest;
        rest.constant = form.constant;
        for (std::size_t j = 0; j < form.terms.size(); ++j)
          if (j != i)
            rest.terms.push_back(form.terms[j]);
        IntegerSpan span = integer_span(field, rest, scale, ranges);
        Integer k = floor_div(span.lo, p);
        if (floor_div(span.hi, p) != k)
          continue;
        Explanation why = merged(std::move(span.why), {lit});
        changed |= ranges.tighten_lo(x, span.lo - k * p, why);
        changed |= ranges.tighten_hi(x, span.hi - k * p, why);
        if (check_empty(x))
          return out;
      }
    }
    if (!changed)
      break;
  }
  return out;
}

namespace {

class Encoder {
public:
  Encoder(const AtomTable &atoms, const Ranges &ranges, LiaEncoding &out)
      : field_(atoms.field()), ranges_(ranges), out_(out) {}

  LiaTag tag_for(const Explanation &why) {
    if (why.empty())
      return kFreeTag;
    auto [it, fresh] = tags_.try_emplace(why, static_cast<LiaTag>(out_.supports.size()));
    if (fresh)
      out_.supports.push_back(why);
    return it->second;
  }

  std::uint32_t var(VarId v) {
    auto [it, fresh] = out_.var_of.try_emplace(v, 0);
    if (!fresh)
      return it->second;
    std::uint32_t x = out_.problem.add_var();
    it->second = x;
    // The residue range always holds; tighter bounds carry their support.
    out_.problem.bounds.push_back({x, false, 0, kFreeTag});
    out_.problem.bounds.push_back({x, true, field_.modulus() - 1, kFreeTag});
    VarRange r = ranges_.get(v);
    if (!r.lo_why.empty())
      out_.problem.bounds.push_back({x, false, r.lo, tag_for(r.lo_why)});
    if (!r.hi_why.empty())
      out_.problem.bounds.push_back({x, true, r.hi, tag_for(r.hi_why)});
    return x;
  }

  std::uint32_t aux(const Integer &lo, const Integer &hi) {
    std::uint32_t x = out_.problem.add_var();
    out_.problem.bounds.push_back({x, false, lo, kFreeTag});
    out_.problem.bounds.push_back({x, true, hi, kFreeTag});
    return x;
  }

  /// The first scaling of `form` whose integer value stays in (-p, p).
  std::optional<std::pair<FieldElement, IntegerSpan>>
  non_overflowing(const LinearForm &form) const {
    const Integer &p = field_.modulus();
    std::vector<FieldElement> scales{field_.one()};
    for (const auto &[v, c] : form.terms)
      scales.push_back(field_.inverse(c));
    for (const FieldElement &s : scales) {
      IntegerSpan span = integer_span(field_, form, s, ranges_);
      if (span.lo > -p && span.hi < p)
        return std::make_pair(s, std::move(span));
    }
    return std::nullopt;
  }

  LiaConstraint constraint(const LinearForm &form, const FieldElement &scale,
                           LiaConstraint::Kind kind) {
    LiaConstraint c;
    c.kind = kind;
    c.constant = field_.balanced(field_.mul(scale, form.constant));
    for (const auto &[v, coeff] : form.terms) {
      Integer d = field_.balanced(field_.mul(scale, coeff));
      if (d != 0)
        c.terms.push_back({var(v), d});
    }
    return c;
  }

  void add(const LinearForm &form, bool equal, const Explanation &lits,
           bool overflow_encoding) {
    if (form.terms.empty())
      return;
    auto kind = equal ? LiaConstraint::Kind::eq : LiaConstraint::Kind::neq;
    if (auto hit = non_overflowing(form)) {
      LiaConstraint c = constraint(form, hit->first, kind);
      c.tag = tag_for(merged(hit->second.why, lits));
      out_.problem.constraints.push_back(std::move(c));
      return;
    }
    if (!overflow_encoding)
      return;
    // E = p*z (equal) or E = p*z + r with 1 <= r <= p-1.
    const Integer &p = field_.modulus();
    IntegerSpan span = integer_span(field_, form, field_.one(), ranges_);
    LiaConstraint c = constraint(form, field_.one(), LiaConstraint::Kind::eq);
    Integer zlo = equal ? -floor_div(-span.lo, p) : floor_div(span.lo, p);
    Integer zhi = floor_div(span.hi, p);
    if (zlo > zhi)
      zlo = zhi;
    c.terms.push_back({aux(zlo, zhi), -p});
    if (!equal)
      c.terms.push_back({aux(1, p - 1), Integer(-1)});
    c.tag = tag_for(merged(span.why, lits));
    out_.problem.constraints.push_back(std::move(c));
  }

private:
  const Field &field_;
  const Ranges &ranges_;
  LiaEncoding &out_;
  std::map<Explanation, LiaTag> tags_;
};

} // namespace

LiaEncoding encode_lia(const AtomTable &atoms, const TheoryTrail &trail,
                       const Ranges &ranges, const IntLinearOptions &options) {
  const Field &field = atoms.field();
  LiaEncoding out;
  Encoder enc(atoms, ranges, out);

  for (const TrailEntry &e : trail)
    enc.add(linear_form(atoms.atom(e.atom).linear), e.positive, {e.lit},
            options.overflow_encoding);

  // Equations sharing their unbounded part W: scaled so that W is monic,
  // the difference of two of them no longer mentions W.
  std::map<std::vector<std::pair<std::uint32_t, Integer>>,
           std::vector<std::pair<LinearForm, Lit>>>
      groups;
  for (const TrailEntry &e : trail) {
    if (!e.positive)
      continue;
    LinearForm form = linear_form(atoms.atom(e.atom).linear);
    const std::pair<VarId, FieldElement> *lead = nullptr;
    for (const auto &t : form.terms)
      if (ranges.trivial(t.first)) {
        lead = &t;
        break;
      }
    if (!lead)
      continue;
    FieldElement s = field.inverse(lead->second);
    LinearForm scaled;
    scaled.constant = field.mul(s, form.constant);
    std::vector<std::pair<std::uint32_t, Integer>> key;
    for (const auto &[v, c] : form.terms) {
      FieldElement d = field.mul(s, c);
      scaled.terms.emplace_back(v, d);
      if (ranges.trivial(v))
        key.emplace_back(v.index, d.residue);
    }
    groups[key].emplace_back(std::move(scaled), e.lit);
  }
  unsigned pairs = 0;
  for (const auto &[key, members] : groups) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        if (pairs++ >= options.max_shared_pairs)
          break;
        const LinearForm &a = members[i].first, &b = members[j].first;
        std::map<VarId, FieldElement> diff;
        for (const auto &[v, c] : a.terms)
          if (!ranges.trivial(v))
            diff[v] = c;
        for (const auto &[v, c] : b.terms)
          if (!ranges.trivial(v))
            diff[v] = field.sub(diff[v], c);
        LinearForm d;
        d.constant = field.sub(a.constant, b.constant);
        for (const auto &[v, c] : diff)
          if (!c.is_zero())
            d.terms.emplace_back(v, c);
        Explanation lits{members[i].second, members[j].second};
        std::sort(lits.begin(), lits.end());
        enc.add(d, true, lits, false);
      }
    }
  }
  return out;
}

LiaResult solve_lia_external(const LiaProblem &problem,
                             const std::string &command, double timeout_s) {
  LiaResult result;
  char path[] = "/tmp/zpsmt-lia-XXXXXX";
  int fd = mkstemp(path);
  if (fd < 0)
    return result;
  close(fd);
  {
    std::ofstream out(path);
    out << "(set-option :produce-unsat-cores true)\n(set-logic QF_LIA)\n";
    for (std::uint32_t v = 0; v < problem.num_vars; ++v)
      out << "(declare-const x" << v << " Int)\n";
    auto sum = [](const std::vector<LiaTerm> &terms, const Integer &constant) {
      std::ostringstream s;
      s << "(+ " << constant.get_str();
      for (const LiaTerm &t : terms)
        s << " (* " << (t.coeff < 0 ? "(- " + Integer(-t.coeff).get_str() + ")"
                                    : t.coeff.get_str())
          << " x" << t.var << ")";
      s << ")";
      return s.str();
    };
    auto lit = [](const Integer &z) {
      return z < 0 ? "(- " + Integer(-z).get_str() + ")" : z.get_str();
    };
    auto assert_named = [&](const std::string &body, LiaTag tag, std::size_t &n) {
      if (tag == kFreeTag)
        out << "(assert " << body << ")\n";
      else
        out << "(assert (! " << body << " :named t" << tag << "_" << n++ << "))\n";
    };
    std::size_t n = 0;
    for (const LiaBound &b : problem.bounds)
      assert_named(std::string(b.upper ? "(<= x" : "(>= x") + std::to_string(b.var) +
                       " " + lit(b.value) + ")",
                   b.tag, n);
    for (const LiaConstraint &c : problem.constraints) {
      std::string s = sum(c.terms, c.constant);
      switch (c.kind) {
      case LiaConstraint::Kind::eq:
        assert_named("(= " + s + " 0)", c.tag, n);
        break;
      case LiaConstraint::Kind::neq:
        assert_named("(not (= " + s + " 0))", c.tag, n);
        break;
      case LiaConstraint::Kind::le:
        assert_named("(<= " + s + " 0)", c.tag, n);
        break;
      }
    }
    out << "(check-sat)\n(get-unsat-core)\n";
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

  std::istringstream in(text);
  std::string verdict;
  in >> verdict;
  if (verdict == "sat") {
    result.status = LiaResult::Status::sat;
  } else if (verdict == "unsat") {
    result.status = LiaResult::Status::unsat;
    std::string token;
    while (in >> token) {
      auto t = token.find('t');
      auto u = token.find('_');
      if (t == std::string::npos || u == std::string::npos || u < t)
        continue;
      try {
        result.core.insert(static_cast<LiaTag>(std::stoul(token.substr(t + 1, u - t - 1))));
      } catch (const std::exception &) {
        result.status = LiaResult::Status::unknown;
        result.core.clear();
        break;
      }
    }
  }
  return result;
}

IntLinearModule::Outcome IntLinearModule::check(const TheoryTrail &trail,
                                                Explanation &conflict,
                                                const Deadline &deadline) {
  std::vector<Lit> lits;
  lits.reserve(trail.size());
  for (const TrailEntry &e : trail)
    lits.push_back(e.lit);
  if (cache_valid_ && lits == cached_trail_) {
    conflict = cached_conflict_;
    return cached_outcome_;
  }

  auto finish = [&](Outcome o, Explanation why) {
    cached_trail_ = std::move(lits);
    cache_valid_ = true;
    cached_outcome_ = o;
    cached_conflict_ = why;
    conflict = std::move(why);
    return o;
  };

  BoundDeduction bounds = deduce_bounds(atoms_, trail, opt_.max_sweeps);
  ranges_ = bounds.ranges;
  if (bounds.empty_domain)
    return finish(Outcome::conflict, *bounds.empty_domain);

  LiaEncoding enc = encode_lia(atoms_, trail, bounds.ranges, opt_);
  if (enc.problem.constraints.empty())
    return finish(Outcome::consistent, {});

  LiaResult r;
  if (!opt_.external_solver.empty()) {
    double left = deadline.at == Clock::time_point::max()
                      ? 0
                      : std::chrono::duration<double>(deadline.at - Clock::now()).count();
    r = solve_lia_external(enc.problem, opt_.external_solver, left);
  } else {
    LiaLimits limits;
    limits.deadline = deadline;
    r = solve_lia(enc.problem, limits);
  }
  switch (r.status) {
  case LiaResult::Status::sat:
    return finish(Outcome::consistent, {});
  case LiaResult::Status::unknown:
    return finish(Outcome::unknown, {});
  case LiaResult::Status::unsat:
    break;
  }
  Explanation why;
  for (LiaTag t : r.core)
    if (t < enc.supports.size())
      why = merged(std::move(why), enc.supports[t]);
  if (why.empty())
    return finish(Outcome::unknown, {});
  return finish(Outcome::conflict, std::move(why));
}

} // namespace zpsmt
