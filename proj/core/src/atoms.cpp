#include "zpsmt/atoms.hpp"

#include <cassert>
#include <stdexcept>

namespace zpsmt {

AtomTable::AtomTable(const Field &field, VarTable &vars)
    : field_(field), vars_(vars) {}

Polynomial AtomTable::abstract(const Polynomial &f) {
  std::vector<Term> terms;
  terms.reserve(f.terms().size());
  for (const Term &t : f.terms()) {
    if (t.mono.degree() < 2) {
      terms.push_back(t);
      continue;
    }
    VarId v;
    if (auto it = mono_var_.find(t.mono); it != mono_var_.end()) {
      v = it->second;
    } else {
      Polynomial shown = Polynomial::monomial(t.mono, field_.one());
      v = vars_.add("v_{" + to_string(shown, vars_) + "}", VarKind::monomial);
      mono_var_.emplace(t.mono, v);
      def_index_.emplace(v, defs_.size());
      defs_.push_back({v, t.mono});
    }
    terms.push_back({Monomial::of(v), t.coeff});
  }
  return Polynomial::from_terms(field_, std::move(terms));
}

Polynomial AtomTable::expand(VarId v) const {
  if (auto it = def_index_.find(v); it != def_index_.end())
    return Polynomial::monomial(defs_[it->second].mono, field_.one());
  if (auto it = row_index_.find(v); it != row_index_.end())
    return expand(rows_[it->second].body);
  return Polynomial::variable(v);
}

Polynomial AtomTable::expand(const Polynomial &linear) const {
  Polynomial out;
  for (const Term &t : linear.terms()) {
    if (t.mono.is_one()) {
      out = add(field_, out, Polynomial::constant(t.coeff));
      continue;
    }
    if (!t.mono.is_variable())
      throw std::invalid_argument("expand: polynomial is not linear");
    out = add(field_, out,
              scale(field_, t.coeff, expand(t.mono.powers()[0].var)));
  }
  return out;
}

std::optional<VarId> AtomTable::monomial_var(const Monomial &m) const {
  auto it = mono_var_.find(m);
  if (it == mono_var_.end())
    return std::nullopt;
  return it->second;
}

const Monomial *AtomTable::definition_of(VarId v) const {
  auto it = def_index_.find(v);
  return it == def_index_.end() ? nullptr : &defs_[it->second].mono;
}

VarId AtomTable::slack_for(const Polynomial &g) {
  if (auto it = slack_of_.find(g); it != slack_of_.end())
    return it->second;
  VarId s = vars_.add("s_{" + to_string(g, vars_) + "}", VarKind::slack);
  slack_of_.emplace(g, s);
  row_index_.emplace(s, rows_.size());
  rows_.push_back({s, g});
  return s;
}

AtomTable::Interned AtomTable::intern(const Polynomial &f) {
  Polynomial poly = make_monic(field_, f);
  if (poly.is_constant())
    return {poly.is_zero() ? Interned::Kind::truth : Interned::Kind::falsity,
            0};
  if (auto it = by_poly_.find(poly); it != by_poly_.end())
    return {Interned::Kind::atom, it->second};

  Polynomial linear = make_monic(field_, abstract(poly));
  FieldElement c0 = linear.constant_term();
  std::vector<Term> var_terms;
  for (const Term &t : linear.terms())
    if (!t.mono.is_one())
      var_terms.push_back(t);
  Polynomial g = Polynomial::from_sorted(std::move(var_terms));
  VarId dom = g.terms().size() == 1 ? g.leading().mono.powers()[0].var
                                    : slack_for(g);

  auto id = static_cast<AtomId>(atoms_.size());
  FieldElement value = field_.neg(c0);
  atoms_.push_back({poly, linear, dom, value});
  by_poly_.emplace(std::move(poly), id);
  by_domain_.emplace(std::make_pair(dom.index, value.residue), id);
  on_var_[dom].push_back(id);
  return {Interned::Kind::atom, id};
}

std::optional<AtomId> AtomTable::find(const Polynomial &f) const {
  Polynomial poly = make_monic(field_, f);
  auto it = by_poly_.find(poly);
  if (it == by_poly_.end())
    return std::nullopt;
  return it->second;
}

AtomTable::Interned AtomTable::intern_domain(VarId var,
                                             const FieldElement &value) {
  if (auto id = find_domain(var, value))
    return {Interned::Kind::atom, *id};
  Polynomial f = sub(field_, expand(var), Polynomial::constant(value));
  Interned r = intern(f);
  assert(r.kind != Interned::Kind::atom ||
         (atoms_[r.id].dom_var == var && atoms_[r.id].dom_value == value));
  return r;
}

std::optional<AtomId> AtomTable::find_domain(VarId var,
                                             const FieldElement &value) const {
  auto it = by_domain_.find(std::make_pair(var.index, value.residue));
  if (it == by_domain_.end())
    return std::nullopt;
  return it->second;
}

std::span<const AtomId> AtomTable::atoms_on(VarId dom_var) const {
  auto it = on_var_.find(dom_var);
  if (it == on_var_.end())
    return {};
  return it->second;
}

namespace {

class Clausifier {
public:
  Clausifier(const Formula &f, AtomTable &atoms, const CnfSink &sink)
      : f_(f), atoms_(atoms), sink_(sink), cache_(f.size(), Lit{~0u}) {}

  void assert_root(NodeId n) {
    std::vector<NodeId> conjuncts;
    flatten(n, Op::and_, false, conjuncts);
    for (NodeId c : conjuncts) {
      const Node &node = f_.node(c);
      if (node.op == Op::or_) {
        std::vector<NodeId> disjuncts;
        flatten(c, Op::or_, false, disjuncts);
        std::vector<Lit> clause;
        for (NodeId d : disjuncts)
          clause.push_back(encode(d));
        clauses.push_back(std::move(clause));
      } else if (node.op == Op::not_ && f_.node(node.kids[0]).op == Op::and_) {
        std::vector<NodeId> parts;
        flatten(node.kids[0], Op::and_, false, parts);
        std::vector<Lit> clause;
        for (NodeId d : parts)
          clause.push_back(~encode(d));
        clauses.push_back(std::move(clause));
      } else {
        clauses.push_back({encode(c)});
      }
    }
  }

  std::vector<std::vector<Lit>> clauses;

private:
  void flatten(NodeId n, Op op, bool negated, std::vector<NodeId> &out) {
    const Node &node = f_.node(n);
    if (node.op == op) {
      for (NodeId k : node.kids)
        flatten(k, op, negated, out);
      return;
    }
    out.push_back(n);
  }

  Lit truth() {
    if (!have_true_) {
      true_ = Lit::make(sink_.fresh_var());
      clauses.push_back({true_});
      have_true_ = true;
    }
    return true_;
  }

  Lit encode(NodeId n) {
    if (cache_[n].code != ~0u)
      return cache_[n];
    Lit l = encode_uncached(n);
    cache_[n] = l;
    return l;
  }

  Lit encode_uncached(NodeId n) {
    const Node &node = f_.node(n);
    switch (node.op) {
    case Op::constant:
      return node.value ? truth() : ~truth();
    case Op::bool_var:
      return Lit::make(sink_.bool_var(node.var));
    case Op::poly_eq: {
      AtomTable::Interned r = atoms_.intern(node.poly);
      if (r.kind == AtomTable::Interned::Kind::truth)
        return truth();
      if (r.kind == AtomTable::Interned::Kind::falsity)
        return ~truth();
      return Lit::make(sink_.atom_var(r.id));
    }
    case Op::not_:
      return ~encode(node.kids[0]);
    case Op::and_:
    case Op::or_: {
      std::vector<NodeId> parts;
      flatten(n, node.op, false, parts);
      std::vector<Lit> kids;
      for (NodeId k : parts)
        kids.push_back(encode(k));
      // or(k) = not and(not k)
      const bool is_or = node.op == Op::or_;
      Lit x = Lit::make(sink_.fresh_var());
      Lit xa = is_or ? ~x : x;
      std::vector<Lit> back{xa};
      for (Lit k : kids) {
        Lit ka = is_or ? ~k : k;
        clauses.push_back({~xa, ka});
        back.push_back(~ka);
      }
      clauses.push_back(std::move(back));
      return x;
    }
    case Op::xor_: {
      Lit acc = encode(node.kids[0]);
      for (std::size_t i = 1; i < node.kids.size(); ++i)
        acc = ~iff(acc, encode(node.kids[i]));
      return acc;
    }
    case Op::iff: {
      if (node.kids.size() == 2)
        return iff(encode(node.kids[0]), encode(node.kids[1]));
      Lit x = Lit::make(sink_.fresh_var());
      std::vector<Lit> back{x};
      for (std::size_t i = 0; i + 1 < node.kids.size(); ++i) {
        Lit e = iff(encode(node.kids[i]), encode(node.kids[i + 1]));
        clauses.push_back({~x, e});
        back.push_back(~e);
      }
      clauses.push_back(std::move(back));
      return x;
    }
    case Op::ite: {
      Lit c = encode(node.kids[0]);
      Lit a = encode(node.kids[1]);
      Lit b = encode(node.kids[2]);
      Lit x = Lit::make(sink_.fresh_var());
      clauses.push_back({~x, ~c, a});
      clauses.push_back({~x, c, b});
      clauses.push_back({x, ~c, ~a});
      clauses.push_back({x, c, ~b});
      return x;
    }
    }
    throw std::logic_error("unknown formula node");
  }

  Lit iff(Lit a, Lit b) {
    Lit x = Lit::make(sink_.fresh_var());
    clauses.push_back({~x, ~a, b});
    clauses.push_back({~x, a, ~b});
    clauses.push_back({x, a, b});
    clauses.push_back({x, ~a, ~b});
    return x;
  }

  const Formula &f_;
  AtomTable &atoms_;
  const CnfSink &sink_;
  std::vector<Lit> cache_;
  Lit true_{};
  bool have_true_ = false;
};

} // namespace

std::vector<std::vector<Lit>> clausify(const Formula &formula,
                                       std::span<const NodeId> assertions,
                                       AtomTable &atoms, const CnfSink &sink) {
  Clausifier c(formula, atoms, sink);
  for (NodeId n : assertions)
    c.assert_root(n);
  return std::move(c.clauses);
}

} // namespace zpsmt
