#include "zpsmt/equiv.hpp"

#include <algorithm>
#include <map>

namespace zpsmt {

EquivModule::EquivModule(const Field &field) : field_(field) {}

void EquivModule::ensure(VarId v) {
  while (parent_.size() <= v.index) {
    auto i = static_cast<std::uint32_t>(parent_.size());
    parent_.push_back(i);
    size_.push_back(1);
    members_.push_back({i});
    proof_.emplace_back();
    uses_.emplace_back();
  }
}

VarId EquivModule::find(VarId v) const {
  if (v.index >= parent_.size())
    return v;
  std::uint32_t i = v.index;
  while (parent_[i] != i)
    i = parent_[i];
  return VarId{i};
}

Polynomial EquivModule::canonical(const Polynomial &body) const {
  std::vector<Term> terms;
  terms.reserve(body.terms().size());
  for (const Term &t : body.terms()) {
    std::vector<Monomial::Power> powers;
    for (const auto &p : t.mono.powers())
      powers.push_back({find(p.var), p.exp});
    terms.push_back({Monomial::from_powers(std::move(powers)), t.coeff});
  }
  return Polynomial::from_terms(field_, std::move(terms));
}

void EquivModule::register_definition(VarId y, const Polynomial &body,
                                      std::optional<Lit> reason,
                                      std::size_t trail_index) {
  ensure(y);
  for (VarId v : body.vars())
    ensure(v);
  const std::size_t d = defs_.size();
  defs_.push_back(Def{y, body, reason, Polynomial(), true});
  for (VarId v : body.vars())
    uses_[v.index].push_back(d);
  if (!reason)
    sticky_.push_back(d);
  if (reason) {
    log(trail_index, [this, d] {
      Def &def = defs_[d];
      def.live = false;
      for (VarId v : def.body.vars()) {
        auto &u = uses_[v.index];
        u.erase(std::remove(u.begin(), u.end(), d), u.end());
      }
      if (auto it = table_.find(def.key); it != table_.end() && it->second == d)
        table_.erase(it);
    });
  }
  insert_or_collide(d, trail_index);
  process_pending(trail_index);
}

void EquivModule::insert_or_collide(std::size_t d, std::size_t tag) {
  Def &def = defs_[d];
  Polynomial old = def.key;
  def.key = canonical(def.body);
  log(tag, [this, d, old] { defs_[d].key = old; });
  auto it = table_.find(def.key);
  if (it == table_.end()) {
    table_.emplace(def.key, d);
    Polynomial key = def.key;
    log(tag, [this, key, d] {
      if (auto hit = table_.find(key); hit != table_.end() && hit->second == d)
        table_.erase(hit);
    });
    return;
  }
  if (!same(defs_[it->second].y, def.y))
    pending_.emplace_back(it->second, d);
}

void EquivModule::rekey(std::size_t d, std::size_t tag) {
  Def &def = defs_[d];
  if (!def.live)
    return;
  if (auto it = table_.find(def.key); it != table_.end() && it->second == d) {
    table_.erase(it);
    Polynomial key = def.key;
    log(tag, [this, key, d] { table_[key] = d; });
  }
  insert_or_collide(d, tag);
}

void EquivModule::union_classes(VarId a, VarId b, ProofEdge edge,
                                std::size_t tag) {
  VarId ra = find(a), rb = find(b);
  if (ra == rb)
    return;

  // Proof forest: make `a` the root of its tree, then hang it below `b`.
  std::vector<std::pair<std::uint32_t, ProofEdge>> saved;
  {
    std::uint32_t prev = a.index;
    ProofEdge carried = proof_[a.index];
    saved.emplace_back(a.index, proof_[a.index]);
    proof_[a.index] = ProofEdge{};
    while (carried.parent) {
      std::uint32_t next = carried.parent->index;
      saved.emplace_back(next, proof_[next]);
      ProofEdge up = proof_[next];
      ProofEdge reversed = carried;
      reversed.parent = VarId{prev};
      proof_[next] = reversed;
      prev = next;
      carried = up;
    }
  }
  edge.parent = b;
  proof_[a.index] = edge;
  log(tag, [this, saved = std::move(saved)] {
    for (auto it = saved.rbegin(); it != saved.rend(); ++it)
      proof_[it->first] = it->second;
  });

  std::uint32_t big = ra.index, small = rb.index;
  if (size_[big] < size_[small])
    std::swap(big, small);
  parent_[small] = big;
  size_[big] += size_[small];
  const std::size_t old_members = members_[big].size();
  members_[big].insert(members_[big].end(), members_[small].begin(),
                       members_[small].end());
  log(tag, [this, big, small, old_members] {
    parent_[small] = small;
    size_[big] -= size_[small];
    members_[big].resize(old_members);
  });

  std::vector<std::size_t> touched;
  for (std::uint32_t v : members_[small])
    touched.insert(touched.end(), uses_[v].begin(), uses_[v].end());
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (std::size_t d : touched)
    rekey(d, tag);
}

void EquivModule::process_pending(std::size_t tag) {
  while (!pending_.empty()) {
    auto [d1, d2] = pending_.back();
    pending_.pop_back();
    VarId y1 = defs_[d1].y, y2 = defs_[d2].y;
    if (!defs_[d1].live || !defs_[d2].live || same(y1, y2))
      continue;
    ProofEdge edge;
    edge.def1 = d1;
    edge.def2 = d2;
    union_classes(y1, y2, edge, tag);
    ++derived_total_;
    derived_.push_back({y1, y2, explain(y1, y2)});
  }
}

void EquivModule::merge(VarId x, VarId x2, Lit reason,
                        std::size_t trail_index) {
  ensure(x);
  ensure(x2);
  if (same(x, x2))
    return;
  ProofEdge edge;
  edge.lit = reason;
  union_classes(x, x2, edge, trail_index);
  process_pending(trail_index);
}

void EquivModule::assert_equation(const Polynomial &poly, Lit reason,
                                  std::size_t trail_index) {
  const auto &terms = poly.terms();
  if (terms.size() == 2 && terms[0].mono.is_variable() &&
      terms[1].mono.is_variable() &&
      field_.add(terms[0].coeff, terms[1].coeff).is_zero()) {
    merge(terms[0].mono.powers()[0].var, terms[1].mono.powers()[0].var,
          reason, trail_index);
    return;
  }
  for (VarId y : poly.vars()) {
    if (poly.degree_in(y) != 1)
      continue;
    const Term *own = nullptr;
    bool alone = true;
    for (const Term &t : terms) {
      if (!t.mono.contains(y))
        continue;
      if (t.mono.is_variable() && !own)
        own = &t;
      else
        alone = false;
    }
    if (!own || !alone)
      continue;
    // c*y + rest = 0  =>  y = -rest / c
    FieldElement factor = field_.neg(field_.inverse(own->coeff));
    std::vector<Term> rest;
    for (const Term &t : terms)
      if (&t != own)
        rest.push_back({t.mono, field_.mul(t.coeff, factor)});
    register_definition(y, Polynomial::from_sorted(std::move(rest)), reason,
                        trail_index);
  }
}

void EquivModule::backtrack(std::size_t trail_size) {
  while (!undo_.empty() && undo_.back().first >= trail_size) {
    undo_.back().second();
    undo_.pop_back();
  }
  pending_.clear();
  derived_.clear();
  // Axioms outlive backtracking; bring their keys back in line with the
  // restored classes.
  for (std::size_t d : sticky_) {
    Def &def = defs_[d];
    if (auto it = table_.find(def.key); it != table_.end() && it->second == d)
      table_.erase(it);
    def.key = canonical(def.body);
    table_.try_emplace(def.key, d);
  }
}

std::vector<DerivedEquality> EquivModule::take_derived() {
  std::vector<DerivedEquality> out = std::move(derived_);
  derived_.clear();
  return out;
}

Explanation EquivModule::explain(VarId a, VarId b) const {
  std::vector<Lit> out;
  explain_into(a, b, out, 0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void EquivModule::explain_into(VarId a, VarId b, std::vector<Lit> &out,
                               int depth) const {
  if (a == b || depth > 10000)
    return;
  // Ancestors of a in the proof forest.
  std::vector<std::uint32_t> up_a{a.index};
  for (std::uint32_t v = a.index; proof_[v].parent;) {
    v = proof_[v].parent->index;
    up_a.push_back(v);
  }
  std::vector<std::uint32_t> up_b{b.index};
  std::uint32_t meet = b.index;
  while (std::find(up_a.begin(), up_a.end(), meet) == up_a.end()) {
    meet = proof_[meet].parent->index;
    up_b.push_back(meet);
  }

  auto edge_reason = [&](const ProofEdge &e) {
    if (e.lit) {
      out.push_back(*e.lit);
      return;
    }
    const Def &d1 = defs_[e.def1];
    const Def &d2 = defs_[e.def2];
    if (d1.reason)
      out.push_back(*d1.reason);
    if (d2.reason)
      out.push_back(*d2.reason);
    std::map<std::uint32_t, VarId> leader;
    for (const Def *d : {&d1, &d2}) {
      for (VarId v : d->body.vars()) {
        auto [it, fresh] = leader.emplace(find(v).index, v);
        if (!fresh)
          explain_into(v, it->second, out, depth + 1);
      }
    }
  };
  for (std::uint32_t v : up_a) {
    if (v == meet)
      break;
    edge_reason(proof_[v]);
  }
  for (std::uint32_t v : up_b) {
    if (v == meet)
      break;
    edge_reason(proof_[v]);
  }
}

} // namespace zpsmt
