#pragma once

// Atoms and the linear decomposition F /\ G /\ H.
//
// Every atom f = 0 is stored with f normalized (monic, over original
// variables).  Non-linear monomials m are abstracted by variables v_m
// (H: v_m = m) and the remaining linear part g, when it is not a single
// variable, is named by a slack s_g (G: s_g = g).  The atom then reads as
// the domain constraint dom_var = dom_value.

#include "zpsmt/formula.hpp"
#include "zpsmt/sat.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace zpsmt {

using AtomId = std::uint32_t;

struct Atom {
  Polynomial poly;   // normalized, original variables only
  Polynomial linear; // abstraction, monic; atom reads linear = 0
  VarId dom_var;
  FieldElement dom_value;
};

/// v_m = m.
struct Definition {
  VarId var;
  Monomial mono;
};

/// s_g = g, g monic linear without constant term, over original and
/// monomial variables.
struct SlackRow {
  VarId slack;
  Polynomial body;
};

class AtomTable {
public:
  AtomTable(const Field &field, VarTable &vars);

  struct Interned {
    enum class Kind { atom, truth, falsity } kind = Kind::atom;
    AtomId id = 0;
  };

  /// Hash-conses f = 0.  Constant polynomials do not become atoms.
  Interned intern(const Polynomial &f);
  std::optional<AtomId> find(const Polynomial &f) const;

  /// The atom whose domain constraint is var = value, created if needed.
  Interned intern_domain(VarId var, const FieldElement &value);
  std::optional<AtomId> find_domain(VarId var, const FieldElement &value) const;
  std::span<const AtomId> atoms_on(VarId dom_var) const;

  const Atom &atom(AtomId id) const { return atoms_.at(id); }
  std::size_t size() const { return atoms_.size(); }

  const std::vector<Definition> &definitions() const { return defs_; }
  const std::vector<SlackRow> &slack_rows() const { return rows_; }
  std::optional<VarId> monomial_var(const Monomial &m) const;
  /// The monomial abstracted by `v`, if v is a monomial variable.
  const Monomial *definition_of(VarId v) const;

  /// Replaces non-linear monomials by their variables (creating them).
  Polynomial abstract(const Polynomial &f);
  /// Inverse of abstraction for linear polynomials: monomial variables and
  /// slacks are expanded back into original variables.
  Polynomial expand(const Polynomial &linear) const;
  /// Expansion of a single variable.
  Polynomial expand(VarId v) const;

  const Field &field() const { return field_; }
  VarTable &vars() { return vars_; }
  const VarTable &vars() const { return vars_; }

private:
  VarId slack_for(const Polynomial &g);

  const Field &field_;
  VarTable &vars_;
  std::vector<Atom> atoms_;
  std::unordered_map<Polynomial, AtomId, PolynomialHash> by_poly_;
  std::map<std::pair<std::uint32_t, Integer>, AtomId> by_domain_;
  std::unordered_map<VarId, std::vector<AtomId>> on_var_;
  std::vector<Definition> defs_;
  std::unordered_map<Monomial, VarId, MonomialHash> mono_var_;
  std::unordered_map<VarId, std::size_t> def_index_;
  std::vector<SlackRow> rows_;
  std::unordered_map<Polynomial, VarId, PolynomialHash> slack_of_;
  std::unordered_map<VarId, std::size_t> row_index_;
};

/// Boolean variables handed to the CNF encoder.
struct CnfSink {
  std::function<BoolVar(AtomId)> atom_var;
  std::function<BoolVar(std::uint32_t)> bool_var;
  std::function<BoolVar()> fresh_var;
};

/// Clausifies the assertions of a formula: top-level conjunctions and
/// clauses map directly to clauses, other structure gets Tseitin
/// definitions.  Equations are interned into `atoms`.
std::vector<std::vector<Lit>> clausify(const Formula &formula,
                                       std::span<const NodeId> assertions,
                                       AtomTable &atoms, const CnfSink &sink);

} // namespace zpsmt
