#include "zpsmt/clause_infer.hpp"

#include "zpsmt/factor.hpp"

#include <algorithm>

namespace zpsmt {

std::optional<std::vector<Polynomial>> split_equation(const Field &field,
                                                      const Polynomial &f) {
  if (f.degree() < 2)
    return std::nullopt;

  if (auto roots = match_product_of_roots(field, f)) {
    std::vector<Polynomial> out;
    for (const RootFactor &r : *roots) {
      Polynomial factor = sub(field, Polynomial::variable(r.var),
                              Polynomial::constant(r.root));
      if (std::find(out.begin(), out.end(), factor) == out.end())
        out.push_back(std::move(factor));
    }
    if (out.size() >= 2)
      return out;
  }

  if (auto common = extract_common_variable(field, f)) {
    if (common->quotient.is_linear() && !common->quotient.is_constant())
      return std::vector<Polynomial>{Polynomial::variable(common->var),
                                     make_monic(field, common->quotient)};
  }

  if (auto pair = factor_two_linear(field, f)) {
    if (pair->first == pair->second)
      return std::nullopt;
    return std::vector<Polynomial>{pair->first, pair->second};
  }
  return std::nullopt;
}

std::vector<InferredClause> ClauseInferModule::infer(const TheoryTrail &trail) {
  std::vector<InferredClause> out;
  for (const TrailEntry &e : trail) {
    if (!e.positive || done_.count(e.atom))
      continue;
    done_.insert(e.atom);
    auto parts = split_equation(atoms_.field(), atoms_.atom(e.atom).poly);
    if (parts)
      out.push_back({e.atom, e.lit, std::move(*parts)});
  }
  return out;
}

} // namespace zpsmt
