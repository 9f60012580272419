#include "zpsmt/formula.hpp"

#include <stdexcept>

namespace zpsmt {

NodeId Formula::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Formula::constant(bool value) {
  Node n;
  n.op = Op::constant;
  n.value = value;
  return push(std::move(n));
}

NodeId Formula::bool_var(std::uint32_t index) {
  Node n;
  n.op = Op::bool_var;
  n.var = index;
  return push(std::move(n));
}

NodeId Formula::equation(Polynomial poly) {
  Node n;
  n.op = Op::poly_eq;
  n.poly = std::move(poly);
  return push(std::move(n));
}

NodeId Formula::negate(NodeId a) { return connective(Op::not_, {a}); }

NodeId Formula::connective(Op op, std::vector<NodeId> kids) {
  Node n;
  n.op = op;
  n.kids = std::move(kids);
  return push(std::move(n));
}

bool evaluate(const Field &field, const Formula &formula, NodeId root,
              const Assignment &sigma, const std::vector<bool> &bools) {
  const Node &n = formula.node(root);
  auto kid = [&](std::size_t i) {
    return evaluate(field, formula, n.kids[i], sigma, bools);
  };
  switch (n.op) {
  case Op::constant:
    return n.value;
  case Op::bool_var:
    return bools.at(n.var);
  case Op::poly_eq:
    return zpsmt::evaluate(field, n.poly, sigma).is_zero();
  case Op::not_:
    return !kid(0);
  case Op::and_:
    for (std::size_t i = 0; i < n.kids.size(); ++i)
      if (!kid(i))
        return false;
    return true;
  case Op::or_:
    for (std::size_t i = 0; i < n.kids.size(); ++i)
      if (kid(i))
        return true;
    return false;
  case Op::xor_: {
    bool acc = false;
    for (std::size_t i = 0; i < n.kids.size(); ++i)
      acc ^= kid(i);
    return acc;
  }
  case Op::iff: {
    bool first = kid(0);
    for (std::size_t i = 1; i < n.kids.size(); ++i)
      if (kid(i) != first)
        return false;
    return true;
  }
  case Op::ite:
    return kid(0) ? kid(1) : kid(2);
  }
  throw std::logic_error("unknown formula node");
}

} // namespace zpsmt
