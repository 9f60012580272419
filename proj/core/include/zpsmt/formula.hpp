#pragma once

// Boolean formula trees over polynomial equations, as read from input.

#include "zpsmt/poly.hpp"

#include <cstdint>
#include <vector>

namespace zpsmt {

using NodeId = std::uint32_t;

enum class Op : std::uint8_t {
  constant, // value
  bool_var, // var indexes Formula::bool_names
  poly_eq,  // poly = 0
  not_,
  and_,
  or_,
  xor_,
  iff,
  ite, // kids: condition, then, else
};

struct Node {
  Op op = Op::constant;
  bool value = false;
  std::uint32_t var = 0;
  Polynomial poly;
  std::vector<NodeId> kids;
};

/// Arena of formula nodes.  Nodes are immutable once added.
class Formula {
public:
  NodeId constant(bool value);
  NodeId bool_var(std::uint32_t index);
  NodeId equation(Polynomial poly);
  NodeId negate(NodeId a);
  NodeId connective(Op op, std::vector<NodeId> kids);

  const Node &node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }

private:
  NodeId push(Node n);
  std::vector<Node> nodes_;
};

/// Truth value of `root` under a field assignment and boolean valuation.
/// Throws UnboundVariable when a field variable is missing.
bool evaluate(const Field &field, const Formula &formula, NodeId root,
              const Assignment &sigma, const std::vector<bool> &bools);

} // namespace zpsmt
