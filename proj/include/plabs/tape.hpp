#pragma once

// Small expression tape for PL functions built from affine combinations,
// abs, max and min. Lowering produces an abs-normal form; direct evaluation
// serves as an independent oracle for it.

#include "plabs/core.hpp"

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

namespace plabs {

using NodeId = std::size_t;

struct InputNode {
    std::size_t index;
};
struct AffineNode {
    std::vector<std::pair<NodeId, double>> terms;
    double constant = 0.0;
};
struct AbsNode {
    NodeId arg;
};
struct MaxNode {
    NodeId lhs, rhs;
};
struct MinNode {
    NodeId lhs, rhs;
};

using TapeNode = std::variant<InputNode, AffineNode, AbsNode, MaxNode, MinNode>;

class Tape {
public:
    explicit Tape(std::size_t inputs);

    NodeId input(std::size_t i);
    NodeId affine(std::vector<std::pair<NodeId, double>> terms, double constant = 0.0);
    NodeId abs(NodeId arg);
    NodeId max(NodeId lhs, NodeId rhs);
    NodeId min(NodeId lhs, NodeId rhs);

    NodeId add(NodeId a, NodeId b) { return affine({{a, 1.0}, {b, 1.0}}); }
    NodeId sub(NodeId a, NodeId b) { return affine({{a, 1.0}, {b, -1.0}}); }
    NodeId scale(NodeId a, double w) { return affine({{a, w}}); }

    void output(NodeId node);

    [[nodiscard]] std::size_t inputs() const noexcept { return inputs_; }
    [[nodiscard]] const std::vector<TapeNode>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<NodeId>& outputs() const noexcept { return outputs_; }

    /// Maximal number of nested abs/max/min operations over all nodes.
    [[nodiscard]] int abs_depth() const;

private:
    NodeId push(TapeNode node);
    void check_ref(NodeId id) const;

    std::size_t inputs_;
    std::vector<TapeNode> nodes_;
    std::vector<NodeId> outputs_;
};

/// Direct evaluation with exact abs/max/min.
[[nodiscard]] Vector tape_eval(const Tape& tape, const Vector& x);

/// Lowering via max(u,w) = (u+w+|u-w|)/2 and min(u,w) = (u+w-|u-w|)/2.
/// Switch indices follow tape order.
[[nodiscard]] AbsNormalForm lower(const Tape& tape);

/// F(x) = (|x1| - |x2|, |x1+x2|/2 - |x1-x2|/2).
[[nodiscard]] Tape schueth_tape();

} // namespace plabs
