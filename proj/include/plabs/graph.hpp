#pragma once

// Transition automaton sigma -> N(sigma) = sign((I - S Sigma)^{-1} c_hat) of
// full-step Newton on the complementary system.

#include "plabs/cpl.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace plabs {

struct TransitionGraph {
    int s = 0;
    /// Vertex = bitmask, bit i set <=> sigma_i = +1.
    std::vector<std::uint32_t> next;
    std::vector<Vector> zValues;
    /// z(sigma) has a zero component (mapped to +1) or the solve was singular.
    std::vector<bool> degenerate;
    /// Singular vertices carry an invalid self-loop.
    std::vector<bool> singular;

    [[nodiscard]] std::size_t size() const noexcept { return next.size(); }
};

/// Throws TooLarge when s > limit.
[[nodiscard]] TransitionGraph build_graph(const CplSystem& sys, int limit = kDefaultGraphLimit);

struct GraphComponent {
    /// Terminal cycle in traversal order, starting at its smallest vertex.
    std::vector<std::uint32_t> cycle;
    /// Number of vertices in the component, cycle included.
    std::size_t basinSize = 0;
};

[[nodiscard]] std::vector<GraphComponent> analyze(const TransitionGraph& g);

/// Signature label such as "+-+" (ASCII minus).
[[nodiscard]] std::string vertex_label(std::uint32_t vertex, int s);

/// DOT digraph; vertices ascending by bitmask, cycle vertices styled.
[[nodiscard]] std::string export_dot(const TransitionGraph& g, bool labels = true);

} // namespace plabs
