#include "plabs/graph.hpp"
#include "plabs/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace plabs {

TransitionGraph build_graph(const CplSystem& sys, int limit) {
    const Eigen::Index s = sys.s();
    if (s > limit || s > 31) {
        throw Error(ErrorCode::TooLarge, "s = " + std::to_string(s) + " exceeds graph limit " +
                                             std::to_string(limit));
    }
    TransitionGraph g;
    g.s = static_cast<int>(s);
    const std::uint32_t count = std::uint32_t{1} << s;
    g.next.resize(count);
    g.zValues.resize(count);
    g.degenerate.assign(count, false);
    g.singular.assign(count, false);

    const Matrix I = Matrix::Identity(s, s);
    Matrix A(s, s);
    for (std::uint32_t v = 0; v < count; ++v) {
        for (Eigen::Index j = 0; j < s; ++j) {
            const double sgn = ((v >> j) & 1U) ? 1.0 : -1.0;
            A.col(j) = I.col(j) - sgn * sys.S.col(j);
        }
        Eigen::PartialPivLU<Matrix> lu(A);
        if (s > 0 && lu_singular(lu)) {
            g.singular[v] = true;
            g.degenerate[v] = true;
            g.next[v] = v;
            g.zValues[v] = Vector::Constant(s, std::nan(""));
            continue;
        }
        const Vector z = s > 0 ? Vector(lu.solve(sys.cHat)) : Vector(0);
        std::uint32_t target = 0;
        for (Eigen::Index i = 0; i < s; ++i) {
            if (z[i] == 0.0) g.degenerate[v] = true;
            if (z[i] >= 0.0) target |= std::uint32_t{1} << i;
        }
        g.next[v] = target;
        g.zValues[v] = z;
    }
    return g;
}

std::vector<GraphComponent> analyze(const TransitionGraph& g) {
    const std::size_t count = g.size();
    // 0 = unvisited, 1 = on current path, 2 = done.
    std::vector<int> state(count, 0);
    std::vector<int> componentOf(count, -1);
    std::vector<GraphComponent> out;

    for (std::size_t start = 0; start < count; ++start) {
        if (state[start] != 0) continue;
        std::vector<std::uint32_t> path;
        auto v = static_cast<std::uint32_t>(start);
        while (state[v] == 0) {
            state[v] = 1;
            path.push_back(v);
            v = g.next[v];
        }
        int comp = -1;
        if (state[v] == 1) {
            // New terminal cycle: the tail of `path` from v onward.
            const auto pos = std::find(path.begin(), path.end(), v);
            GraphComponent c;
            c.cycle.assign(pos, path.end());
            std::rotate(c.cycle.begin(), std::min_element(c.cycle.begin(), c.cycle.end()), c.cycle.end());
            comp = static_cast<int>(out.size());
            out.push_back(std::move(c));
        } else {
            comp = componentOf[v];
        }
        for (std::uint32_t w : path) {
            state[w] = 2;
            componentOf[w] = comp;
        }
        out[static_cast<std::size_t>(comp)].basinSize += path.size();
    }
    return out;
}

std::string vertex_label(std::uint32_t vertex, int s) {
    std::string label;
    for (int i = 0; i < s; ++i) label.push_back(((vertex >> i) & 1U) ? '+' : '-');
    return label;
}

std::string export_dot(const TransitionGraph& g, bool labels) {
    std::vector<bool> onCycle(g.size(), false);
    for (const GraphComponent& c : analyze(g)) {
        for (std::uint32_t v : c.cycle) onCycle[v] = true;
    }
    std::ostringstream os;
    os << "digraph transitions {\n";
    os << "  node [shape=box, fontname=\"Courier\"];\n";
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        os << "  v" << v << " [";
        if (labels) os << "label=\"" << vertex_label(v, g.s) << "\"";
        if (onCycle[v]) os << (labels ? ", " : "") << "style=filled, fillcolor=lightgrey, penwidth=2";
        if (g.singular[v]) os << ((labels || onCycle[v]) ? ", " : "") << "color=red";
        os << "];\n";
    }
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        os << "  v" << v << " -> v" << g.next[v];
        if (g.singular[v]) os << " [style=dashed]";
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace plabs
