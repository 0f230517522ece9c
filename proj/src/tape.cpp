#include "plabs/tape.hpp"
#include "plabs/error.hpp"

#include <algorithm>
#include <cmath>

namespace plabs {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// alpha + a.x + l.|z|, with l growing as switches are introduced.
struct AffineForm {
    double constant = 0.0;
    Vector a;
    std::vector<double> l;

    void axpy(double w, const AffineForm& other) {
        constant += w * other.constant;
        a += w * other.a;
        if (l.size() < other.l.size()) l.resize(other.l.size(), 0.0);
        for (std::size_t k = 0; k < other.l.size(); ++k) l[k] += w * other.l[k];
    }
};

struct Row {
    double c;
    Vector z;
    std::vector<double> l;
};

} // namespace

Tape::Tape(std::size_t inputs) : inputs_(inputs) {}

NodeId Tape::push(TapeNode node) {
    nodes_.push_back(std::move(node));
    return nodes_.size() - 1;
}

void Tape::check_ref(NodeId id) const {
    if (id >= nodes_.size()) throw Error(ErrorCode::InvalidArgument, "tape node references a later node");
}

NodeId Tape::input(std::size_t i) {
    if (i >= inputs_) throw Error(ErrorCode::InvalidArgument, "input index out of range");
    return push(InputNode{i});
}

NodeId Tape::affine(std::vector<std::pair<NodeId, double>> terms, double constant) {
    for (const auto& t : terms) check_ref(t.first);
    return push(AffineNode{std::move(terms), constant});
}

NodeId Tape::abs(NodeId arg) {
    check_ref(arg);
    return push(AbsNode{arg});
}

NodeId Tape::max(NodeId lhs, NodeId rhs) {
    check_ref(lhs);
    check_ref(rhs);
    return push(MaxNode{lhs, rhs});
}

NodeId Tape::min(NodeId lhs, NodeId rhs) {
    check_ref(lhs);
    check_ref(rhs);
    return push(MinNode{lhs, rhs});
}

void Tape::output(NodeId node) {
    check_ref(node);
    outputs_.push_back(node);
}

int Tape::abs_depth() const {
    std::vector<int> depth(nodes_.size(), 0);
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        depth[k] = std::visit(overloaded{
                                  [](const InputNode&) { return 0; },
                                  [&](const AffineNode& a) {
                                      int d = 0;
                                      for (const auto& t : a.terms) d = std::max(d, depth[t.first]);
                                      return d;
                                  },
                                  [&](const AbsNode& a) { return depth[a.arg] + 1; },
                                  [&](const MaxNode& m) { return std::max(depth[m.lhs], depth[m.rhs]) + 1; },
                                  [&](const MinNode& m) { return std::max(depth[m.lhs], depth[m.rhs]) + 1; },
                              },
                              nodes_[k]);
    }
    return depth.empty() ? 0 : *std::max_element(depth.begin(), depth.end());
}

Vector tape_eval(const Tape& tape, const Vector& x) {
    if (static_cast<std::size_t>(x.size()) != tape.inputs()) {
        throw Error(ErrorCode::DimensionMismatch, "x has wrong dimension");
    }
    const auto& nodes = tape.nodes();
    std::vector<double> value(nodes.size(), 0.0);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        value[k] = std::visit(overloaded{
                                  [&](const InputNode& in) { return x[static_cast<Eigen::Index>(in.index)]; },
                                  [&](const AffineNode& a) {
                                      double v = a.constant;
                                      for (const auto& t : a.terms) v += t.second * value[t.first];
                                      return v;
                                  },
                                  [&](const AbsNode& a) { return std::abs(value[a.arg]); },
                                  [&](const MaxNode& m) { return std::max(value[m.lhs], value[m.rhs]); },
                                  [&](const MinNode& m) { return std::min(value[m.lhs], value[m.rhs]); },
                              },
                              nodes[k]);
    }
    Vector y(static_cast<Eigen::Index>(tape.outputs().size()));
    for (std::size_t i = 0; i < tape.outputs().size(); ++i) y[static_cast<Eigen::Index>(i)] = value[tape.outputs()[i]];
    return y;
}

AbsNormalForm lower(const Tape& tape) {
    const auto n = static_cast<Eigen::Index>(tape.inputs());
    const auto& nodes = tape.nodes();
    std::vector<AffineForm> forms;
    forms.reserve(nodes.size());
    std::vector<Row> rows;

    auto blank = [n]() {
        AffineForm f;
        f.a = Vector::Zero(n);
        return f;
    };
    // Appends switch z_k = arg and returns the affine form of |z_k|.
    auto new_switch = [&](const AffineForm& arg) {
        rows.push_back(Row{arg.constant, arg.a, arg.l});
        AffineForm f = blank();
        f.l.assign(rows.size(), 0.0);
        f.l.back() = 1.0;
        return f;
    };

    for (const auto& node : nodes) {
        AffineForm f = std::visit(
            overloaded{
                [&](const InputNode& in) {
                    AffineForm g = blank();
                    g.a[static_cast<Eigen::Index>(in.index)] = 1.0;
                    return g;
                },
                [&](const AffineNode& a) {
                    AffineForm g = blank();
                    g.constant = a.constant;
                    for (const auto& t : a.terms) g.axpy(t.second, forms[t.first]);
                    return g;
                },
                [&](const AbsNode& a) { return new_switch(forms[a.arg]); },
                [&](const MaxNode& m) {
                    AffineForm diff = blank();
                    diff.axpy(1.0, forms[m.lhs]);
                    diff.axpy(-1.0, forms[m.rhs]);
                    AffineForm g = new_switch(diff);
                    for (double& v : g.l) v *= 0.5;
                    g.axpy(0.5, forms[m.lhs]);
                    g.axpy(0.5, forms[m.rhs]);
                    return g;
                },
                [&](const MinNode& m) {
                    AffineForm diff = blank();
                    diff.axpy(1.0, forms[m.lhs]);
                    diff.axpy(-1.0, forms[m.rhs]);
                    AffineForm g = new_switch(diff);
                    for (double& v : g.l) v *= -0.5;
                    g.axpy(0.5, forms[m.lhs]);
                    g.axpy(0.5, forms[m.rhs]);
                    return g;
                },
            },
            node);
        forms.push_back(std::move(f));
    }

    const auto s = static_cast<Eigen::Index>(rows.size());
    const auto m = static_cast<Eigen::Index>(tape.outputs().size());
    AbsNormalForm out = AbsNormalForm::zeros(n, s, m);
    for (Eigen::Index k = 0; k < s; ++k) {
        const Row& r = rows[static_cast<std::size_t>(k)];
        out.c[k] = r.c;
        out.Z.row(k) = r.z.transpose();
        for (std::size_t j = 0; j < r.l.size(); ++j) out.L(k, static_cast<Eigen::Index>(j)) = r.l[j];
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        const AffineForm& f = forms[tape.outputs()[static_cast<std::size_t>(i)]];
        out.b[i] = f.constant;
        out.J.row(i) = f.a.transpose();
        for (std::size_t j = 0; j < f.l.size(); ++j) out.Y(i, static_cast<Eigen::Index>(j)) = f.l[j];
    }
    return out;
}

Tape schueth_tape() {
    Tape t(2);
    const NodeId x1 = t.input(0);
    const NodeId x2 = t.input(1);
    const NodeId a1 = t.abs(x1);
    const NodeId a2 = t.abs(x2);
    const NodeId a3 = t.abs(t.add(x1, x2));
    const NodeId a4 = t.abs(t.sub(x1, x2));
    t.output(t.sub(a1, a2));
    t.output(t.affine({{a3, 0.5}, {a4, -0.5}}));
    return t;
}

} // namespace plabs
