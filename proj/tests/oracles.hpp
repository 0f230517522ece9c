#pragma once

// Independent reference computations used by the unit and acceptance tests.
// They deliberately avoid the library routines they are compared against.

#include "plabs/core.hpp"
#include "plabs/tape.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using plabs::Matrix;
using plabs::Vector;

inline Matrix gaussian(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix M(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) M(i, j) = nd(rng);
    }
    return M;
}

inline Vector gaussian_vec(std::mt19937_64& rng, Eigen::Index n) {
    return gaussian(rng, n, 1);
}

inline Matrix sign_diag(std::uint64_t mask, Eigen::Index s) {
    Matrix D = Matrix::Zero(s, s);
    for (Eigen::Index i = 0; i < s; ++i) D(i, i) = ((mask >> i) & 1U) ? 1.0 : -1.0;
    return D;
}

inline double spectral_norm(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(M).singularValues()(0);
}

// J + Y Sigma (I - L Sigma)^{-1} Z with a general dense inverse.
inline Matrix dense_piece_jacobian(const plabs::AbsNormalForm& f, const Matrix& Sigma) {
    const Eigen::Index s = f.s();
    const Matrix inv = (Matrix::Identity(s, s) - f.L * Sigma).fullPivLu().inverse();
    return f.J + f.Y * Sigma * inv * f.Z;
}

inline Vector dense_piece_offset(const plabs::AbsNormalForm& f, const Matrix& Sigma) {
    const Eigen::Index s = f.s();
    const Matrix inv = (Matrix::Identity(s, s) - f.L * Sigma).fullPivLu().inverse();
    return f.b + f.Y * Sigma * inv * f.c;
}

// z by plain fixed-point sweeps (s sweeps suffice since L is nilpotent).
inline Vector switching_values(const plabs::AbsNormalForm& f, const Vector& x) {
    Vector z = f.c + f.Z * x;
    for (Eigen::Index sweep = 0; sweep < f.s(); ++sweep) z = f.c + f.Z * x + f.L * z.cwiseAbs();
    return z;
}

// Roots of F by solving the affine system of every definite piece.
inline std::vector<Vector> opl_roots(const plabs::AbsNormalForm& f, double tol = 1e-9) {
    const Eigen::Index s = f.s();
    const double scale = f.scale();
    std::vector<Vector> roots;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << s); ++mask) {
        const Matrix Sigma = sign_diag(mask, s);
        const Matrix Js = dense_piece_jacobian(f, Sigma);
        Eigen::FullPivLU<Matrix> lu(Js);
        if (!lu.isInvertible()) continue;
        const Vector x = lu.solve(-dense_piece_offset(f, Sigma));
        const Vector z = switching_values(f, x);
        bool inside = true;
        for (Eigen::Index i = 0; i < s; ++i) {
            if (Sigma(i, i) * z[i] < -tol * scale) inside = false;
        }
        if (!inside) continue;
        const Vector y = f.b + f.J * x + f.Y * z.cwiseAbs();
        if (y.cwiseAbs().maxCoeff() > tol * scale * (1.0 + x.cwiseAbs().maxCoeff())) continue;
        bool fresh = true;
        for (const Vector& r : roots) {
            if ((r - x).cwiseAbs().maxCoeff() <= tol * scale) fresh = false;
        }
        if (fresh) roots.push_back(x);
    }
    return roots;
}

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Random tape with n inputs whose abs-nesting depth is at most maxDepth.
inline plabs::Tape random_tape(std::mt19937_64& rng, std::size_t n, int maxDepth, int extraNodes) {
    plabs::Tape t(n);
    std::vector<plabs::NodeId> pool;
    std::vector<int> depth;
    for (std::size_t i = 0; i < n; ++i) {
        pool.push_back(t.input(i));
        depth.push_back(0);
    }
    std::uniform_int_distribution<int> kind(0, 3);
    std::normal_distribution<double> w(0.0, 1.0);
    auto pick = [&](int maxAllowed) {
        std::vector<std::size_t> ok;
        for (std::size_t k = 0; k < pool.size(); ++k) {
            if (depth[k] <= maxAllowed) ok.push_back(k);
        }
        return ok[std::uniform_int_distribution<std::size_t>(0, ok.size() - 1)(rng)];
    };
    for (int step = 0; step < extraNodes; ++step) {
        const int k = kind(rng);
        if (k == 0) {
            const std::size_t a = pick(maxDepth), b = pick(maxDepth);
            pool.push_back(t.affine({{pool[a], 0.5 + std::abs(w(rng))}, {pool[b], -0.5 - std::abs(w(rng))}}, w(rng)));
            depth.push_back(std::max(depth[a], depth[b]));
        } else if (k == 1) {
            const std::size_t a = pick(maxDepth - 1);
            pool.push_back(t.abs(pool[a]));
            depth.push_back(depth[a] + 1);
        } else {
            const std::size_t a = pick(maxDepth - 1);
            std::size_t b = pick(maxDepth - 1);
            for (int tries = 0; b == a && tries < 20; ++tries) b = pick(maxDepth - 1);
            if (b == a) {
                pool.push_back(t.abs(pool[a]));
                depth.push_back(depth[a] + 1);
                continue;
            }
            pool.push_back(k == 2 ? t.max(pool[a], pool[b]) : t.min(pool[a], pool[b]));
            depth.push_back(std::max(depth[a], depth[b]) + 1);
        }
    }
    t.output(pool.back());
    t.output(pool[pool.size() / 2]);
    return t;
}

// Longest chain in the dependency DAG of L via boolean matrix powers.
inline int depth_by_powers(const Matrix& L) {
    const Eigen::Index s = L.rows();
    if (s == 0) return 0;
    Eigen::MatrixXi P = (L.array() != 0.0).cast<int>();
    Eigen::MatrixXi Pk = Eigen::MatrixXi::Identity(s, s);
    for (int k = 1; k <= s; ++k) {
        Pk = ((Pk * P).array() != 0).cast<int>();
        if (Pk.isZero()) return k;
    }
    return static_cast<int>(s) + 1;
}

} // namespace oracle
