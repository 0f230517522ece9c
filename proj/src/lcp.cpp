#include "plabs/lcp.hpp"
#include "plabs/error.hpp"

#include <algorithm>
#include <cmath>

namespace plabs {

namespace {

void require_limit(Eigen::Index s, int limit) {
    if (s > limit || s > 62) {
        throw Error(ErrorCode::TooLarge, "s = " + std::to_string(s) + " exceeds enumeration limit " +
                                             std::to_string(limit));
    }
}

std::vector<Eigen::Index> members(std::uint64_t mask, Eigen::Index s) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < s; ++i) {
        if ((mask >> i) & 1U) idx.push_back(i);
    }
    return idx;
}

} // namespace

LcpData to_lcp(const CplSystem& sys) {
    const Eigen::Index s = sys.s();
    const Matrix I = Matrix::Identity(s, s);
    LcpData out;
    out.sourceS = sys.S;
    out.sourceCHat = sys.cHat;
    if (s == 0) {
        out.q = Vector(0);
        out.M = Matrix(0, 0);
        return out;
    }
    Eigen::PartialPivLU<Matrix> minus(I - sys.S);
    if (!lu_singular(minus)) {
        out.q = minus.solve(sys.cHat);
        out.M = minus.solve(I + sys.S);
        return out;
    }
    Eigen::PartialPivLU<Matrix> plus(I + sys.S);
    if (lu_singular(plus)) {
        throw Error(ErrorCode::SingularIMinusS, "both I - S and I + S are singular");
    }
    // Solve (I+S) w = (I-S) u - c_hat for w instead.
    out.swapped = true;
    out.q = -plus.solve(sys.cHat);
    out.M = plus.solve(I - sys.S);
    return out;
}

bool p_matrix_check(const Matrix& M, int limit) {
    const Eigen::Index s = M.rows();
    require_limit(s, limit);
    const double tol = 1e-12 * (1.0 + max_abs(M));
    const std::uint64_t count = std::uint64_t{1} << s;
    for (std::uint64_t mask = 1; mask < count; ++mask) {
        const auto idx = members(mask, s);
        const Matrix sub = M(idx, idx);
        if (!(sub.partialPivLu().determinant() > tol)) return false;
    }
    return true;
}

LcpEnumeration lcp_solve_enum(const LcpData& lcp, int limit) {
    const Eigen::Index s = lcp.q.size();
    require_limit(s, limit);
    CplSystem sys;
    sys.S = lcp.sourceS;
    sys.cHat = lcp.sourceCHat;
    const double scale = sys.scale();

    LcpEnumeration out;
    std::vector<Vector> seen;
    const std::uint64_t count = std::uint64_t{1} << s;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        // B = support of w, where u vanishes: M_BB w_B = -q_B.
        const auto B = members(mask, s);
        Vector w = Vector::Zero(s);
        if (!B.empty()) {
            const Matrix MBB = lcp.M(B, B);
            Eigen::PartialPivLU<Matrix> lu(MBB);
            if (lu_singular(lu)) {
                ++out.degenerateSupports;
                continue;
            }
            const Vector wB = lu.solve(-Vector(lcp.q(B)));
            for (std::size_t k = 0; k < B.size(); ++k) w[B[k]] = wB[static_cast<Eigen::Index>(k)];
        }
        Vector u = lcp.q + lcp.M * w;
        for (Eigen::Index i : B) u[i] = 0.0;
        if (s > 0 && (u.minCoeff() < -1e-10 || w.minCoeff() < -1e-10)) continue;
        u = u.cwiseMax(0.0);
        w = w.cwiseMax(0.0);
        const Vector z = lcp.swapped ? Vector(w - u) : Vector(u - w);
        if (s > 0 && inf_norm(h_eval(sys, z) - sys.cHat) > 1e-9 * scale) continue;
        if (!insert_unique(seen, z, 1e-9 * scale)) continue;
        out.solutions.push_back({u, w, z});
    }
    return out;
}

} // namespace plabs
