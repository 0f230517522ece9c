#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>

namespace plabs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest absolute entry, 0 for empty objects.
template <typename Derived>
[[nodiscard]] double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
[[nodiscard]] double inf_norm(const Eigen::MatrixBase<Derived>& v) {
    return max_abs(v);
}

template <typename Derived>
[[nodiscard]] bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    return m.size() == 0 || m.allFinite();
}

/// sign(0) = 0.
[[nodiscard]] inline int sign_of(double v) noexcept {
    return (v > 0.0) - (v < 0.0);
}

// Reciprocal condition estimates below this are treated as singular.
inline constexpr double kSingularRcond = 1e-14;

/// Eigen's rcond estimate can miss a vanishing last pivot (it reports 1 for
/// diag(2, 0)), so the pivots of U are checked as well.
[[nodiscard]] inline bool lu_singular(const Eigen::PartialPivLU<Matrix>& lu) {
    const Matrix& LU = lu.matrixLU();
    if (LU.rows() == 0) return false;
    const Matrix U = LU.triangularView<Eigen::Upper>();
    const double big = U.cwiseAbs().maxCoeff();
    if (!(LU.diagonal().cwiseAbs().minCoeff() > kSingularRcond * big)) return true;
    return !(lu.rcond() > kSingularRcond);
}

} // namespace plabs
