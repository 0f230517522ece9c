#pragma once

// Complementary system H(z) = z - S|z| = c_hat and the transfer maps between
// the original variables x and the switching variables z.

#include "plabs/analysis.hpp"
#include "plabs/core.hpp"

#include <vector>

namespace plabs {

enum class Provenance { Reduced, Direct };

struct CplSystem {
    Matrix S;
    Vector cHat;
    Provenance provenance = Provenance::Direct;

    [[nodiscard]] Eigen::Index s() const noexcept { return cHat.size(); }
    [[nodiscard]] double scale() const;

    /// Reduces a form with nonsingular J; throws SingularSmoothPart.
    static CplSystem from_form(const AbsNormalForm& form, const std::optional<Vector>& yTarget = std::nullopt);
    static CplSystem from_schur(const SchurData& sd);
};

/// Form with J = I, Z = I, L = 0, Y = -S, c = c_hat, b = 0, whose reduced
/// system is `sys` again.
[[nodiscard]] AbsNormalForm as_form(const CplSystem& sys);

/// z - S|z|.
[[nodiscard]] Vector h_eval(const CplSystem& sys, const Vector& z);

/// x = -J^{-1}(b + Y|z|).
[[nodiscard]] Vector x_from_z(const AbsNormalForm& form, const Vector& z);
/// Same map reusing a factorization of J.
[[nodiscard]] Vector x_from_z(const AbsNormalForm& form, const Eigen::PartialPivLU<Matrix>& luJ, const Vector& z);

/// Solves z - L|z| = c + Zx by forward substitution.
[[nodiscard]] Vector z_from_x(const AbsNormalForm& form, const Vector& x);

/// All solutions of H(z) = c_hat, enumerated over the 2^s definite sign patterns.
[[nodiscard]] std::vector<Vector> brute_force_solutions(const CplSystem& sys, int limit = kDefaultEnumLimit);

struct AveForm {
    Matrix A;
    Vector bHat;
};

/// A z - |z| = bHat with A = S^{-1}; throws SingularS.
[[nodiscard]] AveForm ave_form(const CplSystem& sys);

/// Appends v to `set` unless it is within `tol` of an existing member.
bool insert_unique(std::vector<Vector>& set, const Vector& v, double tol);

} // namespace plabs
