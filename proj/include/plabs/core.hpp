#pragma once

// Abs-normal representation of continuous piecewise linear maps
//
//     z = c + Z x + L |z|
//     y = b + J x + Y |z|
//
// with L strictly lower triangular, so that z can be computed one component
// at a time by forward substitution.

#include "plabs/linalg.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace plabs {

/// Sign vector sigma in {-1, 0, +1}^s. The diagonal matrix diag(sigma) is
/// never stored; use `diagonal()` when a dense form is needed.
class Signature {
public:
    Signature() = default;
    explicit Signature(std::vector<int> entries);

    /// sign(z) componentwise with sign(0) = 0.
    static Signature of(const Vector& z);
    /// bit i set <=> sigma_i = +1, otherwise -1.
    static Signature from_mask(std::uint64_t mask, std::size_t s);
    /// Parses "+-0+" style strings.
    static Signature parse(const std::string& text);

    [[nodiscard]] std::size_t size() const noexcept { return sigma_.size(); }
    [[nodiscard]] int operator[](std::size_t i) const { return sigma_[i]; }
    [[nodiscard]] const std::vector<int>& entries() const noexcept { return sigma_; }

    [[nodiscard]] bool definite() const noexcept;
    /// Solver convention: zero entries are mapped to +1.
    [[nodiscard]] Signature resolved() const;
    /// Requires s <= 64; zero entries count as +1.
    [[nodiscard]] std::uint64_t mask() const;

    [[nodiscard]] Vector as_vector() const;
    [[nodiscard]] Matrix diagonal() const;
    [[nodiscard]] std::string str() const;

    friend bool operator==(const Signature&, const Signature&) = default;

private:
    std::vector<int> sigma_;
};

struct AbsNormalForm {
    Vector c;   // s
    Vector b;   // m
    Matrix Z;   // s x n
    Matrix L;   // s x s, strictly lower triangular
    Matrix J;   // m x n
    Matrix Y;   // m x s

    [[nodiscard]] Eigen::Index n() const noexcept { return Z.cols() > 0 ? Z.cols() : J.cols(); }
    [[nodiscard]] Eigen::Index s() const noexcept { return c.size(); }
    [[nodiscard]] Eigen::Index m() const noexcept { return b.size(); }

    /// Empty form with zero-filled data of the given dimensions.
    static AbsNormalForm zeros(Eigen::Index n, Eigen::Index s, Eigen::Index m);

    /// Magnitude reference for relative tolerances: 1 + largest data entry.
    [[nodiscard]] double scale() const;
};

struct EvalRecord {
    Vector x;
    Vector z;
    Vector zAbs;
    Vector y;
    Signature sigma;
};

struct PieceJacobian {
    Signature sigma;
    Matrix matrix;
};

struct ValidationReport {
    bool ok = true;
    int nu = 0;
    std::vector<std::string> messages;
};

[[nodiscard]] ValidationReport validate(const AbsNormalForm& form);

/// Switching depth: length of the longest dependency chain among switches,
/// computed on the sparsity pattern of L.
[[nodiscard]] int switching_depth(const Matrix& L);

[[nodiscard]] EvalRecord evaluate(const AbsNormalForm& form, const Vector& x);

/// (I - L Sigma)^{-1} by forward substitution.
[[nodiscard]] Matrix unit_lower_inverse(const Matrix& L, const Signature& sigma);
/// (I - L Sigma)^{-1} as the finite sum of powers (L Sigma)^k, k < nu.
[[nodiscard]] Matrix neumann_inverse(const Matrix& L, const Signature& sigma, int nu);

/// J + Y Sigma (I - L Sigma)^{-1} Z. Zero entries of sigma enter as zero.
[[nodiscard]] PieceJacobian piece_jacobian(const AbsNormalForm& form, const Signature& sigma);

/// Affine constant of the piece: y = offset + J_sigma x on P_sigma.
[[nodiscard]] Vector piece_offset(const AbsNormalForm& form, const Signature& sigma);

struct EscapeResult {
    Signature sigma;
    PieceJacobian jacobian;
    /// Some z_i vanishes identically along the escape path.
    bool degenerate = false;
    /// Columns are the path basis vectors e_1..e_n.
    Matrix basis;
};

/// Resolves the signature at x along x(t) = x + sum_i e_i t^i, with e_1 = d
/// when a direction is supplied.
[[nodiscard]] EscapeResult polynomial_escape(const AbsNormalForm& form, const Vector& x,
                                             const std::optional<Vector>& direction = std::nullopt);

/// Default shift 1 + ||J||_inf.
[[nodiscard]] double default_shift(const AbsNormalForm& form);

/// Moves alpha*I into the smooth part via v = ||v| + v| - |v|, adding two
/// switches per coordinate. The represented function is unchanged.
[[nodiscard]] AbsNormalForm regularize_smooth_part(const AbsNormalForm& form, double alpha);
[[nodiscard]] AbsNormalForm regularize_smooth_part(const AbsNormalForm& form);

} // namespace plabs
