#pragma once

// Fixed point, Newton and elimination solvers for F(x) = 0 and H(z) = c_hat.

#include "plabs/core.hpp"
#include "plabs/cpl.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace plabs {

enum class SolveStatus { Converged, Cycled, Diverged, MaxIter };

[[nodiscard]] const char* to_string(SolveStatus status) noexcept;

struct SolveOptions {
    double tol = 1e-10;
    /// Negative selects the default 10 s + 100.
    int maxit = -1;
    /// Number of leading iterates kept in the trace.
    std::size_t retain = 10000;
    /// newton_opl: resolve signatures by polynomial escape.
    bool useEscape = false;
    /// signed_ge: eliminate on the Perron-equilibrated system.
    bool equilibrate = false;
};

struct SolveTrace {
    std::vector<Vector> iterates;
    /// Entry k belongs to iterate k; length iterations + 1.
    std::vector<double> residualNorms;
    std::vector<Signature> sigmaHistory;
    SolveStatus status = SolveStatus::MaxIter;
    bool exact = false;   // Converged{exact} vs Converged{toTol}
    int period = 0;       // Cycled{period}
    int iterations = 0;
    std::uint64_t flopCount = 0;
    /// Final iterate (z for CPL methods, x for newton_opl).
    Vector solution;
    /// Root of F recovered from z (block_seidel).
    std::optional<Vector> x;
    /// Infinity norm of F at `x`, or of H - c_hat at `solution` for CPL methods.
    double finalResidual = 0.0;

    [[nodiscard]] bool converged() const noexcept { return status == SolveStatus::Converged; }
    [[nodiscard]] std::string status_text() const;
};

/// b replaced by b - y, so that F(x) = y becomes a root problem.
[[nodiscard]] AbsNormalForm with_target(const AbsNormalForm& form, const Vector& y);

/// z+ = c_hat + S|z|.
[[nodiscard]] SolveTrace modulus(const CplSystem& sys, const Vector& z0, const SolveOptions& opt = {});

/// z+ = z_from_x(x_from_z(z)); throws SingularSmoothPart.
[[nodiscard]] SolveTrace block_seidel(const AbsNormalForm& form, const Vector& z0, const SolveOptions& opt = {});

/// z+ = (I - S Sigma(z))^{-1} c_hat; throws SingularPiece.
[[nodiscard]] SolveTrace newton_cpl(const CplSystem& sys, const Vector& z0, const SolveOptions& opt = {});

/// x+ = x - J_sigma^{-1} F(x); throws SingularPiece.
[[nodiscard]] SolveTrace newton_opl(const AbsNormalForm& form, const Vector& x0, const SolveOptions& opt = {});

/// Direct elimination fixing one switching sign per stage; throws PivotBreakdown.
[[nodiscard]] SolveTrace signed_ge(const CplSystem& sys, const SolveOptions& opt = {});

} // namespace plabs
