#pragma once

// Schur complement algebra and the solvability certificates built on it.

#include "plabs/core.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace plabs {

inline constexpr int kDefaultEnumLimit = 16;
inline constexpr int kDefaultGraphLimit = 14;

struct SchurData {
    Matrix S;      // L - Z J^{-1} Y
    Vector cHat;   // c - Z J^{-1} (b - yTarget)
    double detJ = 1.0;
    Eigen::PartialPivLU<Matrix> luJ;
};

/// Throws SingularSmoothPart when J is numerically singular.
[[nodiscard]] SchurData schur(const AbsNormalForm& form, const std::optional<Vector>& yTarget = std::nullopt);

/// det(J_sigma) = det(J) det(I - S Sigma).
[[nodiscard]] double piece_determinant(const SchurData& sd, const Signature& sigma);

/// J^{-1} - J^{-1} Y Sigma (I - S Sigma)^{-1} Z J^{-1}; throws SingularPiece.
[[nodiscard]] Matrix piece_inverse(const SchurData& sd, const AbsNormalForm& form, const Signature& sigma);

enum class NormP { One, Two, Inf };

[[nodiscard]] const char* to_string(NormP p) noexcept;
inline constexpr std::array<NormP, 3> kAllNorms{NormP::One, NormP::Two, NormP::Inf};

/// Induced matrix norm. p = 2 uses power iteration on M^T M.
[[nodiscard]] double operator_norm(const Matrix& M, NormP p);

/// Strong connectivity of the sparsity pattern (a 1x1 zero is reducible).
[[nodiscard]] bool is_irreducible(const Matrix& S);

/// rho(|S|).
[[nodiscard]] double abs_spectral_radius(const Matrix& S);

struct PerronScaling {
    double rhoAbs = 0.0;
    Vector d;        // positive scaling
    Matrix Stilde;   // D^{-1} S D
    /// |S| was reducible; d only bounds ||Stilde||_inf from above.
    bool approximate = false;
};

/// Equilibration by the right Perron vector of |S|. For reducible |S| the
/// scaling d = (mu I - |S|)^{-1} e with mu = rho(|S|) + margin is used, which
/// guarantees ||D^{-1} S D||_inf < mu.
[[nodiscard]] PerronScaling pf_equilibrate(const Matrix& S, std::optional<double> margin = std::nullopt);

/// Eigenvalues with numerically split multiple eigenvalues replaced by the
/// mean of their cluster.
[[nodiscard]] std::vector<std::complex<double>> clustered_eigenvalues(const Matrix& M);

/// Largest modulus of a real eigenvalue; 0 if all eigenvalues are complex.
[[nodiscard]] double real_spectral_radius(const Matrix& M);

/// max over Sigma in diag{-1,1}^s of the real spectral radius of Sigma S.
/// Throws TooLarge when s > limit.
[[nodiscard]] double sign_real_spectral_radius(const Matrix& S, int limit = kDefaultEnumLimit);

struct CoherenceResult {
    bool coherent = true;
    std::optional<Signature> witness;
};

/// det(I - S Sigma) > 0 for every definite Sigma, by exhaustive enumeration.
[[nodiscard]] CoherenceResult sigma_coherence(const Matrix& S, int limit = kDefaultEnumLimit);

/// Every square submatrix of [c, Z] of order min(s, n+1) is nonsingular.
[[nodiscard]] bool likq_sufficient(const Vector& c, const Matrix& Z);

struct SampledCoherence {
    int samples = 0;
    int positive = 0;
    int negative = 0;
    int singular = 0;
    /// All sampled piece determinants share one nonzero sign. Evidence only.
    [[nodiscard]] bool consistent() const noexcept {
        return singular == 0 && (positive == 0 || negative == 0);
    }
};

/// Probes det(J_sigma) at k random points resolved by polynomial escape.
[[nodiscard]] SampledCoherence sample_coherence(const AbsNormalForm& form, int samples, std::uint64_t seed);

struct Verdicts {
    bool newtonOpl = false;
    bool newtonCpl = false;
    bool signedGe = false;
    /// rho(|S|) == 1/2 with S irreducible: covered by the boundary case only.
    bool signedGeBoundary = false;
    bool blockSeidel = false;
    bool modulus = false;
    std::optional<bool> piecewiseNewtonCpl;
};

struct CertificateReport {
    bool schurAvailable = false;
    std::string schurError;
    int nu = 0;
    int s = 0;
    std::array<double, 3> normsL{};
    std::array<double, 3> normsS{};
    double seidel = 0.0;
    NormP seidelP = NormP::Inf;
    double rhoAbs = 0.0;
    bool irreducible = false;
    double equilibratedInf = 0.0;
    double smoothDominance = 0.0;  // min over p of ||S||_p and the equilibrated norm
    double rhoHat = 0.0;
    NormP rhoHatP = NormP::Inf;
    double rhoBar = 0.0;  // +inf when rhoHat >= 1 - ||L||_p for every p
    std::optional<double> signRealRadius;
    std::optional<bool> sigmaCoherent;
    std::optional<Signature> coherenceWitness;
    int limit = kDefaultEnumLimit;
    Verdicts verdicts;
};

[[nodiscard]] CertificateReport certificates(const AbsNormalForm& form, int limit = kDefaultEnumLimit,
                                             const std::optional<Vector>& yTarget = std::nullopt);

/// Certificates for a CPL given directly by S (L is taken as zero).
[[nodiscard]] CertificateReport certificates_for_schur(const Matrix& S, int limit = kDefaultEnumLimit);

} // namespace plabs
