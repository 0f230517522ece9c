#pragma once

// Named example instances and the planar Rosette sector evaluator.

#include "plabs/core.hpp"
#include "plabs/cpl.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace plabs {

/// n = 1, s = 2: z = (x - zeta, x + zeta), y = x - |z1| + |z2|.
[[nodiscard]] AbsNormalForm one_d_kink(double zeta);

/// F(x) = (|x1| - |x2|, |x1+x2|/2 - |x1-x2|/2) with the first two kinks
/// shifted by eps (eps = 0 is the even, homogeneous instance).
[[nodiscard]] AbsNormalForm schueth(double eps = 0.0);

/// S_ij = 0.9 sign(j - i), c_hat_i = sin(i) with 1-based i.
[[nodiscard]] CplSystem rump(int n);

/// Cyclic Toeplitz S with S(0, s-1) = S(i, i-1) = a and c_hat = e.
[[nodiscard]] CplSystem cyclic(int s, double a);
[[nodiscard]] AbsNormalForm cyclic_form(int s, double a);

/// S = 0.3 (I - e e^T / 9) in dimension 9, Gaussian c_hat.
[[nodiscard]] CplSystem reflector(std::uint64_t seed = 1);

/// T x + max(x, 0) = rhs with T = tridiag(-1, 2, -1) and rhs_i = sin(i).
[[nodiscard]] AbsNormalForm tridiag_max(int n);

enum class NormKind { Spectral, AbsRadius, RowSum };

/// Gaussian data with L and Y rescaled so that S hits `target` in the chosen
/// measure (||S||_2, rho(|S|) or ||S||_inf). A negative target keeps the raw data.
[[nodiscard]] AbsNormalForm random_form(int n, int s, std::uint64_t seed, double target,
                                        NormKind kind = NormKind::Spectral);
[[nodiscard]] CplSystem random_cpl(int s, std::uint64_t seed, double target, NormKind kind = NormKind::Spectral);

struct GalleryParams {
    std::optional<int> n;
    std::optional<int> s;
    std::optional<double> a;
    std::optional<double> zeta;
    std::optional<double> eps;
    std::optional<std::uint64_t> seed;
    std::optional<double> target;
    std::optional<std::string> norm;  // "2", "abs" or "inf"
};

using GalleryInstance = std::variant<AbsNormalForm, CplSystem>;

[[nodiscard]] std::vector<std::string> gallery_names();

/// Throws UnknownExample or BadParams.
[[nodiscard]] GalleryInstance generate(const std::string& name, const GalleryParams& params);

// --- Rosette ---------------------------------------------------------------

enum class RosetteClass { Injective, OpenNotInjective, SurjectiveNotOpen };

[[nodiscard]] const char* to_string(RosetteClass c) noexcept;

/// F(x) on the sector containing angle(x); throws BadAngles.
[[nodiscard]] Vector rosette_eval(const std::vector<double>& phi, const std::vector<double>& psi, const Vector& x);

/// A_i maps the ray at phi_{i-1} onto the ray at psi_{i-1} and likewise at phi_i.
[[nodiscard]] std::vector<Matrix> rosette_sectors(const std::vector<double>& phi, const std::vector<double>& psi);

struct RosetteReport {
    bool coherent = false;
    int winding = 0;
    bool monotone = false;
    RosetteClass classification = RosetteClass::Injective;
    std::vector<double> sectorDeterminants;
    /// Two distinct points with equal image, found by sampling.
    std::optional<std::pair<Vector, Vector>> collision;
};

/// Throws BadAngles, or Unclassified when no implication row applies.
[[nodiscard]] RosetteReport rosette_classify(const std::vector<double>& phi, const std::vector<double>& psi,
                                             std::uint64_t seed = 7, int samples = 200);

} // namespace plabs
