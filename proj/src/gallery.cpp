#include "plabs/gallery.hpp"
#include "plabs/analysis.hpp"
#include "plabs/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace plabs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix gaussian(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix M(r, c);
    for (Eigen::Index j = 0; j < c; ++j) {
        for (Eigen::Index i = 0; i < r; ++i) M(i, j) = nd(rng);
    }
    return M;
}

double measure(const Matrix& S, NormKind kind) {
    switch (kind) {
        case NormKind::Spectral: return operator_norm(S, NormP::Two);
        case NormKind::AbsRadius: return abs_spectral_radius(S);
        case NormKind::RowSum: return operator_norm(S, NormP::Inf);
    }
    return 0.0;
}

template <typename T>
T need(const std::optional<T>& v, const char* what) {
    if (!v) throw Error(ErrorCode::BadParams, std::string("missing parameter --") + what);
    return *v;
}

NormKind norm_kind(const GalleryParams& p) {
    if (!p.norm || *p.norm == "2") return NormKind::Spectral;
    if (*p.norm == "abs") return NormKind::AbsRadius;
    if (*p.norm == "inf") return NormKind::RowSum;
    throw Error(ErrorCode::BadParams, "norm must be '2', 'abs' or 'inf'");
}

void check_angles(const std::vector<double>& phi, const std::vector<double>& psi) {
    if (phi.size() < 3 || phi.size() != psi.size()) {
        throw Error(ErrorCode::BadAngles, "phi and psi need equal length of at least 3");
    }
    if (std::abs(phi.front()) > 1e-12 || std::abs(phi.back() - kTwoPi) > 1e-12) {
        throw Error(ErrorCode::BadAngles, "phi must run from 0 to 2 pi");
    }
    for (std::size_t i = 1; i < phi.size(); ++i) {
        const double dphi = phi[i] - phi[i - 1];
        const double dpsi = psi[i] - psi[i - 1];
        if (!(dphi > 0.0) || !(dphi < std::numbers::pi)) throw Error(ErrorCode::BadAngles, "phi increments must lie in (0, pi)");
        if (!(std::abs(dpsi) < std::numbers::pi)) throw Error(ErrorCode::BadAngles, "psi increments must be below pi");
        if (std::abs(std::sin(dpsi)) < 1e-12) throw Error(ErrorCode::BadAngles, "psi increments must be nonzero");
    }
    const double turns = (psi.back() - psi.front()) / kTwoPi;
    if (std::abs(turns - std::round(turns)) > 1e-9) {
        throw Error(ErrorCode::BadAngles, "psi must close up after a whole number of turns");
    }
}

Vector ray(double angle) {
    Vector v(2);
    v << std::cos(angle), std::sin(angle);
    return v;
}

double angle_of(const Vector& x) {
    double a = std::atan2(x[1], x[0]);
    if (a < 0.0) a += kTwoPi;
    return a;
}

// Lowest sector index k (0-based) with phi[k] <= angle <= phi[k+1].
std::size_t sector_of(const std::vector<double>& phi, double angle) {
    for (std::size_t k = 0; k + 1 < phi.size(); ++k) {
        if (angle <= phi[k + 1]) return k;
    }
    return phi.size() - 2;
}

} // namespace

AbsNormalForm one_d_kink(double zeta) {
    AbsNormalForm f = AbsNormalForm::zeros(1, 2, 1);
    f.c << -zeta, zeta;
    f.Z << 1.0, 1.0;
    f.J << 1.0;
    f.Y << -1.0, 1.0;
    return f;
}

AbsNormalForm schueth(double eps) {
    AbsNormalForm f = AbsNormalForm::zeros(2, 4, 2);
    f.c << eps, eps, 0.0, 0.0;
    f.Z << 1.0, 0.0,
           0.0, 1.0,
           1.0, 1.0,
           1.0, -1.0;
    f.Y << 1.0, -1.0, 0.0, 0.0,
           0.0, 0.0, 0.5, -0.5;
    return f;
}

CplSystem rump(int n) {
    if (n < 1) throw Error(ErrorCode::BadParams, "rump needs n >= 1");
    CplSystem sys;
    sys.S = Matrix::Zero(n, n);
    sys.cHat.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) sys.S(i, j) = 0.9 * sign_of(static_cast<double>(j - i));
        sys.cHat[i] = std::sin(static_cast<double>(i + 1));
    }
    return sys;
}

CplSystem cyclic(int s, double a) {
    if (s < 2) throw Error(ErrorCode::BadParams, "cyclic needs s >= 2");
    CplSystem sys;
    sys.S = Matrix::Zero(s, s);
    sys.S(0, s - 1) = a;
    for (int i = 1; i < s; ++i) sys.S(i, i - 1) = a;
    sys.cHat = Vector::Ones(s);
    return sys;
}

AbsNormalForm cyclic_form(int s, double a) {
    return as_form(cyclic(s, a));
}

CplSystem reflector(std::uint64_t seed) {
    CplSystem sys;
    sys.S = 0.3 * (Matrix::Identity(9, 9) - Matrix::Ones(9, 9) / 9.0);
    std::mt19937_64 rng(seed);
    sys.cHat = gaussian(rng, 9, 1);
    return sys;
}

AbsNormalForm tridiag_max(int n) {
    if (n < 1) throw Error(ErrorCode::BadParams, "tridiag_max needs n >= 1");
    AbsNormalForm f = AbsNormalForm::zeros(n, n, n);
    f.Z.setIdentity();
    for (int i = 0; i < n; ++i) {
        f.J(i, i) = 2.5;
        if (i > 0) f.J(i, i - 1) = -1.0;
        if (i + 1 < n) f.J(i, i + 1) = -1.0;
        f.Y(i, i) = 0.5;
        f.b[i] = -std::sin(static_cast<double>(i + 1));
    }
    return f;
}

AbsNormalForm random_form(int n, int s, std::uint64_t seed, double target, NormKind kind) {
    if (n < 1 || s < 0) throw Error(ErrorCode::BadParams, "random needs n >= 1, s >= 0");
    std::mt19937_64 rng(seed);
    AbsNormalForm f = AbsNormalForm::zeros(n, s, n);
    f.c = gaussian(rng, s, 1);
    f.b = gaussian(rng, n, 1);
    f.Z = gaussian(rng, s, n);
    f.L = gaussian(rng, s, s).triangularView<Eigen::StrictlyLower>();
    f.J = gaussian(rng, n, n) + 2.0 * std::sqrt(static_cast<double>(n)) * Matrix::Identity(n, n);
    f.Y = gaussian(rng, n, s);
    if (s > 0 && target >= 0.0) {
        // S is linear in (L, Y) jointly.
        const double current = measure(schur(f).S, kind);
        if (current > 0.0) {
            f.L *= target / current;
            f.Y *= target / current;
        }
    }
    return f;
}

CplSystem random_cpl(int s, std::uint64_t seed, double target, NormKind kind) {
    if (s < 1) throw Error(ErrorCode::BadParams, "random_cpl needs s >= 1");
    std::mt19937_64 rng(seed);
    CplSystem sys;
    sys.S = gaussian(rng, s, s);
    sys.cHat = gaussian(rng, s, 1);
    const double current = measure(sys.S, kind);
    if (current > 0.0 && target >= 0.0) sys.S *= target / current;
    return sys;
}

std::vector<std::string> gallery_names() {
    return {"one_d_kink", "schueth", "rump", "cyclic", "cyclic_form", "reflector", "tridiag_max", "random", "random_cpl"};
}

GalleryInstance generate(const std::string& name, const GalleryParams& p) {
    if (name == "one_d_kink") return one_d_kink(p.zeta.value_or(1.0));
    if (name == "schueth") return schueth(p.eps.value_or(0.0));
    if (name == "rump") return rump(need(p.n, "n"));
    if (name == "cyclic") return cyclic(need(p.s, "s"), need(p.a, "a"));
    if (name == "cyclic_form") return cyclic_form(need(p.s, "s"), need(p.a, "a"));
    if (name == "reflector") return reflector(p.seed.value_or(1));
    if (name == "tridiag_max") return tridiag_max(need(p.n, "n"));
    if (name == "random") {
        return random_form(need(p.n, "n"), p.s.value_or(need(p.n, "n")), p.seed.value_or(1), p.target.value_or(0.5),
                           norm_kind(p));
    }
    if (name == "random_cpl") return random_cpl(need(p.s, "s"), p.seed.value_or(1), p.target.value_or(0.5), norm_kind(p));
    throw Error(ErrorCode::UnknownExample, "unknown example '" + name + "'");
}

// --- Rosette ---------------------------------------------------------------

const char* to_string(RosetteClass c) noexcept {
    switch (c) {
        case RosetteClass::Injective: return "Injective";
        case RosetteClass::OpenNotInjective: return "OpenNotInjective";
        case RosetteClass::SurjectiveNotOpen: return "SurjectiveNotOpen";
    }
    return "?";
}

std::vector<Matrix> rosette_sectors(const std::vector<double>& phi, const std::vector<double>& psi) {
    check_angles(phi, psi);
    std::vector<Matrix> out;
    for (std::size_t k = 0; k + 1 < phi.size(); ++k) {
        Matrix P(2, 2), Q(2, 2);
        P << ray(phi[k]), ray(phi[k + 1]);
        Q << ray(psi[k]), ray(psi[k + 1]);
        out.push_back(Q * P.inverse());
    }
    return out;
}

Vector rosette_eval(const std::vector<double>& phi, const std::vector<double>& psi, const Vector& x) {
    const std::vector<Matrix> A = rosette_sectors(phi, psi);
    if (x.size() != 2) throw Error(ErrorCode::DimensionMismatch, "rosette maps act on R^2");
    if (x.isZero(0.0)) return Vector::Zero(2);
    return A[sector_of(phi, angle_of(x))] * x;
}

RosetteReport rosette_classify(const std::vector<double>& phi, const std::vector<double>& psi, std::uint64_t seed,
                               int samples) {
    const std::vector<Matrix> A = rosette_sectors(phi, psi);
    RosetteReport r;
    r.winding = static_cast<int>(std::lround((psi.back() - psi.front()) / kTwoPi));
    r.monotone = true;
    for (std::size_t i = 1; i < psi.size(); ++i) {
        if (!(psi[i] > psi[i - 1])) r.monotone = false;
    }
    int positive = 0, negative = 0;
    for (const Matrix& Ai : A) {
        const double det = Ai.determinant();
        r.sectorDeterminants.push_back(det);
        if (det > 0.0) ++positive;
        if (det < 0.0) ++negative;
    }
    r.coherent = (positive == static_cast<int>(A.size())) || (negative == static_cast<int>(A.size()));

    if (r.monotone && r.winding == 1) {
        r.classification = RosetteClass::Injective;
    } else if (r.monotone && r.winding > 1) {
        r.classification = RosetteClass::OpenNotInjective;
    } else if (!r.monotone && r.winding > 0) {
        r.classification = RosetteClass::SurjectiveNotOpen;
    } else {
        throw Error(ErrorCode::Unclassified, "no implication row applies to these angles");
    }

    // Collision search: invert each sector map at the image of a random point.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    for (int k = 0; k < samples && !r.collision; ++k) {
        const Vector x1 = ray(angle(rng));
        const Vector y = rosette_eval(phi, psi, x1);
        for (std::size_t j = 0; j < A.size(); ++j) {
            const Vector x2 = A[j].inverse() * y;
            const double t = angle_of(x2);
            if (t < phi[j] - 1e-12 || t > phi[j + 1] + 1e-12) continue;
            if ((x2 - x1).norm() <= 1e-6) continue;
            if ((rosette_eval(phi, psi, x2) - y).norm() <= 1e-10 * (1.0 + y.norm())) {
                r.collision = std::make_pair(x1, x2);
                break;
            }
        }
    }
    return r;
}

} // namespace plabs
