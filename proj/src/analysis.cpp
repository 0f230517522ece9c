#include "plabs/analysis.hpp"
#include "plabs/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <vector>

namespace plabs {

namespace {

void require_enumerable(Eigen::Index s, int limit) {
    if (s > limit || s > 62) {
        throw Error(ErrorCode::TooLarge, "enumeration over 2^" + std::to_string(s) +
                                             " sign patterns exceeds limit " + std::to_string(limit));
    }
}

// Tarjan's algorithm over the nonzero pattern; returns the component id per node.
std::vector<int> strong_components(const Matrix& S, int& count) {
    const auto s = static_cast<int>(S.rows());
    std::vector<int> index(s, -1), low(s, 0), comp(s, -1), stack;
    std::vector<bool> onStack(s, false);
    int next = 0;
    count = 0;
    struct Frame {
        int v;
        int child;
    };
    for (int root = 0; root < s; ++root) {
        if (index[root] >= 0) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = next++;
        stack.push_back(root);
        onStack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.child < s) {
                const int w = f.child++;
                if (S(f.v, w) == 0.0) continue;
                if (index[w] < 0) {
                    index[w] = low[w] = next++;
                    stack.push_back(w);
                    onStack[w] = true;
                    call.push_back({w, 0});
                } else if (onStack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            const int v = f.v;
            if (low[v] == index[v]) {
                int w = -1;
                do {
                    w = stack.back();
                    stack.pop_back();
                    onStack[w] = false;
                    comp[w] = count;
                } while (w != v);
                ++count;
            }
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
        }
    }
    return comp;
}

struct PowerResult {
    double rho = 0.0;
    Vector v;
    bool converged = false;
};

// Shifted power iteration for a nonnegative irreducible matrix with
// Collatz-Wielandt bracketing: min_i (Av)_i/v_i <= rho <= max_i (Av)_i/v_i.
PowerResult perron_power(const Matrix& A, int maxIter = 200000, double relTol = 1e-13) {
    const Eigen::Index s = A.rows();
    PowerResult out;
    out.v = Vector::Ones(s);
    const double shift = 0.25 * A.rowwise().sum().maxCoeff();
    for (int it = 0; it < maxIter; ++it) {
        const Vector Av = A * out.v;
        const Vector ratio = Av.cwiseQuotient(out.v);
        const double hi = ratio.maxCoeff();
        const double lo = ratio.minCoeff();
        out.rho = hi;
        if (hi - lo <= relTol * hi) {
            out.converged = true;
            return out;
        }
        Vector next = Av + shift * out.v;
        next /= next.maxCoeff();
        if (!(next.minCoeff() > 0.0)) break;
        out.v = next;
    }
    return out;
}

double block_perron_root(const Matrix& A) {
    if (A.rows() == 1) return A(0, 0);
    PowerResult pr = perron_power(A);
    if (pr.converged) return pr.rho;
    Eigen::EigenSolver<Matrix> es(A, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

template <typename Visit>
void for_each_combination(int n, int k, Visit&& visit) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        if (!visit(idx)) return;
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

const char* to_string(NormP p) noexcept {
    switch (p) {
        case NormP::One: return "1";
        case NormP::Two: return "2";
        case NormP::Inf: return "inf";
    }
    return "?";
}

SchurData schur(const AbsNormalForm& form, const std::optional<Vector>& yTarget) {
    const Eigen::Index n = form.n();
    if (form.m() != n || form.J.rows() != n || form.J.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "Schur complement requires m = n");
    }
    SchurData sd;
    sd.luJ.compute(form.J);
    if (n > 0 && lu_singular(sd.luJ)) {
        throw Error(ErrorCode::SingularSmoothPart, "smooth part J is singular; regularize it first");
    }
    sd.detJ = n > 0 ? sd.luJ.determinant() : 1.0;
    Vector rhs = form.b;
    if (yTarget) {
        if (yTarget->size() != n) throw Error(ErrorCode::DimensionMismatch, "target has wrong dimension");
        rhs -= *yTarget;
    }
    if (n > 0) {
        sd.S = form.L - form.Z * sd.luJ.solve(form.Y);
        sd.cHat = form.c - form.Z * sd.luJ.solve(rhs);
    } else {
        sd.S = form.L;
        sd.cHat = form.c;
    }
    return sd;
}

double piece_determinant(const SchurData& sd, const Signature& sigma) {
    const Eigen::Index s = sd.S.rows();
    if (s == 0) return sd.detJ;
    const Matrix A = Matrix::Identity(s, s) - sd.S * sigma.diagonal();
    return sd.detJ * A.partialPivLu().determinant();
}

Matrix piece_inverse(const SchurData& sd, const AbsNormalForm& form, const Signature& sigma) {
    const Eigen::Index n = form.n();
    const Eigen::Index s = sd.S.rows();
    const Matrix Jinv = sd.luJ.solve(Matrix::Identity(n, n));
    if (s == 0) return Jinv;
    const Matrix A = Matrix::Identity(s, s) - sd.S * sigma.diagonal();
    Eigen::PartialPivLU<Matrix> lu(A);
    if (lu_singular(lu)) {
        throw Error(ErrorCode::SingularPiece, "I - S Sigma is singular");
    }
    return Jinv - Jinv * form.Y * sigma.diagonal() * lu.solve(form.Z * Jinv);
}

double operator_norm(const Matrix& M, NormP p) {
    if (M.size() == 0) return 0.0;
    switch (p) {
        case NormP::One: return M.cwiseAbs().colwise().sum().maxCoeff();
        case NormP::Inf: return M.cwiseAbs().rowwise().sum().maxCoeff();
        case NormP::Two: break;
    }
    // Deterministic start that is not orthogonal to structured null spaces.
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    Vector v(M.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 10000; ++it) {
        const Vector w = M.transpose() * (M * v);
        lambda = v.dot(w);
        const double wn = w.norm();
        if (wn == 0.0) return 0.0;
        if ((w - lambda * v).norm() <= 1e-12 * lambda) break;
        v = w / wn;
    }
    return std::sqrt(std::max(lambda, 0.0));
}

bool is_irreducible(const Matrix& S) {
    if (S.rows() == 0) return false;
    if (S.rows() == 1) return S(0, 0) != 0.0;
    int count = 0;
    (void)strong_components(S, count);
    return count == 1;
}

double abs_spectral_radius(const Matrix& S) {
    if (S.rows() == 0) return 0.0;
    const Matrix A = S.cwiseAbs();
    int count = 0;
    const std::vector<int> comp = strong_components(A, count);
    double rho = 0.0;
    for (int k = 0; k < count; ++k) {
        std::vector<Eigen::Index> members;
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            if (comp[static_cast<std::size_t>(i)] == k) members.push_back(i);
        }
        const Matrix block = A(members, members);
        rho = std::max(rho, block_perron_root(block));
    }
    return rho;
}

PerronScaling pf_equilibrate(const Matrix& S, std::optional<double> margin) {
    const Eigen::Index s = S.rows();
    if (s < 1) throw Error(ErrorCode::InvalidArgument, "equilibration requires s >= 1");
    const Matrix A = S.cwiseAbs();
    PerronScaling out;

    if (is_irreducible(S)) {
        PowerResult pr = perron_power(A);
        if (pr.converged) {
            out.rhoAbs = pr.rho;
            out.d = pr.v;
            out.Stilde = out.d.cwiseInverse().asDiagonal() * S * out.d.asDiagonal();
            return out;
        }
    }

    // Resolvent scaling: |S| d = mu d - e < mu d componentwise.
    out.approximate = true;
    out.rhoAbs = abs_spectral_radius(S);
    double delta = margin.value_or(1e-12 * A.maxCoeff() + 1e-300);
    // Tarjan numbers a component only after everything it reaches, so
    // increasing ids give a block forward substitution in which all
    // coupling terms are added, never cancelled.
    int count = 0;
    const std::vector<int> comp = strong_components(S, count);
    std::vector<std::vector<Eigen::Index>> blocks(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < s; ++i) blocks[comp[i]].push_back(i);
    auto resolvent = [&](double mu) {
        Vector d = Vector::Zero(s);
        for (const auto& blk : blocks) {
            const auto k = static_cast<Eigen::Index>(blk.size());
            Vector rhs = Vector::Ones(k);
            Matrix R(k, k);
            for (Eigen::Index a = 0; a < k; ++a) {
                for (Eigen::Index j = 0; j < s; ++j) {
                    if (comp[j] != comp[blk[a]]) rhs[a] += A(blk[a], j) * d[j];
                }
                for (Eigen::Index b = 0; b < k; ++b) R(a, b) = (a == b ? mu : 0.0) - A(blk[a], blk[b]);
            }
            const Vector db = k == 1 ? Vector(rhs / R(0, 0)) : Vector(R.partialPivLu().solve(rhs));
            for (Eigen::Index a = 0; a < k; ++a) d[blk[a]] = db[a];
        }
        return d;
    };
    for (int attempt = 0; attempt < 400; ++attempt) {
        const double mu = out.rhoAbs + delta;
        Vector d = resolvent(mu);
        if (d.allFinite() && d.minCoeff() > 0.0) {
            d /= d.maxCoeff();
            if (d.minCoeff() > 0.0) {
                out.d = d;
                out.Stilde = out.d.cwiseInverse().asDiagonal() * S * out.d.asDiagonal();
                return out;
            }
        }
        delta *= 10.0;
    }
    out.d = Vector::Ones(s);
    out.Stilde = S;
    return out;
}

std::vector<std::complex<double>> clustered_eigenvalues(const Matrix& M) {
    const Eigen::Index n = M.rows();
    Eigen::EigenSolver<Matrix> es(M, false);
    const Eigen::VectorXcd ev = es.eigenvalues();
    const double normM = operator_norm(M, NormP::Inf);
    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<bool> left(static_cast<std::size_t>(n), true);
    std::vector<std::complex<double>> out;

    // Perturbed Jordan blocks scatter an eigenvalue of multiplicity k over a
    // radius of order eps^(1/k); the cluster mean is well conditioned.
    for (double tol : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) {
        std::vector<int> parent(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
        auto find = [&](int i) {
            while (parent[i] != i) i = parent[i] = parent[parent[i]];
            return i;
        };
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                if (left[i] && left[j] && std::abs(ev[i] - ev[j]) <= tol * (1.0 + std::abs(ev[i]))) {
                    parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
                }
            }
        }
        for (Eigen::Index root = 0; root < n; ++root) {
            if (!left[root] || find(static_cast<int>(root)) != root) continue;
            std::vector<Eigen::Index> members;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (left[i] && find(static_cast<int>(i)) == root) members.push_back(i);
            }
            if (members.size() < 2) continue;
            std::complex<double> mu = 0.0;
            for (Eigen::Index i : members) mu += ev[i];
            mu /= static_cast<double>(members.size());
            double spread = 0.0;
            for (Eigen::Index i : members) spread = std::max(spread, std::abs(ev[i] - mu));
            const double k = static_cast<double>(members.size());
            if (spread > 100.0 * std::pow(eps * (1.0 + normM), 1.0 / k) * (1.0 + std::abs(mu))) continue;
            const Eigen::MatrixXcd shiftedM = M.cast<std::complex<double>>() - mu * Eigen::MatrixXcd::Identity(n, n);
            const double smin = Eigen::JacobiSVD<Eigen::MatrixXcd>(shiftedM).singularValues().minCoeff();
            if (smin > 1e-8 * (1.0 + normM)) continue;
            for (Eigen::Index i : members) {
                left[i] = false;
                out.push_back(mu);
            }
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (left[i]) out.push_back(ev[i]);
    }
    return out;
}

double real_spectral_radius(const Matrix& M) {
    if (M.rows() == 0) return 0.0;
    if (M.rows() == 1) return std::abs(M(0, 0));
    double rho = 0.0;
    for (const auto& lambda : clustered_eigenvalues(M)) {
        const double modulus = std::abs(lambda);
        if (std::abs(lambda.imag()) <= 1e-9 * (1.0 + modulus)) rho = std::max(rho, modulus);
    }
    return rho;
}

double sign_real_spectral_radius(const Matrix& S, int limit) {
    const Eigen::Index s = S.rows();
    require_enumerable(s, limit);
    if (s == 0) return 0.0;
    // Sigma and -Sigma give negated spectra, so sigma_1 = +1 suffices.
    const std::uint64_t count = std::uint64_t{1} << (s - 1);
    double rho = 0.0;
    Matrix SigmaS(s, s);
    for (std::uint64_t half = 0; half < count; ++half) {
        const std::uint64_t mask = (half << 1) | 1U;
        for (Eigen::Index i = 0; i < s; ++i) {
            const double sgn = ((mask >> i) & 1U) ? 1.0 : -1.0;
            SigmaS.row(i) = sgn * S.row(i);
        }
        rho = std::max(rho, real_spectral_radius(SigmaS));
    }
    return rho;
}

CoherenceResult sigma_coherence(const Matrix& S, int limit) {
    const Eigen::Index s = S.rows();
    require_enumerable(s, limit);
    CoherenceResult out;
    const std::uint64_t count = std::uint64_t{1} << s;
    const Matrix I = Matrix::Identity(s, s);
    Matrix A(s, s);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        for (Eigen::Index j = 0; j < s; ++j) {
            const double sgn = ((mask >> j) & 1U) ? 1.0 : -1.0;
            A.col(j) = I.col(j) - sgn * S.col(j);
        }
        const double det = s == 0 ? 1.0 : A.partialPivLu().determinant();
        if (!(det > 0.0)) {
            out.coherent = false;
            out.witness = Signature::from_mask(mask, static_cast<std::size_t>(s));
            return out;
        }
    }
    return out;
}

bool likq_sufficient(const Vector& c, const Matrix& Z) {
    const auto s = static_cast<int>(Z.rows());
    const auto cols = static_cast<int>(Z.cols()) + 1;
    if (c.size() != s) throw Error(ErrorCode::DimensionMismatch, "c and Z disagree on s");
    if (s == 0) return true;
    const int k = std::min(s, cols);
    if (binomial(s, k) * binomial(cols, k) > 1e6) {
        throw Error(ErrorCode::TooLarge, "too many square submatrices for the LIKQ test");
    }
    Matrix CZ(s, cols);
    CZ.col(0) = c;
    CZ.rightCols(cols - 1) = Z;
    const double scale = std::pow(std::max(1.0, max_abs(CZ)), static_cast<double>(k));
    bool ok = true;
    std::vector<Eigen::Index> rowSel(static_cast<std::size_t>(k)), colSel(static_cast<std::size_t>(k));
    for_each_combination(s, k, [&](const std::vector<int>& rows) {
        for (int i = 0; i < k; ++i) rowSel[i] = rows[i];
        for_each_combination(cols, k, [&](const std::vector<int>& cs) {
            for (int i = 0; i < k; ++i) colSel[i] = cs[i];
            const Matrix sub = CZ(rowSel, colSel);
            if (!(std::abs(sub.fullPivLu().determinant()) > 1e-12 * scale)) ok = false;
            return ok;
        });
        return ok;
    });
    return ok;
}

SampledCoherence sample_coherence(const AbsNormalForm& form, int samples, std::uint64_t seed) {
    const Eigen::Index n = form.n();
    if (form.m() != n) throw Error(ErrorCode::DimensionMismatch, "coherence requires m = n");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double spread = 1.0 + inf_norm(form.c) + inf_norm(form.b);
    SampledCoherence out;
    for (int k = 0; k < samples; ++k) {
        Vector x(n), d(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            x[i] = spread * normal(rng);
            d[i] = normal(rng);
        }
        // Every other probe starts at the origin, where homogeneous pieces meet.
        if (k % 2 == 1) x.setZero();
        const EscapeResult esc = polynomial_escape(form, x, d);
        const double det = n > 0 ? esc.jacobian.matrix.partialPivLu().determinant() : 1.0;
        const double tol = 1e-12 * std::pow(form.scale(), static_cast<double>(n));
        ++out.samples;
        if (std::abs(det) <= tol) {
            ++out.singular;
        } else if (det > 0.0) {
            ++out.positive;
        } else {
            ++out.negative;
        }
    }
    return out;
}

namespace {

void fill_schur_certificates(CertificateReport& r, const Matrix& S, const Matrix& L, int limit) {
    const Eigen::Index s = S.rows();
    for (std::size_t k = 0; k < kAllNorms.size(); ++k) r.normsS[k] = operator_norm(S, kAllNorms[k]);

    const Matrix SminusL = S - L;
    r.seidel = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < kAllNorms.size(); ++k) {
        const double v = operator_norm(SminusL, kAllNorms[k]) + r.normsL[k];
        if (v < r.seidel) {
            r.seidel = v;
            r.seidelP = kAllNorms[k];
        }
    }

    r.irreducible = is_irreducible(S);
    if (s > 0) {
        const PerronScaling ps = pf_equilibrate(S);
        r.rhoAbs = ps.rhoAbs;
        r.equilibratedInf = operator_norm(ps.Stilde, NormP::Inf);
    }
    r.smoothDominance = std::min({r.normsS[0], r.normsS[1], r.normsS[2], r.equilibratedInf});

    if (s <= limit) {
        r.signRealRadius = sign_real_spectral_radius(S, limit);
        const CoherenceResult coh = sigma_coherence(S, limit);
        r.sigmaCoherent = coh.coherent;
        r.coherenceWitness = coh.witness;
        r.verdicts.piecewiseNewtonCpl = *r.signRealRadius < 1.0;
    }

    const double minS = std::min({r.normsS[0], r.normsS[1], r.normsS[2]});
    r.verdicts.newtonCpl = minS < 1.0 / 3.0;
    r.verdicts.signedGe = r.rhoAbs < 0.5;
    r.verdicts.signedGeBoundary = r.irreducible && std::abs(r.rhoAbs - 0.5) <= 1e-12;
    r.verdicts.blockSeidel = r.seidel < 1.0;
    r.verdicts.modulus = r.smoothDominance < 1.0;
}

} // namespace

CertificateReport certificates(const AbsNormalForm& form, int limit, const std::optional<Vector>& yTarget) {
    CertificateReport r;
    r.limit = limit;
    r.s = static_cast<int>(form.s());
    r.nu = switching_depth(form.L);
    for (std::size_t k = 0; k < kAllNorms.size(); ++k) r.normsL[k] = operator_norm(form.L, kAllNorms[k]);

    SchurData sd;
    try {
        sd = schur(form, yTarget);
    } catch (const Error& e) {
        r.schurAvailable = false;
        r.schurError = to_string(e.code());
        return r;
    }
    r.schurAvailable = true;
    fill_schur_certificates(r, sd.S, form.L, limit);

    // Full-step Newton on the original system.
    const Eigen::Index n = form.n();
    const Matrix JinvY = n > 0 ? Matrix(sd.luJ.solve(form.Y)) : Matrix(0, form.s());
    r.rhoHat = std::numeric_limits<double>::infinity();
    r.rhoBar = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < kAllNorms.size(); ++k) {
        const double hat = operator_norm(JinvY, kAllNorms[k]) * operator_norm(form.Z, kAllNorms[k]);
        const double lnorm = r.normsL[k];
        double bar = std::numeric_limits<double>::infinity();
        if (hat < 1.0 - lnorm) bar = 2.0 * hat / ((1.0 - hat - lnorm) * (1.0 - lnorm));
        if (bar < r.rhoBar || (std::isinf(r.rhoBar) && hat < r.rhoHat)) {
            r.rhoBar = bar;
            r.rhoHat = hat;
            r.rhoHatP = kAllNorms[k];
        }
    }
    r.verdicts.newtonOpl = r.rhoBar < 1.0;
    return r;
}

CertificateReport certificates_for_schur(const Matrix& S, int limit) {
    const Eigen::Index s = S.rows();
    AbsNormalForm form = AbsNormalForm::zeros(s, s, s);
    form.Z.setIdentity();
    form.J.setIdentity();
    form.Y = -S;
    return certificates(form, limit);
}

} // namespace plabs
