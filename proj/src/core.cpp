#include "plabs/core.hpp"
#include "plabs/error.hpp"

#include <algorithm>
#include <sstream>

namespace plabs {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::SingularSmoothPart: return "SingularSmoothPart";
        case ErrorCode::SingularShift: return "SingularShift";
        case ErrorCode::SingularPiece: return "SingularPiece";
        case ErrorCode::SingularS: return "SingularS";
        case ErrorCode::SingularIMinusS: return "SingularIMinusS";
        case ErrorCode::BasisSingular: return "BasisSingular";
        case ErrorCode::PivotBreakdown: return "PivotBreakdown";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::UnknownExample: return "UnknownExample";
        case ErrorCode::BadParams: return "BadParams";
        case ErrorCode::BadAngles: return "BadAngles";
        case ErrorCode::Unclassified: return "Unclassified";
        case ErrorCode::InvalidDocument: return "InvalidDocument";
    }
    return "Unknown";
}

// ---------------------------------------------------------------------------
// Signature
// ---------------------------------------------------------------------------

Signature::Signature(std::vector<int> entries) : sigma_(std::move(entries)) {
    for (int v : sigma_) {
        if (v < -1 || v > 1) {
            throw Error(ErrorCode::InvalidArgument, "signature entries must be -1, 0 or +1");
        }
    }
}

Signature Signature::of(const Vector& z) {
    std::vector<int> entries(static_cast<std::size_t>(z.size()));
    for (Eigen::Index i = 0; i < z.size(); ++i) entries[i] = sign_of(z[i]);
    return Signature(std::move(entries));
}

Signature Signature::from_mask(std::uint64_t mask, std::size_t s) {
    if (s > 64) throw Error(ErrorCode::TooLarge, "bitmask signatures support s <= 64");
    std::vector<int> entries(s);
    for (std::size_t i = 0; i < s; ++i) entries[i] = ((mask >> i) & 1U) ? 1 : -1;
    return Signature(std::move(entries));
}

Signature Signature::parse(const std::string& text) {
    std::vector<int> entries;
    entries.reserve(text.size());
    for (char ch : text) {
        switch (ch) {
            case '+': entries.push_back(1); break;
            case '-': entries.push_back(-1); break;
            case '0': entries.push_back(0); break;
            default:
                throw Error(ErrorCode::InvalidArgument, "bad signature character '" + std::string(1, ch) + "'");
        }
    }
    return Signature(std::move(entries));
}

bool Signature::definite() const noexcept {
    return std::none_of(sigma_.begin(), sigma_.end(), [](int v) { return v == 0; });
}

Signature Signature::resolved() const {
    std::vector<int> entries = sigma_;
    for (int& v : entries) {
        if (v == 0) v = 1;
    }
    return Signature(std::move(entries));
}

std::uint64_t Signature::mask() const {
    if (sigma_.size() > 64) throw Error(ErrorCode::TooLarge, "bitmask signatures support s <= 64");
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < sigma_.size(); ++i) {
        if (sigma_[i] >= 0) m |= (std::uint64_t{1} << i);
    }
    return m;
}

Vector Signature::as_vector() const {
    Vector v(static_cast<Eigen::Index>(sigma_.size()));
    for (std::size_t i = 0; i < sigma_.size(); ++i) v[static_cast<Eigen::Index>(i)] = sigma_[i];
    return v;
}

Matrix Signature::diagonal() const {
    return as_vector().asDiagonal();
}

std::string Signature::str() const {
    std::string out;
    out.reserve(sigma_.size());
    for (int v : sigma_) out.push_back(v > 0 ? '+' : (v < 0 ? '-' : '0'));
    return out;
}

// ---------------------------------------------------------------------------
// AbsNormalForm
// ---------------------------------------------------------------------------

AbsNormalForm AbsNormalForm::zeros(Eigen::Index n, Eigen::Index s, Eigen::Index m) {
    AbsNormalForm f;
    f.c = Vector::Zero(s);
    f.b = Vector::Zero(m);
    f.Z = Matrix::Zero(s, n);
    f.L = Matrix::Zero(s, s);
    f.J = Matrix::Zero(m, n);
    f.Y = Matrix::Zero(m, s);
    return f;
}

double AbsNormalForm::scale() const {
    return 1.0 + std::max({max_abs(c), max_abs(b), max_abs(Z), max_abs(L), max_abs(J), max_abs(Y)});
}

int switching_depth(const Matrix& L) {
    const Eigen::Index s = L.rows();
    std::vector<int> depth(static_cast<std::size_t>(s), 1);
    int nu = 0;
    for (Eigen::Index i = 0; i < s; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            if (L(i, j) != 0.0) depth[i] = std::max(depth[i], depth[j] + 1);
        }
        nu = std::max(nu, depth[i]);
    }
    return nu;
}

ValidationReport validate(const AbsNormalForm& form) {
    ValidationReport report;
    auto fail = [&report](std::string msg) {
        report.ok = false;
        report.messages.push_back(std::move(msg));
    };
    const Eigen::Index s = form.c.size();
    const Eigen::Index m = form.b.size();
    const Eigen::Index n = form.n();

    auto check_dims = [&](const char* name, const Matrix& M, Eigen::Index r, Eigen::Index cols) {
        if (M.rows() != r || M.cols() != cols) {
            std::ostringstream os;
            os << name << " is " << M.rows() << "x" << M.cols() << ", expected " << r << "x" << cols;
            fail(os.str());
        }
    };
    check_dims("Z", form.Z, s, n);
    check_dims("L", form.L, s, s);
    check_dims("J", form.J, m, n);
    check_dims("Y", form.Y, m, s);

    if (!all_finite(form.c) || !all_finite(form.b) || !all_finite(form.Z) || !all_finite(form.L) ||
        !all_finite(form.J) || !all_finite(form.Y)) {
        fail("data contains non-finite entries");
    }

    if (form.L.rows() == form.L.cols()) {
        for (Eigen::Index i = 0; i < form.L.rows(); ++i) {
            for (Eigen::Index j = i; j < form.L.cols(); ++j) {
                if (form.L(i, j) != 0.0) {
                    std::ostringstream os;
                    os << "L is not strictly lower triangular: L(" << i << "," << j << ") = " << form.L(i, j);
                    fail(os.str());
                    i = form.L.rows();
                    break;
                }
            }
        }
        report.nu = switching_depth(form.L);
    }
    return report;
}

EvalRecord evaluate(const AbsNormalForm& form, const Vector& x) {
    if (x.size() != form.n()) throw Error(ErrorCode::DimensionMismatch, "x has wrong dimension");
    const Eigen::Index s = form.s();
    EvalRecord rec;
    rec.x = x;
    rec.z = form.c + form.Z * x;
    rec.zAbs.resize(s);
    for (Eigen::Index i = 0; i < s; ++i) {
        double zi = rec.z[i];
        for (Eigen::Index j = 0; j < i; ++j) zi += form.L(i, j) * rec.zAbs[j];
        rec.z[i] = zi;
        rec.zAbs[i] = std::abs(zi);
    }
    rec.y = form.b + form.J * x + form.Y * rec.zAbs;
    rec.sigma = Signature::of(rec.z);
    return rec;
}

Matrix unit_lower_inverse(const Matrix& L, const Signature& sigma) {
    const Eigen::Index s = L.rows();
    Matrix A = Matrix::Identity(s, s) - L * sigma.diagonal();
    return A.triangularView<Eigen::UnitLower>().solve(Matrix::Identity(s, s));
}

Matrix neumann_inverse(const Matrix& L, const Signature& sigma, int nu) {
    const Eigen::Index s = L.rows();
    const Matrix LS = L * sigma.diagonal();
    Matrix sum = Matrix::Identity(s, s);
    Matrix power = Matrix::Identity(s, s);
    for (int k = 1; k < nu; ++k) {
        power = power * LS;
        sum += power;
    }
    return sum;
}

PieceJacobian piece_jacobian(const AbsNormalForm& form, const Signature& sigma) {
    if (static_cast<Eigen::Index>(sigma.size()) != form.s()) {
        throw Error(ErrorCode::DimensionMismatch, "signature length differs from s");
    }
    PieceJacobian pj{sigma, form.J};
    if (form.s() == 0) return pj;
    const Matrix inner = unit_lower_inverse(form.L, sigma) * form.Z;
    pj.matrix += form.Y * sigma.diagonal() * inner;
    return pj;
}

Vector piece_offset(const AbsNormalForm& form, const Signature& sigma) {
    if (form.s() == 0) return form.b;
    return form.b + form.Y * sigma.diagonal() * (unit_lower_inverse(form.L, sigma) * form.c);
}

EscapeResult polynomial_escape(const AbsNormalForm& form, const Vector& x, const std::optional<Vector>& direction) {
    const Eigen::Index n = form.n();
    const Eigen::Index s = form.s();
    if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "x has wrong dimension");

    EscapeResult result;
    Matrix& basis = result.basis;
    if (direction) {
        const Vector& d = *direction;
        if (d.size() != n || !all_finite(d) || max_abs(d) == 0.0) {
            throw Error(ErrorCode::BasisSingular, "escape direction must be a finite nonzero n-vector");
        }
        // Replace the unit vector at the dominant entry of d; the basis stays nonsingular.
        Eigen::Index pivot = 0;
        d.cwiseAbs().maxCoeff(&pivot);
        basis.resize(n, n);
        basis.col(0) = d;
        Eigen::Index col = 1;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == pivot) continue;
            basis.col(col++) = Vector::Unit(n, j);
        }
    } else {
        basis = Matrix::Identity(n, n);
    }

    // Row k of coefficient matrices holds the t^k coefficient.
    Matrix xPoly(n + 1, n);
    xPoly.row(0) = x.transpose();
    for (Eigen::Index k = 1; k <= n; ++k) xPoly.row(k) = basis.col(k - 1).transpose();

    const double threshold =
        1e-14 * form.scale() * (1.0 + std::max(inf_norm(x), max_abs(basis)));

    Matrix absPoly = Matrix::Zero(n + 1, s);
    std::vector<int> sigma(static_cast<std::size_t>(s), 0);
    for (Eigen::Index i = 0; i < s; ++i) {
        Vector zi = xPoly * form.Z.row(i).transpose();
        zi[0] += form.c[i];
        for (Eigen::Index j = 0; j < i; ++j) {
            if (form.L(i, j) != 0.0) zi += form.L(i, j) * absPoly.col(j);
        }
        int sgn = 0;
        for (Eigen::Index k = 0; k <= n; ++k) {
            if (std::abs(zi[k]) > threshold) {
                sgn = sign_of(zi[k]);
                break;
            }
        }
        sigma[i] = sgn;
        if (sgn == 0) result.degenerate = true;
        absPoly.col(i) = static_cast<double>(sgn) * zi;
    }
    result.sigma = Signature(std::move(sigma));
    result.jacobian = piece_jacobian(form, result.sigma);
    return result;
}

double default_shift(const AbsNormalForm& form) {
    const double jinf = form.J.size() == 0 ? 0.0 : form.J.cwiseAbs().rowwise().sum().maxCoeff();
    return 1.0 + jinf;
}

AbsNormalForm regularize_smooth_part(const AbsNormalForm& form, double alpha) {
    const Eigen::Index n = form.n();
    const Eigen::Index s = form.s();
    if (form.m() != n) throw Error(ErrorCode::DimensionMismatch, "regularization requires m = n");

    const Matrix shifted = form.J + alpha * Matrix::Identity(n, n);
    if (n > 0) {
        Eigen::PartialPivLU<Matrix> lu(shifted);
        if (lu_singular(lu)) {
            throw Error(ErrorCode::SingularShift, "J + alpha I is numerically singular");
        }
    }
    if (alpha == 0.0) return form;

    // Switch pair per coordinate j: z_a = x_j, z_b = |z_a| + z_a, x_j = |z_b| - |z_a|.
    const Eigen::Index s2 = s + 2 * n;
    AbsNormalForm out = AbsNormalForm::zeros(n, s2, n);
    out.c.head(s) = form.c;
    out.b = form.b;
    out.Z.topRows(s) = form.Z;
    out.L.topLeftCorner(s, s) = form.L;
    out.J = shifted;
    out.Y.leftCols(s) = form.Y;
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index a = s + 2 * j;
        const Eigen::Index bIdx = a + 1;
        out.Z(a, j) = 1.0;
        out.Z(bIdx, j) = 1.0;
        out.L(bIdx, a) = 1.0;
        out.Y(j, a) = alpha;
        out.Y(j, bIdx) = -alpha;
    }
    return out;
}

AbsNormalForm regularize_smooth_part(const AbsNormalForm& form) {
    return regularize_smooth_part(form, default_shift(form));
}

} // namespace plabs
