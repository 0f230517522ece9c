#include "plabs/cpl.hpp"
#include "plabs/error.hpp"

#include <algorithm>
#include <cmath>

namespace plabs {

double CplSystem::scale() const {
    return 1.0 + std::max(max_abs(S), max_abs(cHat));
}

CplSystem CplSystem::from_schur(const SchurData& sd) {
    CplSystem sys;
    sys.S = sd.S;
    sys.cHat = sd.cHat;
    sys.provenance = Provenance::Reduced;
    return sys;
}

CplSystem CplSystem::from_form(const AbsNormalForm& form, const std::optional<Vector>& yTarget) {
    return from_schur(schur(form, yTarget));
}

AbsNormalForm as_form(const CplSystem& sys) {
    const Eigen::Index s = sys.s();
    AbsNormalForm form = AbsNormalForm::zeros(s, s, s);
    form.c = sys.cHat;
    form.Z.setIdentity();
    form.J.setIdentity();
    form.Y = -sys.S;
    return form;
}

Vector h_eval(const CplSystem& sys, const Vector& z) {
    if (z.size() != sys.s()) throw Error(ErrorCode::DimensionMismatch, "z has wrong dimension");
    return z - sys.S * z.cwiseAbs();
}

Vector x_from_z(const AbsNormalForm& form, const Eigen::PartialPivLU<Matrix>& luJ, const Vector& z) {
    if (z.size() != form.s()) throw Error(ErrorCode::DimensionMismatch, "z has wrong dimension");
    if (form.n() == 0) return Vector(0);
    return -luJ.solve(form.b + form.Y * z.cwiseAbs());
}

Vector x_from_z(const AbsNormalForm& form, const Vector& z) {
    if (form.m() != form.n()) throw Error(ErrorCode::DimensionMismatch, "x_from_z requires m = n");
    Eigen::PartialPivLU<Matrix> lu(form.J);
    if (form.n() > 0 && lu_singular(lu)) {
        throw Error(ErrorCode::SingularSmoothPart, "smooth part J is singular");
    }
    return x_from_z(form, lu, z);
}

Vector z_from_x(const AbsNormalForm& form, const Vector& x) {
    if (x.size() != form.n()) throw Error(ErrorCode::DimensionMismatch, "x has wrong dimension");
    const Eigen::Index s = form.s();
    Vector z = form.c + form.Z * x;
    for (Eigen::Index i = 1; i < s; ++i) {
        double acc = z[i];
        for (Eigen::Index j = 0; j < i; ++j) acc += form.L(i, j) * std::abs(z[j]);
        z[i] = acc;
    }
    return z;
}

bool insert_unique(std::vector<Vector>& set, const Vector& v, double tol) {
    for (const Vector& w : set) {
        if ((w - v).cwiseAbs().maxCoeff() <= tol) return false;
    }
    set.push_back(v);
    return true;
}

std::vector<Vector> brute_force_solutions(const CplSystem& sys, int limit) {
    const Eigen::Index s = sys.s();
    if (s > limit || s > 62) {
        throw Error(ErrorCode::TooLarge, "s = " + std::to_string(s) + " exceeds enumeration limit " +
                                             std::to_string(limit));
    }
    const double scale = sys.scale();
    std::vector<Vector> out;
    if (s == 0) {
        out.emplace_back(0);
        return out;
    }
    const std::uint64_t count = std::uint64_t{1} << s;
    const Matrix I = Matrix::Identity(s, s);
    Matrix A(s, s);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        Vector sigma(s);
        for (Eigen::Index j = 0; j < s; ++j) {
            sigma[j] = ((mask >> j) & 1U) ? 1.0 : -1.0;
            A.col(j) = I.col(j) - sigma[j] * sys.S.col(j);
        }
        Eigen::PartialPivLU<Matrix> lu(A);
        if (lu_singular(lu)) continue;
        const Vector z = lu.solve(sys.cHat);
        if (!z.allFinite()) continue;
        if ((sigma.cwiseProduct(z)).minCoeff() < -1e-10 * scale) continue;
        if (inf_norm(h_eval(sys, z) - sys.cHat) > 1e-9 * scale) continue;
        insert_unique(out, z, 1e-9 * scale);
    }
    return out;
}

AveForm ave_form(const CplSystem& sys) {
    const Eigen::Index s = sys.s();
    Eigen::PartialPivLU<Matrix> lu(sys.S);
    if (s > 0 && lu_singular(lu)) throw Error(ErrorCode::SingularS, "S is singular");
    AveForm out;
    out.A = s > 0 ? Matrix(lu.inverse()) : Matrix(0, 0);
    out.bHat = out.A * sys.cHat;
    return out;
}

} // namespace plabs
