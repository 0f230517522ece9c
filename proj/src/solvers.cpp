#include "plabs/solvers.hpp"
#include "plabs/analysis.hpp"
#include "plabs/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace plabs {

namespace {

int default_maxit(const SolveOptions& opt, Eigen::Index s) {
    return opt.maxit >= 0 ? opt.maxit : static_cast<int>(10 * s + 100);
}

void record(SolveTrace& t, const SolveOptions& opt, const Vector& v, double residual) {
    if (t.iterates.size() < opt.retain) t.iterates.push_back(v);
    t.residualNorms.push_back(residual);
}

// Visited signatures with the iteration index of their first occurrence.
class SigmaMemo {
public:
    // Returns the earlier index if sigma was seen, otherwise stores it.
    std::optional<int> visit(const Signature& sigma, int index) {
        std::string key;
        if (sigma.size() <= 64) {
            const std::uint64_t m = sigma.mask();
            key.assign(reinterpret_cast<const char*>(&m), sizeof m);
        } else {
            key.reserve(sigma.size());
            for (int v : sigma.entries()) key.push_back(static_cast<char>(v));
        }
        const auto [it, inserted] = seen_.emplace(std::move(key), index);
        if (inserted) return std::nullopt;
        return it->second;
    }

private:
    std::unordered_map<std::string, int> seen_;
};

Matrix shifted(const Matrix& S, const Signature& sigma) {
    // I - S Sigma, column j scaled by sigma_j.
    const Eigen::Index s = S.rows();
    Matrix A = -S;
    for (Eigen::Index j = 0; j < s; ++j) {
        if (sigma[static_cast<std::size_t>(j)] < 0) A.col(j) = S.col(j);
        A(j, j) += 1.0;
    }
    return A;
}

template <typename Step>
SolveTrace fixed_point(const Vector& z0, const Vector& cHat, const SolveOptions& opt, Step&& step) {
    SolveTrace t;
    const double ref = 1.0 + inf_norm(cHat);
    const double stopTol = opt.tol * ref;
    const double divergence = 1e8 * ref;
    const int maxit = default_maxit(opt, cHat.size());

    Vector z = z0;
    Vector next = step(z);
    double r = inf_norm(z - next);
    record(t, opt, z, r);
    int k = 0;
    while (true) {
        if (r <= stopTol) {
            t.status = SolveStatus::Converged;
            break;
        }
        if (!z.allFinite() || inf_norm(z) > divergence || !std::isfinite(r)) {
            t.status = SolveStatus::Diverged;
            break;
        }
        if (k >= maxit) {
            t.status = SolveStatus::MaxIter;
            break;
        }
        z = next;
        ++k;
        next = step(z);
        r = inf_norm(z - next);
        record(t, opt, z, r);
    }
    t.iterations = k;
    t.solution = z;
    return t;
}

} // namespace

const char* to_string(SolveStatus status) noexcept {
    switch (status) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::Cycled: return "Cycled";
        case SolveStatus::Diverged: return "Diverged";
        case SolveStatus::MaxIter: return "MaxIter";
    }
    return "?";
}

std::string SolveTrace::status_text() const {
    switch (status) {
        case SolveStatus::Converged: return exact ? "Converged{exact}" : "Converged{toTol}";
        case SolveStatus::Cycled: return "Cycled{" + std::to_string(period) + "}";
        default: return to_string(status);
    }
}

AbsNormalForm with_target(const AbsNormalForm& form, const Vector& y) {
    if (y.size() != form.m()) throw Error(ErrorCode::DimensionMismatch, "target has wrong dimension");
    AbsNormalForm out = form;
    out.b -= y;
    return out;
}

SolveTrace modulus(const CplSystem& sys, const Vector& z0, const SolveOptions& opt) {
    if (z0.size() != sys.s()) throw Error(ErrorCode::DimensionMismatch, "z0 has wrong dimension");
    SolveTrace t = fixed_point(z0, sys.cHat, opt, [&](const Vector& z) -> Vector { return sys.cHat + sys.S * z.cwiseAbs(); });
    t.finalResidual = inf_norm(h_eval(sys, t.solution) - sys.cHat);
    return t;
}

SolveTrace block_seidel(const AbsNormalForm& form, const Vector& z0, const SolveOptions& opt) {
    if (z0.size() != form.s()) throw Error(ErrorCode::DimensionMismatch, "z0 has wrong dimension");
    const SchurData sd = schur(form);
    SolveTrace t = fixed_point(z0, sd.cHat, opt,
                               [&](const Vector& z) -> Vector { return z_from_x(form, x_from_z(form, sd.luJ, z)); });
    if (t.converged()) {
        const Vector x = x_from_z(form, sd.luJ, t.solution);
        t.finalResidual = inf_norm(evaluate(form, x).y);
        t.x = x;
    } else {
        t.finalResidual = inf_norm(t.solution - sd.S * t.solution.cwiseAbs() - sd.cHat);
    }
    return t;
}

SolveTrace newton_cpl(const CplSystem& sys, const Vector& z0, const SolveOptions& opt) {
    const Eigen::Index s = sys.s();
    if (z0.size() != s) throw Error(ErrorCode::DimensionMismatch, "z0 has wrong dimension");
    const int maxit = default_maxit(opt, s);

    SolveTrace t;
    SigmaMemo memo;
    Vector z = z0;
    Signature sigma = Signature::of(z).resolved();
    record(t, opt, z, inf_norm(h_eval(sys, z) - sys.cHat));
    t.sigmaHistory.push_back(sigma);
    (void)memo.visit(sigma, 0);

    int k = 0;
    t.status = SolveStatus::MaxIter;
    while (k < maxit) {
        Eigen::PartialPivLU<Matrix> lu(shifted(sys.S, sigma));
        if (s > 0 && lu_singular(lu)) {
            throw Error(ErrorCode::SingularPiece, "I - S Sigma is singular at " + sigma.str());
        }
        z = s > 0 ? Vector(lu.solve(sys.cHat)) : Vector(0);
        ++k;
        const Signature next = Signature::of(z).resolved();
        record(t, opt, z, inf_norm(h_eval(sys, z) - sys.cHat));
        t.sigmaHistory.push_back(next);
        if (next == sigma) {
            t.status = SolveStatus::Converged;
            t.exact = true;
            break;
        }
        if (const auto earlier = memo.visit(next, k)) {
            t.status = SolveStatus::Cycled;
            t.period = k - *earlier;
            break;
        }
        sigma = next;
    }
    t.iterations = k;
    t.solution = z;
    t.finalResidual = t.residualNorms.back();
    if (t.status == SolveStatus::Converged) t.exact = t.finalResidual <= 1e-12 * sys.scale() * (1.0 + inf_norm(z));
    return t;
}

SolveTrace newton_opl(const AbsNormalForm& form, const Vector& x0, const SolveOptions& opt) {
    const Eigen::Index n = form.n();
    if (form.m() != n) throw Error(ErrorCode::DimensionMismatch, "Newton requires m = n");
    if (x0.size() != n) throw Error(ErrorCode::DimensionMismatch, "x0 has wrong dimension");
    const int maxit = default_maxit(opt, form.s());
    const double scale = form.scale();
    const double stopTol = opt.tol * scale;
    const double divergence = 1e8 * scale * (1.0 + inf_norm(x0));

    auto signature_at = [&](const Vector& x, const EvalRecord& rec) {
        return opt.useEscape ? polynomial_escape(form, x).sigma.resolved() : rec.sigma.resolved();
    };

    SolveTrace t;
    SigmaMemo memo;
    Vector x = x0;
    EvalRecord rec = evaluate(form, x);
    double r = inf_norm(rec.y);
    Signature sigma = signature_at(x, rec);
    record(t, opt, x, r);
    t.sigmaHistory.push_back(sigma);
    (void)memo.visit(sigma, 0);

    int k = 0;
    while (true) {
        if (r <= stopTol) {
            t.status = SolveStatus::Converged;
            t.exact = r <= 1e-12 * scale * (1.0 + inf_norm(x));
            break;
        }
        if (!x.allFinite() || inf_norm(x) > divergence) {
            t.status = SolveStatus::Diverged;
            break;
        }
        if (k >= maxit) {
            t.status = SolveStatus::MaxIter;
            break;
        }
        const PieceJacobian pj = piece_jacobian(form, sigma);
        Eigen::PartialPivLU<Matrix> lu(pj.matrix);
        if (n > 0 && lu_singular(lu)) {
            throw Error(ErrorCode::SingularPiece, "piece Jacobian is singular at " + sigma.str());
        }
        if (n > 0) x -= lu.solve(rec.y);
        ++k;
        rec = evaluate(form, x);
        r = inf_norm(rec.y);
        sigma = signature_at(x, rec);
        record(t, opt, x, r);
        t.sigmaHistory.push_back(sigma);
        const auto earlier = memo.visit(sigma, k);
        if (earlier && r > stopTol) {
            t.status = SolveStatus::Cycled;
            t.period = k - *earlier;
            break;
        }
    }
    t.iterations = k;
    t.solution = x;
    t.x = x;
    t.finalResidual = r;
    return t;
}

SolveTrace signed_ge(const CplSystem& sys, const SolveOptions& opt) {
    const Eigen::Index s = sys.s();
    SolveTrace t;
    Vector d = Vector::Ones(s);
    if (opt.equilibrate && s > 0) d = pf_equilibrate(sys.S).d;

    // Work on w = D^{-1} z:  w - D^{-1} S D |w| = D^{-1} c_hat.
    Matrix St = d.cwiseInverse().asDiagonal() * sys.S * d.asDiagonal();
    Vector ct = sys.cHat.cwiseQuotient(d);

    std::vector<Eigen::Index> remaining(static_cast<std::size_t>(s));
    for (Eigen::Index i = 0; i < s; ++i) remaining[static_cast<std::size_t>(i)] = i;
    std::vector<Eigen::Index> order;
    std::vector<int> pivotSign(static_cast<std::size_t>(s), 0);
    std::uint64_t flops = 0;

    while (!remaining.empty()) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < remaining.size(); ++k) {
            if (std::abs(ct[remaining[k]]) > std::abs(ct[remaining[best]])) best = k;
        }
        const Eigen::Index p = remaining[best];
        if (ct[p] == 0.0) break;  // the remaining subsystem has the zero solution
        const int sg = sign_of(ct[p]);
        const double den = sg - St(p, p);
        if (std::abs(den) < 1e-12) throw Error(ErrorCode::PivotBreakdown, "pivot denominator vanishes");
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));

        // Pivot row now reads |w_p| = ct_p + sum_j St_pj |w_j| over remaining j.
        ct[p] /= den;
        for (Eigen::Index j : remaining) St(p, j) /= den;
        flops += remaining.size();
        for (Eigen::Index i : remaining) {
            const double f = St(i, p);
            if (f == 0.0) continue;
            ct[i] += f * ct[p];
            for (Eigen::Index j : remaining) St(i, j) += f * St(p, j);
            flops += 1 + remaining.size();
        }
        order.push_back(p);
        pivotSign[static_cast<std::size_t>(p)] = sg;
    }

    Vector absW = Vector::Zero(s);
    bool consistent = true;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const Eigen::Index p = *it;
        double v = ct[p];
        for (auto later = order.rbegin(); later != it; ++later) v += St(p, *later) * absW[*later];
        flops += static_cast<std::uint64_t>(it - order.rbegin());
        if (v < -1e-12 * sys.scale()) consistent = false;
        absW[p] = std::max(v, 0.0);
    }
    Vector z(s);
    for (Eigen::Index i = 0; i < s; ++i) z[i] = pivotSign[static_cast<std::size_t>(i)] * absW[i] * d[i];

    t.flopCount = flops;
    record(t, opt, Vector::Zero(s), inf_norm(sys.cHat));
    t.finalResidual = inf_norm(h_eval(sys, z) - sys.cHat);
    record(t, opt, z, t.finalResidual);
    t.iterations = 1;
    t.solution = z;
    t.sigmaHistory.push_back(Signature::of(z).resolved());
    if (consistent && t.finalResidual <= opt.tol * sys.scale()) {
        t.status = SolveStatus::Converged;
        t.exact = t.finalResidual <= 1e-12 * sys.scale() * (1.0 + inf_norm(z));
    } else {
        t.status = SolveStatus::Diverged;
    }
    return t;
}

} // namespace plabs
