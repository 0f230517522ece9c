#include "oracles.hpp"

#include "plabs/analysis.hpp"
#include "plabs/cpl.hpp"
#include "plabs/error.hpp"
#include "plabs/gallery.hpp"

#include <doctest.h>

using namespace plabs;

namespace {

CplSystem direct(const Matrix& S, const Vector& c) {
    CplSystem sys;
    sys.S = S;
    sys.cHat = c;
    return sys;
}

Matrix kink_S() {
    Matrix S(2, 2);
    S << 1.0, -1.0, 1.0, -1.0;
    return S;
}

} // namespace

TEST_CASE("H evaluation") {
    const CplSystem cyc = cyclic(3, 0.65);
    CHECK(h_eval(cyc, Vector::Zero(3)) == Vector::Zero(3));
    const Vector z = Vector::Ones(3);
    CHECK(inf_norm(h_eval(cyc, z) - 0.35 * z) <= 1e-15);
    std::mt19937_64 rng(51);
    const Vector w = oracle::gaussian_vec(rng, 3);
    CHECK(h_eval(direct(Matrix::Zero(3, 3), w), w) == w);
    const Matrix S = oracle::gaussian(rng, 4, 4);
    const Vector v = oracle::gaussian_vec(rng, 4);
    const Vector viaSigma = (Matrix::Identity(4, 4) - S * Signature::of(v).diagonal()) * v;
    CHECK(inf_norm(h_eval(direct(S, v), v) - viaSigma) <= 1e-14);
}

TEST_CASE("reduced system matches the Schur complement") {
    const AbsNormalForm f = random_form(3, 4, 7, 0.6);
    const CplSystem sys = CplSystem::from_form(f);
    CHECK(sys.provenance == Provenance::Reduced);
    const SchurData sd = schur(f);
    CHECK(inf_norm(sys.S - sd.S) <= 1e-10 * f.scale());
    CHECK(inf_norm(sys.S - (f.L - f.Z * f.J.inverse() * f.Y)) <= 1e-10 * f.scale());
    CHECK(inf_norm(sys.cHat - (f.c - f.Z * f.J.inverse() * f.b)) <= 1e-10 * f.scale());
    const AbsNormalForm back = as_form(sys);
    CHECK(inf_norm(CplSystem::from_form(back).S - sys.S) <= 1e-14);
}

TEST_CASE("transfer maps") {
    AbsNormalForm f = random_form(2, 3, 8, 0.5);
    f.b.setZero();
    CHECK(x_from_z(f, Vector::Zero(3)) == Vector::Zero(2));

    const AbsNormalForm kink = one_d_kink(1.0);
    Vector z(2);
    z << -1.0, 1.0;
    CHECK(x_from_z(kink, z)[0] == 0.0);

    std::mt19937_64 rng(52);
    AbsNormalForm flat = random_form(3, 3, 9, 0.5);
    flat.L.setZero();
    const Vector x = oracle::gaussian_vec(rng, 3);
    CHECK(inf_norm(z_from_x(flat, x) - (flat.c + flat.Z * x)) <= 1e-15);

    for (int k = 0; k < 30; ++k) {
        AbsNormalForm g = random_form(3, 5, 20 + k, 0.7);
        g.L = oracle::gaussian(rng, 5, 5).triangularView<Eigen::StrictlyLower>();
        const Vector xx = oracle::gaussian_vec(rng, 3);
        const Vector zz = z_from_x(g, xx);
        CHECK(inf_norm(zz - evaluate(g, xx).z) <= 1e-14 * (1.0 + inf_norm(zz)));
        CHECK(inf_norm(zz - g.L * zz.cwiseAbs() - (g.c + g.Z * xx)) <= 1e-12 * g.scale() * (1.0 + inf_norm(zz)));
    }

    AbsNormalForm sing = one_d_kink(1.0);
    sing.J(0, 0) = 0.0;
    CHECK_THROWS_AS((void)x_from_z(sing, z), Error);
}

TEST_CASE("round trip at a solution") {
    for (int k = 0; k < 30; ++k) {
        const AbsNormalForm f = random_form(1 + k % 4, 1 + k % 5, 60 + k, 0.5);
        const CplSystem sys = CplSystem::from_form(f);
        const std::vector<Vector> sols = brute_force_solutions(sys);
        REQUIRE(sols.size() == 1);
        const Vector x = x_from_z(f, sols[0]);
        CHECK(inf_norm(z_from_x(f, x) - sols[0]) <= 1e-10 * f.scale() * (1.0 + inf_norm(sols[0])));
        CHECK(inf_norm(evaluate(f, x).y) <= 1e-10 * f.scale() * (1.0 + inf_norm(x)));
        const std::vector<Vector> roots = oracle::opl_roots(f);
        REQUIRE(roots.size() == 1);
        CHECK(inf_norm(roots[0] - x) <= 1e-9 * f.scale() * (1.0 + inf_norm(x)));
    }
}

TEST_CASE("brute force oracle") {
    std::mt19937_64 rng(53);
    const Vector c = oracle::gaussian_vec(rng, 4);
    const std::vector<Vector> trivial = brute_force_solutions(direct(Matrix::Zero(4, 4), c));
    REQUIRE(trivial.size() == 1);
    CHECK(trivial[0] == c);

    const std::vector<Vector> cyc = brute_force_solutions(cyclic(3, 0.65));
    REQUIRE(cyc.size() == 1);
    CHECK(inf_norm(cyc[0] - Vector::Constant(3, 1.0 / 0.35)) <= 1e-12);

    Vector ck(2);
    ck << -1.0, 1.0;
    const CplSystem kink = direct(kink_S(), ck);
    const std::vector<Vector> ks = brute_force_solutions(kink);
    CHECK(!ks.empty());
    for (const Vector& z : ks) CHECK(inf_norm(h_eval(kink, z) - ck) <= 1e-9 * kink.scale());

    CHECK_THROWS_AS((void)brute_force_solutions(direct(Matrix::Zero(5, 5), Vector::Ones(5)), 4), Error);

    // Uniqueness when the sign real spectral radius is below one.
    for (int k = 0; k < 30; ++k) {
        const int s = 1 + k % 6;
        const CplSystem sys = random_cpl(s, 70 + k, 1.0 + 0.1 * (k % 5));
        const double rho = sign_real_spectral_radius(sys.S);
        const std::vector<Vector> sols = brute_force_solutions(sys);
        for (const Vector& z : sols) CHECK(inf_norm(h_eval(sys, z) - sys.cHat) <= 1e-9 * sys.scale());
        if (rho < 1.0 - 1e-6) CHECK(sols.size() == 1);
    }
}

TEST_CASE("brute force finds several solutions of a non-coherent system") {
    // z - 2|z| = -1 has z = 1 and z = -1/3.
    const std::vector<Vector> sols = brute_force_solutions(direct(Matrix::Constant(1, 1, 2.0), Vector::Constant(1, -1.0)));
    REQUIRE(sols.size() == 2);
    std::vector<double> vals{sols[0][0], sols[1][0]};
    std::sort(vals.begin(), vals.end());
    CHECK(vals[0] == doctest::Approx(-1.0 / 3.0));
    CHECK(vals[1] == doctest::Approx(1.0));
}

TEST_CASE("absolute value equation form") {
    std::mt19937_64 rng(54);
    const Vector c = oracle::gaussian_vec(rng, 3);
    const AveForm half = ave_form(direct(0.5 * Matrix::Identity(3, 3), c));
    CHECK(inf_norm(half.A - 2.0 * Matrix::Identity(3, 3)) <= 1e-15);
    CHECK(inf_norm(half.bHat - 2.0 * c) <= 1e-15);

    for (int k = 0; k < 20; ++k) {
        const CplSystem sys = random_cpl(2 + k % 5, 90 + k, 0.6);
        const AveForm ave = ave_form(sys);
        const std::vector<Vector> sols = brute_force_solutions(sys);
        REQUIRE(sols.size() == 1);
        const Vector& z = sols[0];
        CHECK(inf_norm(ave.A * z - z.cwiseAbs() - ave.bHat) <= 1e-9 * (1.0 + max_abs(ave.A)) * (1.0 + inf_norm(z)));
    }
    CHECK_THROWS_AS((void)ave_form(direct(kink_S(), Vector::Ones(2))), Error);
}

TEST_CASE("insert_unique deduplicates") {
    std::vector<Vector> set;
    CHECK(insert_unique(set, Vector::Ones(2), 1e-9));
    CHECK_FALSE(insert_unique(set, Vector::Ones(2) * (1.0 + 1e-12), 1e-9));
    CHECK(insert_unique(set, -Vector::Ones(2), 1e-9));
    CHECK(set.size() == 2);
}
