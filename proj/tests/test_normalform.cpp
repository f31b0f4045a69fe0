#include "common.hpp"

using namespace obt;

TEST_CASE("normal form of a conjugated model map") {
    PrecisionGuard g(256);
    int K = 8;
    auto u = Jet2<Real>::var_u(K), w = Jet2<Real>::var_w(K);
    Real lam("0.3"), a1("0.7"), a2("-0.2");
    Jet2<Real> z = u * w;
    Jet2<Real> D = Jet2<Real>(K, lam) + z * a1 + z * z * a2;
    JetMap N{D * u, w / D};
    // symplectic change of variables: two shears after a unimodular linear map
    auto shear_y = [&](const JetMap& m, int sg) {
        Jet2<Real> X = m.x;
        return JetMap{X, m.y + (X * X * Real("0.3") - X * X * X * Real("0.5")) * Real(sg)};
    };
    auto shear_x = [&](const JetMap& m, int sg) {
        Jet2<Real> Y = m.y;
        return JetMap{m.x + (Y * Y * Real("0.4") + Y * Y * Y * Real("0.1")) * Real(sg), Y};
    };
    Mat2 M{Real(2), Real(1), Real(1), Real(1)};
    JetMap id{u, w};
    JetMap Psi = shear_y(shear_x(linear_map(M, K), 1), 1);
    JetMap Pinv = compose(linear_map(inverse(M), K), shear_x(shear_y(id, -1), -1));
    CHECK(max_coef(compose(Pinv, Psi).x - u) < tenpow(-60));
    auto nf = moser_from_jet(compose(Pinv, compose(N, Psi)));
    CHECK(close(nf.a[0], lam, tenpow(-60)));
    CHECK(close(nf.a[1], a1, tenpow(-60)));
    CHECK(close(nf.a[2], a2, tenpow(-60)));
    CHECK(abs(nf.a[3]) < tenpow(-60));
    CHECK(nf.conjugacy_residual < tenpow(-55));
    CHECK(nf.symplectic_defect < tenpow(-55));
}

TEST_CASE("linear hyperbolic map has vanishing invariants") {
    PrecisionGuard g(256);
    auto nf = moser_from_jet(linear_map(Mat2{Real(2), Real(1), Real(1), Real(1)}, 6));
    for (size_t m = 1; m < nf.a.size(); ++m) CHECK(abs(nf.a[m]) < tenpow(-60));
    CHECK(close(nf.lambda, (3 - sqrt(Real(5))) / 2, tenpow(-60)));
}

TEST_CASE("billiard normal form and gluing") {
    PrecisionGuard g(256);
    Table t = equilateral();
    auto nf = moser_nf(t, 1, 2, 12);
    auto o = solve_orbit(t, "12");
    CHECK(close(nf.lambda, o.lambda, tenpow(-60)));
    CHECK(nf.conjugacy_residual < tenpow(-50));
    CHECK(nf.axis_canonical);
    CHECK(nf.a[1] > 0);
    CHECK(close(Delta(nf, Real(0)), nf.lambda, tenpow(-70)));
    auto hd = solve_family(t, "12", "32", 6, 8);
    auto gd = extend_and_glue(t, nf, 3, hd.orbits.at(8).points[0].s, 6);
    CHECK(gd.max_swap < tenpow(-10));
    CHECK(gd.max_det < tenpow(-8));
    CHECK(gd.max_display < tenpow(-6));
    CHECK(abs(abs(gd.xi_inf) - Real("0.750251")) < tenpow(-5));
    auto cs = scaled_coefficients(nf, gd, 4);
    CHECK(abs(cs.g[0] - Real("158.911")) < Real("0.001"));
    CHECK(abs(cs.a[1] - Real("0.281438")) < tenpow(-6));
}
