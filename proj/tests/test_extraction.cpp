#include "common.hpp"

#include <random>

using namespace obt;

TEST_CASE("asymptotic fit on synthetic data") {
    PrecisionGuard g(256);
    Real lam("0.01");
    std::vector<int> ns;
    std::vector<Real> y;
    for (int n = 4; n <= 20; ++n) {
        ns.push_back(n);
        y.push_back(1 + (2 * n + 3) * pow(lam, n));
    }
    auto f = fit_asymptotic(ns, y, lam, {{0, 0}, {0, 1}, {1, 1}});
    CHECK(close(f.coef_of(0, 0), Real(1), tenpow(-40)));
    CHECK(close(f.coef_of(0, 1), Real(3), tenpow(-30)));
    CHECK(close(f.coef_of(1, 1), Real(2), tenpow(-30)));
    CHECK(f.uncertainty.size() == 3);
    std::vector<int> few{4, 5};
    CHECK_THROWS(fit_asymptotic(few, {Real(1), Real(1)}, lam, {{0, 0}, {0, 1}, {1, 1}}));
}

TEST_CASE("quadratic form and two-periodic trace") {
    PrecisionGuard g(192);
    Real l("0.01");
    CHECK(close(Q_form(Real(0), Real(0), l), sqr(1 + l), tenpow(-50)));
    CHECK(close(Q_form(Real("0.3"), Real("0.3"), l), Q_form(Real("0.3"), Real("0.3"), l), tenpow(-50)));
    // unit circles at chord 4: trace of DF^2 equals 2 * 49 - 2
    CHECK(close(two_periodic_trace(Real(1), Real(1), Real(8)), Real(98), tenpow(-50)));
}

TEST_CASE("radii of the equilateral table from the spectrum") {
    SpectrumTable st;
    st.bits = 384;
    Table t = equilateral();
    st.table_hash = table_fingerprint(t);
    add_family(st, t, "12", "32", 4, 20);
    PrecisionGuard g(384);
    auto b = extract_base(st, "12", "32", 4, 20);
    Real mu = 5 - 2 * sqrt(Real(6));
    CHECK(close(b.lambda, mu * mu, tenpow(-80)));
    auto r = recover_radii(b.lambda, b.length_sigma, b.c_even, b.c_odd);
    CHECK(close(r.R0, Real(1), tenpow(-10)));
    CHECK(close(r.R1, Real(1), tenpow(-10)));
    CHECK_THROWS_AS(extract_base(st, "12", "32", 4, 9), InsufficientData);
}

TEST_CASE("only three coefficients reach the Lyapunov array") {
    PrecisionGuard g(256);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    auto cs = CoefficientSet<Real>::zeros(6, Real("1.5"));
    for (int j = 1; j <= 7; ++j) cs.a[j] = Real(u(rng));
    for (int j = 1; j <= 6; ++j) cs.gm[j] = Real(u(rng)), cs.g[j] = Real(u(rng));
    auto id = identifiability(cs, 6);
    CHECK(id.names.size() == 20);
    CHECK(id.rank == 13);
    CHECK(id.determined == std::vector<std::string>{"g0", "g1", "a1"});
}
