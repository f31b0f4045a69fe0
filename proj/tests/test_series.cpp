#include "common.hpp"

using namespace obt;
using Q = Rational;

namespace {
CoefficientSet<Q> sample_set() {
    auto cs = CoefficientSet<Q>::zeros(4, Q(3, 2));
    cs.a[1] = Q(2, 7);
    cs.a[2] = Q(-3, 11);
    cs.a[3] = Q(5, 13);
    cs.gm[1] = Q(1, 5);
    cs.gm[2] = Q(-2, 9);
    cs.gm[3] = Q(1, 3);
    cs.g[1] = Q(4, 3);
    cs.g[2] = Q(-1, 6);
    return cs;
}
} // namespace

TEST_CASE("balanced series arithmetic") {
    auto x = BalancedSeries<Q>::x(4);
    BalancedSeries<Q> one(4, Q(1));
    auto s = one + x * Q(3);
    auto sq = s * s;
    CHECK(sq.coef(0, 0) == 1);
    CHECK(sq.coef(0, 1) == 6);
    CHECK(sq.coef(0, 2) == 9);
    CHECK(sq.coef(0, 3) == 0);
    auto t = s.times_n({Q(0), Q(1)});
    CHECK(t.coef(1, 1) == 3);
    CHECK_FALSE(t.balanced()); // n x^0 breaks q <= p
    CHECK(s.times_n({Q(0), Q(1)}).shift(1).balanced());
    CHECK(x.shift(2).coef(0, 3) == 1);
    CHECK(x.shift(4).valuation() == 5);
    CHECK(sq.eval(2, Q(1, 10)) == Q(169, 100));
    CHECK_THROWS_AS(one + BalancedSeries<Q>(3), std::invalid_argument);
}

TEST_CASE("n-th powers") {
    const Q c(2, 3);
    auto u = BalancedSeries<Q>(4, Q(1)) + BalancedSeries<Q>::x(4) * c;
    auto p = bs_pow_n(u);
    // (1 + c x)^n = sum binom(n, p) c^p x^p
    Q f = 1;
    for (int k = 0; k <= 4; ++k) {
        if (k) f *= k;
        Q ck = 1;
        for (int i = 0; i < k; ++i) ck *= c;
        CHECK(p.coef(k, k) == ck / f);
    }
    CHECK(p.coef(1, 2) == -c * c / 2);
    auto m = bs_pow_n(u, true);
    CHECK(m.coef(1, 1) == -c);
    CHECK(m.coef(2, 2) == c * c / 2);
    CHECK(m.coef(1, 2) == c * c / 2);
    CHECK(p.balanced());
    for (int n = 1; n <= 5; ++n) {
        Q x = Q(1, 1000);
        Q exact = 1;
        for (int i = 0; i < n; ++i) exact *= 1 + c * x;
        CHECK(abs(p.eval(n, x) - exact) < Q(1, 1000000000) * Q(1, 1000000));
    }
    CHECK_THROWS_AS(bs_pow_n(u * Q(2)), std::invalid_argument);
}

TEST_CASE("eta expansion in exact arithmetic") {
    auto cs = sample_set();
    auto tp = trace_parts(cs, 3);
    Q a1 = cs.a[1], a2 = cs.a[2], g1 = cs.gm[1], g2 = cs.gm[2];
    CHECK(tp.eta.coef(1, 1) == a1);
    CHECK(tp.eta.coef(0, 1) == g1);
    CHECK(tp.eta.coef(2, 2) == Q(3, 2) * a1 * a1);
    CHECK(tp.eta.coef(1, 2) == -a1 * a1 / 2 + 4 * a1 * g1 + a2);
    CHECK(tp.eta.coef(0, 2) == g1 * g1 + g2);
    CHECK(tp.inv_pow.coef(1, 1) == -a1);
    CHECK(tp.inv_pow.coef(2, 2) == -a1 * a1 / 2);
    CHECK(tp.one_minus_nratio.coef(1, 1) == -a1);
    CHECK(tp.one_minus_nratio.coef(2, 2) == -a1 * a1);
}

TEST_CASE("leading Lyapunov coefficients") {
    auto cs = sample_set();
    auto L = forward_L(cs, 3);
    CHECK(L.coef(0, 0) == cs.g[0]);
    CHECK(L.coef(1, 1) == -2 * cs.g[0] * cs.a[1]);
    CHECK(L.balanced());
    for (int p = 1; p <= 5; ++p) CHECK(det3(level_matrix(p, cs.a[1], cs.g[0])) == Q(-2 * p) * cs.a[1] * cs.a[1] * cs.g[0] * cs.g[0]);
}

TEST_CASE("vanishing coefficients give a constant series") {
    auto cs = CoefficientSet<Q>::zeros(4, Q(7, 3));
    auto L = forward_L(cs, 4);
    CHECK(L == BalancedSeries<Q>(4, Q(7, 3)));
    CHECK(solve_eta(cs, 4) == BalancedSeries<Q>(4, Q(1)));
}

TEST_CASE("inversion recovers the determined coefficients") {
    PrecisionGuard g(256);
    auto csq = sample_set();
    CoefficientSet<Real> cs;
    for (auto& v : csq.a) cs.a.push_back(Real(v));
    for (auto& v : csq.gm) cs.gm.push_back(Real(v));
    for (auto& v : csq.g) cs.g.push_back(Real(v));
    auto L = forward_L(cs, 4);
    auto back = invert_L(L, Real("0.01"), 4);
    CHECK(close(back.g[0], cs.g[0], tenpow(-60)));
    CHECK(close(back.a[1], cs.a[1], tenpow(-60)));
    auto flat = CoefficientSet<Real>::zeros(4, Real(2));
    CHECK_THROWS_AS(invert_L(forward_L(flat, 4), Real("0.01"), 4, tenpow(-12)), DegeneracyError);
}
