#include "common.hpp"

using namespace obt;

TEST_CASE("Taylor arithmetic, composition and reversion") {
    PrecisionGuard g(192);
    auto x = Taylor<Real>::variable(8, Real(0));
    auto e = Taylor<Real>(8, Real(1));
    // 1 / (1 - x) = sum x^k
    auto geo = e / (e - x);
    for (int k = 0; k <= 8; ++k) CHECK(close(geo[k], Real(1), tenpow(-50)));
    // revert(x + x^2) composed with x + x^2 is x
    auto f = x + x * x;
    auto r = revert(f);
    auto id = compose(f, r);
    CHECK(close(id[1], Real(1), tenpow(-50)));
    for (int k = 2; k <= 8; ++k) CHECK(close(id[k], Real(0), tenpow(-50)));
    auto s = tsqrt(e + x);
    auto s2 = s * s;
    CHECK(close(s2[1], Real(1), tenpow(-50)));
    CHECK(close(s2[5], Real(0), tenpow(-50)));
}

TEST_CASE("two-variable jets") {
    PrecisionGuard g(192);
    auto u = Jet2<Real>::var_u(6), w = Jet2<Real>::var_w(6);
    auto p = (u + w) * (u - w);
    CHECK(p(2, 0) == 1);
    CHECK(p(0, 2) == -1);
    CHECK(p(1, 1) == 0);
    auto q = compose(p, w, u); // swap arguments
    CHECK(q(2, 0) == -1);
    CHECK(close(p.eval(Real(3), Real(2)), Real(5), tenpow(-50)));
    auto d = p.du();
    CHECK(d(1, 0) == 2);
    auto inv = (Jet2<Real>(6, Real(1)) + u).inv();
    CHECK(close(inv(3, 0), Real(-1), tenpow(-50)));
}
