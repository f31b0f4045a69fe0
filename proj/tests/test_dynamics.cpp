#include "common.hpp"

using namespace obt;

namespace {
Table facing_pair() { return Table({CurveSpec::circle("-3", "0", "1"), CurveSpec::circle("3", "0", "1")}); }
} // namespace

TEST_CASE("chord between facing circles") {
    PrecisionGuard g(256);
    Table t = facing_pair();
    auto c = chord(t, 1, Real(0), 2, pi());
    CHECK(close(c.h, Real(4), tenpow(-70)));
    CHECK(close(c.d1, Real(0), tenpow(-70)));
    CHECK(close(c.d2, Real(0), tenpow(-70)));
    auto c2 = chord(t, 2, pi(), 1, Real(0));
    CHECK(close(c2.d11, c.d22, tenpow(-70)));
    CHECK(close(c2.d12, c.d12, tenpow(-70)));
}

TEST_CASE("perpendicular shot and escape") {
    PrecisionGuard g(256);
    Table t = facing_pair();
    auto y = billiard_step(t, {1, Real(0), Real(0)});
    CHECK(y.i == 2);
    CHECK(close(y.s, pi(), tenpow(-60)));
    CHECK(close(y.r, Real(0), tenpow(-60)));
    // pointing away from the partner
    CHECK_THROWS_AS(billiard_step(t, {1, pi(), Real(0)}), EscapeError);
    CHECK_THROWS_AS(billiard_step(t, {1, Real(0), Real(2)}), DomainError);
}

TEST_CASE("differential on the symmetric bounce") {
    PrecisionGuard g(256);
    Table t = facing_pair();
    Mat2 m = differential(t, {1, Real(0), Real(0)});
    CHECK(close(m.a, Real(-5), tenpow(-60)));
    CHECK(close(m.b, Real(-4), tenpow(-60)));
    CHECK(close(m.c, Real(-6), tenpow(-60)));
    CHECK(close(m.d, Real(-5), tenpow(-60)));
    CHECK(close(m.det(), Real(1), tenpow(-60)));
}

TEST_CASE("differential agrees with finite differences") {
    PrecisionGuard g(256);
    Table t = facing_pair();
    PhasePoint x{1, Real("0.1"), Real("0.05")};
    Mat2 m = differential(t, x);
    Real h = tenpow(-30);
    auto p = billiard_step(t, x);
    auto ps = billiard_step(t, {1, x.s + h, x.r});
    auto pr = billiard_step(t, {1, x.s, x.r + h});
    CHECK(close((ps.s - p.s) / h, m.a, tenpow(-25)));
    CHECK(close((pr.s - p.s) / h, m.b, tenpow(-25)));
    CHECK(close((ps.r - p.r) / h, m.c, tenpow(-25)));
    CHECK(close((pr.r - p.r) / h, m.d, tenpow(-25)));
    CHECK(close(m.det(), Real(1), tenpow(-60)));
}

TEST_CASE("area preservation on curved scatterers") {
    PrecisionGuard g(256);
    Table t({CurveSpec::ellipse("0", "0", "1.5", "1", "0.2"), CurveSpec::fourier("6", "1.2", {"1", "0.02", "0.01"})});
    for (const char* r : {"-0.1", "0", "0.1"}) {
        Mat2 m = differential(t, {1, Real("0.05"), Real(r)});
        CHECK(close(m.det(), Real(1), tenpow(-60)));
    }
}

TEST_CASE("map jets") {
    PrecisionGuard g(256);
    Table t = facing_pair();
    PhasePoint x{1, Real("0.002"), Real("0.001")};
    auto j1 = map_jet(t, x, 1, 1);
    Mat2 m = differential(t, x);
    CHECK(close(j1.s(1, 0), m.a, tenpow(-55)));
    CHECK(close(j1.s(0, 1), m.b, tenpow(-55)));
    CHECK(close(j1.r(1, 0), m.c, tenpow(-55)));
    CHECK(close(j1.r(0, 1), m.d, tenpow(-55)));
    auto j2 = map_jet(t, x, 2, 1);
    Mat2 m2 = differential(t, billiard_step(t, x)) * m;
    CHECK(close(j2.s(1, 0), m2.a, tenpow(-50)));
    CHECK(close(j2.r(0, 1), m2.d, tenpow(-50)));
    auto j0 = map_jet(t, x, 0, 3);
    CHECK(j0.s(1, 0) == 1);
    CHECK(j0.s(0, 1) == 0);
    CHECK(j0.r(0, 1) == 1);
    CHECK(j0.s(2, 0) == 0);
}
