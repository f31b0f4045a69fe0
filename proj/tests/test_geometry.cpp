#include "common.hpp"

using namespace obt;

TEST_CASE("circle boundary: arc length starts at angle 0") {
    PrecisionGuard g(256);
    Table t({CurveSpec::circle("0", "0", "1")});
    auto b0 = t[1].eval(Real(0));
    CHECK(close(b0.point.x, Real(1), tenpow(-70)));
    CHECK(close(b0.point.y, Real(0), tenpow(-70)));
    auto b1 = t[1].eval(pi());
    CHECK(close(b1.point.x, Real(-1), tenpow(-70)));
    CHECK(close(b1.point.y, Real(0), tenpow(-70)));
    // normal points out of the obstacle, into the free region
    CHECK(close(b0.normal.x, Real(1), tenpow(-70)));
}

TEST_CASE("fourier curve with constant radius is a circle") {
    PrecisionGuard g(256);
    Table t({CurveSpec::fourier("1", "2", {"2"})});
    auto b = t[1].eval(Real(0));
    CHECK(close(norm(b.point - Vec2(Real(1), Real(2))), Real(2), tenpow(-60)));
    CHECK(close(t[1].length(), 4 * pi(), tenpow(-60)));
    auto k = t[1].curvature_jet(Real("0.7"), 2);
    CHECK(close(k[0], Real("0.5"), tenpow(-60)));
    CHECK(close(k[1], Real(0), tenpow(-55)));
}

TEST_CASE("curvature jets") {
    PrecisionGuard g(256);
    Table t({CurveSpec::circle("0", "0", "2"), CurveSpec::ellipse("10", "0", "3", "2"),
             CurveSpec::segment({"0", "5"}, {"4", "5"})});
    auto kc = t[1].curvature_jet(Real("1.3"), 3);
    CHECK(close(kc[0], Real("0.5"), tenpow(-70)));
    for (int m = 1; m <= 3; ++m) CHECK(close(kc[m], Real(0), tenpow(-60)));
    // major-axis vertex of the ellipse: K = a / b^2
    auto ke = t[2].curvature_jet(Real(0), 1);
    CHECK(close(ke[0], Real(3) / 4, tenpow(-60)));
    auto ks = t[3].curvature_jet(Real(1), 2);
    for (auto& v : ks) CHECK(v == 0);
}

TEST_CASE("arc length round trip on a Fourier curve") {
    PrecisionGuard g(256);
    Table t({CurveSpec::fourier("0", "0", {"1", "0.05", "-0.02"}, {"0.01"})});
    for (const char* th : {"0.1", "1.7", "3.3", "6.0"}) {
        Real s = t[1].s_of_theta(Real(th));
        CHECK(close(t[1].theta_of_s(s), Real(th), tenpow(-65)));
    }
}

TEST_CASE("invalid scatterers are rejected") {
    PrecisionGuard g(128);
    CHECK_THROWS_AS(Table({CurveSpec::circle("0", "0", "-1")}), DomainError);
    CHECK_THROWS_AS(Table({CurveSpec::segment({"1", "1"}, {"1", "1"})}), DomainError);
    // strongly dented radial curve is not convex
    CHECK_THROWS_AS(Table({CurveSpec::fourier("0", "0", {"1", "0", "0.3"})}), DomainError);
}

TEST_CASE("non-eclipse condition") {
    PrecisionGuard g(128);
    CHECK(check_non_eclipse(equilateral()).pass);
    Table col({CurveSpec::circle("0", "0", "1"), CurveSpec::circle("4", "0", "1"), CurveSpec::circle("8", "0", "1")});
    auto r = check_non_eclipse(col);
    CHECK_FALSE(r.pass);
    CHECK(r.triple == std::array<int, 3>{1, 3, 2});
    CHECK(check_non_eclipse(pair_at("6")).pass);
}
