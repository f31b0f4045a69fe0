#include "common.hpp"

using namespace obt;

TEST_CASE("two-periodic orbit between unit circles") {
    PrecisionGuard g(256);
    auto o = solve_orbit(pair_at("6"), "12");
    CHECK(close(o.length, Real(8), tenpow(-60)));
    Real mu = 5 - 2 * sqrt(Real(6));
    CHECK(close(o.lambda, mu * mu, tenpow(-60)));
    CHECK(close(o.le, log(5 + 2 * sqrt(Real(6))), tenpow(-60)));
    CHECK(close(o.monodromy.det(), Real(1), tenpow(-60)));
    CHECK(o.residual < tenpow(-60));
}

TEST_CASE("triangle orbit in the equilateral table") {
    PrecisionGuard g(256);
    Table t({CurveSpec::circle("0", "0", "1"), CurveSpec::circle("6", "0", "1"),
             CurveSpec::circle("3", to_decimal(3 * sqrt(Real(3)), 80), "1")});
    auto o = solve_orbit(t, "123");
    CHECK(close(o.length, 3 * (6 - sqrt(Real(3))), tenpow(-60)));
    auto o2 = solve_orbit(t, "132");
    CHECK(close(o2.length, o.length, tenpow(-60)));
}

TEST_CASE("palindromic family orbits bounce perpendicularly") {
    PrecisionGuard g(256);
    Table t = equilateral();
    auto hd = solve_family(t, "12", "32", 2, 7);
    CHECK(hd.orbits.size() >= 6);
    for (auto& [n, o] : hd.orbits) {
        auto p = is_palindromic(o.word);
        REQUIRE(p);
        CHECK(abs(o.points[p->pos_q].r) < tenpow(-50));
        CHECK(abs(o.points[p->pos_zero].r) < tenpow(-50));
        // the transposed word has the same length
        if (n == 3) CHECK(close(solve_orbit(t, transpose(o.word)).length, o.length, tenpow(-55)));
    }
    // lengths grow like n times the base length
    Real d = hd.orbits.at(7).length - hd.orbits.at(6).length;
    CHECK(close(d, hd.base.length, tenpow(-8)));
}

TEST_CASE("inadmissible words are rejected") {
    PrecisionGuard g(128);
    CHECK_THROWS_AS(solve_orbit(equilateral(), "11"), DomainError);
    CHECK_THROWS_AS(solve_orbit(equilateral(), "14"), DomainError);
}
