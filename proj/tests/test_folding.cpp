#include "common.hpp"

using namespace obt;

namespace {
Table dented(const Real& e) {
    auto s = [](const Real& x) { return to_decimal(x, 90); };
    std::vector<std::string> rc{s(1 + 3 * e), "0", s(-4 * e), "0", s(e)};
    return Table({CurveSpec::fourier("0", "0", rc), CurveSpec::fourier("6", "0", rc), CurveSpec::circle("3", kH, "1")});
}
} // namespace

TEST_CASE("folded table reproduces the family") {
    PrecisionGuard g(256);
    Table t = equilateral();
    auto hd = solve_family(t, "12", "32", 1, 15);
    auto f = fold_table(t, 1, 2, 3, 2);
    CHECK(f.symmetry_defect < tenpow(-60));
    CHECK(close(f.wall_distance, Real(2), tenpow(-60)));
    for (int n = 1; n <= 15; ++n) {
        auto c = check_fold(f, t, hd.orbits.at(n), n);
        CHECK(abs(c.length - c.length_folded) < tenpow(-60));
        CHECK(abs(c.multiplier_log - c.multiplier_log_folded) < tenpow(-60));
        CHECK(c.transport_error < tenpow(-60));
        CHECK(c.double_step_defect < tenpow(-60));
    }
}

TEST_CASE("asymmetric pair cannot be folded") {
    PrecisionGuard g(192);
    Table t({CurveSpec::circle("0", "0", "1"), CurveSpec::circle("6", "0", "1.3"), CurveSpec::circle("3", kH, "1")});
    CHECK_THROWS_AS(fold_table(t, 1, 2, 3, 2), SymmetryError);
}

TEST_CASE("linear part at the wall") {
    PrecisionGuard g(256);
    auto f = fold_table(equilateral(), 1, 2, 3, 2);
    auto jc = jet_correspondence(f, 8);
    CHECK(close(jc.A, Real(6), tenpow(-60)));
    CHECK(jc.trace_error < tenpow(-60));
    CHECK(jc.entry_error < tenpow(-60));
    CHECK(jc.nf.a[1] > 0);
}

TEST_CASE("polar curvature formula") {
    PrecisionGuard g(256);
    auto pc = polar_curvature(Real(1), Real(0), Real("0.384"));
    CHECK(close(pc[0], Real(1), tenpow(-70)));
    CHECK(close(pc[1], Real("-0.384"), tenpow(-70)));
    // rho0 != 1 against the boundary's own curvature jet
    std::vector<std::string> rc{"1.01", "0", "-0.02", "0", "0.003"};
    Table t({CurveSpec::fourier("0", "0", rc), CurveSpec::fourier("6", "0", rc), CurveSpec::circle("3", kH, "1")});
    auto o = solve_orbit(t, "12");
    auto kj = t[2].curvature_jet(o.points[1].s, 2);
    Real r0 = Real("1.01") - Real("0.02") + Real("0.003");
    Real r2 = 4 * Real("0.02") - 16 * Real("0.003");
    Real r4 = -16 * Real("0.02") + 256 * Real("0.003");
    auto p = polar_curvature(r0, r2, r4);
    CHECK(close(p[0], kj[0], tenpow(-50)));
    CHECK(close(p[1], kj[2], tenpow(-40)));
}

TEST_CASE("second curvature derivative from the first invariant") {
    PrecisionGuard g(256);
    Real e("0.002");
    auto f = fold_table(dented(e), 1, 2, 3, 2);
    auto jc = jet_correspondence(f, 6);
    CHECK(close(jc.Kpp, -192 * e, tenpow(-50)));
    auto fwd = [](const Real& kpp) { return moser_nf(fold_table(dented(-kpp / 192), 1, 2, 3, 2).table, 1, 2, 6).a[1]; };
    auto r = recover_Kpp(fwd, jc.nf.a[1], Real(0), Real("-0.1"));
    CHECK(close(r.Kpp, jc.Kpp, tenpow(-30)));
    CHECK_THROWS_AS(recover_Kpp([](const Real&) { return Real(1); }, Real(1), Real(0), Real(1)), DegeneracyError);
}

TEST_CASE("third arc from gluing differentials") {
    PrecisionGuard g(256);
    Table t = equilateral();
    auto hd = solve_family(t, "12", "32", 6, 8);
    auto nf = moser_nf(t, 1, 2, 12);
    auto gd = extend_and_glue(t, nf, 3, hd.orbits.at(8).points[0].s, 6);
    auto arc = reconstruct_third_arc(t, nf, gd);
    CHECK(arc.size() >= 10);
    Vec2 c(Real(3), Real(kH));
    for (auto& a : arc) {
        CHECK(abs(norm(a.point - c) - 1) < tenpow(-50));
        CHECK(norm(a.point - t[3].eval(a.s).point) < tenpow(-50));
        CHECK(abs(a.K - 1) < tenpow(-50));
    }
}
