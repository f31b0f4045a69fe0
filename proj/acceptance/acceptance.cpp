#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "openbilliards/pipeline.hpp"

using namespace ob;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string sci(const Real& x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3e", dbl(x));
    return b;
}

const char* kH = "5.196152422706632";

Table equilateral() {
    return Table({CurveSpec::circle("0", "0", "1"), CurveSpec::circle("6", "0", "1"), CurveSpec::circle("3", kH, "1")});
}

TableConfig config(const std::string& name) { return load_config(std::string(OB_SOURCE_DIR) + "/configs/" + name + ".toml"); }

SpectrumTable family_spectrum(const Table& t, unsigned bits, int n_min, int n_max) {
    SpectrumTable st;
    st.bits = bits;
    st.table_hash = table_fingerprint(t);
    add_family(st, t, "12", "32", n_min, n_max);
    return st;
}

// radii of the (12) bounces, in the order of the orbit's points
std::array<Real, 2> true_radii(const Table& t) {
    auto o = solve_orbit(t, "12");
    std::array<Real, 2> r;
    for (int k = 0; k < 2; ++k) {
        auto& sc = t[o.points[k].i];
        r[k] = 1 / sc.curvature_native(sc.theta_of_s(o.points[k].s));
    }
    return r;
}

Real radii_error(const Radii& got, const std::array<Real, 2>& truth) {
    auto rel = [](const Real& a, const Real& b) { return Real(abs(a - b) / b); };
    Real e1 = std::max(rel(got.R0, truth[0]), rel(got.R1, truth[1]));
    Real e2 = std::max(rel(got.R0, truth[1]), rel(got.R1, truth[0]));
    return std::min(e1, e2);
}

Outcome symplecticity() {
    PrecisionGuard g(256);
    Table t = equilateral();
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> us(0, 1), ur(-0.95, 0.95);
    std::uniform_int_distribution<int> ui(1, 3);
    Real worst = 0;
    int used = 0, tried = 0;
    while (used < 1000 && tried < 100000) {
        ++tried;
        int i = ui(rng);
        PhasePoint x{i, Real(us(rng)) * t[i].length(), Real(ur(rng))};
        try {
            worst = std::max(worst, Real(abs(differential(t, x).det() - 1)));
            ++used;
        } catch (const EscapeError&) {
        } catch (const TangencyError&) {
        }
    }
    return {used == 1000 && worst < tenpow(-30),
            std::to_string(used) + " points (" + std::to_string(tried) + " drawn), max |det DF - 1| = " + sci(worst)};
}

Outcome closed_form_monodromy() {
    PrecisionGuard g(256);
    auto o = solve_orbit(Table({CurveSpec::circle("0", "0", "1"), CurveSpec::circle("6", "0", "1")}), "12");
    Real mu = 5 - 2 * sqrt(Real(6));
    Real el = abs(o.lambda - mu * mu), ee = abs(o.le - log(5 + 2 * sqrt(Real(6))));
    return {el < tenpow(-20) && ee < tenpow(-20), "lambda error " + sci(el) + ", LE error " + sci(ee)};
}

Outcome orbit_correctness() {
    PrecisionGuard g(256);
    Table t({CurveSpec::circle("0", "0", "1"), CurveSpec::circle("6", "0", "1"),
             CurveSpec::circle("3", to_decimal(3 * sqrt(Real(3)), 90), "1")});
    Real el = abs(solve_orbit(t, "123").length - 3 * (6 - sqrt(Real(3))));
    auto hd = solve_family(equilateral(), "12", "32", 1, 20);
    Real worst_ratio = 0;
    bool ok = true;
    for (auto& [n, o] : hd.orbits) {
        auto p = is_palindromic(o.word);
        if (!p) return {false, "h_" + std::to_string(n) + " is not palindromic"};
        // time reversal about the perpendicular bounce at pos_q
        size_t P = o.points.size();
        Real d = 0;
        for (size_t k = 0; k <= P / 2; ++k) {
            auto& a = o.points[(p->pos_q + k) % P];
            auto& b = o.points[(p->pos_q + P - k) % P];
            if (a.i != b.i) return {false, "label mismatch in h_" + std::to_string(n)};
            d = std::max({d, Real(abs(a.s - b.s)), Real(abs(a.r + b.r))});
        }
        Real bound = 10 * std::max(o.residual, eps_bits(256));
        ok = ok && d <= bound;
        worst_ratio = std::max(worst_ratio, Real(d / bound));
    }
    return {el < tenpow(-20) && ok, "length error " + sci(el) + ", worst symmetry defect / (10 x residual) = " +
                                        sci(worst_ratio) + " over n = 1..20"};
}

Outcome length_shape() {
    auto tc = config("asymmetric");
    PrecisionGuard g(tc.run.precision);
    Table t = tc.table();
    auto st = family_spectrum(t, tc.run.precision, tc.run.n_min, tc.run.n_max);
    auto b = extract_base(st, "12", "32", tc.run.n_min, tc.run.n_max);
    Real lam = b.lambda, Ls = b.length_sigma;
    Real lo = 1e300, hi = -1e300;
    int seen = 0;
    for (int n = tc.run.n_max; n >= tc.run.n_min && seen < 5; --n) {
        if (n % 2) continue;
        ++seen;
        Real r = (st.length(homoclinic_family("12", "32", n)) - (n + 1) * Ls - b.linf_even) / pow(lam, n);
        lo = std::min(lo, r), hi = std::max(hi, r);
    }
    Real fl = (hi - lo) / abs(hi);
    auto R = true_radii(t);
    Real X = 2 * R[0] / Ls, Y = 2 * R[1] / Ls;
    Real ratio = b.c_odd / (b.c_even * lam);
    Real e = std::min(abs(ratio - Q_form(Y, X, lam) / Q_form(X, Y, lam)), abs(ratio - Q_form(X, Y, lam) / Q_form(Y, X, lam)));
    return {fl < tenpow(-3) && e < tenpow(-4), "stabilization " + sci(fl) + " (bound 1e-3); odd/even ratio " + sci(ratio) +
                                                   " vs Q ratio " + sci(Q_form(Y, X, lam) / Q_form(X, Y, lam)) +
                                                   ", error " + sci(e) + " (bound 1e-4)"};
}

Outcome radii_recovery() {
    std::string detail;
    bool ok = true;
    for (auto name : {"equilateral", "asymmetric"}) {
        auto tc = config(name);
        PrecisionGuard g(tc.run.precision);
        Table t = tc.table();
        auto st = family_spectrum(t, tc.run.precision, tc.run.n_min, tc.run.n_max);
        auto b = extract_base(st, "12", "32", tc.run.n_min, tc.run.n_max);
        std::string part;
        try {
            Real e = radii_error(recover_radii(b.lambda, b.length_sigma, b.c_even, b.c_odd), true_radii(t));
            ok = ok && e < tenpow(-6);
            part = sci(e);
        } catch (const std::exception& ex) {
            ok = false;
            part = ex.what();
        }
        detail += std::string(detail.empty() ? "" : "; ") + name + " relative error " + part;
    }
    return {ok, detail};
}

Outcome series_fidelity() {
    using Q = Rational;
    auto cs = CoefficientSet<Q>::zeros(4, Q(3, 2));
    cs.a[1] = Q(2, 7), cs.a[2] = Q(-3, 11), cs.a[3] = Q(5, 13);
    cs.gm[1] = Q(1, 5), cs.gm[2] = Q(-2, 9), cs.gm[3] = Q(1, 3);
    cs.g[1] = Q(4, 3), cs.g[2] = Q(-1, 6);
    auto tp = trace_parts(cs, 3);
    Q a1 = cs.a[1], a2 = cs.a[2], g1 = cs.gm[1], g2 = cs.gm[2];
    bool eta_ok = tp.eta.coef(1, 1) == a1 && tp.eta.coef(0, 1) == g1 && tp.eta.coef(2, 2) == Q(3, 2) * a1 * a1 &&
                  tp.eta.coef(1, 2) == -a1 * a1 / 2 + 4 * a1 * g1 + a2 && tp.eta.coef(0, 2) == g1 * g1 + g2;
    bool det_ok = true;
    for (int p = 1; p <= 8; ++p) det_ok = det_ok && det3(level_matrix(p, a1, cs.g[0])) == Q(-2 * p) * a1 * a1 * cs.g[0] * cs.g[0];

    PrecisionGuard g(256);
    const int P = 6;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    Real worst_det = 0, worst_rest = 0;
    std::string worst_name;
    for (int trial = 0; trial < 100; ++trial) {
        auto c = CoefficientSet<Real>::zeros(P - 2, Real(1 + std::abs(u(rng))));
        c.lambda = Real("0.01");
        c.a[1] = Real(0.1 + std::abs(u(rng)));
        for (int j = 1; j <= P - 2; ++j) c.g[j] = Real(u(rng)), c.gm[j] = Real(u(rng)), c.a[j + 1] = Real(u(rng));
        auto r = invert_L(forward_L(c, P), c.lambda, P);
        auto note = [&](const std::string& nm, const Real& got, const Real& want) {
            Real e = abs(got - want);
            if (nm == "g0" || nm == "g1" || nm == "a1") {
                worst_det = std::max(worst_det, e);
            } else if (e > worst_rest) {
                worst_rest = e;
                worst_name = nm;
            }
        };
        for (size_t j = 0; j < r.g.size(); ++j) note("g" + std::to_string(j), r.g[j], c.G(static_cast<int>(j)));
        for (size_t j = 1; j < r.gm.size(); ++j) note("gamma" + std::to_string(j), r.gm[j], c.Gm(static_cast<int>(j)));
        for (size_t j = 1; j < r.a.size(); ++j) note("a" + std::to_string(j), r.a[j], c.A(static_cast<int>(j)));
    }
    bool rt = worst_det < tenpow(-20) && worst_rest < tenpow(-20);
    return {eta_ok && det_ok && rt, std::string("eta coefficients ") + (eta_ok ? "exact" : "WRONG") + ", det A_p " +
                                        (det_ok ? "exact" : "WRONG") + "; round trip over 100 sets: g0,g1,a1 max error " +
                                        sci(worst_det) + ", other coefficients max error " + sci(worst_rest) + " (" +
                                        worst_name + ")"};
}

struct Forward {
    NormalForm nf;
    GluingData gd;
};

Forward forward_side(const Table& t, int K, int J) {
    Forward f;
    f.nf = moser_nf(t, 1, 2, K);
    auto hd = solve_family(t, "12", "32", 8, 8);
    f.gd = extend_and_glue(t, f.nf, 3, hd.orbits.at(8).points[0].s, J);
    return f;
}

Outcome inverse_forward() {
    PrecisionGuard g(896);
    const int P = 4, n_min = 3, n_max = 30;
    Table t = equilateral();
    auto fw = forward_side(t, 14, 7);
    auto cs = scaled_coefficients(fw.nf, fw.gd, P + 2);
    auto Lf = forward_L(cs, P);
    auto st = family_spectrum(t, 896, n_min, n_max);
    auto lf = fit_L(st, "12", "32", fw.nf.lambda, P, n_min, n_max, 2);
    Real worst = 0;
    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= p; ++q) worst = std::max(worst, Real(abs(lf.L.coef(q, p) - Lf.coef(q, p)) / abs(Lf.coef(q, p))));
    Real e0 = abs(lf.g0_limit - cs.g[0]) / cs.g[0], e1 = abs(lf.a1_limit - cs.a[1]) / abs(cs.a[1]);
    return {worst < tenpow(-3) && e0 < tenpow(-3) && e1 < tenpow(-3),
            "max relative L error (p <= 3) " + sci(worst) + "; g0 limit " + sci(e0) + ", a1 limit " + sci(e1)};
}

Outcome xi_triangulation() {
    const unsigned bits = 512;
    const int n_min = 4, n_max = 24;
    PrecisionGuard g(bits);
    Table t = equilateral();
    auto fw = forward_side(t, 12, 6);
    Real direct = abs(fw.gd.xi_inf);
    auto st = family_spectrum(t, bits, n_min, n_max);
    auto b = extract_base(st, "12", "32", n_min, n_max);
    auto o = solve_orbit(t, "12");
    PhasePoint x = o.points[0].i == 2 ? o.points[0] : o.points[1];
    auto xr = recover_xi_infinity(b.cn_even, b.cn_odd, b.lambda, s_traces(t, x));
    Real lit = sqrt(xr.xi2);
    int n = n_max % 2 ? n_max - 1 : n_max;
    auto h = solve_orbit(t, homoclinic_family("12", "32", n));
    Real ds = h.points[n + 1].s - fw.nf.fixed.s;
    Real area = sqrt(abs(tan(fw.nf.theta)) * ds * ds / (2 * pow(fw.nf.lambda, n)));
    auto rel = [](const Real& a, const Real& b) { return Real(abs(a - b) / abs(b)); };
    Real e12 = rel(lit, area), e13 = rel(lit, direct), e23 = rel(area, direct);
    Real espec = rel(sqrt(-b.cn_even), direct);
    return {std::max({e12, e13, e23}) < tenpow(-3),
            "length-asymptotic " + sci(lit) + ", area " + sci(area) + ", intercept " + sci(direct) + "; pairwise " +
                sci(e12) + " " + sci(e13) + " " + sci(e23) + " (sqrt(-c_n) route: " + sci(espec) + ")"};
}

Outcome folding_invariance() {
    PrecisionGuard g(256);
    Table t = equilateral();
    auto hd = solve_family(t, "12", "32", 1, 15);
    auto f = fold_table(t, 1, 2, 3, 2);
    Real wl = 0, wm = 0;
    for (int n = 1; n <= 15; ++n) {
        auto c = check_fold(f, t, hd.orbits.at(n), n);
        wl = std::max(wl, Real(abs(c.length - c.length_folded)));
        wm = std::max(wm, Real(abs(c.multiplier_log - c.multiplier_log_folded)));
    }
    return {wl < tenpow(-12) && wm < tenpow(-12), "n = 1..15: max length difference " + sci(wl) +
                                                        ", max log-multiplier difference " + sci(wm)};
}

Table dented(const Real& e) {
    auto s = [](const Real& x) { return to_decimal(x, 90); };
    std::vector<std::string> rc{s(1 + 3 * e), "0", s(-4 * e), "0", s(e)};
    return Table({CurveSpec::fourier("0", "0", rc), CurveSpec::fourier("6", "0", rc), CurveSpec::circle("3", kH, "1")});
}

Outcome jet_correspondence_check() {
    PrecisionGuard g(256);
    Table t = equilateral();
    auto jc = jet_correspondence(fold_table(t, 1, 2, 3, 2), 8);
    Real e("0.002");
    auto jd = jet_correspondence(fold_table(dented(e), 1, 2, 3, 2), 6);
    auto fwd = [](const Real& kpp) { return moser_nf(fold_table(dented(-kpp / 192), 1, 2, 3, 2).table, 1, 2, 6).a[1]; };
    auto kr = recover_Kpp(fwd, jd.nf.a[1], Real(0), Real("-0.1"));
    Real ek = abs(kr.Kpp - jd.Kpp) / abs(jd.Kpp);
    auto fw = forward_side(t, 12, 6);
    auto arc = reconstruct_third_arc(t, fw.nf, fw.gd);
    Vec2 c(Real(3), Real(kH));
    Real pe = 0, ke = 0;
    for (auto& a : arc) {
        pe = std::max({pe, Real(abs(norm(a.point - c) - 1)), Real(norm(a.point - t[3].eval(a.s).point))});
        ke = std::max(ke, Real(abs(a.K - 1)));
    }
    Real ee = std::max(jc.entry_error, jd.entry_error);
    return {ee < tenpow(-10) && ek < tenpow(-4) && pe < tenpow(-6) && ke < tenpow(-4) && !arc.empty(),
            "DT* entry error " + sci(ee) + "; K'' relative error " + sci(ek) + "; arc of " + std::to_string(arc.size()) +
                " points: position error " + sci(pe) + ", curvature error " + sci(ke)};
}

Outcome gluing() {
    PrecisionGuard g(256);
    auto fw = forward_side(equilateral(), 12, 6);
    auto& gd = fw.gd;
    return {gd.max_swap < tenpow(-10) && gd.max_det < tenpow(-8) && gd.max_display < tenpow(-6) && !gd.samples.empty(),
            std::to_string(gd.samples.size()) + " samples: swap " + sci(gd.max_swap) + ", det " + sci(gd.max_det) +
                ", display " + sci(gd.max_display)};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> expect_fail, only;
    app.add_option("--expect-fail", expect_fail, "criteria documented as failing; exit 0 iff exactly these fail")
        ->delimiter(',');
    app.add_option("--only", only, "run a subset")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"symplecticity", symplecticity},
        {"closed-form monodromy", closed_form_monodromy},
        {"orbit correctness", orbit_correctness},
        {"length asymptotics shape", length_shape},
        {"radii recovery", radii_recovery},
        {"series engine fidelity", series_fidelity},
        {"inverse/forward cross-validation", inverse_forward},
        {"xi_inf triangulation", xi_triangulation},
        {"folding invariance", folding_invariance},
        {"jet correspondence", jet_correspondence_check},
        {"gluing structure", gluing},
    };
    std::set<int> failed, wanted(only.begin(), only.end());
    for (size_t k = 0; k < criteria.size(); ++k) {
        int id = static_cast<int>(k) + 1;
        if (!wanted.empty() && !wanted.count(id)) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome r;
        try {
            r = criteria[k].second();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!r.pass) failed.insert(id);
        std::printf("%s criterion %d (%s): %s [%.1fs]\n", r.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(),
                    r.detail.c_str(), sec);
        std::fflush(stdout);
    }
    std::set<int> expected;
    for (int e : expect_fail)
        if (wanted.empty() || wanted.count(e)) expected.insert(e);
    std::printf("%zu of %zu run criteria pass\n", (wanted.empty() ? criteria.size() : wanted.size()) - failed.size(),
                wanted.empty() ? criteria.size() : wanted.size());
    if (failed != expected) {
        std::printf("failing set differs from the documented one\n");
        return 1;
    }
    return 0;
}
