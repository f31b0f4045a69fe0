#pragma once

#include <chrono>
#include <functional>

#include "config.hpp"
#include "extraction.hpp"
#include "folding.hpp"

namespace ob {

using json = nlohmann::json;

// every numeric leaves as a decimal string tagged with the precision it was computed at
inline json jnum(const Real& x, int digits = 0) {
    unsigned b = current_bits();
    return json{{"value", to_decimal(x, digits ? digits : serial_digits(b))}, {"bits", b}};
}
inline json jnum(const Real& x, const std::string& from, int digits = 0) {
    json j = jnum(x, digits);
    j["from"] = from;
    return j;
}

inline std::string utc_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

struct Csv {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string str() const {
        std::ostringstream os;
        os << "# format_version=" << kFormatVersion << '\n';
        for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
        os << '\n';
        for (auto& r : rows) {
            for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << '\n';
        }
        return os.str();
    }
};

// per-stage error capture: partial results stay in the report
struct StageLog {
    json errors = json::array();
    bool run(const std::string& stage, const std::function<void()>& f) {
        try {
            f();
            return true;
        } catch (const std::exception& e) {
            errors.push_back({{"stage", stage}, {"error", e.what()}});
            return false;
        }
    }
    bool ok() const { return errors.empty(); }
};

inline json orbit_json(const PeriodicOrbit& o) {
    json pts = json::array();
    for (auto& p : o.points) pts.push_back({{"obstacle", p.i}, {"s", jnum(p.s)}, {"r", jnum(p.r)}});
    return {{"word", o.word},      {"length", jnum(o.length)},       {"le", jnum(o.le)},
            {"lambda", jnum(o.lambda)}, {"residual", jnum(o.residual, 6)}, {"iterations", o.iterations},
            {"points", pts}};
}

// coefficients in the sign-invariant scaling abar_j = a_j xi^2j / lambda, gbar_j = gamma_j xi^(j-1), g_j xi^j
inline CoefficientSet<Real> scaled_coefficients(const NormalForm& nf, const GluingData& gd, int P) {
    Real xi = gd.xi_inf, lam = nf.lambda;
    auto cs = CoefficientSet<Real>::zeros(P, gd.g[0]);
    cs.lambda = lam;
    for (int j = 1; j <= P + 1; ++j) {
        Real aj = j < static_cast<int>(nf.a.size()) ? nf.a[j] : Real(0);
        cs.a[j] = aj * pow(xi, 2 * j) / lam;
        cs.gm[j] = j <= gd.gamma.order() ? gd.gamma[j] * pow(xi, j - 1) : Real(0);
        cs.g[j] = j <= gd.g.order() ? gd.g[j] * pow(xi, j) : Real(0);
    }
    return cs;
}

inline json coefficients_json(const CoefficientSet<Real>& cs, const std::string& from) {
    json a = json::array(), gm = json::array(), g = json::array();
    for (size_t j = 1; j < cs.a.size(); ++j) a.push_back(jnum(cs.a[j]));
    for (size_t j = 1; j < cs.gm.size(); ++j) gm.push_back(jnum(cs.gm[j]));
    for (auto& x : cs.g) g.push_back(jnum(x));
    return {{"abar", a}, {"gammabar", gm}, {"gbar", g}, {"from", from}};
}

inline json series_json(const BalancedSeries<Real>& L, int P) {
    json out = json::array();
    for (int p = 0; p <= P; ++p)
        for (int q = 0; q <= p; ++q) out.push_back({{"q", q}, {"p", p}, {"value", jnum(L.coef(q, p))}});
    return out;
}

// ---- extraction ----

struct ExtractOptions {
    Word sigma = "12", tau = "32";
    int n_min = 4, n_max = 24;
    int order = 3;
    Real a1_tol = Real("1e-12");
    const Table* table = nullptr; // enables the semi-blind S-trace supplier
    int pair_k = 2;
};

struct ExtractResult {
    json report;
    std::vector<Csv> csv;
    std::optional<BaseData> base;
    std::optional<Radii> radii;
    std::optional<LFit> lfit;
    std::optional<CoefficientSet<Real>> coefficients;
    std::optional<Real> xi_spectral; // sqrt(-c_n) from the even family
    std::optional<XiRoute> xi_literal;
    StageLog log;
};

inline ExtractResult run_extract(const SpectrumTable& st, const ExtractOptions& o) {
    PrecisionGuard pg(st.bits);
    ExtractResult r;
    json& rep = r.report;
    rep["format_version"] = kFormatVersion;
    rep["kind"] = "inverse-report";
    rep["table_hash"] = st.table_hash;
    rep["precision_bits"] = st.bits;
    rep["sigma"] = o.sigma;
    rep["tau"] = o.tau;
    rep["n_range"] = {o.n_min, o.n_max};
    std::string fam = o.tau + "(" + o.sigma + ")^n, n=" + std::to_string(o.n_min) + ".." + std::to_string(o.n_max);

    r.log.run("extract_base", [&] {
        r.base = extract_base(st, o.sigma, o.tau, o.n_min, o.n_max);
        auto& b = *r.base;
        rep["lambda"] = jnum(b.lambda, "LE(" + o.sigma + ")");
        rep["le_sigma"] = jnum(b.le_sigma, "LE(" + o.sigma + ")");
        rep["length_sigma"] = jnum(b.length_sigma, "L(" + o.sigma + ")");
        rep["linf_even"] = jnum(b.linf_even, "even fit of lengths " + fam);
        rep["linf_odd"] = jnum(b.linf_odd, "odd fit of lengths " + fam);
        rep["c_even"] = jnum(b.c_even, "even fit of lengths " + fam);
        rep["c_odd"] = jnum(b.c_odd, "odd fit of lengths " + fam);
        rep["fit_condition"] = {jnum(b.fit_even.cond, 4), jnum(b.fit_odd.cond, 4)};
        Csv c{"length_residuals", {"n", "parity", "residual", "residual_over_lambda_n", "model", "fit_error"}, {}};
        for (int par = 0; par < 2; ++par) {
            const auto& f = par ? b.fit_odd : b.fit_even;
            Real linf = par ? b.linf_odd : b.linf_even;
            for (size_t i = 0; i < f.n.size(); ++i) {
                Real res = f.data[i] - linf;
                c.rows.push_back({std::to_string(f.n[i]), par ? "odd" : "even", to_decimal(res, 20),
                                  to_decimal(res / pow(b.lambda, f.n[i]), 20), to_decimal(f.model[i] - linf, 20),
                                  to_decimal(f.data[i] - f.model[i], 6)});
            }
        }
        std::sort(c.rows.begin(), c.rows.end(), [](auto& a, auto& b) { return std::stoi(a[0]) < std::stoi(b[0]); });
        r.csv.push_back(c);
        if (b.cn_even < 0) {
            r.xi_spectral = sqrt(-b.cn_even);
            rep["xi_inf"] = jnum(*r.xi_spectral, "sqrt(-c_n), even fit of lengths " + fam);
        }
    });
    if (r.base)
        r.log.run("recover_radii", [&] {
            auto& b = *r.base;
            r.radii = recover_radii(b.lambda, b.length_sigma, b.c_even, b.c_odd);
            rep["R0"] = jnum(r.radii->R0, "trace and even/odd ratio");
            rep["R1"] = jnum(r.radii->R1, "trace and even/odd ratio");
        });
    if (r.base)
        r.log.run("fit_L", [&] {
            r.lfit = fit_L(st, o.sigma, o.tau, r.base->lambda, o.order, o.n_min, o.n_max);
            auto& lf = *r.lfit;
            rep["L"] = series_json(lf.L, o.order);
            rep["L_fit"] = {{"condition", jnum(lf.fit.cond, 4)}, {"extra_levels", lf.extra},
                            {"from", "LE of " + fam}};
            rep["g0_limit"] = jnum(lf.g0_limit, "lim y_n");
            rep["a1_limit"] = jnum(lf.a1_limit, "lim (lambda^-n - 2 cosh / g0) / 2n");
            Csv c{"lyapunov_fit", {"n", "y", "model", "fit_error"}, {}};
            for (size_t i = 0; i < lf.fit.n.size(); ++i)
                c.rows.push_back({std::to_string(lf.fit.n[i]), to_decimal(lf.fit.data[i], 30),
                                  to_decimal(lf.fit.model[i], 30), to_decimal(lf.fit.data[i] - lf.fit.model[i], 6)});
            r.csv.push_back(c);
        });
    if (r.lfit)
        r.log.run("recover_coefficients", [&] {
            r.coefficients = recover_coefficients(r.lfit->L, r.base->lambda, o.order, o.a1_tol);
            rep["coefficients"] = coefficients_json(*r.coefficients, "L array");
            if (r.coefficients->g[0] == 0) throw Inconsistency("gbar_0 vanished: pipeline bug");
        });
    if (o.table && r.base)
        r.log.run("s_traces", [&] {
            auto orb = solve_orbit(*o.table, o.sigma);
            PhasePoint x = orb.points[0];
            for (auto& p : orb.points)
                if (p.i == o.pair_k) x = p;
            auto tr = s_traces(*o.table, x);
            r.xi_literal = recover_xi_infinity(r.base->cn_even, r.base->cn_odd, r.base->lambda, tr);
            rep["xi_inf_s_trace_formula"] =
                jnum(sqrt(r.xi_literal->xi2), "S-trace closed form (semi-blind, reads geometry)");
        });
    rep["errors"] = r.log.errors;
    return r;
}

// ---- forward side: normal form and gluing ----

struct NfResult {
    NormalForm nf;
    std::optional<GluingData> gd;
    json report;
};

inline NfResult run_nf(const Table& t, const RunConfig& rc, bool glue, StageLog& log) {
    NfResult r;
    json& rep = r.report;
    rep["format_version"] = kFormatVersion;
    rep["kind"] = "normal-form";
    rep["pair"] = {rc.pair_j, rc.pair_k};
    rep["precision_bits"] = current_bits();
    if (!log.run("moser_nf", [&] {
            r.nf = moser_nf(t, rc.pair_j, rc.pair_k, rc.jet_order);
            auto& nf = r.nf;
            json a = json::array();
            for (size_t k = 1; k < nf.a.size(); ++k) a.push_back(jnum(nf.a[k]));
            rep["lambda"] = jnum(nf.lambda);
            rep["a"] = a;
            rep["fixed_point"] = {{"obstacle", nf.fixed.i}, {"s", jnum(nf.fixed.s)}};
            rep["theta"] = jnum(nf.theta);
            rep["conjugacy_residual"] = jnum(nf.conjugacy_residual, 6);
            rep["symplectic_defect"] = jnum(nf.symplectic_defect, 6);
            rep["validity_radius"] = jnum(validity_radius(t, nf, tenpow(-30)), 6);
        }))
        return r;
    if (glue && rc.third >= 1 && rc.third <= t.size())
        log.run("extend_and_glue", [&] {
            int nmid = 8;
            auto hd = solve_family(t, rc.sigma, rc.tau, nmid, nmid);
            r.gd = extend_and_glue(t, r.nf, rc.third, hd.orbits[nmid].points[0].s, std::min(rc.jet_order / 2, 7));
            auto& gd = *r.gd;
            json gm = json::array(), g = json::array();
            for (int j = 0; j <= gd.gamma.order(); ++j) gm.push_back(jnum(gd.gamma[j]));
            for (int j = 0; j <= gd.g.order(); ++j) g.push_back(jnum(gd.g[j]));
            rep["gluing"] = {{"third", gd.third},
                             {"m0", gd.l},
                             {"s_inf", jnum(gd.s_inf)},
                             {"xi_inf", jnum(gd.xi_inf)},
                             {"gamma", gm},
                             {"g", g},
                             {"max_swap_error", jnum(gd.max_swap, 6)},
                             {"max_det_error", jnum(gd.max_det, 6)},
                             {"max_display_error", jnum(gd.max_display, 6)}};
        });
    return r;
}

// ---- full chain ----

struct Check {
    std::string name;
    bool pass = false;
    bool skipped = false;
    std::string value, bound, detail;
};

struct VerifyResult {
    json report;
    std::vector<Csv> csv;
    std::vector<Check> checks;
    SpectrumTable spectrum;
    bool ok() const {
        for (auto& c : checks)
            if (!c.pass && !c.skipped) return false;
        return true;
    }
};

// relative error; floor keeps a vanishing reference (a degenerate table) from inflating it
inline Real rel_err(const Real& x, const Real& ref, const Real& floor = tenpow(-300)) {
    return abs(x - ref) / std::max<Real>(abs(ref), floor);
}

inline VerifyResult run_verify(const TableConfig& tc) {
    const RunConfig& rc = tc.run;
    PrecisionGuard pg(rc.precision);
    VerifyResult v;
    StageLog log;
    Table t = tc.table();
    auto add = [&](std::string name, bool pass, const Real& val, const std::string& bound, std::string detail = "") {
        v.checks.push_back({std::move(name), pass, false, to_decimal(val, 6), bound, std::move(detail)});
    };
    auto skip = [&](std::string name, std::string why) { v.checks.push_back({std::move(name), false, true, "", "", why}); };

    log.run("validate", [&] {
        auto er = check_non_eclipse(t);
        v.checks.push_back({"non_eclipse", er.pass, false, std::to_string(er.margin), "> 0",
                            er.pass ? "" : "triple " + std::to_string(er.triple[0]) + std::to_string(er.triple[1]) +
                                               " / " + std::to_string(er.triple[2])});
        if (!er.pass) throw DomainError("table violates the non-eclipse condition");
    });
    if (!log.ok()) {
        v.report = {{"format_version", kFormatVersion}, {"kind", "verify-report"}, {"errors", log.errors}};
        return v;
    }

    v.spectrum.bits = rc.precision;
    v.spectrum.table_hash = table_fingerprint(t);
    bool have_spec = log.run("spectrum", [&] { add_family(v.spectrum, t, rc.sigma, rc.tau, rc.n_min, rc.n_max); });

    NfResult nfr = run_nf(t, rc, true, log);

    ExtractResult ex;
    if (have_spec) {
        ExtractOptions eo;
        eo.sigma = rc.sigma;
        eo.tau = rc.tau;
        eo.n_min = rc.n_min;
        eo.n_max = rc.n_max;
        eo.order = rc.order;
        eo.table = &t;
        eo.pair_k = rc.pair_k;
        ex = run_extract(v.spectrum, eo);
        for (auto& e : ex.log.errors) log.errors.push_back(e);
        for (auto& c : ex.csv) v.csv.push_back(c);
    }

    bool have_nf = nfr.report.contains("lambda");
    if (ex.base && have_nf) add("lambda", rel_err(ex.base->lambda, nfr.nf.lambda) < tenpow(-20),
                                rel_err(ex.base->lambda, nfr.nf.lambda), "1e-20", "spectrum vs normal form");

    if (have_spec) {
        // residual / lambda^n over the top five even n
        std::vector<Real> q;
        Real lam = exp(-2 * v.spectrum.le(rc.sigma));
        Real Ls = v.spectrum.length(rc.sigma);
        std::vector<int> ev;
        for (int n = rc.n_max; n >= rc.n_min && ev.size() < 5; --n)
            if (n % 2 == 0) ev.push_back(n);
        if (ex.base && ev.size() == 5) {
            Real lo = 1e300, hi = -1e300;
            for (int n : ev) {
                Real r = (v.spectrum.length(homoclinic_family(rc.sigma, rc.tau, n)) - (n + 1) * Ls - ex.base->linf_even) /
                         pow(lam, n);
                lo = std::min(lo, r), hi = std::max(hi, r);
            }
            Real fl = (hi - lo) / abs(hi);
            add("length_residual_stabilization", fl < tenpow(-3), fl, "1e-3", "top five even n");
        }
    }

    if (ex.radii) {
        auto orb = solve_orbit(t, rc.sigma);
        Real K0 = t[orb.points[0].i].curvature_native(t[orb.points[0].i].theta_of_s(orb.points[0].s));
        Real K1 = t[orb.points[1].i].curvature_native(t[orb.points[1].i].theta_of_s(orb.points[1].s));
        // R0 belongs to the obstacle of the first symbol of the family's tail
        Real e = std::max(std::min(rel_err(ex.radii->R0, 1 / K0), rel_err(ex.radii->R0, 1 / K1)),
                          std::min(rel_err(ex.radii->R1, 1 / K1), rel_err(ex.radii->R1, 1 / K0)));
        add("radii", e < tenpow(-6), e, "1e-6", "spectrum-only radii vs boundary curvature");
    }

    std::optional<CoefficientSet<Real>> direct;
    if (nfr.gd) {
        auto& gd = *nfr.gd;
        add("gluing_swap", gd.max_swap < tenpow(-10), gd.max_swap, "1e-10");
        add("gluing_det", gd.max_det < tenpow(-8), gd.max_det, "1e-8");
        add("gluing_display", gd.max_display < tenpow(-6), gd.max_display, "1e-6");
        direct = scaled_coefficients(nfr.nf, gd, rc.order + 2);
        nfr.report["scaled_coefficients"] = coefficients_json(*direct, "normal form and gluing");
    }

    if (direct && ex.lfit) {
        auto& lf = *ex.lfit;
        Real e0 = rel_err(lf.g0_limit, direct->g[0]);
        Real e1 = rel_err(lf.a1_limit, direct->a[1], tenpow(-6));
        add("g0_limit", e0 < tenpow(-3), e0, "1e-3", "lim y_n vs gluing");
        add("a1_limit", e1 < tenpow(-3), e1, "1e-3", "closing limit vs normal form");
        auto fwd = forward_L(*direct, rc.order);
        Real worst = 0;
        Csv c{"L_array", {"q", "p", "fitted", "forward", "rel_error"}, {}};
        for (int p = 0; p <= std::min(rc.order, 3); ++p)
            for (int q = 0; q <= p; ++q) {
                Real e = rel_err(lf.L.coef(q, p), fwd.coef(q, p), tenpow(-6) * abs(fwd.coef(0, 0)));
                worst = std::max(worst, e);
                c.rows.push_back({std::to_string(q), std::to_string(p), to_decimal(lf.L.coef(q, p), 30),
                                  to_decimal(fwd.coef(q, p), 30), to_decimal(e, 6)});
            }
        v.csv.push_back(c);
        add("L_fit_vs_forward", worst < tenpow(-3), worst, "1e-3", "p <= 3");
    }
    if (direct && ex.coefficients) {
        auto& cs = *ex.coefficients;
        Real e = std::max(rel_err(cs.g[0], direct->g[0]), rel_err(cs.a[1], direct->a[1]));
        add("recovered_g0_a1", e < tenpow(-3), e, "1e-3", "invert_L vs normal form");
        Csv c{"coefficients", {"name", "recovered", "direct"}, {}};
        auto row = [&](const std::string& n, const Real& a, const Real& b) {
            c.rows.push_back({n, to_decimal(a, 20), to_decimal(b, 20)});
        };
        for (size_t j = 0; j < cs.g.size(); ++j) row("gbar" + std::to_string(j), cs.g[j], direct->G(static_cast<int>(j)));
        for (size_t j = 1; j < cs.gm.size(); ++j) row("gammabar" + std::to_string(j), cs.gm[j], direct->Gm(static_cast<int>(j)));
        for (size_t j = 1; j < cs.a.size(); ++j) row("abar" + std::to_string(j), cs.a[j], direct->A(static_cast<int>(j)));
        v.csv.push_back(c);
        auto id = identifiability(*direct, rc.order);
        nfr.report["identifiability"] = {{"unknowns", id.names}, {"rank", id.rank}, {"determined", id.determined}};
    }

    if (nfr.gd) {
        Real xi = abs(nfr.gd->xi_inf);
        if (ex.xi_spectral) {
            Real e = rel_err(*ex.xi_spectral, xi);
            add("xi_inf_length_asymptotic", e < tenpow(-3), e, "1e-3", "sqrt(-c_n) vs gluing intercept");
        }
        if (have_spec) {
            // area relation at the largest even n
            int n = rc.n_max % 2 ? rc.n_max - 1 : rc.n_max;
            auto o = solve_orbit(t, homoclinic_family(rc.sigma, rc.tau, n));
            Real ds = o.points[n + 1].s - nfr.nf.fixed.s;
            Real xa = sqrt(abs(tan(nfr.nf.theta)) * ds * ds / (2 * pow(nfr.nf.lambda, n)));
            Real e = rel_err(xa, xi);
            add("xi_inf_area", e < tenpow(-3), e, "1e-3", "n = " + std::to_string(n));
        }
    }

    // folding applies to mirror-symmetric pairs only
    try {
        auto hd = solve_family(t, rc.sigma, rc.tau, 1, 6);
        auto orb = solve_orbit(t, rc.sigma);
        Vec2 x = t[hd.orbits[6].points[0].i].eval(hd.orbits[6].points[0].s).point;
        Real dj = norm(x - t[orb.points[0].i].eval(orb.points[0].s).point);
        Real dk = norm(x - t[orb.points[1].i].eval(orb.points[1].s).point);
        int kept = dk < dj ? orb.points[1].i : orb.points[0].i;
        auto f = fold_table(t, rc.pair_j, rc.pair_k, rc.third, kept);
        Real worst = 0;
        for (int n = 1; n <= 6; ++n) {
            auto c = check_fold(f, t, hd.orbits[n], n);
            worst = std::max({worst, Real(abs(c.length - c.length_folded)),
                              Real(abs(c.multiplier_log - c.multiplier_log_folded))});
        }
        add("folding", worst < tenpow(-12), worst, "1e-12", "n <= 6");
    } catch (const SymmetryError& e) {
        skip("folding", e.what());
    } catch (const std::exception& e) {
        log.errors.push_back({{"stage", "folding"}, {"error", e.what()}});
    }

    json checks = json::array();
    for (auto& c : v.checks)
        checks.push_back({{"name", c.name},
                          {"status", c.skipped ? "skipped" : c.pass ? "pass" : "fail"},
                          {"value", c.value},
                          {"bound", c.bound},
                          {"detail", c.detail}});
    v.report = {{"format_version", kFormatVersion},
                {"kind", "verify-report"},
                {"table", tc.run.name},
                {"table_hash", v.spectrum.table_hash},
                {"precision_bits", rc.precision},
                {"checks", checks},
                {"extraction", ex.report},
                {"normal_form", nfr.report},
                {"errors", log.errors},
                {"all_pass", v.ok() && log.ok()}};
    if (!log.ok()) v.checks.push_back({"stages", false, false, std::to_string(log.errors.size()), "0", "stage errors"});
    return v;
}

} // namespace ob
