#pragma once

#include <utility>

#include "series.hpp"
#include "spectra.hpp"

namespace ob {

struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InsufficientPrecision : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Inconsistency : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AsymptoticFit {
    std::vector<std::pair<int, int>> basis; // (q, p): n^q lambda^{n p}
    std::vector<Real> coef, uncertainty;
    std::vector<int> n;
    std::vector<Real> data, model;
    Real cond = 0;
    Real coef_of(int q, int p) const {
        for (size_t i = 0; i < basis.size(); ++i)
            if (basis[i] == std::make_pair(q, p)) return coef[i];
        return Real(0);
    }
};

namespace detail {

// Householder least squares with unit column scaling; returns solution and cond estimate of R
inline std::vector<Real> householder_ls(std::vector<std::vector<Real>> A, std::vector<Real> b, Real& cond) {
    size_t m = A.size(), k = A.at(0).size();
    if (m < k) throw InsufficientData("fewer samples than unknowns");
    std::vector<Real> scale(k, Real(0));
    for (size_t j = 0; j < k; ++j) {
        for (size_t i = 0; i < m; ++i) scale[j] = std::max(scale[j], Real(abs(A[i][j])));
        if (scale[j] == 0) scale[j] = 1;
        for (size_t i = 0; i < m; ++i) A[i][j] /= scale[j];
    }
    for (size_t j = 0; j < k; ++j) {
        Real nrm = 0;
        for (size_t i = j; i < m; ++i) nrm += A[i][j] * A[i][j];
        nrm = sqrt(nrm);
        if (nrm == 0) throw InsufficientData("rank-deficient fit basis");
        Real alpha = A[j][j] > 0 ? -nrm : nrm;
        std::vector<Real> v(m, Real(0));
        v[j] = A[j][j] - alpha;
        for (size_t i = j + 1; i < m; ++i) v[i] = A[i][j];
        Real vv = 0;
        for (size_t i = j; i < m; ++i) vv += v[i] * v[i];
        if (vv == 0) continue;
        for (size_t c = j; c < k; ++c) {
            Real s = 0;
            for (size_t i = j; i < m; ++i) s += v[i] * A[i][c];
            s = 2 * s / vv;
            for (size_t i = j; i < m; ++i) A[i][c] -= s * v[i];
        }
        Real s = 0;
        for (size_t i = j; i < m; ++i) s += v[i] * b[i];
        s = 2 * s / vv;
        for (size_t i = j; i < m; ++i) b[i] -= s * v[i];
    }
    Real rmax = 0, rmin = abs(A[0][0]);
    for (size_t j = 0; j < k; ++j) rmax = std::max(rmax, Real(abs(A[j][j]))), rmin = std::min(rmin, Real(abs(A[j][j])));
    cond = rmin > 0 ? rmax / rmin : Real(-1);
    std::vector<Real> x(k);
    for (size_t i = k; i-- > 0;) {
        Real s = b[i];
        for (size_t j = i + 1; j < k; ++j) s -= A[i][j] * x[j];
        x[i] = s / A[i][i];
    }
    for (size_t j = 0; j < k; ++j) x[j] /= scale[j];
    return x;
}

} // namespace detail

inline std::vector<std::pair<int, int>> balanced_basis(int P) {
    std::vector<std::pair<int, int>> b;
    for (int p = 0; p <= P; ++p)
        for (int q = 0; q <= p; ++q) b.emplace_back(q, p);
    return b;
}

// fits data_n on n^q x^{n p}; cond is checked against the working precision
// uncertainty: change of each coefficient when the last basis term is dropped
inline AsymptoticFit fit_asymptotic(const std::vector<int>& ns, const std::vector<Real>& data, const Real& x,
                                    const std::vector<std::pair<int, int>>& basis, bool with_uncertainty = true) {
    AsymptoticFit f;
    f.basis = basis;
    f.n = ns;
    f.data = data;
    std::vector<std::vector<Real>> A;
    for (int n : ns) {
        std::vector<Real> row;
        for (auto [q, p] : basis) row.push_back(pow(Real(n), q) * pow(x, n * p));
        A.push_back(row);
    }
    f.coef = detail::householder_ls(A, data, f.cond);
    if (f.cond < 0 || f.cond > eps_bits(64 - static_cast<int>(current_bits()))) {
        std::string need = f.cond > 0 ? std::to_string(static_cast<long>(ceil(log2(f.cond))) + 64) : "more";
        throw InsufficientPrecision("fit condition number " + to_decimal(f.cond, 4) + " exceeds the " +
                                    std::to_string(current_bits()) + "-bit budget; requires " + need + " bits");
    }
    for (size_t i = 0; i < ns.size(); ++i) {
        Real s = 0;
        for (size_t c = 0; c < basis.size(); ++c) s += A[i][c] * f.coef[c];
        f.model.push_back(s);
    }
    f.uncertainty.assign(basis.size(), Real(0));
    if (with_uncertainty && basis.size() > 1) {
        auto sub = basis;
        sub.pop_back();
        try {
            auto g = fit_asymptotic(ns, data, x, sub, false);
            for (size_t c = 0; c < sub.size(); ++c) f.uncertainty[c] = abs(f.coef[c] - g.coef[c]);
        } catch (const InsufficientPrecision&) {
        }
        f.uncertainty.back() = abs(f.coef.back());
    }
    return f;
}

// ---- base invariants ----

struct BaseData {
    Real lambda, length_sigma, le_sigma;
    Real linf_even, linf_odd;
    Real c_even, c_odd;     // coefficients of lambda^{2m} for n = 2m and n = 2m + 1
    Real cn_even, cn_odd;   // the same fitted against lambda^n
    AsymptoticFit fit_even, fit_odd;
    int n_min = 0, n_max = 0;
};

inline Real lambda_from_le(const Real& le, int period = 2) { return exp(-period * le); }

inline BaseData extract_base(const SpectrumTable& st, const Word& sigma, const Word& tau, int n_min, int n_max) {
    if (n_max - n_min < 7) throw InsufficientData("need at least eight family members");
    PrecisionGuard g(st.bits);
    BaseData b;
    b.n_min = n_min;
    b.n_max = n_max;
    b.length_sigma = st.length(sigma);
    b.le_sigma = st.le(sigma);
    b.lambda = lambda_from_le(b.le_sigma, static_cast<int>(sigma.size()));
    for (int par = 0; par < 2; ++par) {
        std::vector<int> ns;
        std::vector<Real> d;
        for (int n = n_min; n <= n_max; ++n) {
            if (n % 2 != par) continue;
            ns.push_back(n);
            d.push_back(st.length(homoclinic_family(sigma, tau, n)) - (n + 1) * b.length_sigma);
        }
        // L_inf + c x^n + (e0 + e1 n) x^{2n} + e2 x^{3n}
        auto f = fit_asymptotic(ns, d, b.lambda, {{0, 0}, {0, 1}, {0, 2}, {1, 2}, {0, 3}});
        (par ? b.fit_odd : b.fit_even) = f;
        (par ? b.linf_odd : b.linf_even) = f.coef[0];
        (par ? b.cn_odd : b.cn_even) = f.coef[1];
    }
    b.c_even = b.cn_even;
    b.c_odd = b.cn_odd * b.lambda;
    return b;
}

inline Real Q_form(const Real& X, const Real& Y, const Real& l) {
    return (1 + l * l) * sqr(1 + X) - sqr(1 + l) * X * Y + 2 * l * sqr(1 + Y);
}

// monodromy trace of the (12) orbit for circles of radii R0, R1 at chord length L/2 (perpendicular bounces)
inline Real two_periodic_trace(const Real& R0, const Real& R1, const Real& Ls) {
    Real h = Ls / 2;
    Mat2 a = differential_from(h, 1 / R1, 1 / R0, Real(1), Real(1));
    Mat2 c = differential_from(h, 1 / R0, 1 / R1, Real(1), Real(1));
    return (c * a).trace();
}

struct Radii {
    Real R0, R1;
    int iterations = 0;
    Real residual;
};

inline Radii recover_radii(const Real& lambda, const Real& Ls, const Real& c_even, const Real& c_odd) {
    Real target = lambda + 1 / lambda;
    Real ratio = c_odd / (c_even * lambda);
    Real tol = eps_bits(static_cast<int>(current_bits()) * 3 / 4);
    // symmetric start from the trace equation alone
    Real R = Ls / 4;
    for (int it = 0; it < 200; ++it) {
        Real h = R * eps_bits(static_cast<int>(current_bits()) / 3);
        Real f = two_periodic_trace(R, R, Ls) - target;
        Real df = (two_periodic_trace(R + h, R + h, Ls) - two_periodic_trace(R - h, R - h, Ls)) / (2 * h);
        Real step = f / df;
        while (R - step <= 0) step /= 2;
        R -= step;
        if (abs(step) < tol * R) break;
    }
    auto F = [&](const Real& a, const Real& b) {
        Real X = 2 * a / Ls, Y = 2 * b / Ls;
        return std::array<Real, 2>{two_periodic_trace(a, b, Ls) - target, ratio - Q_form(Y, X, lambda) / Q_form(X, Y, lambda)};
    };
    Radii out{R, R};
    int it = 0;
    for (; it < 100; ++it) {
        auto f = F(out.R0, out.R1);
        Real h = out.R0 * eps_bits(static_cast<int>(current_bits()) / 3);
        auto f0p = F(out.R0 + h, out.R1), f0m = F(out.R0 - h, out.R1);
        auto f1p = F(out.R0, out.R1 + h), f1m = F(out.R0, out.R1 - h);
        Mat2 J{(f0p[0] - f0m[0]) / (2 * h), (f1p[0] - f1m[0]) / (2 * h), (f0p[1] - f0m[1]) / (2 * h),
               (f1p[1] - f1m[1]) / (2 * h)};
        if (J.det() == 0) throw DegeneracyError("radii Jacobian is singular");
        Real d0 = (J.d * f[0] - J.b * f[1]) / J.det(), d1 = (-J.c * f[0] + J.a * f[1]) / J.det();
        out.R0 -= d0;
        out.R1 -= d1;
        if (!(out.R0 > 0 && out.R1 > 0)) throw DegeneracyError("radii Newton left the positive quadrant");
        if (abs(d0) + abs(d1) < tol * (out.R0 + out.R1)) break;
    }
    auto f = F(out.R0, out.R1);
    out.iterations = it;
    out.residual = abs(f[0]) + abs(f[1]);
    if (!(out.residual < pow(tol, Real(0.5)))) throw DegeneracyError("radii Newton did not converge");
    return out;
}

// ---- Lyapunov series ----

struct LFit {
    BalancedSeries<Real> L;
    AsymptoticFit fit;
    Real g0_limit, a1_limit; // closing limits, one Richardson step in 1/n
    int extra = 0;           // levels above P kept in the model
};

// y_n = 2 lambda^n cosh(2(n+1) LE(h_n))
inline std::pair<std::vector<int>, std::vector<Real>> lyapunov_data(const SpectrumTable& st, const Word& sigma,
                                                                    const Word& tau, const Real& lambda, int n_min,
                                                                    int n_max) {
    std::vector<int> ns;
    std::vector<Real> y;
    for (int n = n_min; n <= n_max; ++n) {
        Real le = st.le(homoclinic_family(sigma, tau, n));
        ns.push_back(n);
        y.push_back(2 * pow(lambda, n) * cosh(2 * (n + 1) * le));
    }
    return {ns, y};
}

inline LFit fit_L(const SpectrumTable& st, const Word& sigma, const Word& tau, const Real& lambda, int P, int n_min,
                  int n_max, int extra = 2) {
    PrecisionGuard g(st.bits);
    auto [ns, y] = lyapunov_data(st, sigma, tau, lambda, n_min, n_max);
    if (balanced_basis(P).size() > ns.size())
        throw InsufficientData("order " + std::to_string(P) + " needs " + std::to_string(balanced_basis(P).size()) +
                               " family members, range has " + std::to_string(ns.size()));
    while (extra > 0 && balanced_basis(P + extra).size() > ns.size()) --extra;
    LFit out;
    out.extra = extra;
    out.fit = fit_asymptotic(ns, y, lambda, balanced_basis(P + extra));
    out.L = BalancedSeries<Real>(P);
    for (size_t i = 0; i < out.fit.basis.size(); ++i) {
        auto [q, p] = out.fit.basis[i];
        if (p <= P) out.L.set(q, p, out.fit.coef[i]);
    }
    // g0 = lim y_n, a1 = lim (lambda^-n - 2 cosh / g0) / (2n), with the 1/n tail cancelled
    // a1 is read at mid-range so that the error of g0 ~ n_max lambda^n_max stays below lambda^n
    out.g0_limit = y.back();
    size_t i1 = ns.size() / 2, i0 = i1 - 1;
    auto a1n = [&](size_t i) { return (1 - y[i] / out.g0_limit) / pow(lambda, ns[i]) / (2 * ns[i]); };
    out.a1_limit = ns[i1] * a1n(i1) - ns[i0] * a1n(i0);
    return out;
}

// sequential peeling: subtract the known lower levels, renormalize by lambda^{n p}, fit polynomials in n;
// the levels above p stay in the model, otherwise their truncation swamps the renormalized remainder
inline BalancedSeries<Real> peel_L(const SpectrumTable& st, const Word& sigma, const Word& tau, const Real& lambda,
                                   int P, int n_min, int n_max, int extra = 2) {
    PrecisionGuard g(st.bits);
    auto [ns, y] = lyapunov_data(st, sigma, tau, lambda, n_min, n_max);
    BalancedSeries<Real> L(P);
    std::vector<Real> rem = y;
    for (int p = 0; p <= P; ++p) {
        std::vector<Real> z;
        for (size_t i = 0; i < ns.size(); ++i) z.push_back(rem[i] / pow(lambda, ns[i] * p));
        std::vector<std::pair<int, int>> basis;
        for (int dp = 0; dp <= P + extra - p; ++dp)
            for (int q = 0; q <= p + dp; ++q) basis.emplace_back(q, dp);
        auto f = fit_asymptotic(ns, z, lambda, basis);
        for (int q = 0; q <= p; ++q) L.set(q, p, f.coef_of(q, 0));
        for (size_t i = 0; i < ns.size(); ++i) {
            Real s = 0;
            for (int q = 0; q <= p; ++q) s += L.coef(q, p) * pow(Real(ns[i]), q);
            rem[i] -= s * pow(lambda, ns[i] * p);
        }
    }
    return L;
}

// ---- identifiability of the coefficients from the Lyapunov series ----

namespace detail {

// numerical rank by Householder QR with column pivoting
inline int numerical_rank(std::vector<std::vector<Real>> A, const Real& rtol) {
    size_t m = A.size(), k = A.empty() ? 0 : A[0].size();
    std::vector<size_t> perm(k);
    for (size_t j = 0; j < k; ++j) perm[j] = j;
    Real first = -1;
    int rank = 0;
    for (size_t j = 0; j < std::min(m, k); ++j) {
        size_t best = j;
        Real bn = -1;
        for (size_t c = j; c < k; ++c) {
            Real n2 = 0;
            for (size_t i = j; i < m; ++i) n2 += A[i][c] * A[i][c];
            if (n2 > bn) bn = n2, best = c;
        }
        for (auto& row : A) std::swap(row[j], row[best]);
        Real nrm = sqrt(bn);
        if (first < 0) first = nrm;
        if (nrm <= rtol * first) break;
        ++rank;
        Real alpha = A[j][j] > 0 ? -nrm : nrm;
        std::vector<Real> v(m, Real(0));
        v[j] = A[j][j] - alpha;
        for (size_t i = j + 1; i < m; ++i) v[i] = A[i][j];
        Real vv = 0;
        for (size_t i = j; i < m; ++i) vv += v[i] * v[i];
        if (vv == 0) continue;
        for (size_t c = j; c < k; ++c) {
            Real s = 0;
            for (size_t i = j; i < m; ++i) s += v[i] * A[i][c];
            s = 2 * s / vv;
            for (size_t i = j; i < m; ++i) A[i][c] -= s * v[i];
        }
    }
    return rank;
}

} // namespace detail

struct Identifiability {
    std::vector<std::string> names;      // every coefficient reaching the rows p <= P
    int rank = 0;
    std::vector<std::string> determined; // coefficients fixed by the rows p <= P
};

// Jacobian of (L_{q,p})_{q<=p<=P} with respect to g_0..g_P, gamma_1..gamma_P, a_1..a_{P+1}
inline Identifiability identifiability(CoefficientSet<Real> cs, int P) {
    Identifiability id;
    cs.g.resize(P + 1, Real(0));
    cs.gm.resize(P + 1, Real(0));
    cs.a.resize(P + 2, Real(0));
    std::vector<Real*> un;
    for (int j = 0; j <= P; ++j) un.push_back(&cs.g[j]), id.names.push_back("g" + std::to_string(j));
    for (int j = 1; j <= P; ++j) un.push_back(&cs.gm[j]), id.names.push_back("gamma" + std::to_string(j));
    for (int j = 1; j <= P + 1; ++j) un.push_back(&cs.a[j]), id.names.push_back("a" + std::to_string(j));
    auto rows = [&] {
        auto L = forward_L(cs, P);
        std::vector<Real> r;
        for (int p = 0; p <= P; ++p)
            for (int q = 0; q <= p; ++q) r.push_back(L.coef(q, p));
        return r;
    };
    size_t nr = rows().size();
    Real h = eps_bits(static_cast<int>(current_bits()) / 4);
    std::vector<std::vector<Real>> J(nr, std::vector<Real>(un.size()));
    for (size_t c = 0; c < un.size(); ++c) {
        Real s = *un[c];
        *un[c] = s + h;
        auto rp = rows();
        *un[c] = s - h;
        auto rm = rows();
        *un[c] = s;
        for (size_t r = 0; r < nr; ++r) J[r][c] = (rp[r] - rm[r]) / (2 * h);
    }
    Real rtol = eps_bits(static_cast<int>(current_bits()) / 3);
    id.rank = detail::numerical_rank(J, rtol);
    for (size_t c = 0; c < un.size(); ++c) {
        auto Jc = J;
        for (auto& row : Jc) row.erase(row.begin() + static_cast<long>(c));
        if (detail::numerical_rank(Jc, rtol) < id.rank) id.determined.push_back(id.names[c]);
    }
    return id;
}

struct RecoveredCoefficients {
    CoefficientSet<Real> cs;
    Real a1_tolerance;
};

inline CoefficientSet<Real> recover_coefficients(const BalancedSeries<Real>& L, const Real& lambda, int P,
                                                 const Real& a1_tol) {
    try {
        return invert_L(L, lambda, P, a1_tol);
    } catch (const DegeneracyError& e) {
        throw DegeneracyError(std::string(e.what()) + "; table outside B*sym");
    }
}

// ---- homoclinic scale ----

// S-trace supplier: Hessians of S1bar = h(x, F x) and Sbar = S1bar + S1bar o F at the fixed point, by
// central differences in (s, r). Semi-blind: reads the table geometry.
struct STraces {
    Real S1[2][2], S[2][2];
    Real h;
};

inline STraces s_traces(const Table& t, const PhasePoint& x) {
    STraces out;
    out.h = tenpow(-static_cast<int>(current_bits()) / 8);
    auto chord = [&](const PhasePoint& a, const PhasePoint& b) {
        return norm(t[b.i].eval(b.s).point - t[a.i].eval(a.s).point);
    };
    auto S1 = [&](const Real& s, const Real& r) {
        PhasePoint p{x.i, s, r};
        return chord(p, billiard_step(t, p));
    };
    auto S = [&](const Real& s, const Real& r) {
        PhasePoint p{x.i, s, r};
        PhasePoint q = billiard_step(t, p);
        return chord(p, q) + chord(q, billiard_step(t, q));
    };
    auto hess = [&](auto f, Real H[2][2]) {
        const Real& h = out.h;
        Real s = x.s, r = x.r, f0 = f(s, r);
        H[0][0] = (f(s + h, r) - 2 * f0 + f(s - h, r)) / (h * h);
        H[1][1] = (f(s, r + h) - 2 * f0 + f(s, r - h)) / (h * h);
        H[0][1] = H[1][0] = (f(s + h, r + h) - f(s + h, r - h) - f(s - h, r + h) + f(s - h, r - h)) / (4 * h * h);
    };
    hess(S1, out.S1);
    hess(S, out.S);
    return out;
}

struct XiRoute {
    Real xi2;              // S-trace closed form, tr / det taken in (s, r)
    Real b;                // branch chosen for d12 S
    Real b_direct;         // finite-difference d12 Sbar
    Real xi2_from_cn;      // -c_n (leading-coefficient identity)
};

// xi^2 = -2 (c_even + c_odd) / ((1 + 3 l^2)/(1 - l^2) tr - 2 b), b^2 = a^2 - det, a = tr / 2
inline XiRoute recover_xi_infinity(const Real& cn_even, const Real& cn_odd, const Real& lambda, const STraces& tr) {
    XiRoute x;
    Real trS = tr.S[0][0] + tr.S[1][1];
    Real det = tr.S[0][0] * tr.S[1][1] - tr.S[0][1] * tr.S[1][0];
    Real a = trS / 2;
    Real bb = a * a - det;
    if (bb < 0) throw Inconsistency("negative b^2 in the S-trace identity");
    Real k = (1 + 3 * lambda * lambda) / (1 - lambda * lambda);
    x.b_direct = tr.S[0][1];
    Real best = -1;
    for (int sg : {1, -1}) {
        Real b = sg * sqrt(bb);
        Real v = -2 * (cn_even + cn_odd) / (k * trS - 2 * b);
        if (v > 0 && (best < 0 || abs(b - x.b_direct) < abs(x.b - x.b_direct))) best = v, x.b = b;
    }
    if (best < 0) throw Inconsistency("no sign of b gives a positive xi_inf^2");
    x.xi2 = best;
    x.xi2_from_cn = -cn_even;
    return x;
}

} // namespace ob
