#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "coding.hpp"
#include "dynamics.hpp"

namespace ob {

struct PeriodicOrbit {
    Word word;
    std::vector<PhasePoint> points;
    std::vector<Real> theta; // native parameters
    Real length;
    Mat2 monodromy;
    Real lambda, le;
    Real residual;
    unsigned bits = 0;
    int iterations = 0;
};

// chord jet in native parameters
inline Jet2<Real> chord_jet_native(const Table& t, int i, const Real& th0, int j, const Real& th1, int order) {
    Taylor<Real> X1, Y1, X2, Y2;
    t[i].native_jet(th0, order, X1, Y1);
    t[j].native_jet(th1, order, X2, Y2);
    Jet2<Real> u = Jet2<Real>::var_u(order), w = Jet2<Real>::var_w(order);
    Jet2<Real> dx = compose(X2, w) - compose(X1, u);
    Jet2<Real> dy = compose(Y2, w) - compose(Y1, u);
    return jsqrt(dx * dx + dy * dy);
}

namespace detail {

// dense solve with partial pivoting, A overwritten
inline std::vector<Real> lu_solve(std::vector<std::vector<Real>> A, std::vector<Real> b) {
    int n = static_cast<int>(b.size());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (abs(A[i][k]) > abs(A[piv][k])) piv = i;
        if (A[piv][k] == 0) throw DegeneracyError("singular linear system");
        std::swap(A[k], A[piv]);
        std::swap(b[k], b[piv]);
        for (int i = k + 1; i < n; ++i) {
            if (A[i][k] == 0) continue;
            Real f = A[i][k] / A[k][k];
            for (int j = k; j < n; ++j) A[i][j] -= f * A[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<Real> x(n);
    for (int i = n - 1; i >= 0; --i) {
        Real s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
        x[i] = s / A[i][i];
    }
    return x;
}

inline Real initial_theta(const Scatterer& sc, const Vec2& target) {
    if (sc.flat()) {
        Vec2 a = sc.seg_a(), b = sc.seg_b();
        Vec2 d = b - a;
        Real L = norm(d);
        Real s = dot(target - a, d) / L;
        return std::clamp(s, L / 100, L - L / 100);
    }
    Vec2 c = sc.center();
    Real th = atan2(target.y - c.y, target.x - c.x);
    if (sc.spec().kind == CurveKind::ellipse) th -= Real(sc.spec().angle);
    return sc.wrap(th);
}

struct Criticality {
    std::vector<Real> g;              // gradient in native parameters
    std::vector<Real> diag, lo, up;   // cyclic tridiagonal Hessian
    std::vector<Real> h;              // chord lengths
    std::vector<Real> dh1;            // dh/dth at the start of each chord
};

inline Criticality criticality(const Table& t, const Word& w, const std::vector<Real>& th) {
    int p = static_cast<int>(w.size());
    Criticality c;
    c.g.assign(p, Real(0));
    c.diag.assign(p, Real(0));
    c.lo.assign(p, Real(0));
    c.up.assign(p, Real(0));
    c.h.resize(p);
    c.dh1.resize(p);
    for (int k = 0; k < p; ++k) {
        int k1 = (k + 1) % p;
        auto J = chord_jet_native(t, w[k] - '0', th[k], w[k1] - '0', th[k1], 2);
        c.h[k] = J(0, 0);
        c.dh1[k] = J(1, 0);
        c.g[k] += J(1, 0);
        c.g[k1] += J(0, 1);
        c.diag[k] += 2 * J(2, 0);
        c.diag[k1] += 2 * J(0, 2);
        c.up[k] += J(1, 1);  // d2/dth_k dth_{k+1}
        c.lo[k1] += J(1, 1); // d2/dth_{k+1} dth_k
    }
    return c;
}

inline Real max_abs(const std::vector<Real>& v) {
    Real m = 0;
    for (auto& x : v) m = std::max(m, Real(abs(x)));
    return m;
}

} // namespace detail

inline Real residual_tolerance() { return pow(Real(10), -Real(0.25) * current_bits()); }

// Newton on the criticality system; th is the initial guess in native parameters
inline PeriodicOrbit solve_orbit_from(const Table& t, const Word& w, std::vector<Real> th, int max_iter = 80) {
    if (!is_admissible(w, t.size())) throw DomainError("inadmissible word " + w);
    int p = static_cast<int>(w.size());
    std::vector<Real> speed(p);
    auto scaled_residual = [&](const detail::Criticality& c) {
        Real m = 0;
        for (int k = 0; k < p; ++k) m = std::max(m, Real(abs(c.g[k]) / t[w[k] - '0'].speed(th[k])));
        return m;
    };
    auto c = detail::criticality(t, w, th);
    Real res = scaled_residual(c);
    Real tol = residual_tolerance() / 1000;
    int it = 0;
    for (; it < max_iter && res > tol; ++it) {
        std::vector<std::vector<Real>> H(p, std::vector<Real>(p, Real(0)));
        for (int k = 0; k < p; ++k) {
            H[k][k] += c.diag[k];
            H[k][(k + 1) % p] += c.up[k];
            H[k][(k + p - 1) % p] += c.lo[k];
        }
        std::vector<Real> rhs(p);
        for (int k = 0; k < p; ++k) rhs[k] = -c.g[k];
        auto dx = detail::lu_solve(H, rhs);
        // damp large steps, then backtrack on the gradient norm
        Real mx = detail::max_abs(dx), cap = Real(1) / 4;
        Real step = mx > cap ? cap / mx : Real(1);
        bool accepted = false;
        for (int bt = 0; bt < 30; ++bt) {
            std::vector<Real> tn = th;
            for (int k = 0; k < p; ++k) tn[k] += step * dx[k];
            try {
                auto cn = detail::criticality(t, w, tn);
                std::swap(th, tn);
                Real rn = scaled_residual(cn);
                if (rn < res || res < tol * 1e6 || bt == 29) {
                    c = std::move(cn);
                    res = rn;
                    accepted = true;
                    break;
                }
                std::swap(th, tn);
            } catch (const DomainError&) {
            }
            step /= 2;
        }
        if (!accepted) break;
    }
    Real accept = residual_tolerance();
    if (!(res < accept)) throw NoConvergence("orbit " + w + " did not converge, residual " + to_decimal(res, 6));

    PeriodicOrbit o;
    o.word = w;
    o.theta = th;
    o.residual = res;
    o.iterations = it;
    o.bits = current_bits();
    o.length = 0;
    for (auto& h : c.h) o.length += h;
    o.points.resize(p);
    for (int k = 0; k < p; ++k) {
        const Scatterer& sc = t[w[k] - '0'];
        Real th_k = sc.wrap(th[k]);
        o.points[k] = {w[k] - '0', sc.s_of_theta(th_k), -c.dh1[k] / sc.speed(th_k)};
    }
    o.monodromy = Mat2{};
    for (int k = 0; k < p; ++k) {
        const PhasePoint& x = o.points[k];
        const PhasePoint& y = o.points[(k + 1) % p];
        Real K0 = t[x.i].curvature_native(th[k]);
        Real K1 = t[y.i].curvature_native(th[(k + 1) % p]);
        Real nu0 = sqrt(1 - x.r * x.r), nu1 = sqrt(1 - y.r * y.r);
        o.monodromy = differential_from(c.h[k], K0, K1, nu0, nu1) * o.monodromy;
    }
    Real tr = abs(o.monodromy.trace());
    if (!(tr > 2)) throw DegeneracyError("orbit " + w + " is not hyperbolic");
    o.lambda = 2 / (tr + sqrt(tr * tr - 4));
    o.le = -log(o.lambda) / p;
    return o;
}

inline std::vector<Real> initial_guess(const Table& t, const Word& w) {
    if (!is_admissible(w, t.size())) throw DomainError("inadmissible word " + w);
    int p = static_cast<int>(w.size());
    std::vector<Real> th(p);
    for (int k = 0; k < p; ++k) {
        const Scatterer& prev = t[w[(k + p - 1) % p] - '0'];
        const Scatterer& next = t[w[(k + 1) % p] - '0'];
        Vec2 target = Real(0.5) * (prev.center() + next.center());
        th[k] = detail::initial_theta(t[w[k] - '0'], target);
    }
    return th;
}

inline PeriodicOrbit solve_orbit(const Table& t, const Word& w) { return solve_orbit_from(t, w, initial_guess(t, w)); }

inline PeriodicOrbit solve_orbit(const Table& t, const Word& w, unsigned bits) {
    PrecisionGuard g(bits);
    return solve_orbit(t, w);
}

// monodromy starting at point k instead of 0
inline Mat2 monodromy_from(const Table& t, const PeriodicOrbit& o, int start) {
    int p = static_cast<int>(o.points.size());
    Mat2 M;
    for (int j = 0; j < p; ++j) {
        int k = (start + j) % p, k1 = (k + 1) % p;
        const PhasePoint& x = o.points[k];
        const PhasePoint& y = o.points[k1];
        Real L = norm(t[y.i].eval_native(o.theta[k1]).point - t[x.i].eval_native(o.theta[k]).point);
        M = differential_from(L, t[x.i].curvature_native(o.theta[k]), t[y.i].curvature_native(o.theta[k1]),
                              sqrt(1 - x.r * x.r), sqrt(1 - y.r * y.r)) *
            M;
    }
    return M;
}

struct HomoclinicData {
    Word sigma, tau;
    std::map<int, PeriodicOrbit> orbits; // keyed by n
    PeriodicOrbit base;
    Real linf_even, linf_odd, linf;
    std::vector<PhasePoint> limit_points; // x_inf(k), k = 0..kmax
};

// Aitken extrapolation of a sequence with a geometric tail, on its last three terms
inline Real geometric_limit(const std::vector<Real>& a) {
    if (a.size() < 3) return a.back();
    const Real &x0 = a[a.size() - 3], &x1 = a[a.size() - 2], &x2 = a[a.size() - 1];
    Real d1 = x1 - x0, d2 = x2 - x1, den = d2 - d1;
    if (den == 0 || abs(d2) >= abs(d1)) return x2;
    return x2 - d2 * d2 / den;
}

inline HomoclinicData solve_family(const Table& t, const Word& sigma, const Word& tau, int n_min, int n_max,
                                   int kmax = 6) {
    HomoclinicData hd;
    hd.sigma = sigma;
    hd.tau = tau;
    hd.base = solve_orbit(t, sigma);
    std::vector<Real> prev;
    for (int n = std::max(1, n_min - 1); n <= n_max; ++n) {
        Word w = homoclinic_family(sigma, tau, n);
        PeriodicOrbit o;
        if (prev.size() == static_cast<size_t>(2 * n) && n >= 2) {
            std::vector<Real> th(prev.begin(), prev.begin() + n + 1);
            th.insert(th.end(), prev.begin() + n - 1, prev.end());
            o = solve_orbit_from(t, w, th);
        } else {
            o = solve_orbit(t, w);
        }
        prev = o.theta;
        if (n >= n_min) hd.orbits[n] = o;
    }
    std::vector<Real> ev, od;
    for (auto& [n, o] : hd.orbits) {
        Real d = o.length - (n + 1) * hd.base.length;
        (n % 2 ? od : ev).push_back(d);
    }
    hd.linf_even = ev.empty() ? Real(0) : geometric_limit(ev);
    hd.linf_odd = od.empty() ? Real(0) : geometric_limit(od);
    if (ev.empty()) hd.linf = hd.linf_odd;
    else if (od.empty()) hd.linf = hd.linf_even;
    else hd.linf = (hd.linf_even + hd.linf_odd) / 2;
    if (!hd.orbits.empty()) {
        const auto& last = hd.orbits.rbegin()->second;
        for (int k = 0; k <= std::min(kmax, static_cast<int>(last.points.size()) - 1); ++k)
            hd.limit_points.push_back(last.points[k]);
    }
    return hd;
}

} // namespace ob
