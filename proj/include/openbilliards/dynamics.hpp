#pragma once

#include <optional>
#include <utility>

#include "geometry.hpp"

namespace ob {

struct PhasePoint {
    int i = 1; // scatterer label
    Real s, r;
};

inline PhasePoint reverse(const PhasePoint& x) { return {x.i, x.s, -x.r}; }

struct Mat2 {
    Real a = 1, b = 0, c = 0, d = 1;
    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }
    Real det() const { return a * d - b * c; }
    Real trace() const { return a + d; }
};

// h(s, s') jet around (s0, s1): coefficient (i,j) is d^i_s d^j_s' h / (i! j!)
inline Jet2<Real> chord_jet(const Table& t, int i, const Real& s0, int j, const Real& s1, int order) {
    Taylor<Real> X1, Y1, X2, Y2;
    t[i].arc_jet(s0, order, X1, Y1);
    t[j].arc_jet(s1, order, X2, Y2);
    Jet2<Real> u = Jet2<Real>::var_u(order), w = Jet2<Real>::var_w(order);
    Jet2<Real> dx = compose(X2, w) - compose(X1, u);
    Jet2<Real> dy = compose(Y2, w) - compose(Y1, u);
    Jet2<Real> q = dx * dx + dy * dy;
    if (q.a[0] == 0) throw DomainError("chord endpoints coincide");
    return jsqrt(q);
}

struct Chord {
    Real h, d1, d2, d11, d12, d22;
    Jet2<Real> jet;
};

inline Chord chord(const Table& t, int i, const Real& s0, int j, const Real& s1, int order = 2) {
    Chord c;
    c.jet = chord_jet(t, i, s0, j, s1, std::max(order, 2));
    c.h = c.jet(0, 0);
    c.d1 = c.jet(1, 0);
    c.d2 = c.jet(0, 1);
    c.d11 = 2 * c.jet(2, 0);
    c.d12 = c.jet(1, 1);
    c.d22 = 2 * c.jet(0, 2);
    return c;
}

namespace detail {

struct Hit {
    int j = 0;
    Real t, theta;
};

inline Real native_tol() { return eps_bits(static_cast<int>(current_bits()) - 10); }

// first entry of the ray P + t v into scatterer sc, if any
inline std::optional<Hit> ray_hit(const Scatterer& sc, const Vec2& P, const Vec2& v) {
    const CurveSpec& sp = sc.spec();
    if (sp.kind == CurveKind::circle) {
        Vec2 c = sc.center();
        Real R(sp.radius);
        Vec2 d = P - c;
        Real b = dot(d, v), cc = dot(d, d) - R * R;
        Real disc = b * b - cc;
        if (disc <= 0) return std::nullopt;
        Real t = -b - sqrt(disc);
        if (t <= 0) return std::nullopt;
        Vec2 q = P + t * v - c;
        Real th = atan2(q.y, q.x);
        if (th < 0) th += 2 * pi();
        return Hit{sc.label(), t, th};
    }
    if (sp.kind == CurveKind::segment) {
        Vec2 a = sc.seg_a(), b = sc.seg_b();
        Vec2 d = b - a;
        Real L = norm(d);
        Vec2 T = (Real(1) / L) * d;
        Vec2 N{T.y, -T.x};
        Real vn = dot(v, N);
        if (vn >= 0) return std::nullopt;
        Real t = dot(a - P, N) / vn;
        if (t <= 0) return std::nullopt;
        Real sig = dot(P + t * v - a, T);
        if (sig < 0 || sig > L) return std::nullopt;
        return Hit{sc.label(), t, sig};
    }
    // general closed convex curve: bracket the line crossings on the native parameter
    // the grid is offset from 0: symmetric orbits land exactly on theta = 0, where a node would hide the sign change
    const int M = 96;
    Real P2 = 2 * pi(), off("0.0123456789");
    auto node = [&](int k) { return off + P2 * k / M; };
    auto f = [&](const Real& th) { return cross(v, sc.native_point(th) - P); };
    std::vector<Real> fv(M + 1);
    for (int k = 0; k <= M; ++k) fv[k] = f(node(k));
    std::optional<Hit> best;
    for (int k = 0; k < M; ++k) {
        if ((fv[k] > 0) == (fv[k + 1] > 0)) continue;
        Real lo = node(k), hi = node(k + 1), flo = fv[k];
        Real th = (lo + hi) / 2;
        for (int it = 0; it < 200; ++it) {
            Vec2 p, d1, d2;
            sc.native_d2(th, p, d1, d2);
            Real fth = cross(v, p - P), dfth = cross(v, d1);
            if ((fth > 0) == (flo > 0)) lo = th, flo = fth;
            else hi = th;
            Real step = fth / dfth;
            // converged before the bracket test, or bisection would walk away from a root sitting on lo
            if (fth == 0 || abs(step) < native_tol()) {
                th -= step;
                break;
            }
            Real nt = th - step;
            if (!(nt > lo && nt < hi)) nt = (lo + hi) / 2;
            th = nt;
        }
        if (th >= P2) th -= P2;
        BoundaryPoint bp = sc.eval_native(th);
        Real t = dot(bp.point - P, v);
        if (t <= 0 || dot(v, bp.normal) >= 0) continue;
        if (!best || t < best->t) best = Hit{sc.label(), t, th};
    }
    return best;
}

} // namespace detail

inline Vec2 outgoing(const BoundaryPoint& b, const Real& r) {
    if (abs(r) > 1) throw DomainError("|r| > 1");
    return r * b.tangent + sqrt(1 - r * r) * b.normal;
}

inline PhasePoint billiard_step(const Table& t, const PhasePoint& x, std::optional<int> target = std::nullopt) {
    const Scatterer& from = t[x.i];
    BoundaryPoint b = from.eval(x.s);
    Vec2 v = outgoing(b, x.r);
    std::optional<detail::Hit> best;
    Real tie = tenpow(-30);
    for (const auto& sc : t.scatterers()) {
        if (sc.label() == x.i) continue;
        auto h = detail::ray_hit(sc, b.point, v);
        if (!h) continue;
        if (!best || h->t < best->t - tie) best = h;
    }
    if (!best) throw EscapeError("ray escapes to infinity");
    if (target && best->j != *target) throw DomainError("ray does not reach the requested scatterer first");
    const Scatterer& to = t[best->j];
    BoundaryPoint nb = to.eval_native(best->theta);
    Real rn = dot(v, nb.tangent);
    Real vn = -dot(v, nb.normal);
    if (vn < eps_bits(static_cast<int>(current_bits()) / 2)) throw TangencyError("grazing collision");
    return {best->j, to.s_of_theta(best->theta), rn};
}

struct StepGeometry {
    Real L, K0, K1, nu0, nu1, dK0, dK1;
};

inline StepGeometry step_geometry(const Table& t, const PhasePoint& x, const PhasePoint& y) {
    StepGeometry g;
    g.L = norm(t[y.i].eval(y.s).point - t[x.i].eval(x.s).point);
    auto k0 = t[x.i].curvature_jet(x.s, 1);
    auto k1 = t[y.i].curvature_jet(y.s, 1);
    g.K0 = k0[0];
    g.dK0 = k0[1];
    g.K1 = k1[0];
    g.dK1 = k1[1];
    g.nu0 = sqrt(1 - x.r * x.r);
    g.nu1 = sqrt(1 - y.r * y.r);
    return g;
}

// DF from chord length, curvatures and cosines at the two ends
inline Mat2 differential_from(const Real& L, const Real& K, const Real& Kp, const Real& nu, const Real& nup) {
    Mat2 m;
    m.a = -(L * K + nu) / nup;
    m.b = -L / (nu * nup);
    m.c = -(L * K * Kp + K * nup + Kp * nu);
    m.d = -(L * Kp + nup) / nu;
    return m;
}

inline Mat2 differential(const Table& t, const PhasePoint& x, std::optional<int> target = std::nullopt) {
    PhasePoint y = billiard_step(t, x, target);
    auto g = step_geometry(t, x, y);
    return differential_from(g.L, g.K0, g.K1, g.nu0, g.nu1);
}

struct MapJet {
    int label = 1; // landing scatterer
    Jet2<Real> s, r;
};

// Taylor jet of F^steps at x in displacements (ds, dr)
inline MapJet map_jet(const Table& t, const PhasePoint& x, int steps, int order, const std::vector<int>& targets = {}) {
    MapJet out;
    out.label = x.i;
    out.s = Jet2<Real>::var_u(order, x.s);
    out.r = Jet2<Real>::var_w(order, x.r);
    PhasePoint cur = x;
    for (int k = 0; k < steps; ++k) {
        std::optional<int> tg;
        if (k < static_cast<int>(targets.size())) tg = targets[k];
        PhasePoint nxt = billiard_step(t, cur, tg);
        Jet2<Real> H = chord_jet(t, cur.i, cur.s, nxt.i, nxt.s, order + 1);
        Jet2<Real> Ha = H.du().truncated(order), Hb = H.dw().truncated(order);
        Jet2<Real> A = out.s;
        A.a[0] = 0;
        Jet2<Real> B(order);
        Real gb = Ha(0, 1);
        // dh/ds(A,B) = -r, one order gained per pass
        for (int it = 0; it <= order + 1; ++it) {
            Jet2<Real> res = compose(Ha, A, B) + out.r;
            res.a[0] = 0;
            B -= res * (Real(1) / gb);
        }
        Jet2<Real> rn = compose(Hb, A, B);
        B.a[0] = nxt.s;
        out.s = B;
        out.r = rn;
        out.label = nxt.i;
        cur = nxt;
    }
    return out;
}

} // namespace ob
