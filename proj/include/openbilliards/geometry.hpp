#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "jet.hpp"
#include "real.hpp"

namespace ob {

struct Vec2 {
    Real x, y;
    Vec2() : x(0), y(0) {}
    Vec2(Real a, Real b) : x(std::move(a)), y(std::move(b)) {}
    friend Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(const Real& s, const Vec2& a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(const Vec2& a, const Real& s) { return {s * a.x, s * a.y}; }
};
inline Real dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline Real cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline Real norm(const Vec2& a) { return sqrt(dot(a, a)); }

enum class CurveKind { circle, ellipse, fourier, segment };

struct CurveSpec {
    CurveKind kind = CurveKind::circle;
    std::string label;
    // decimal strings keep the config exact under precision changes
    std::string cx = "0", cy = "0";
    std::string radius = "1";
    std::string semi_a = "1", semi_b = "1", angle = "0";
    std::vector<std::string> rho_cos; // rho_cos[0] is the mean radius
    std::vector<std::string> rho_sin; // rho_sin[j-1] multiplies sin(j theta)
    std::array<std::string, 2> p0{"0", "0"}, p1{"0", "1"};

    static CurveSpec circle(const std::string& cx, const std::string& cy, const std::string& r) {
        CurveSpec c;
        c.kind = CurveKind::circle;
        c.cx = cx;
        c.cy = cy;
        c.radius = r;
        return c;
    }
    static CurveSpec ellipse(const std::string& cx, const std::string& cy, const std::string& a, const std::string& b,
                             const std::string& ang = "0") {
        CurveSpec c;
        c.kind = CurveKind::ellipse;
        c.cx = cx;
        c.cy = cy;
        c.semi_a = a;
        c.semi_b = b;
        c.angle = ang;
        return c;
    }
    static CurveSpec fourier(const std::string& cx, const std::string& cy, std::vector<std::string> rc,
                             std::vector<std::string> rs = {}) {
        CurveSpec c;
        c.kind = CurveKind::fourier;
        c.cx = cx;
        c.cy = cy;
        c.rho_cos = std::move(rc);
        c.rho_sin = std::move(rs);
        return c;
    }
    static CurveSpec segment(std::array<std::string, 2> a, std::array<std::string, 2> b) {
        CurveSpec c;
        c.kind = CurveKind::segment;
        c.p0 = a;
        c.p1 = b;
        return c;
    }
};

struct BoundaryPoint {
    Vec2 point, tangent, normal; // normal points into the billiard domain
};

namespace detail {

// Gauss-Legendre nodes on [-1,1] at the current precision
struct GaussLegendre {
    std::vector<Real> x, w;
};

inline const GaussLegendre& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<std::pair<int, unsigned>, GaussLegendre> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto key = std::make_pair(n, Real::default_precision());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    GaussLegendre g;
    g.x.resize(n);
    g.w.resize(n);
    Real tol = eps_bits(static_cast<int>(current_bits()) - 8);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        Real z = cos(pi() * (i + Real(3) / 4) / (n + Real(1) / 2));
        Real dp;
        for (int it2 = 0; it2 < 200; ++it2) {
            Real p0 = 1, p1 = z;
            for (int k = 2; k <= n; ++k) {
                Real p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1);
            Real dz = p1 / dp;
            z -= dz;
            if (abs(dz) < tol) break;
        }
        {
            Real p0 = 1, p1 = z;
            for (int k = 2; k <= n; ++k) {
                Real p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1);
        }
        g.x[i] = -z;
        g.x[n - 1 - i] = z;
        g.w[i] = g.w[n - 1 - i] = 2 / ((1 - z * z) * dp * dp);
    }
    return cache.emplace(key, std::move(g)).first->second;
}

} // namespace detail

class Scatterer {
  public:
    explicit Scatterer(CurveSpec spec, int label = 0, int panels = 64) : spec_(std::move(spec)), label_(label), panels_(panels) {
        validate();
    }

    const CurveSpec& spec() const { return spec_; }
    int label() const { return label_; }
    bool closed() const { return spec_.kind != CurveKind::segment; }
    bool flat() const { return spec_.kind == CurveKind::segment; }

    Vec2 center() const {
        if (flat()) {
            auto a = seg_a(), b = seg_b();
            return Real(0.5) * (a + b);
        }
        return {Real(spec_.cx), Real(spec_.cy)};
    }

    // x(theta0 + t), y(theta0 + t) as Taylor series in t
    void native_jet(const Real& th0, int N, Taylor<Real>& X, Taylor<Real>& Y) const {
        Vec2 c = center();
        switch (spec_.kind) {
        case CurveKind::circle: {
            Real R(spec_.radius);
            Taylor<Real> cs, sn;
            cos_sin_series(th0, N, cs, sn);
            X = cs * R;
            Y = sn * R;
            X[0] += c.x;
            Y[0] += c.y;
            break;
        }
        case CurveKind::ellipse: {
            Real a(spec_.semi_a), b(spec_.semi_b), al(spec_.angle);
            Taylor<Real> cs, sn;
            cos_sin_series(th0, N, cs, sn);
            Taylor<Real> u = cs * a, v = sn * b;
            Real ca = cos(al), sa = sin(al);
            X = u * ca - v * sa;
            Y = u * sa + v * ca;
            X[0] += c.x;
            Y[0] += c.y;
            break;
        }
        case CurveKind::fourier: {
            Taylor<Real> rho(N, spec_.rho_cos.empty() ? Real(0) : Real(spec_.rho_cos[0]));
            auto add = [&](int j, const Real& coef, bool isCos) {
                Taylor<Real> cs, sn;
                cos_sin_series(Real(j) * th0, N, cs, sn);
                Real jp = 1;
                for (int k = 0; k <= N; ++k) {
                    rho[k] += coef * jp * (isCos ? cs[k] : sn[k]);
                    jp *= j;
                }
            };
            for (size_t j = 1; j < spec_.rho_cos.size(); ++j) add(static_cast<int>(j), Real(spec_.rho_cos[j]), true);
            for (size_t j = 0; j < spec_.rho_sin.size(); ++j) add(static_cast<int>(j + 1), Real(spec_.rho_sin[j]), false);
            Taylor<Real> cs, sn;
            cos_sin_series(th0, N, cs, sn);
            X = rho * cs;
            Y = rho * sn;
            X[0] += c.x;
            Y[0] += c.y;
            break;
        }
        case CurveKind::segment: {
            auto a = seg_a(), b = seg_b();
            Vec2 d = b - a;
            Real L = norm(d);
            X = Taylor<Real>(N, a.x + th0 * d.x / L);
            Y = Taylor<Real>(N, a.y + th0 * d.y / L);
            if (N >= 1) {
                X[1] = d.x / L;
                Y[1] = d.y / L;
            }
            break;
        }
        }
    }

    Vec2 native_point(const Real& th) const {
        Taylor<Real> X, Y;
        native_jet(th, 0, X, Y);
        return {X[0], Y[0]};
    }
    // position, first and second native derivatives
    void native_d2(const Real& th, Vec2& p, Vec2& d1, Vec2& d2) const {
        Taylor<Real> X, Y;
        native_jet(th, 2, X, Y);
        p = {X[0], Y[0]};
        d1 = {X[1], Y[1]};
        d2 = {2 * X[2], 2 * Y[2]};
    }
    Real speed(const Real& th) const {
        Taylor<Real> X, Y;
        native_jet(th, 1, X, Y);
        return sqrt(X[1] * X[1] + Y[1] * Y[1]);
    }

    Real native_period() const { return flat() ? segment_length() : 2 * pi(); }

    Real length() const {
        if (flat()) return segment_length();
        if (spec_.kind == CurveKind::circle) return 2 * pi() * Real(spec_.radius);
        ensure_table();
        return table_->cum.back();
    }

    // arc length from native 0 to theta (theta in [0, period))
    Real s_of_theta(Real th) const {
        if (flat()) return th;
        if (spec_.kind == CurveKind::circle) return Real(spec_.radius) * wrap(th);
        th = wrap(th);
        ensure_table();
        Real h = native_period() / panels_;
        int k = static_cast<int>(floor(th / h).convert_to<long>());
        k = std::clamp(k, 0, panels_ - 1);
        return table_->cum[k] + integrate_speed(h * k, th);
    }

    Real theta_of_s(Real s) const {
        if (flat()) {
            if (s < -tol_domain() || s > segment_length() + tol_domain()) throw DomainError("arc length outside segment");
            return s;
        }
        Real L = length();
        s = s - L * floor(s / L);
        if (spec_.kind == CurveKind::circle) return s / Real(spec_.radius);
        ensure_table();
        auto it = std::upper_bound(table_->cum.begin(), table_->cum.end(), s);
        int k = std::clamp(static_cast<int>(it - table_->cum.begin()) - 1, 0, panels_ - 1);
        Real h = native_period() / panels_;
        Real th = h * k + (s - table_->cum[k]) / speed(h * k + h / 2);
        Real tol = eps_bits(static_cast<int>(current_bits()) - 6);
        // Newton with the arc length carried along: later steps only integrate over the short correction
        Real acc = table_->cum[k] + integrate_speed(h * k, th);
        for (int i = 0; i < 60; ++i) {
            Real d = (acc - s) / speed(th);
            acc -= integrate_speed(th - d, th);
            th -= d;
            if (abs(d) < tol) break;
        }
        return th;
    }

    // Taylor series of the arc-length parametrization at native theta0, in arc-length displacement.
    void arc_jet_native(const Real& th0, int N, Taylor<Real>& X, Taylor<Real>& Y) const {
        if (flat() || spec_.kind == CurveKind::circle) {
            Real sc = flat() ? Real(1) : Real(spec_.radius);
            Taylor<Real> Xn, Yn;
            native_jet(th0, N, Xn, Yn);
            X = Xn;
            Y = Yn;
            Real f = 1;
            for (int k = 1; k <= N; ++k) {
                f /= sc;
                X[k] *= f;
                Y[k] *= f;
            }
            return;
        }
        Taylor<Real> Xn, Yn;
        native_jet(th0, N + 1, Xn, Yn);
        Taylor<Real> dX = Xn.derivative(), dY = Yn.derivative();
        Taylor<Real> v = tsqrt(dX * dX + dY * dY);
        Taylor<Real> s = v.integral(); // s(t), s(0)=0
        Taylor<Real> s_trunc(N);
        for (int k = 0; k <= N; ++k) s_trunc[k] = s[k];
        Taylor<Real> t = revert(s_trunc);
        Taylor<Real> Xt(N), Yt(N);
        for (int k = 0; k <= N; ++k) {
            Xt[k] = Xn[k];
            Yt[k] = Yn[k];
        }
        X = compose(Xt, t);
        Y = compose(Yt, t);
    }
    void arc_jet(const Real& s, int N, Taylor<Real>& X, Taylor<Real>& Y) const { arc_jet_native(theta_of_s(s), N, X, Y); }

    BoundaryPoint eval_native(const Real& th) const {
        Taylor<Real> X, Y;
        native_jet(th, 1, X, Y);
        Real sp = sqrt(X[1] * X[1] + Y[1] * Y[1]);
        BoundaryPoint b;
        b.point = {X[0], Y[0]};
        b.tangent = {X[1] / sp, Y[1] / sp};
        b.normal = {b.tangent.y, -b.tangent.x};
        return b;
    }
    BoundaryPoint eval(const Real& s) const { return eval_native(theta_of_s(s)); }

    // (K, K', ..., K^(order)) in arc length
    std::vector<Real> curvature_jet_native(const Real& th, int order) const {
        std::vector<Real> out(order + 1, Real(0));
        if (flat()) return out;
        Taylor<Real> X, Y;
        arc_jet_native(th, order + 2, X, Y);
        Taylor<Real> dX = X.derivative(), dY = Y.derivative();
        Taylor<Real> ddX = dX.derivative(), ddY = dY.derivative();
        Taylor<Real> K = dX * ddY - dY * ddX;
        Real f = 1;
        for (int k = 0; k <= order; ++k) {
            if (k > 0) f *= k;
            out[k] = K[k] * f;
        }
        return out;
    }
    std::vector<Real> curvature_jet(const Real& s, int order) const { return curvature_jet_native(theta_of_s(s), order); }

    Real curvature_native(const Real& th) const {
        if (flat()) return 0;
        Vec2 p, d1, d2;
        native_d2(th, p, d1, d2);
        Real sp = norm(d1);
        return cross(d1, d2) / (sp * sp * sp);
    }

    std::vector<std::array<double, 2>> samples(int n) const {
        std::vector<std::array<double, 2>> pts;
        int m = flat() ? std::max(n, 2) : n;
        for (int i = 0; i < m; ++i) {
            Real th = flat() ? segment_length() * i / (m - 1) : 2 * pi() * i / m;
            Vec2 p = native_point(th);
            pts.push_back({dbl(p.x), dbl(p.y)});
        }
        return pts;
    }

    Vec2 seg_a() const { return {Real(spec_.p0[0]), Real(spec_.p0[1])}; }
    Vec2 seg_b() const { return {Real(spec_.p1[0]), Real(spec_.p1[1])}; }
    Real segment_length() const { return norm(seg_b() - seg_a()); }

    Real wrap(const Real& th) const {
        if (flat()) return th;
        Real P = 2 * pi();
        return th - P * floor(th / P);
    }

  private:
    CurveSpec spec_;
    int label_;
    int panels_;
    struct Table {
        unsigned prec;
        std::vector<Real> cum;
    };
    mutable std::shared_ptr<Table> table_;
    mutable std::shared_ptr<std::mutex> mu_ = std::make_shared<std::mutex>();

    static Real tol_domain() { return eps_bits(static_cast<int>(current_bits()) / 2); }

    int gl_points() const { return std::max(20, static_cast<int>(current_bits() / 6)); }

    // gl_points() resolves a whole panel; shorter intervals converge faster and need fewer nodes
    Real integrate_speed(const Real& a, const Real& b) const {
        int n = gl_points();
        double rel = dbl(abs(b - a) * panels_ / native_period());
        if (rel == 0) return Real(0);
        if (rel < 0.5) n = std::min(n, static_cast<int>(std::ceil(current_bits() / (6 - 2 * std::log2(rel)))) + 2);
        const auto& g = detail::gauss_legendre(n);
        Real m = (a + b) / 2, r = (b - a) / 2, s = 0;
        for (size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * speed(m + r * g.x[i]);
        return s * r;
    }

    void ensure_table() const {
        std::lock_guard<std::mutex> lk(*mu_);
        if (table_ && table_->prec == Real::default_precision()) return;
        auto t = std::make_shared<Table>();
        t->prec = Real::default_precision();
        Real h = native_period() / panels_;
        t->cum.resize(panels_ + 1);
        t->cum[0] = 0;
        for (int k = 0; k < panels_; ++k) t->cum[k + 1] = t->cum[k] + integrate_speed(h * k, h * (k + 1));
        table_ = t;
    }

    void validate() const {
        switch (spec_.kind) {
        case CurveKind::circle:
            if (Real(spec_.radius) <= 0) throw DomainError("circle radius must be positive");
            break;
        case CurveKind::ellipse:
            if (!(Real(spec_.semi_a) >= Real(spec_.semi_b) && Real(spec_.semi_b) > 0))
                throw DomainError("ellipse needs a >= b > 0");
            break;
        case CurveKind::fourier: {
            if (spec_.rho_cos.empty()) throw DomainError("fourier curve needs a mean radius");
            for (int i = 0; i < 2048; ++i) {
                Real th = 2 * pi() * i / 2048;
                Taylor<Real> X, Y;
                native_jet(th, 0, X, Y);
                Vec2 c = center();
                if (norm(Vec2{X[0], Y[0]} - c) <= 0) throw DomainError("fourier radius not positive");
                if (curvature_native(th) <= 0) throw DomainError("fourier curve not strictly convex");
            }
            break;
        }
        case CurveKind::segment:
            if (segment_length() == 0) throw DomainError("segment endpoints coincide");
            break;
        }
    }
};

struct EclipseReport {
    bool pass = true;
    std::array<int, 3> triple{0, 0, 0}; // labels: pair (i,j), offender k
    double depth = 0;                   // penetration depth (positive when eclipsing)
    double margin = 0;                  // smallest separation found
};

class Table {
  public:
    Table() = default;
    explicit Table(std::vector<CurveSpec> specs) {
        int lab = 1;
        for (auto& s : specs) sc_.emplace_back(std::move(s), lab++);
    }
    int size() const { return static_cast<int>(sc_.size()); }
    const Scatterer& operator[](int label) const { return sc_.at(label - 1); }
    const std::vector<Scatterer>& scatterers() const { return sc_; }
    std::vector<CurveSpec> specs() const {
        std::vector<CurveSpec> v;
        for (auto& s : sc_) v.push_back(s.spec());
        return v;
    }

  private:
    std::vector<Scatterer> sc_;
};

namespace detail {
using P2 = std::array<double, 2>;
inline double cross3(const P2& o, const P2& a, const P2& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}
inline std::vector<P2> hull(std::vector<P2> p) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() < 3) return p;
    std::vector<P2> h(2 * p.size());
    size_t k = 0;
    for (size_t i = 0; i < p.size(); ++i) {
        while (k >= 2 && cross3(h[k - 2], h[k - 1], p[i]) <= 0) --k;
        h[k++] = p[i];
    }
    for (size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && cross3(h[k - 2], h[k - 1], p[i - 1]) <= 0) --k;
        h[k++] = p[i - 1];
    }
    h.resize(k - 1);
    return h;
}
inline double seg_dist(const P2& p, const P2& a, const P2& b) {
    double dx = b[0] - a[0], dy = b[1] - a[1];
    double L2 = dx * dx + dy * dy;
    double t = L2 > 0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / L2 : 0;
    t = std::clamp(t, 0.0, 1.0);
    double ex = a[0] + t * dx - p[0], ey = a[1] + t * dy - p[1];
    return std::sqrt(ex * ex + ey * ey);
}
// signed distance of p to a ccw convex polygon: negative inside
inline double signed_dist(const P2& p, const std::vector<P2>& poly) {
    double d = 1e300;
    bool inside = poly.size() >= 3;
    for (size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        d = std::min(d, seg_dist(p, a, b));
        if (cross3(a, b, p) < 0) inside = false;
    }
    return inside ? -d : d;
}
} // namespace detail

inline EclipseReport check_non_eclipse(const Table& t, double margin = 1e-9, int nsamples = 2048) {
    EclipseReport rep;
    rep.margin = 1e300;
    int m = t.size();
    std::vector<std::vector<detail::P2>> S;
    for (auto& s : t.scatterers()) S.push_back(s.samples(nsamples));
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            auto pts = S[i];
            pts.insert(pts.end(), S[j].begin(), S[j].end());
            auto H = detail::hull(pts);
            for (int k = 0; k < m; ++k) {
                if (k == i || k == j) continue;
                double dmin = 1e300;
                for (auto& p : S[k]) dmin = std::min(dmin, detail::signed_dist(p, H));
                // a large obstacle could swallow the hull without any sample inside it
                if (dmin > 0 && t.scatterers()[k].closed()) {
                    auto Hk = detail::hull(S[k]);
                    for (auto& p : H) dmin = std::min(dmin, detail::signed_dist(p, Hk));
                }
                rep.margin = std::min(rep.margin, dmin);
                if (dmin <= margin && rep.pass) {
                    rep.pass = false;
                    rep.triple = {i + 1, j + 1, k + 1};
                    rep.depth = -dmin;
                }
            }
        }
    return rep;
}

} // namespace ob
