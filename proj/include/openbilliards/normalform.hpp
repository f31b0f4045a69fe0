#pragma once

#include <array>
#include <vector>

#include "solver.hpp"

namespace ob {

// polynomial map of the plane, components in displacement variables
struct JetMap {
    Jet2<Real> x, y;
    int order() const { return x.K; }
};

inline JetMap compose(const JetMap& f, const JetMap& g) { return {compose(f.x, g.x, g.y), compose(f.y, g.x, g.y)}; }

inline JetMap linear_map(const Mat2& m, int K) {
    auto u = Jet2<Real>::var_u(K), w = Jet2<Real>::var_w(K);
    return {u * m.a + w * m.b, u * m.c + w * m.d};
}

inline Mat2 inverse(const Mat2& m) {
    Real D = m.det();
    return {m.d / D, -m.b / D, -m.c / D, m.a / D};
}

inline Mat2 linear_part(const JetMap& f) { return {f.x(1, 0), f.x(0, 1), f.y(1, 0), f.y(0, 1)}; }

inline Real max_coef(const Jet2<Real>& j, int dmin = 0, const Real& scale = Real(1)) {
    Real m = 0, p = 1;
    for (int d = 0; d <= j.K; ++d, p *= scale)
        if (d >= dmin)
            for (int i = 0; i <= d; ++i) m = std::max(m, Real(abs(j(d - i, i)) * p));
    return m;
}

struct NormalForm {
    int j = 1, k = 2; // pair; the fixed point sits on scatterer k
    int K = 6;
    Real lambda;
    std::vector<Real> a;      // a[0] = lambda, a[m] multiplies (xi eta)^m in Delta
    std::vector<Real> ainv;   // second-component resonant coefficients (Delta^{-1})
    PhasePoint fixed;         // (s*, 0) on scatterer k
    Mat2 L;                   // (ds, dr) -> linear Birkhoff coordinates
    JetMap Tjet;              // T - fixed point, in (ds, dr)
    JetMap Phi;               // nonlinear part of the conjugacy in linear coordinates
    JetMap R0;                // full conjugacy in (ds, dr)
    Vec2 stable, unstable;    // eigen-directions in (s, r)
    Real theta;               // angle from the s-axis to the invariant lines
    Real conjugacy_residual;  // max |R0 T - N R0| over the jet
    Real symplectic_defect;   // max |det DR0 - 1| over the jet
    Real delta_defect;        // max |Delta * Delta^{-1} - 1| over the resonant coefficients
    Real axis_defect;         // max |R0x(s,0) - R0y(s,0)| over the jet
    bool axis_canonical = true;
    Real validity_radius = 0;
};

namespace detail {

inline Vec2 eigvec(const Mat2& A, const Real& mu) {
    Vec2 v1{A.b, mu - A.a}, v2{mu - A.d, A.c};
    Vec2 v = norm(v1) > norm(v2) ? v1 : v2;
    return (Real(1) / norm(v)) * v;
}

} // namespace detail

// Moser elimination on a jet fixing 0; axis is the (s,r)-direction that must land on the diagonal
inline NormalForm moser_from_jet(const JetMap& T, const Vec2& axis = Vec2(Real(1), Real(0))) {
    NormalForm nf;
    int K = T.order();
    nf.K = K;
    nf.Tjet = T;
    Mat2 A = linear_part(T);
    Real tr = A.trace(), det = A.det();
    if (abs(det - 1) > pow(residual_tolerance(), Real(0.5))) throw DomainError("jet is not area preserving");
    if (!(abs(tr) > 2)) throw DomainError("fixed point is not hyperbolic");
    Real sq = sqrt(tr * tr - 4);
    Real ls = tr > 0 ? (tr - sq) / 2 : (tr + sq) / 2; // |ls| < 1
    Real lu = 1 / ls;
    Vec2 vs = detail::eigvec(A, ls), vu = detail::eigvec(A, lu);
    Real D = cross(vs, vu);
    if (D < 0) vu = Real(-1) * vu, D = -D;
    vs = (Real(1) / sqrt(D)) * vs;
    vu = (Real(1) / sqrt(D)) * vu;
    // coordinates of the axis direction: xi0 = cross(axis, vu), eta0 = cross(vs, axis)
    Real x0 = cross(axis, vu), y0 = cross(vs, axis);
    if (x0 * y0 > 0) {
        Real c = sqrt(x0 / y0);
        vs = c * vs;
        vu = (Real(1) / c) * vu;
        if (x0 < 0) vs = Real(-1) * vs, vu = Real(-1) * vu;
    } else {
        nf.axis_canonical = false;
    }
    Mat2 Linv{vs.x, vu.x, vs.y, vu.y};
    nf.L = inverse(Linv);
    nf.stable = vs;
    nf.unstable = vu;
    nf.theta = atan2(abs(vu.y), abs(vu.x)); // s-axis to each invariant line

    JetMap Tn = compose(linear_map(nf.L, K), compose(T, linear_map(Linv, K)));
    Jet2<Real> Px = Jet2<Real>::var_u(K), Py = Jet2<Real>::var_w(K);
    Jet2<Real> Nx = Jet2<Real>::var_u(K) * ls, Ny = Jet2<Real>::var_w(K) * lu;
    nf.lambda = ls;
    nf.a.assign(1, ls);
    nf.ainv.assign(1, lu);
    auto lpow = [&](int e) { return pow(ls, e); };
    for (int d = 2; d <= K; ++d) {
        JetMap PT = compose(JetMap{Px, Py}, Tn);
        JetMap NP = compose(JetMap{Nx, Ny}, JetMap{Px, Py});
        Jet2<Real> Ex = PT.x - NP.x, Ey = PT.y - NP.y;
        bool odd = d % 2 == 1;
        int m = (d - 1) / 2;
        for (int jj = 0; jj <= d; ++jj) {
            int i = d - jj;
            // first component: (lambda^{i-j} - lambda) phi = N - E
            if (odd && i - jj == 1) {
                Nx(i, jj) = Ex(i, jj);
            } else {
                Px(i, jj) = -Ex(i, jj) / (lpow(i - jj) - ls);
            }
            if (odd && jj - i == 1) {
                Ny(i, jj) = Ey(i, jj);
            } else {
                Py(i, jj) = -Ey(i, jj) / (lpow(i - jj) - lu);
            }
        }
        if (odd) {
            // free resonant terms: symplectic at degree 2m, axis on the diagonal at degree d
            Jet2<Real> J = Px.du() * Py.dw() - Px.dw() * Py.du();
            Real Dk = J(m, m);
            Real P1 = 0, P2 = 0;
            for (int jj = 0; jj <= d; ++jj) P1 += Px(d - jj, jj), P2 += Py(d - jj, jj);
            Real sum = -Dk / (m + 1), diff = nf.axis_canonical ? -(P1 - P2) : Real(0);
            Px(m + 1, m) = (sum + diff) / 2;
            Py(m, m + 1) = (sum - diff) / 2;
            nf.a.push_back(Nx(m + 1, m));
            nf.ainv.push_back(Ny(m, m + 1));
        }
    }
    nf.Phi = {Px, Py};
    nf.R0 = compose(nf.Phi, linear_map(nf.L, K));

    // diagnostics
    JetMap lhs = compose(nf.R0, T), rhs = compose(JetMap{Nx, Ny}, nf.R0);
    nf.conjugacy_residual = std::max(max_coef(lhs.x - rhs.x), max_coef(lhs.y - rhs.y));
    Jet2<Real> J = nf.R0.x.du() * nf.R0.y.dw() - nf.R0.x.dw() * nf.R0.y.du();
    J.a[0] -= 1;
    nf.symplectic_defect = max_coef(J.truncated(K - 1));
    // Delta(z) Delta^{-1}(z) = 1 up to degree (K-1)/2
    int M = static_cast<int>(nf.a.size());
    nf.delta_defect = 0;
    for (int n = 0; n < M; ++n) {
        Real s = 0;
        for (int i = 0; i <= n; ++i) s += nf.a[i] * nf.ainv[n - i];
        if (n == 0) s -= 1;
        nf.delta_defect = std::max(nf.delta_defect, Real(abs(s)));
    }
    nf.axis_defect = 0;
    for (int d = 1; d <= K; ++d) {
        // coefficient of t^d of R0(t*axis)
        Real s = 0;
        for (int jj = 0; jj <= d; ++jj) {
            Real mono = pow(axis.x, d - jj) * pow(axis.y, jj);
            s += (nf.R0.x(d - jj, jj) - nf.R0.y(d - jj, jj)) * mono;
        }
        nf.axis_defect = std::max(nf.axis_defect, Real(abs(s)));
    }
    return nf;
}

// T = F^2 at the point of the (jk) orbit on scatterer k
inline NormalForm moser_nf(const Table& t, int j, int k, int K) {
    Word w{static_cast<char>('0' + j), static_cast<char>('0' + k)};
    PeriodicOrbit o = solve_orbit(t, w);
    PhasePoint x = o.points[1];
    JetMap T;
    MapJet mj = map_jet(t, x, 2, K, {j, k});
    T.x = mj.s;
    T.x.a[0] -= x.s;
    T.y = mj.r;
    T.y.a[0] -= x.r;
    // wrap-around of the arc-length on closed curves
    Real per = t[k].length();
    if (t[k].closed()) {
        Real sh = round(T.x.a[0] / per) * per;
        T.x.a[0] -= sh;
    }
    NormalForm nf = moser_from_jet(T);
    nf.j = j;
    nf.k = k;
    nf.fixed = x;
    return nf;
}

// ---- pointwise evaluation ----

inline Real Delta(const NormalForm& nf, const Real& z) {
    Real s = 0;
    for (int m = static_cast<int>(nf.a.size()) - 1; m >= 0; --m) s = s * z + nf.a[m];
    return s;
}
inline Real Delta_prime(const NormalForm& nf, const Real& z) {
    Real s = 0;
    for (int m = static_cast<int>(nf.a.size()) - 1; m >= 1; --m) s = s * z + m * nf.a[m];
    return s;
}

// N^e with the truncated Delta; exact inverse since xi*eta is preserved
inline std::array<Real, 2> N_pow(const NormalForm& nf, const std::array<Real, 2>& p, int e, Mat2* D = nullptr) {
    Real z = p[0] * p[1];
    Real De = pow(Delta(nf, z), e);
    if (D) {
        Real dD = Delta_prime(nf, z);
        Real Dl = Delta(nf, z);
        // d/dz Delta^e = e Delta^{e-1} Delta'
        Real dDe = e * pow(Dl, e - 1) * dD;
        Real dDme = -e * pow(Dl, -e - 1) * dD;
        D->a = De + p[0] * dDe * p[1];
        D->b = p[0] * dDe * p[0];
        D->c = p[1] * dDme * p[1];
        D->d = 1 / De + p[1] * dDme * p[0];
    }
    return {p[0] * De, p[1] / De};
}

namespace detail {

inline Real jet_eval(const Jet2<Real>& j, const Real& u, const Real& w) {
    // Horner in w inside Horner in u over the triangular index set
    int K = j.K;
    Real s = 0;
    for (int i = K; i >= 0; --i) {
        Real c = 0;
        for (int jj = K - i; jj >= 0; --jj) c = c * w + j(i, jj);
        s = s * u + c;
    }
    return s;
}

} // namespace detail

inline std::array<Real, 2> displacement(const Table& t, const NormalForm& nf, const PhasePoint& x) {
    if (x.i != nf.fixed.i) throw DomainError("point is not on the normal-form scatterer");
    Real ds = x.s - nf.fixed.s;
    if (t[x.i].closed()) {
        Real per = t[x.i].length();
        ds -= round(ds / per) * per;
    }
    return {ds, x.r - nf.fixed.r};
}

inline std::array<Real, 2> R0_eval(const NormalForm& nf, const std::array<Real, 2>& d, Mat2* D = nullptr) {
    if (D) {
        D->a = detail::jet_eval(nf.R0.x.du(), d[0], d[1]);
        D->b = detail::jet_eval(nf.R0.x.dw(), d[0], d[1]);
        D->c = detail::jet_eval(nf.R0.y.du(), d[0], d[1]);
        D->d = detail::jet_eval(nf.R0.y.dw(), d[0], d[1]);
    }
    return {detail::jet_eval(nf.R0.x, d[0], d[1]), detail::jet_eval(nf.R0.y, d[0], d[1])};
}

// Newton inversion of the polynomial conjugacy; returns the displacement
inline std::array<Real, 2> R0_inverse(const NormalForm& nf, const std::array<Real, 2>& p) {
    Mat2 Li = inverse(nf.L);
    std::array<Real, 2> d{Li.a * p[0] + Li.b * p[1], Li.c * p[0] + Li.d * p[1]};
    Real tol = eps_bits(static_cast<int>(current_bits()) - 8);
    for (int it = 0; it < 100; ++it) {
        Mat2 J;
        auto q = R0_eval(nf, d, &J);
        Real e0 = q[0] - p[0], e1 = q[1] - p[1];
        Mat2 Ji = inverse(J);
        Real d0 = Ji.a * e0 + Ji.b * e1, d1 = Ji.c * e0 + Ji.d * e1;
        d[0] -= d0;
        d[1] -= d1;
        if (abs(d0) + abs(d1) <= tol * (abs(d[0]) + abs(d[1]) + tol)) break;
    }
    return d;
}

// F^2 through scatterers a then b, with differential accumulated into D
inline PhasePoint double_step(const Table& t, const PhasePoint& x, int a, int b, Mat2* D = nullptr) {
    PhasePoint y = billiard_step(t, x, a);
    PhasePoint z = billiard_step(t, y, b);
    if (D) {
        auto g1 = step_geometry(t, x, y), g2 = step_geometry(t, y, z);
        *D = differential_from(g2.L, g2.K0, g2.K1, g2.nu0, g2.nu1) *
             differential_from(g1.L, g1.K0, g1.K1, g1.nu0, g1.nu1) * *D;
    }
    return z;
}

inline PhasePoint T_step(const Table& t, const NormalForm& nf, const PhasePoint& x, Mat2* D = nullptr) {
    return double_step(t, x, nf.j, nf.k, D);
}

// R_- = N^{-l} R0 T^l, pointwise with differential
inline std::array<Real, 2> R_minus(const Table& t, const NormalForm& nf, const PhasePoint& x, int l, Mat2* D = nullptr) {
    Mat2 DT;
    PhasePoint y = x;
    for (int k = 0; k < l; ++k) y = T_step(t, nf, y, D ? &DT : nullptr);
    Mat2 DR, DN;
    auto p = R0_eval(nf, displacement(t, nf, y), D ? &DR : nullptr);
    auto q = N_pow(nf, p, -l, D ? &DN : nullptr);
    if (D) *D = DN * DR * DT;
    return q;
}

// R_+^{-1} = T^l R0^{-1} N^{-l}  (R_+ = N^l R0 T^{-l})
inline PhasePoint R_plus_inverse(const Table& t, const NormalForm& nf, const std::array<Real, 2>& p, int l,
                                 Mat2* D = nullptr) {
    Mat2 DN, DR, DT;
    auto q = N_pow(nf, p, -l, D ? &DN : nullptr);
    auto d = R0_inverse(nf, q);
    if (D) R0_eval(nf, d, &DR);
    PhasePoint y{nf.fixed.i, nf.fixed.s + d[0], nf.fixed.r + d[1]};
    for (int k = 0; k < l; ++k) y = T_step(t, nf, y, D ? &DT : nullptr);
    if (D) *D = DT * inverse(DR) * DN;
    return y;
}

// largest radius (powers of 10) where the pointwise conjugacy residual stays below tol
inline Real validity_radius(const Table& t, const NormalForm& nf, const Real& tol) {
    std::vector<Vec2> dirs{nf.stable, nf.unstable, Vec2(Real(1), Real(0)), Vec2(Real(0), Real(1))};
    Real best = 0;
    for (int e = 1; e <= 40; ++e) {
        Real rho = tenpow(-e);
        Real worst = 0;
        for (auto& v : dirs)
            for (int sg : {1, -1}) {
                Vec2 dv = (sg * rho / norm(v)) * v;
                PhasePoint x{nf.fixed.i, nf.fixed.s + dv.x, nf.fixed.r + dv.y};
                try {
                    PhasePoint y = T_step(t, nf, x);
                    auto lhs = R0_eval(nf, displacement(t, nf, y));
                    auto rhs = N_pow(nf, R0_eval(nf, displacement(t, nf, x)), 1);
                    worst = std::max(worst, Real(abs(lhs[0] - rhs[0]) + abs(lhs[1] - rhs[1])));
                } catch (const std::exception&) {
                    worst = 1;
                }
            }
        if (worst < tol) return rho;
    }
    return best;
}

// ---- gluing along the homoclinic orbit ----

struct GluingSample {
    Real u;                // offset of s on the third scatterer
    Real xi, eta;          // R_-(z), z = F(s, 0)
    Real swap_error;       // |G(eta, xi) - (xi, eta)|
    Real det_error;        // |det DG - 1|
    Real display_error;    // max entry deviation of DG from the gamma'/g display
    Real jet_error;        // pointwise R_- versus the jet expansion
    Real overlap_error;    // R_- through l and l + 1 doublings
    Mat2 DG;
};

struct GluingData {
    int third = 3;
    int l = 0;                 // m0
    Real s_inf;                // perpendicular homoclinic point on the third scatterer
    Real xi_inf;
    Taylor<Real> gamma, g;     // in eta; gamma(0) = 0
    Taylor<Real> xi_of_u, eta_of_u;
    Real validity_radius, sample_radius;
    std::vector<GluingSample> samples;
    Real max_swap = 0, max_det = 0, max_display = 0, max_jet = 0, max_overlap = 0, reflection_error = 0;
};

namespace detail {

inline Jet2<Real> delta_jet(const NormalForm& nf, const Jet2<Real>& z) {
    Jet2<Real> s(z.K);
    for (int m = static_cast<int>(nf.a.size()) - 1; m >= 0; --m) s = s * z + nf.a[m];
    return s;
}

inline Jet2<Real> jpow(const Jet2<Real>& x, int e) {
    Jet2<Real> r(x.K, Real(1)), b = e < 0 ? x.inv() : x;
    for (int k = 0; k < std::abs(e); ++k) r = r * b;
    return r;
}

inline Taylor<Real> restrict_u(const Jet2<Real>& j) {
    Taylor<Real> t(j.K);
    for (int i = 0; i <= j.K; ++i) t[i] = j(i, 0);
    return t;
}

} // namespace detail

// E(s, r) = R_-(F(s, r)) for (s, r) on the third scatterer, as a jet around (s0, 0)
inline JetMap gluing_jet(const Table& t, const NormalForm& nf, int third, const Real& s0, int l, int order) {
    std::vector<int> targets{nf.k};
    for (int k = 0; k < l; ++k) targets.push_back(nf.j), targets.push_back(nf.k);
    MapJet mj = map_jet(t, PhasePoint{third, s0, Real(0)}, 1 + 2 * l, order, targets);
    auto d = displacement(t, nf, PhasePoint{nf.k, mj.s.a[0], mj.r.a[0]});
    Jet2<Real> U = mj.s, W = mj.r;
    U.a[0] = d[0];
    W.a[0] = d[1];
    Jet2<Real> X = compose_full(nf.R0.x, U, W), Y = compose_full(nf.R0.y, U, W);
    Jet2<Real> Dl = detail::delta_jet(nf, X * Y);
    return {X * detail::jpow(Dl, -l), Y * detail::jpow(Dl, l)};
}

inline int choose_m0(const Table& t, const NormalForm& nf, const PhasePoint& z, const Real& radius) {
    PhasePoint y = z;
    for (int l = 0; l < 60; ++l) {
        auto d = displacement(t, nf, y);
        if (sqrt(d[0] * d[0] + d[1] * d[1]) < radius / 2) return l;
        y = T_step(t, nf, y);
    }
    throw DomainError("homoclinic point does not approach the validity disk");
}

// s_guess: parameter of the perpendicular homoclinic bounce on the third scatterer (e.g. from h_n)
inline GluingData extend_and_glue(const Table& t, const NormalForm& nf, int third, const Real& s_guess, int J = 6,
                                  int l = 0, const Real& validity_tol = tenpow(-30), int nsamples = 0) {
    GluingData gd;
    gd.third = third;
    gd.validity_radius = validity_radius(t, nf, validity_tol);
    if (gd.validity_radius == 0) throw DomainError("normal form has no validity disk at the requested tolerance");
    PhasePoint z0 = billiard_step(t, PhasePoint{third, s_guess, Real(0)}, nf.k);
    gd.l = l > 0 ? l : std::max(1, choose_m0(t, nf, z0, gd.validity_radius));
    // homoclinic point: eta(R_-(F(s, 0))) = 0
    Real s = s_guess;
    Real tol = eps_bits(static_cast<int>(current_bits()) - 16);
    for (int it = 0; it < 60; ++it) {
        JetMap E1 = gluing_jet(t, nf, third, s, gd.l, 1);
        Real ds = E1.y(0, 0) / E1.y(1, 0);
        s -= ds;
        if (abs(ds) < tol) break;
    }
    gd.s_inf = s;
    JetMap E = gluing_jet(t, nf, third, s, gd.l, J + 1);
    gd.xi_inf = E.x(0, 0);
    gd.xi_of_u = detail::restrict_u(E.x);
    gd.eta_of_u = detail::restrict_u(E.y);
    Taylor<Real> eu = gd.eta_of_u, xu = gd.xi_of_u;
    eu[0] = 0;
    xu[0] = 0;
    Taylor<Real> u_of_eta = revert(eu);
    gd.gamma = compose(xu, u_of_eta);
    // DG = DE M^{-1}, M = I0 DE diag(1, -1); g is its lower-right entry
    Taylor<Real> Exu = detail::restrict_u(E.x.du()), Exw = detail::restrict_u(E.x.dw());
    Taylor<Real> Eyu = detail::restrict_u(E.y.du()), Eyw = detail::restrict_u(E.y.dw());
    Taylor<Real> detM = Eyw * Exu - Eyu * Exw;
    Taylor<Real> G22 = (Real(2) * (Eyu * Eyw)) / detM;
    gd.g = compose(G22, u_of_eta);

    // pointwise checks on samples
    int M = nsamples > 0 ? nsamples : std::max(4 * J, 12);
    gd.sample_radius = gd.validity_radius * pow(abs(nf.lambda), gd.l) / 10;
    Taylor<Real> dgamma = gd.gamma.derivative();
    for (int i = 0; i < M; ++i) {
        GluingSample sm;
        sm.u = gd.sample_radius * cos(pi() * (2 * i + 1) / (2 * M));
        PhasePoint z = billiard_step(t, PhasePoint{third, s + sm.u, Real(0)}, nf.k);
        auto q = R_minus(t, nf, z, gd.l);
        sm.xi = q[0];
        sm.eta = q[1];
        sm.jet_error = abs(q[0] - E.x.eval(sm.u, Real(0))) + abs(q[1] - E.y.eval(sm.u, Real(0)));
        auto q2 = R_minus(t, nf, z, gd.l + 1);
        sm.overlap_error = abs(q2[0] - q[0]) + abs(q2[1] - q[1]);
        std::array<Real, 2> p{sm.eta, sm.xi};
        Mat2 Dinv, DT, DR;
        PhasePoint x = R_plus_inverse(t, nf, p, gd.l, &Dinv);
        PhasePoint Tx = double_step(t, x, third, nf.k, &DT);
        auto Gp = R_minus(t, nf, Tx, gd.l, &DR);
        sm.swap_error = abs(Gp[0] - sm.xi) + abs(Gp[1] - sm.eta);
        sm.DG = DR * DT * Dinv;
        sm.det_error = abs(sm.DG.det() - 1);
        Real ev = sm.eta;
        Real gp = dgamma.eval(ev), gg = gd.g.eval(ev);
        Mat2 disp{gp * (2 - gp * gg), gp * gg - 1, 1 - gp * gg, gg};
        sm.display_error = std::max({abs(disp.a - sm.DG.a), abs(disp.b - sm.DG.b), abs(disp.c - sm.DG.c),
                                     abs(disp.d - sm.DG.d)});
        gd.max_swap = std::max(gd.max_swap, sm.swap_error);
        gd.max_det = std::max(gd.max_det, sm.det_error);
        gd.max_display = std::max(gd.max_display, sm.display_error);
        gd.max_jet = std::max(gd.max_jet, sm.jet_error);
        gd.max_overlap = std::max(gd.max_overlap, sm.overlap_error);
        gd.samples.push_back(sm);
    }
    // R0 I R0^{-1} = I0 near the fixed point
    for (int i = 0; i < 8; ++i) {
        Real a = 2 * pi() * i / 8, rho = gd.validity_radius / 4;
        std::array<Real, 2> d{rho * cos(a), rho * sin(a)};
        auto p = R0_eval(nf, d);
        auto pr = R0_eval(nf, {d[0], -d[1] - 2 * nf.fixed.r});
        gd.reflection_error = std::max(gd.reflection_error, Real(abs(pr[0] - p[1]) + abs(pr[1] - p[0])));
    }
    return gd;
}

} // namespace ob
