#pragma once

#include <functional>

#include "normalform.hpp"

namespace ob {

struct SymmetryError : DomainError {
    using DomainError::DomainError;
};

// D*: 1* = kept obstacle, 2* = wall on the symmetry axis, 3* = third obstacle
struct FoldedTable {
    Table table;
    int kept = 2, mirrored = 1, third = 3;
    Vec2 mid, across;        // across: unit vector from the mirrored to the kept bounce
    Real half_length;        // L(12) / 2
    Real wall_distance;      // from the wall to the kept bounce
    Real symmetry_defect;
    PhasePoint kept_point;   // (12) bounce on the kept obstacle, original table
};

inline Vec2 mirror(const FoldedTable& f, const Vec2& p) { return p - (2 * dot(p - f.mid, f.across)) * f.across; }

// jets of K at the two bounces of (jk): equal after the orientation flip, odd derivatives zero
inline Real symmetry_defect(const Table& t, const PeriodicOrbit& o, int order) {
    auto Kj = t[o.points[0].i].curvature_jet(o.points[0].s, order);
    auto Kk = t[o.points[1].i].curvature_jet(o.points[1].s, order);
    Real d = 0;
    for (int m = 0; m <= order; ++m) {
        Real sg = m % 2 ? -1 : 1;
        d = std::max(d, Real(abs(Kj[m] - sg * Kk[m])));
        if (m % 2) d = std::max({d, Real(abs(Kj[m])), Real(abs(Kk[m]))});
    }
    return d;
}

// kept: the obstacle of the pair on whose side the homoclinic bounce on the third obstacle lies
inline FoldedTable fold_table(const Table& t, int j, int k, int third, int kept, int jet_order = 6,
                              const Real& tol = tenpow(-20)) {
    if (kept != j && kept != k) throw DomainError("kept obstacle must belong to the pair");
    FoldedTable f;
    f.kept = kept;
    f.mirrored = kept == j ? k : j;
    f.third = third;
    Word w{static_cast<char>('0' + f.mirrored), static_cast<char>('0' + kept)};
    PeriodicOrbit o = solve_orbit(t, w);
    f.symmetry_defect = symmetry_defect(t, o, jet_order);
    if (f.symmetry_defect > tol)
        throw SymmetryError("table is not mirror-symmetric about the (" + w + ") axis: jet mismatch " +
                            to_decimal(f.symmetry_defect, 6));
    Vec2 pm = t[f.mirrored].eval(o.points[0].s).point, pk = t[kept].eval(o.points[1].s).point;
    f.kept_point = o.points[1];
    f.mid = Real(0.5) * (pm + pk);
    f.half_length = o.length / 2;
    f.across = (1 / norm(pk - pm)) * (pk - pm);
    f.wall_distance = norm(pk - f.mid);
    Vec2 along(-f.across.y, f.across.x);
    // wall half-extent: half the gap to the third obstacle
    Real gap = 1e300;
    for (auto& p : t[third].samples(512)) gap = std::min(gap, Real(norm(Vec2(Real(p[0]), Real(p[1])) - f.mid)));
    Real ext = gap / 2;
    // outward normal (d.y, -d.x) of the wall must point toward the kept obstacle
    Vec2 a = f.mid + ext * along, b = f.mid - ext * along;
    Vec2 d = b - a;
    if (dot(Vec2(d.y, -d.x), f.across) < 0) std::swap(a, b);
    int dg = static_cast<int>(bits_to_digits(current_bits())) + 5;
    auto str = [&](const Vec2& p) { return std::array<std::string, 2>{to_decimal(p.x, dg), to_decimal(p.y, dg)}; };
    f.table = Table({t[kept].spec(), CurveSpec::segment(str(a), str(b)), t[third].spec()});
    return f;
}

struct FoldedOrbit {
    Word word;                    // over the labels of D*
    std::vector<Vec2> transported; // collision points by the folding rule
    std::vector<Real> theta;       // initial guess in native parameters of D*
};

// unfold-free transport: every crossing of the axis becomes a wall bounce and the rest is mirrored
inline FoldedOrbit transport(const FoldedTable& f, const Table& t, const PeriodicOrbit& h) {
    FoldedOrbit out;
    const Scatterer& wall = f.table[2];
    Vec2 wa = wall.seg_a(), wd = wall.seg_b() - wall.seg_a();
    Real wl = norm(wd);
    int p = static_cast<int>(h.points.size());
    bool flipped = false;
    auto side = [&](const Vec2& q) { return dot(q - f.mid, f.across); };
    auto add = [&](int label, const Vec2& q) {
        out.word.push_back(static_cast<char>('0' + label));
        out.transported.push_back(q);
        if (label == 2) out.theta.push_back(dot(q - wa, wd) / wl);
        else out.theta.push_back(detail::initial_theta(f.table[label], q));
    };
    for (int m = 0; m < p; ++m) {
        Vec2 A = t[h.points[m].i].eval(h.points[m].s).point;
        Vec2 B = t[h.points[(m + 1) % p].i].eval(h.points[(m + 1) % p].s).point;
        int lab = h.points[m].i == f.third ? 3 : 1;
        add(lab, flipped ? mirror(f, A) : A);
        Real sa = side(A), sb = side(B);
        if ((sa > 0) != (sb > 0) && h.points[m].i != f.third && h.points[(m + 1) % p].i != f.third) {
            Vec2 X = A + (sa / (sa - sb)) * (B - A);
            add(2, X);
            flipped = !flipped;
        }
    }
    if (flipped) throw DomainError("folded orbit does not close");
    return out;
}

struct FoldCheck {
    int n = 0;
    Word word;
    Real length, length_folded, multiplier_log, multiplier_log_folded;
    Real le, le_folded_unfolded; // LE(h_n*) rescaled by the unfolded period
    Real transport_error;        // solved h_n* points versus the folding rule
    Real double_step_defect;     // D(F*)^2 + DF over the kept-obstacle bounces
};

inline FoldCheck check_fold(const FoldedTable& f, const Table& t, const PeriodicOrbit& h, int n) {
    FoldCheck c;
    c.n = n;
    FoldedOrbit fo = transport(f, t, h);
    c.word = fo.word;
    PeriodicOrbit hs = solve_orbit_from(f.table, fo.word, fo.theta);
    c.length = h.length;
    c.length_folded = hs.length;
    int p = static_cast<int>(h.points.size()), ps = static_cast<int>(hs.points.size());
    c.multiplier_log = h.le * p;
    c.multiplier_log_folded = hs.le * ps;
    c.le = h.le;
    c.le_folded_unfolded = hs.le * ps / p;
    c.transport_error = 0;
    for (int m = 0; m < ps; ++m)
        c.transport_error = std::max(c.transport_error, Real(norm(f.table[hs.points[m].i].eval(hs.points[m].s).point -
                                                                  fo.transported[m])));
    c.double_step_defect = 0;
    for (int m = 0; m < ps; ++m) {
        if (hs.word[m] != '1' || hs.word[(m + 1) % ps] != '2') continue;
        int m1 = (m + 1) % ps, m2 = (m + 2) % ps;
        auto g1 = step_geometry(f.table, hs.points[m], hs.points[m1]);
        auto g2 = step_geometry(f.table, hs.points[m1], hs.points[m2]);
        Mat2 D2 = differential_from(g2.L, g2.K0, g2.K1, g2.nu0, g2.nu1) *
                  differential_from(g1.L, g1.K0, g1.K1, g1.nu0, g1.nu1);
        Mat2 D1 = differential_from(g1.L + g2.L, g1.K0, g2.K1, g1.nu0, g2.nu1);
        c.double_step_defect = std::max({c.double_step_defect, Real(abs(D2.a + D1.a)), Real(abs(D2.b + D1.b)),
                                         Real(abs(D2.c + D1.c)), Real(abs(D2.d + D1.d))});
    }
    return c;
}

// ---- jet correspondence at the wall ----

struct JetCorrespondence {
    NormalForm nf;            // of T* at the wall point
    Real beta2, beta4;        // graph coefficients of the kept obstacle, in units where the wall distance is 1
    Real A;
    Mat2 DT, DT_scaled, expected;
    Real trace_error, entry_error;
    Real K, Kpp;
};

inline JetCorrespondence jet_correspondence(const FoldedTable& f, int K = 8) {
    JetCorrespondence jc;
    jc.nf = moser_nf(f.table, 1, 2, K);
    jc.DT = linear_part(jc.nf.Tjet);
    auto kj = f.table[1].curvature_jet(f.kept_point.s, 2);
    jc.K = kj[0];
    jc.Kpp = kj[2];
    // graph y = d + beta2 t^2 + beta4 t^4: K = 2 beta2, K'' = 24 (beta4 - beta2^3)
    Real b2 = jc.K / 2, b4 = jc.Kpp / 24 + b2 * b2 * b2;
    Real d = f.wall_distance;
    jc.beta2 = b2 * d;
    jc.beta4 = b4 * d * d * d;
    jc.A = 2 * (2 * jc.beta2 + 1);
    // (s, r) -> (s / d, -r)
    jc.DT_scaled = Mat2{jc.DT.a, -jc.DT.b / d, -jc.DT.c * d, jc.DT.d};
    jc.expected = Mat2{jc.A - 1, -jc.A, 2 - jc.A, jc.A - 1};
    jc.trace_error = abs(jc.DT.trace() - 2 * (jc.A - 1));
    jc.entry_error = std::max({abs(jc.DT_scaled.a - jc.expected.a), abs(jc.DT_scaled.b - jc.expected.b),
                               abs(jc.DT_scaled.c - jc.expected.c), abs(jc.DT_scaled.d - jc.expected.d)});
    return jc;
}

// curvature and its second arc-length derivative at theta = 0 of rho(theta)(cos, sin), rho even;
// r2, r4 are rho'' and rho'''' in theta. The commonly quoted form with rho0^2 denominators holds only for rho0 = 1.
inline std::array<Real, 2> polar_curvature(const Real& r0, const Real& r2, const Real& r4) {
    Real K = 1 / r0 - r2 / (r0 * r0);
    Real Kpp = (-(r2 + r4) * r0 * r0 + 3 * r0 * r2 * r2 + 3 * pow(r2, 3)) / pow(r0, 6);
    return {K, Kpp};
}

struct KppRecovery {
    Real Kpp;
    Real a1;
    Real slope; // d a1 / d K''
    int iterations = 0;
};

// secant on K'' with the forward model a1(K''); degenerate when the slope vanishes
inline KppRecovery recover_Kpp(const std::function<Real(const Real&)>& a1_of_Kpp, const Real& a1_target,
                               Real k0, Real k1, const Real& slope_tol = tenpow(-12), int max_iter = 60) {
    KppRecovery r;
    Real f0 = a1_of_Kpp(k0) - a1_target, f1 = a1_of_Kpp(k1) - a1_target;
    Real tol = eps_bits(static_cast<int>(current_bits()) / 2);
    for (int it = 0; it < max_iter; ++it) {
        r.slope = (f1 - f0) / (k1 - k0);
        if (abs(r.slope) < slope_tol) throw DegeneracyError("d a1 / d K'' vanishes: the first invariant does not see K''");
        Real k2 = k1 - f1 / r.slope;
        k0 = k1;
        f0 = f1;
        k1 = k2;
        f1 = a1_of_Kpp(k1) - a1_target;
        r.iterations = it + 1;
        if (abs(k1 - k0) < tol * (1 + abs(k1))) break;
    }
    r.Kpp = k1;
    r.a1 = f1 + a1_target;
    return r;
}

// ---- arc of the third obstacle from gluing differentials ----

struct ArcPoint {
    Vec2 point;
    Real L, K;       // chord length and curvature at the bounce on the third obstacle
    Real s;          // parameter of the bounce on the third obstacle that the sample came from
};

// x = R_+^{-1}(eta, xi) on A_inf; DF^2_x = DR_-^{-1} DG DR_+ with both extensions known from O1, O2 alone
inline std::vector<ArcPoint> reconstruct_third_arc(const Table& t, const NormalForm& nf, const GluingData& gd) {
    std::vector<ArcPoint> out;
    for (const auto& sm : gd.samples) {
        Mat2 Dinv, DR;
        PhasePoint x = R_plus_inverse(t, nf, {sm.eta, sm.xi}, gd.l, &Dinv);
        PhasePoint Fx2{x.i, x.s, -x.r}; // F^2(x) = I(x) on A_inf
        R_minus(t, nf, Fx2, gd.l, &DR);
        Mat2 DF2 = inverse(DR) * sm.DG * inverse(Dinv);
        Real nu = sqrt(1 - x.r * x.r);
        Real Ks = t[x.i].curvature_native(t[x.i].theta_of_s(x.s));
        Real aa = (DF2.a + 1) * nu / 2;     // a a'
        Real aL = DF2.b * nu * nu / 2;      // a' L
        Real ap = (aa - Ks * aL) / nu;      // a' from a = L K + nu
        ArcPoint ap_;
        ap_.L = aL / ap;
        ap_.K = (ap - 1) / ap_.L;
        BoundaryPoint b = t[x.i].eval(x.s);
        Vec2 v = x.r * b.tangent + nu * b.normal;
        ap_.point = b.point + ap_.L * v;
        ap_.s = gd.s_inf + sm.u;
        out.push_back(ap_);
    }
    return out;
}

} // namespace ob
