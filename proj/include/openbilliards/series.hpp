#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "real.hpp"

namespace ob {

// polynomial in n, index = power
template <class T>
using NPoly = std::vector<T>;

template <class T>
NPoly<T> padd(const NPoly<T>& a, const NPoly<T>& b) {
    NPoly<T> r(std::max(a.size(), b.size()), T(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

template <class T>
NPoly<T> pmul(const NPoly<T>& a, const NPoly<T>& b) {
    if (a.empty() || b.empty()) return {};
    NPoly<T> r(a.size() + b.size() - 1, T(0));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

// Truncated sum_{q<=p<=P} s_{q,p} n^q x^p with x = lambda^n.
template <class T>
class BalancedSeries {
  public:
    BalancedSeries() = default;
    explicit BalancedSeries(int P, const T& c0 = T(0)) : P_(P), s_(P + 1) {
        if (c0 != 0) s_[0] = {c0};
    }
    static BalancedSeries x(int P) {
        BalancedSeries r(P);
        if (P >= 1) r.s_[1] = {T(1)};
        return r;
    }

    int order() const { return P_; }
    const NPoly<T>& at(int p) const { return s_[p]; }
    NPoly<T>& at(int p) { return s_[p]; }
    T coef(int q, int p) const {
        if (p < 0 || p > P_ || q < 0 || q >= static_cast<int>(s_[p].size())) return T(0);
        return s_[p][q];
    }
    void set(int q, int p, const T& v) {
        if (static_cast<int>(s_[p].size()) <= q) s_[p].resize(q + 1, T(0));
        s_[p][q] = v;
        while (!s_[p].empty() && s_[p].back() == 0) s_[p].pop_back();
    }
    // lowest power of x present
    int valuation() const {
        for (int p = 0; p <= P_; ++p)
            if (!s_[p].empty()) return p;
        return P_ + 1;
    }
    bool balanced() const {
        for (int p = 0; p <= P_; ++p)
            if (static_cast<int>(s_[p].size()) > p + 1) return false;
        return true;
    }

    friend BalancedSeries operator+(const BalancedSeries& a, const BalancedSeries& b) {
        check(a, b);
        BalancedSeries r(a.P_);
        for (int p = 0; p <= a.P_; ++p) r.s_[p] = padd(a.s_[p], b.s_[p]);
        return r;
    }
    friend BalancedSeries operator-(const BalancedSeries& a, const BalancedSeries& b) { return a + b * T(-1); }
    friend BalancedSeries operator*(const BalancedSeries& a, const T& c) {
        BalancedSeries r(a.P_);
        if (c == 0) return r;
        for (int p = 0; p <= a.P_; ++p) {
            r.s_[p] = a.s_[p];
            for (auto& v : r.s_[p]) v *= c;
        }
        return r;
    }
    friend BalancedSeries operator*(const T& c, const BalancedSeries& a) { return a * c; }
    friend BalancedSeries operator+(const BalancedSeries& a, const T& c) {
        BalancedSeries r = a;
        r.s_[0] = padd(r.s_[0], NPoly<T>{c});
        return r;
    }
    friend BalancedSeries operator*(const BalancedSeries& a, const BalancedSeries& b) {
        check(a, b);
        BalancedSeries r(a.P_);
        for (int i = 0; i <= a.P_; ++i) {
            if (a.s_[i].empty()) continue;
            for (int j = 0; i + j <= a.P_; ++j)
                if (!b.s_[j].empty()) r.s_[i + j] = padd(r.s_[i + j], pmul(a.s_[i], b.s_[j]));
        }
        return r;
    }
    // multiply by a polynomial in n
    BalancedSeries times_n(const NPoly<T>& q) const {
        BalancedSeries r(P_);
        for (int p = 0; p <= P_; ++p) r.s_[p] = pmul(s_[p], q);
        return r;
    }
    // multiply by x^k
    BalancedSeries shift(int k) const {
        BalancedSeries r(P_);
        for (int p = P_; p >= k; --p) r.s_[p] = s_[p - k];
        return r;
    }
    bool operator==(const BalancedSeries& o) const { return P_ == o.P_ && s_ == o.s_; }

    // numeric value at integer n and x = lam^n
    T eval(int n, const T& x) const {
        T out = 0, xp = 1;
        for (int p = 0; p <= P_; ++p) {
            T c = 0, np = 1;
            for (auto& v : s_[p]) {
                c += v * np;
                np *= n;
            }
            out += c * xp;
            xp *= x;
        }
        return out;
    }

  private:
    int P_ = 0;
    std::vector<NPoly<T>> s_;
    static void check(const BalancedSeries& a, const BalancedSeries& b) {
        if (a.P_ != b.P_) throw std::invalid_argument("balanced series truncation mismatch");
    }
};

// c + sum_{j>=1} coef[j] z^j, z of positive valuation
template <class T>
BalancedSeries<T> compose_power_series(const std::vector<T>& coef, const BalancedSeries<T>& z, const T& c) {
    int P = z.order();
    BalancedSeries<T> r(P, c), zp(P, T(1));
    for (int j = 1; j <= P; ++j) {
        zp = zp * z;
        if (j < static_cast<int>(coef.size()) && coef[j] != 0) r = r + zp * coef[j];
    }
    return r;
}

// binomial C(n, r) or C(-n, r) as a polynomial in n
template <class T>
NPoly<T> binomial_n(int r, bool negative) {
    NPoly<T> q{T(1)};
    T f = 1;
    for (int i = 0; i < r; ++i) {
        q = pmul(q, negative ? NPoly<T>{T(i), T(1)} : NPoly<T>{T(-i), T(1)});
        f *= (i + 1);
    }
    T s = (negative && r % 2) ? T(-1) / f : T(1) / f;
    for (auto& v : q) v *= s;
    return q;
}

// (1 + u)^{n} or (1 + u)^{-n} for u of positive valuation
template <class T>
BalancedSeries<T> bs_pow_n_of(const BalancedSeries<T>& u, bool negative = false) {
    int P = u.order();
    if (u.valuation() < 1) throw std::invalid_argument("n-th power needs a perturbation of positive order");
    BalancedSeries<T> res(P, T(1)), ur(P, T(1));
    for (int r = 1; r <= P; ++r) {
        ur = ur * u;
        res = res + ur.times_n(binomial_n<T>(r, negative));
    }
    return res;
}

template <class T>
BalancedSeries<T> bs_pow_n(const BalancedSeries<T>& s, bool negative = false) {
    auto c = s.at(0);
    if (!(c.size() == 1 && c[0] == 1)) throw std::invalid_argument("n-th power needs constant term exactly 1");
    return bs_pow_n_of(s + T(-1), negative);
}

template <class T>
struct CoefficientSet {
    std::vector<T> a;  // a[0] = 1
    std::vector<T> gm; // gm[0] = 1
    std::vector<T> g;  // g[0] = g0
    T lambda = 0;

    static CoefficientSet zeros(int P, const T& g0 = T(1)) {
        CoefficientSet c;
        c.a.assign(P + 2, T(0));
        c.gm.assign(P + 2, T(0));
        c.g.assign(P + 2, T(0));
        c.a[0] = c.gm[0] = 1;
        c.g[0] = g0;
        return c;
    }
    T A(int j) const { return j < static_cast<int>(a.size()) ? a[j] : T(0); }
    T Gm(int j) const { return j < static_cast<int>(gm.size()) ? gm[j] : T(0); }
    T G(int j) const { return j < static_cast<int>(g.size()) ? g[j] : T(0); }
};

template <class T>
std::vector<T> tail(const std::vector<T>& v) {
    std::vector<T> r = v;
    if (!r.empty()) r[0] = 0;
    return r;
}

template <class T>
BalancedSeries<T> solve_eta(const CoefficientSet<T>& cs, int P) {
    auto X = BalancedSeries<T>::x(P);
    BalancedSeries<T> eta(P, T(1)), prev;
    for (int it = 0; it <= P + 1; ++it) {
        prev = eta;
        auto G = compose_power_series(tail(cs.gm), X * eta, T(1));
        auto zeta = eta * G;
        auto D = compose_power_series(tail(cs.a), X * zeta, T(0));
        eta = bs_pow_n_of(D) * G;
    }
    if (!(eta == prev)) throw std::logic_error("eta fixed point did not stabilize");
    return eta;
}

template <class T>
struct TraceParts {
    BalancedSeries<T> eta, inv_pow, pow, ratio, one_minus_nratio, gval, gprime, I, II, III, Y;
};

// 2 lambda^n cosh(2(n+1) LE(h_n)) as a balanced series
template <class T>
TraceParts<T> trace_parts(const CoefficientSet<T>& cs, int P) {
    TraceParts<T> tp;
    auto X = BalancedSeries<T>::x(P);
    tp.eta = solve_eta(cs, P);
    auto xe = X * tp.eta;
    auto G = compose_power_series(tail(cs.gm), xe, T(1));
    auto xz = X * (tp.eta * G);
    auto D = compose_power_series(tail(cs.a), xz, T(0));
    tp.inv_pow = bs_pow_n_of(D, true);
    tp.pow = bs_pow_n_of(D, false);
    BalancedSeries<T> inv1(P, T(1)), t(P, T(1));
    for (int k = 1; k <= P; ++k) {
        t = t * D * T(-1);
        inv1 = inv1 + t;
    }
    std::vector<T> ja(cs.a.size(), T(0));
    for (size_t j = 1; j < cs.a.size(); ++j) ja[j] = T(static_cast<long>(j)) * cs.a[j];
    tp.ratio = compose_power_series(ja, xz, T(0)) * inv1;
    auto nratio = tp.ratio.times_n({T(0), T(1)});
    tp.one_minus_nratio = BalancedSeries<T>(P, T(1)) - nratio;
    tp.gval = compose_power_series(tail(cs.g), xe, cs.G(0));
    std::vector<T> gp(cs.gm.size(), T(0));
    for (size_t j = 2; j < cs.gm.size(); ++j) gp[j - 1] = T(static_cast<long>(j)) * cs.gm[j];
    tp.gprime = compose_power_series(gp, xe, cs.Gm(1));
    auto gg = tp.gprime * tp.gval;
    tp.I = tp.inv_pow * tp.one_minus_nratio * tp.gval;
    tp.II = nratio * (BalancedSeries<T>(P, T(1)) - gg) * T(2);
    tp.III = tp.pow * (BalancedSeries<T>(P, T(1)) + nratio) * tp.gprime * (BalancedSeries<T>(P, T(2)) - gg);
    tp.Y = tp.I + tp.II.shift(1) + tp.III.shift(2);
    return tp;
}

template <class T>
BalancedSeries<T> forward_L(const CoefficientSet<T>& cs, int P) {
    return trace_parts(cs, P).Y;
}

// unknowns of level p: (g_p, gamma_p, a_{p+1}); rows L_{0,p}, L_{1,p+1}, L_{2,p+2}
template <class T>
using Mat3 = std::array<std::array<T, 3>, 3>;

template <class T>
Mat3<T> level_matrix(int p, const T& a1, const T& g0) {
    Mat3<T> A;
    A[0] = {T(1), T(0), T(0)};
    A[1] = {T(p - 2) * a1, T(-4) * a1 * g0, T(-(p + 2)) * g0};
    A[2] = {T(p * p - 2 * p - 1) / 2 * a1 * a1, T(-2 * (2 * p + 1)) * a1 * a1 * g0, T(-(p + 1) * (p + 1)) * a1 * g0};
    return A;
}

template <class T>
T det3(const Mat3<T>& A) {
    return A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) - A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
           A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
}

template <class T>
std::array<T, 3> solve3(const Mat3<T>& A, const std::array<T, 3>& b) {
    T d = det3(A);
    if (d == 0) throw DegeneracyError("singular level matrix");
    std::array<T, 3> x;
    for (int c = 0; c < 3; ++c) {
        Mat3<T> M = A;
        for (int r = 0; r < 3; ++r) M[r][c] = b[r];
        x[c] = det3(M) / d;
    }
    return x;
}

template <class T>
void set_level(CoefficientSet<T>& cs, int p, const std::array<T, 3>& v) {
    auto grow = [](std::vector<T>& x, int n) {
        if (static_cast<int>(x.size()) <= n) x.resize(n + 1, T(0));
    };
    grow(cs.g, p);
    grow(cs.gm, p);
    grow(cs.a, p + 1);
    cs.g[p] = v[0];
    cs.gm[p] = v[1];
    cs.a[p + 1] = v[2];
}

template <class T>
std::array<T, 3> level_rows(const BalancedSeries<T>& L, int p) {
    return {L.coef(0, p), L.coef(1, p + 1), L.coef(2, p + 2)};
}

// exact Jacobian of the level-p rows with respect to (g_p, gamma_p, a_{p+1}), by affinity
template <class T>
Mat3<T> level_jacobian(CoefficientSet<T> cs, int p, int P) {
    set_level(cs, p, {T(0), T(0), T(0)});
    auto base = level_rows(forward_L(cs, P), p);
    Mat3<T> J;
    for (int c = 0; c < 3; ++c) {
        std::array<T, 3> e{T(0), T(0), T(0)};
        e[c] = 1;
        set_level(cs, p, e);
        auto w = level_rows(forward_L(cs, P), p);
        for (int r = 0; r < 3; ++r) J[r][c] = w[r] - base[r];
    }
    return J;
}

// Jacobian of the first trace term alone, scaled by its g dependence
template <class T>
Mat3<T> level_jacobian_first_term(CoefficientSet<T> cs, int p, int P) {
    auto rows = [&](const CoefficientSet<T>& c) {
        auto I = trace_parts(c, P).I;
        return std::array<T, 3>{I.coef(0, p), I.coef(1, p + 1), I.coef(2, p + 2)};
    };
    set_level(cs, p, {T(0), T(0), T(0)});
    auto base = rows(cs);
    Mat3<T> J;
    for (int c = 0; c < 3; ++c) {
        std::array<T, 3> e{T(0), T(0), T(0)};
        e[c] = 1;
        set_level(cs, p, e);
        auto w = rows(cs);
        for (int r = 0; r < 3; ++r) J[r][c] = w[r] - base[r];
    }
    return J;
}

// Level-by-level inversion with the fixed 3x3 level matrix.
template <class T>
CoefficientSet<T> invert_L(const BalancedSeries<T>& L, const T& lambda, int P, const T& tol = T(0)) {
    int Pm = P - 2;
    CoefficientSet<T> cs = CoefficientSet<T>::zeros(P);
    cs.lambda = lambda;
    T g0 = L.coef(0, 0);
    if (g0 == 0) throw DegeneracyError("g0 vanishes");
    T a1 = -L.coef(1, 1) / (2 * g0);
    if (abs(a1) <= tol) throw DegeneracyError("first Birkhoff invariant vanishes: condition (*) fails");
    cs.g[0] = g0;
    cs.a[1] = a1;
    for (int p = 1; p <= Pm; ++p) {
        set_level(cs, p, {T(0), T(0), T(0)});
        auto C = level_rows(forward_L(cs, P), p);
        auto W = level_rows(L, p);
        std::array<T, 3> rhs{W[0] - C[0], W[1] - C[1], W[2] - C[2]};
        set_level(cs, p, solve3(level_matrix(p, a1, g0), rhs));
    }
    cs.g.resize(Pm + 1);
    cs.gm.resize(Pm + 1);
    cs.a.resize(Pm + 2);
    return cs;
}

} // namespace ob
