#pragma once

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <vector>

#include "real.hpp"

namespace ob {

// Truncated univariate Taylor series c_0 + c_1 t + ... + c_N t^N.
template <class T>
struct Taylor {
    std::vector<T> c;

    Taylor() = default;
    explicit Taylor(int order, const T& c0 = T(0)) : c(order + 1, T(0)) { c[0] = c0; }

    int order() const { return static_cast<int>(c.size()) - 1; }
    T& operator[](int i) { return c[i]; }
    const T& operator[](int i) const { return c[i]; }

    static Taylor variable(int order, const T& x0) {
        Taylor r(order, x0);
        if (order >= 1) r.c[1] = T(1);
        return r;
    }

    Taylor& operator+=(const Taylor& o) {
        for (int i = 0; i <= order(); ++i) c[i] += o.c[i];
        return *this;
    }
    Taylor& operator-=(const Taylor& o) {
        for (int i = 0; i <= order(); ++i) c[i] -= o.c[i];
        return *this;
    }
    Taylor& operator*=(const T& s) {
        for (auto& v : c) v *= s;
        return *this;
    }
    friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
    friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
    friend Taylor operator*(Taylor a, const T& s) { return a *= s; }
    friend Taylor operator*(const T& s, Taylor a) { return a *= s; }
    friend Taylor operator-(Taylor a) {
        for (auto& v : a.c) v = -v;
        return a;
    }
    friend Taylor operator*(const Taylor& a, const Taylor& b) {
        int N = a.order();
        Taylor r(N);
        for (int i = 0; i <= N; ++i) {
            if (a.c[i] == 0) continue;
            for (int j = 0; i + j <= N; ++j) r.c[i + j] += a.c[i] * b.c[j];
        }
        return r;
    }
    friend Taylor operator/(const Taylor& a, const Taylor& b) {
        int N = a.order();
        Taylor r(N);
        for (int k = 0; k <= N; ++k) {
            T s = a.c[k];
            for (int j = 1; j <= k; ++j) s -= b.c[j] * r.c[k - j];
            r.c[k] = s / b.c[0];
        }
        return r;
    }

    T eval(const T& x) const {
        T s = 0;
        for (int i = order(); i >= 0; --i) s = s * x + c[i];
        return s;
    }
    Taylor derivative() const {
        Taylor r(order());
        for (int i = 1; i <= order(); ++i) r.c[i - 1] = c[i] * i;
        return r;
    }
    // antiderivative vanishing at 0, order kept
    Taylor integral() const {
        Taylor r(order());
        for (int i = order(); i >= 1; --i) r.c[i] = c[i - 1] / i;
        r.c[0] = T(0);
        return r;
    }
};

template <class T>
Taylor<T> tsqrt(const Taylor<T>& a) {
    using std::sqrt;
    int N = a.order();
    Taylor<T> r(N);
    r.c[0] = sqrt(a.c[0]);
    for (int k = 1; k <= N; ++k) {
        T s = a.c[k];
        for (int j = 1; j < k; ++j) s -= r.c[j] * r.c[k - j];
        r.c[k] = s / (2 * r.c[0]);
    }
    return r;
}

// f(g(t)) where g(0) == 0
template <class T>
Taylor<T> compose(const Taylor<T>& f, const Taylor<T>& g) {
    int N = g.order();
    Taylor<T> r(N), p(N, T(1));
    for (int k = 0; k <= std::min(N, f.order()); ++k) {
        for (int i = 0; i <= N; ++i) r.c[i] += f.c[k] * p.c[i];
        p = p * g;
    }
    return r;
}

// inverse series of g with g(0)=0, g'(0)!=0
template <class T>
Taylor<T> revert(const Taylor<T>& g) {
    int N = g.order();
    Taylor<T> r(N);
    if (N >= 1) r.c[1] = T(1) / g.c[1];
    for (int k = 2; k <= N; ++k) {
        auto comp = compose(g, r);
        r.c[k] = -comp.c[k] / g.c[1];
    }
    return r;
}

// Coefficients of cos(x0+t), sin(x0+t).
template <class T>
void cos_sin_series(const T& x0, int N, Taylor<T>& cs, Taylor<T>& sn) {
    using std::cos;
    using std::sin;
    cs = Taylor<T>(N);
    sn = Taylor<T>(N);
    T c0 = cos(x0), s0 = sin(x0);
    T fact = 1;
    for (int k = 0; k <= N; ++k) {
        if (k > 0) fact *= k;
        // d^k cos = cos(x + k pi/2)
        T dc, ds;
        switch (k % 4) {
        case 0: dc = c0; ds = s0; break;
        case 1: dc = -s0; ds = c0; break;
        case 2: dc = -c0; ds = -s0; break;
        default: dc = s0; ds = -c0; break;
        }
        cs.c[k] = dc / fact;
        sn.c[k] = ds / fact;
    }
}

// Truncated bivariate series in (u, w): total degree <= K.
template <class T>
struct Jet2 {
    int K = 0;
    std::vector<T> a; // index via idx(i,j), i+j<=K

    Jet2() = default;
    explicit Jet2(int order, const T& c0 = T(0)) : K(order), a((order + 1) * (order + 2) / 2, T(0)) { a[0] = c0; }

    static int idx(int i, int j) {
        int d = i + j;
        return d * (d + 1) / 2 + j;
    }
    T& operator()(int i, int j) { return a[idx(i, j)]; }
    const T& operator()(int i, int j) const { return a[idx(i, j)]; }
    T coef(int i, int j) const { return (i + j <= K && i >= 0 && j >= 0) ? a[idx(i, j)] : T(0); }

    static Jet2 var_u(int K, const T& x0 = T(0)) {
        Jet2 r(K, x0);
        if (K >= 1) r(1, 0) = T(1);
        return r;
    }
    static Jet2 var_w(int K, const T& x0 = T(0)) {
        Jet2 r(K, x0);
        if (K >= 1) r(0, 1) = T(1);
        return r;
    }

    Jet2& operator+=(const Jet2& o) {
        for (size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
        return *this;
    }
    Jet2& operator-=(const Jet2& o) {
        for (size_t i = 0; i < a.size(); ++i) a[i] -= o.a[i];
        return *this;
    }
    Jet2& operator*=(const T& s) {
        for (auto& v : a) v *= s;
        return *this;
    }
    Jet2& operator+=(const T& s) {
        a[0] += s;
        return *this;
    }
    friend Jet2 operator+(Jet2 x, const Jet2& y) { return x += y; }
    friend Jet2 operator-(Jet2 x, const Jet2& y) { return x -= y; }
    friend Jet2 operator*(Jet2 x, const T& s) { return x *= s; }
    friend Jet2 operator*(const T& s, Jet2 x) { return x *= s; }
    friend Jet2 operator+(Jet2 x, const T& s) { return x += s; }
    friend Jet2 operator-(Jet2 x) {
        for (auto& v : x.a) v = -v;
        return x;
    }
    friend Jet2 operator*(const Jet2& x, const Jet2& y) {
        int K = x.K;
        Jet2 r(K);
        for (int d1 = 0; d1 <= K; ++d1)
            for (int j1 = 0; j1 <= d1; ++j1) {
                const T& xv = x.a[idx(d1 - j1, j1)];
                if (xv == 0) continue;
                for (int d2 = 0; d1 + d2 <= K; ++d2)
                    for (int j2 = 0; j2 <= d2; ++j2) r.a[idx(d1 - j1 + d2 - j2, j1 + j2)] += xv * y.a[idx(d2 - j2, j2)];
            }
        return r;
    }
    // 1/x via Newton-free recursion on degrees
    Jet2 inv() const {
        // y = 1/x: y = (1/x0) * sum_k (-(x-x0)/x0)^k
        Jet2 d = *this;
        T x0 = a[0];
        d.a[0] = 0;
        d *= T(-1) / x0;
        Jet2 r(K, T(1)), p(K, T(1));
        for (int k = 1; k <= K; ++k) {
            p = p * d;
            r += p;
        }
        r *= T(1) / x0;
        return r;
    }
    friend Jet2 operator/(const Jet2& x, const Jet2& y) { return x * y.inv(); }

    // derivative in u (order drops, padded to K)
    Jet2 du() const {
        Jet2 r(K);
        for (int d = 1; d <= K; ++d)
            for (int j = 0; j < d; ++j) r(d - 1 - j, j) = a[idx(d - j, j)] * (d - j);
        return r;
    }
    Jet2 dw() const {
        Jet2 r(K);
        for (int d = 1; d <= K; ++d)
            for (int j = 1; j <= d; ++j) r(d - j, j - 1) = a[idx(d - j, j)] * j;
        return r;
    }
    Jet2 truncated(int newK) const {
        Jet2 r(newK);
        for (int d = 0; d <= std::min(K, newK); ++d)
            for (int j = 0; j <= d; ++j) r(d - j, j) = a[idx(d - j, j)];
        return r;
    }
    // terms of exact total degree d
    Jet2 homogeneous(int d) const {
        Jet2 r(K);
        for (int j = 0; j <= d; ++j) r(d - j, j) = a[idx(d - j, j)];
        return r;
    }
    T eval(const T& u, const T& w) const {
        T s = 0;
        for (int d = K; d >= 0; --d) {
            T hs = 0;
            for (int j = 0; j <= d; ++j) {
                T m = a[idx(d - j, j)];
                if (m == 0) continue;
                m *= pow(u, d - j) * pow(w, j);
                hs += m;
            }
            s += hs;
        }
        return s;
    }
};

template <class T>
Jet2<T> jsqrt(const Jet2<T>& x) {
    using std::sqrt;
    // sqrt(x0) * sqrt(1+e), e = (x-x0)/x0
    T x0 = x.a[0];
    Jet2<T> e = x;
    e.a[0] = 0;
    e *= T(1) / x0;
    Jet2<T> r(x.K, T(1)), p(x.K, T(1));
    T binom = 1;
    for (int k = 1; k <= x.K; ++k) {
        binom *= (T(1) / 2 - (k - 1));
        binom /= k;
        p = p * e;
        r += p * binom;
    }
    r *= sqrt(x0);
    return r;
}

// polynomial f evaluated on jets U, W including their constant terms (Horner in U)
template <class T>
Jet2<T> compose_full(const Jet2<T>& f, const Jet2<T>& U, const Jet2<T>& W) {
    int K = U.K, F = f.K;
    std::vector<Jet2<T>> Wp(F + 1, Jet2<T>(K));
    Wp[0] = Jet2<T>(K, T(1));
    for (int k = 1; k <= F; ++k) Wp[k] = Wp[k - 1] * W;
    Jet2<T> acc(K);
    for (int i = F; i >= 0; --i) {
        Jet2<T> inner(K);
        for (int j = 0; j + i <= F; ++j) {
            const T& c = f(i, j);
            if (c == 0) continue;
            for (size_t q = 0; q < inner.a.size(); ++q) inner.a[q] += c * Wp[j].a[q];
        }
        acc = i == F ? inner : acc * U + inner;
    }
    return acc;
}

// f(X, Y) with X, Y jets whose constant terms are zero (displacements)
template <class T>
Jet2<T> compose(const Jet2<T>& f, const Jet2<T>& X, const Jet2<T>& Y) {
    Jet2<T> X0 = X, Y0 = Y;
    X0.a[0] = 0;
    Y0.a[0] = 0;
    return compose_full(f, X0, Y0);
}

// univariate g composed with a bivariate jet: g(x0 + X)
template <class T>
Jet2<T> compose(const Taylor<T>& g, const Jet2<T>& X) {
    int K = X.K;
    Jet2<T> X0 = X;
    X0.a[0] = 0;
    Jet2<T> r(K), p(K, T(1));
    for (int k = 0; k <= std::min(K, g.order()); ++k) {
        r += p * g.c[k];
        p = p * X0;
    }
    return r;
}

} // namespace ob
