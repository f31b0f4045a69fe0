#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "real.hpp"

namespace ob {

using Word = std::string; // ASCII digits, one symbol per scatterer label

inline void check_labels(const Word& w, int m = 9) {
    if (w.empty()) throw DomainError("empty word");
    for (char c : w)
        if (c < '1' || c > '0' + m) throw DomainError("invalid symbol in word " + w);
}

inline bool is_admissible(const Word& w, int m = 9) {
    check_labels(w, m);
    if (w.size() < 2) return false;
    for (size_t k = 0; k < w.size(); ++k)
        if (w[k] == w[(k + 1) % w.size()]) return false;
    return true;
}

inline Word transpose(const Word& w) { return Word(w.rbegin(), w.rend()); }

inline Word rotate(const Word& w, size_t k) {
    k %= w.size();
    return w.substr(k) + w.substr(0, k);
}

// lexicographically least rotation
inline Word canonical(const Word& w) {
    Word best = w;
    for (size_t k = 1; k < w.size(); ++k) best = std::min(best, rotate(w, k));
    return best;
}

struct Palindrome {
    Word rotated;    // sigma_1 .. sigma_q .. sigma_1 sigma_0
    size_t shift;    // rotation applied to the input
    size_t pos_q;    // index of sigma_q in the input (perpendicular bounce)
    size_t pos_zero; // index of sigma_0 in the input (perpendicular bounce)
};

// cyclic rotation reading x_1..x_{q-1} x_q x_{q-1}..x_1 x_0
inline std::optional<Palindrome> is_palindromic(const Word& w) {
    size_t p = w.size();
    if (p < 2 || p % 2) return std::nullopt;
    size_t q = p / 2;
    for (size_t k = 0; k < p; ++k) {
        Word r = rotate(w, k);
        bool ok = true;
        for (size_t j = 0; j + 1 < q && ok; ++j) ok = r[j] == r[2 * q - 2 - j];
        if (!ok) continue;
        return Palindrome{r, k, (k + q - 1) % p, (k + p - 1) % p};
    }
    return std::nullopt;
}

// h_n = tau sigma^n with sigma = (s1 s0), tau = (t1 s0)
inline Word homoclinic_family(const Word& sigma, const Word& tau, int n) {
    if (sigma.size() != 2 || tau.size() != 2 || n < 1) throw DomainError("family needs two-letter words and n >= 1");
    if (tau[1] != sigma[1] || tau[0] == sigma[0] || tau[0] == sigma[1] || sigma[0] == sigma[1])
        throw DomainError("tau must share the second letter of sigma");
    Word w = tau;
    for (int k = 0; k < n; ++k) w += sigma;
    return w;
}

inline std::vector<Word> enumerate_admissible(int m, int p) {
    std::vector<Word> out;
    Word w(p, '1');
    std::vector<int> d(p, 0);
    while (true) {
        for (int k = 0; k < p; ++k) w[k] = static_cast<char>('1' + d[k]);
        if (is_admissible(w, m)) out.push_back(w);
        int k = p - 1;
        while (k >= 0 && ++d[k] == m) d[k--] = 0;
        if (k < 0) break;
    }
    return out;
}

} // namespace ob
