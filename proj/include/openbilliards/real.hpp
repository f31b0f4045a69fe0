#pragma once

#include <boost/multiprecision/mpfr.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ob {

namespace bmp = boost::multiprecision;

using Real = bmp::number<bmp::mpfr_float_backend<0>, bmp::et_off>;
using Rational = bmp::mpq_rational;

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct EscapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TangencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline unsigned bits_to_digits(unsigned bits) { return static_cast<unsigned>(bits * 0.30102999566398 + 1); }

namespace detail {
inline thread_local unsigned requested_bits = 0; // boost keeps digits; remember the bit count asked for
}

inline unsigned current_bits() {
    unsigned d = Real::default_precision();
    if (detail::requested_bits && bits_to_digits(detail::requested_bits) == d) return detail::requested_bits;
    return static_cast<unsigned>(d / 0.30102999566398);
}

inline void set_precision_bits(unsigned bits) {
    detail::requested_bits = bits;
    Real::default_precision(bits_to_digits(bits));
}

// scoped working precision
class PrecisionGuard {
  public:
    explicit PrecisionGuard(unsigned bits) : saved_(Real::default_precision()), saved_bits_(detail::requested_bits) {
        set_precision_bits(bits);
    }
    ~PrecisionGuard() {
        Real::default_precision(saved_);
        detail::requested_bits = saved_bits_;
    }
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;

  private:
    unsigned saved_, saved_bits_;
};

inline unsigned env_precision(unsigned fallback = 256) {
    if (const char* v = std::getenv("OPENBILLIARDS_PRECISION")) {
        int b = std::atoi(v);
        if (b >= 64) return static_cast<unsigned>(b);
    }
    return fallback;
}

inline Real pi() { return boost::math::constants::pi<Real>(); }

// 10^-k in working precision
inline Real tenpow(int k) { return pow(Real(10), k); }

inline Real eps_bits(int bits) { return ldexp(Real(1), -bits); }

inline std::string to_decimal(const Real& x, int digits = 0) {
    if (digits <= 0) digits = static_cast<int>(Real::default_precision());
    return x.str(digits, std::ios_base::scientific);
}

inline Real from_decimal(const std::string& s) { return Real(s); }

inline double dbl(const Real& x) { return x.convert_to<double>(); }

template <class T>
T sqr(const T& x) {
    return x * x;
}

} // namespace ob
