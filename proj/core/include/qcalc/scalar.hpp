// Scalar types for the two numeric modes: exact rationals (GMP) and
// arbitrary-precision binary floats (MPFR), both through boost::multiprecision.
#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <string>

namespace qcalc {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;
using BigFloat = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                               boost::multiprecision::et_off>;

// boost::multiprecision manages mpfr precision in decimal digits; round up so
// the allocated mantissa never falls below the requested bit count.
inline unsigned digits10_for_bits(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 2;
}

// Scoped default precision for newly constructed BigFloat values.
class PrecisionGuard {
  public:
    explicit PrecisionGuard(unsigned bits)
        : saved_(BigFloat::default_precision()) {
        BigFloat::default_precision(digits10_for_bits(bits));
    }
    ~PrecisionGuard() { BigFloat::default_precision(saved_); }
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;

  private:
    unsigned saved_;
};

// base^e for integer e, exact. e may be negative; base must be nonzero then.
inline Rational rational_pow(const Rational& base, long e) {
    if (e == 0) return Rational(1);
    const auto mag = static_cast<unsigned long>(e < 0 ? -e : e);
    BigInt num = boost::multiprecision::pow(boost::multiprecision::numerator(base), mag);
    BigInt den = boost::multiprecision::pow(boost::multiprecision::denominator(base), mag);
    return e > 0 ? Rational(num, den) : Rational(den, num);
}

template <class R>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
    static constexpr bool is_exact = true;
    static Rational from_rational(const Rational& x) { return x; }
    static Rational pow_int(const Rational& base, long e) { return rational_pow(base, e); }
    // One rounding error per arithmetic op at the stated precision; zero when exact.
    static Rational rounding_ulp(unsigned /*precision_bits*/) { return Rational(0); }
    static std::string str(const Rational& x, unsigned /*digits*/) { return x.str(); }
};

template <>
struct ScalarTraits<BigFloat> {
    static constexpr bool is_exact = false;
    static BigFloat from_rational(const Rational& x) { return BigFloat(x); }
    static BigFloat pow_int(const BigFloat& base, long e) {
        return boost::multiprecision::pow(base, static_cast<int>(e));
    }
    static BigFloat rounding_ulp(unsigned precision_bits) {
        return boost::multiprecision::ldexp(BigFloat(1), 1 - static_cast<long>(precision_bits));
    }
    static std::string str(const BigFloat& x, unsigned digits) {
        return x.str(digits, std::ios_base::scientific);
    }
};

template <class R>
R from_rational(const Rational& x) {
    return ScalarTraits<R>::from_rational(x);
}

template <class R>
constexpr bool scalar_is_exact_v = ScalarTraits<R>::is_exact;

// Pads x up to at least `bits` of working precision (value-preserving).
// Mixed-precision arithmetic in boost::multiprecision can otherwise round a
// result down to the narrowest operand, silently invalidating error budgets.
template <class R>
R at_least_precision(const R& x, unsigned bits) {
    if constexpr (scalar_is_exact_v<R>) {
        return x;
    } else {
        const unsigned digits = digits10_for_bits(bits);
        if (x.precision() >= digits) return x;
        R y = x;
        y.precision(digits);
        return y;
    }
}

}  // namespace qcalc
