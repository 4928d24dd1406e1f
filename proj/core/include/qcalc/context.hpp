#pragma once

#include <optional>
#include <string>
#include <utility>

#include "qcalc/errors.hpp"
#include "qcalc/scalar.hpp"

namespace qcalc {

enum class NumericMode { big_float, exact_rational };

// Parses "p/r" rationals and decimal/scientific literals ("0.5", "1e-30",
// "1.999") into exact rationals. rational_syntax records which form was used;
// the CLI needs it because exact mode must be declared with "p/r" syntax.
struct ParsedNumber {
    Rational value;
    bool rational_syntax = false;
};
ParsedNumber parse_number(const std::string& text);

// The base q of the calculus, held exactly. Both numeric modes share one
// representation; big-float mode rounds on conversion, never on storage.
class QParam {
  public:
    explicit QParam(Rational q);
    static QParam parse(const std::string& text) { return QParam(parse_number(text).value); }

    const Rational& value() const noexcept { return q_; }
    double log_inv_q() const noexcept { return log_inv_q_; }
    double log2_inv_q() const noexcept { return log2_inv_q_; }

    // q^n for any integer n, exact.
    Rational pow(long n) const { return rational_pow(q_, n); }
    template <class R>
    R pow_as(long n) const {
        return from_rational<R>(pow(n));
    }
    Rational one_minus_q() const { return Rational(1) - q_; }

  private:
    Rational q_;
    double log_inv_q_;
    double log2_inv_q_;
};

struct NumericContext {
    NumericMode mode = NumericMode::big_float;
    unsigned precision_bits = 256;  // big-float mode only
    Rational target_tolerance = default_tolerance();

    static Rational default_tolerance();  // 10^-30

    static NumericContext big_float(unsigned precision_bits,
                                    const Rational& tolerance = default_tolerance());
    static NumericContext exact(const Rational& tolerance = default_tolerance());

    template <class R>
    R tolerance_as() const {
        return from_rational<R>(target_tolerance);
    }
    void validate() const;
};

// Raises InvalidParameter when the scalar type disagrees with ctx.mode.
template <class R>
void check_mode(const NumericContext& ctx) {
    ctx.validate();
    const bool exact = scalar_is_exact_v<R>;
    if (exact != (ctx.mode == NumericMode::exact_rational)) {
        throw InvalidParameter("numeric context mode does not match the scalar type in use");
    }
}

// Installs the context's working precision for BigFloat computations;
// a no-op in exact mode.
template <class R>
struct ModeGuard {
    explicit ModeGuard(const NumericContext&) {}
};
template <>
struct ModeGuard<BigFloat> {
    explicit ModeGuard(const NumericContext& ctx) : guard(ctx.precision_bits) {}
    PrecisionGuard guard;
};

// A proven upper bound on the absolute value of everything omitted by a
// truncation, together with the index where truncation happened and a label
// for the bounding argument used.
template <class R>
struct TailCertificate {
    long truncation_index = 0;
    R bound = R(0);
    std::string method = "exact";

    static TailCertificate zero_width(long index = 0) {
        return TailCertificate{index, R(0), "exact"};
    }
};

template <class R>
struct Certified {
    R value = R(0);
    TailCertificate<R> cert;
};

// Working precision, in bits, that makes the order-K orthogonality sums safe:
// the alternating series cancels down from terms of magnitude about
// q^{-(K+1)^2/2}, so provision ceil((K+1)^2/2 * log2(1/q)) bits plus 96 guard
// bits. Centralized so callers cannot under-provision silently.
unsigned required_precision(unsigned max_order, const QParam& q);

}  // namespace qcalc
