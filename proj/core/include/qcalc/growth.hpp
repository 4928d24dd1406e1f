// Numerical checks of the analytic-growth facts the moment classification
// leans on: the maximum modulus of phi on circles (closed product form, no
// circle sampling), the growth envelope of E_q along r = q^{-m}, and the
// lower bound forced on any Laurent function vanishing at every q^{-m}.
// Existential constants are reported as observed deviation ranges, never
// asserted against fixed values. Big-float mode only: every quantity here is
// a logarithm.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "qcalc/context.hpp"
#include "qcalc/errors.hpp"
#include "qcalc/numkernel.hpp"

namespace qcalc::growth {

using boost::multiprecision::abs;
using boost::multiprecision::log;

struct GrowthReport {
    std::vector<long> m;                 // radii r = q^{-m}
    std::vector<BigFloat> log_max_modulus;
    std::vector<BigFloat> envelope;
    std::vector<BigFloat> deviation;     // log_max_modulus - envelope
    BigFloat min_deviation;
    BigFloat max_deviation;
    bool pass = false;
    std::string note;
};

namespace detail {

inline void require_float_mode(const NumericContext& ctx) {
    ctx.validate();
    if (ctx.mode != NumericMode::big_float) {
        throw InvalidParameter("growth checks work in big-float mode only");
    }
}

// sum_{j>=0} log(1 + u q^j), truncated once the geometric tail
// u q^N / (1-q) is below tolerance. Log-domain: immune to overflow for
// arbitrarily large u.
inline BigFloat log_product_one_plus(const BigFloat& u, const QParam& q,
                                     const NumericContext& ctx) {
    const BigFloat qr = from_rational<BigFloat>(q.value());
    const BigFloat one_minus_q = from_rational<BigFloat>(q.one_minus_q());
    const BigFloat tol = ctx.tolerance_as<BigFloat>();
    BigFloat sum(0);
    BigFloat upow = u;
    for (long j = 0; j < 1000000; ++j) {
        if (upow / one_minus_q <= tol) return sum;
        sum += log(BigFloat(1) + upow);
        upow *= qr;
    }
    throw Error("InternalError", "log-product failed to converge");
}

inline BigFloat spread(const std::vector<BigFloat>& v, std::size_t from, std::size_t to) {
    BigFloat lo = v[from], hi = v[from];
    for (std::size_t i = from + 1; i <= to; ++i) {
        if (v[i] < lo) lo = v[i];
        if (v[i] > hi) hi = v[i];
    }
    return hi - lo;
}

inline BigFloat inf_over(const std::vector<BigFloat>& v, std::size_t from, std::size_t to) {
    BigFloat lo = v[from];
    for (std::size_t i = from + 1; i <= to; ++i) {
        if (v[i] < lo) lo = v[i];
    }
    return lo;
}

}  // namespace detail

// M(r; phi) = prod_{s>=1} (1 + q^s r): the maximum of |phi| on |z| = r is
// attained at z = -r, where every factor peaks.
inline Certified<BigFloat> max_modulus_phi(const BigFloat& r, const QParam& q,
                                           const NumericContext& ctx) {
    detail::require_float_mode(ctx);
    if (!(r > 0)) throw InvalidParameter("radius must be positive");
    ModeGuard<BigFloat> guard(ctx);
    return numkernel::phi(BigFloat(-at_least_precision(r, ctx.precision_bits)), q, ctx);
}

// ln M(r; phi) by log-domain accumulation; usable far beyond any exponent
// range a direct product would need.
inline BigFloat log_max_modulus_phi(const BigFloat& r, const QParam& q,
                                    const NumericContext& ctx) {
    detail::require_float_mode(ctx);
    if (!(r > 0)) throw InvalidParameter("radius must be positive");
    ModeGuard<BigFloat> guard(ctx);
    const BigFloat qr = from_rational<BigFloat>(q.value());
    return detail::log_product_one_plus(qr * at_least_precision(r, ctx.precision_bits), q, ctx);
}

// Deviations of ln E_q(t/(1-q)) from ln^2 t/(2 ln(1/q)) + (ln t)/2 along
// t = q^{-m}. The two-sided growth estimate predicts bounded deviations, so
// the spread over the upper half of the range must not exceed the spread
// over the lower half.
inline GrowthReport zeng_envelope_check(const QParam& q, long m_lo, long m_hi,
                                        const NumericContext& ctx) {
    detail::require_float_mode(ctx);
    if (m_lo < 0 || m_lo >= m_hi) throw InvalidParameter("need 0 <= m_lo < m_hi");
    ModeGuard<BigFloat> guard(ctx);
    const BigFloat log_inv_q = log(BigFloat(1) / from_rational<BigFloat>(q.value()));
    GrowthReport report;
    for (long m = m_lo; m <= m_hi; ++m) {
        // E_q(t/(1-q)) = prod_{j>=0} (1 + t q^j) at t = q^{-m}.
        const BigFloat ln_value =
            detail::log_product_one_plus(q.pow_as<BigFloat>(-m), q, ctx);
        const BigFloat ln_t = BigFloat(m) * log_inv_q;
        const BigFloat env = ln_t * ln_t / (BigFloat(2) * log_inv_q) + ln_t / BigFloat(2);
        report.m.push_back(m);
        report.log_max_modulus.push_back(ln_value);
        report.envelope.push_back(env);
        report.deviation.push_back(ln_value - env);
    }
    report.min_deviation = detail::inf_over(report.deviation, 0, report.deviation.size() - 1);
    report.max_deviation = report.deviation[0];
    for (const auto& d : report.deviation) {
        if (d > report.max_deviation) report.max_deviation = d;
    }
    const std::size_t mid = report.deviation.size() / 2;
    const BigFloat lower_spread = detail::spread(report.deviation, 0, mid);
    const BigFloat upper_spread =
        detail::spread(report.deviation, mid, report.deviation.size() - 1);
    report.pass = upper_spread < lower_spread;
    report.note = "deviation spread upper half " + upper_spread.str(6, std::ios_base::scientific) +
                  " vs lower half " + lower_spread.str(6, std::ios_base::scientific);
    return report;
}

struct LaurentMaxModulus {
    BigFloat value;
    bool exact;  // true: the exact maximum (nonnegative coefficients);
                 // false: the triangle-inequality upper bound
};

// max_{|z|=r} |sum c_n z^n| for a finite coefficient window. Nonnegative
// coefficients peak on the positive axis, so the sum at z = r is exact;
// mixed signs fall back to sum |c_n| r^n, labeled as a bound.
inline LaurentMaxModulus laurent_max_modulus(const std::map<long, BigFloat>& coeffs,
                                             const BigFloat& r, const NumericContext& ctx) {
    detail::require_float_mode(ctx);
    if (!(r > 0)) throw InvalidParameter("radius must be positive");
    ModeGuard<BigFloat> guard(ctx);
    bool nonnegative = true;
    for (const auto& [n, c] : coeffs) {
        if (c < 0) {
            nonnegative = false;
            break;
        }
    }
    BigFloat sum(0);
    const BigFloat rw = at_least_precision(r, ctx.precision_bits);
    for (const auto& [n, c] : coeffs) {
        const BigFloat term = at_least_precision(c, ctx.precision_bits) *
                              boost::multiprecision::pow(rw, static_cast<int>(n));
        sum += nonnegative ? term : abs(term);
    }
    return LaurentMaxModulus{sum, nonnegative};
}

// phi vanishes at every q^{-m}, so along r = q^{-m} its log-maximum-modulus
// must stay above ln^2 r/(2 ln(1/q)) - (ln r)/2 up to a constant. The check
// reports the inferred constant: the deviations' inf must be finite and
// stabilized (last-quarter inf within 1.0 of last-half inf).
inline GrowthReport lemma2_lower_bound_check(const QParam& q, long m_lo, long m_hi,
                                             const NumericContext& ctx) {
    detail::require_float_mode(ctx);
    if (m_lo < 1 || m_lo >= m_hi) throw InvalidParameter("need 1 <= m_lo < m_hi");
    ModeGuard<BigFloat> guard(ctx);
    const BigFloat log_inv_q = log(BigFloat(1) / from_rational<BigFloat>(q.value()));
    GrowthReport report;
    for (long m = m_lo; m <= m_hi; ++m) {
        // M(r; phi) = prod_{s>=1}(1 + q^s r) at r = q^{-m}.
        const BigFloat ln_value = detail::log_product_one_plus(
            from_rational<BigFloat>(q.value()) * q.pow_as<BigFloat>(-m), q, ctx);
        const BigFloat ln_r = BigFloat(m) * log_inv_q;
        const BigFloat env = ln_r * ln_r / (BigFloat(2) * log_inv_q) - ln_r / BigFloat(2);
        report.m.push_back(m);
        report.log_max_modulus.push_back(ln_value);
        report.envelope.push_back(env);
        report.deviation.push_back(ln_value - env);
    }
    const std::size_t count = report.deviation.size();
    report.min_deviation = detail::inf_over(report.deviation, 0, count - 1);
    report.max_deviation = report.deviation[0];
    for (const auto& d : report.deviation) {
        if (d > report.max_deviation) report.max_deviation = d;
    }
    const BigFloat half_inf = detail::inf_over(report.deviation, count - count / 2, count - 1);
    const BigFloat quarter_inf = detail::inf_over(report.deviation, count - count / 4, count - 1);
    report.pass = report.min_deviation > BigFloat(-1000000) &&
                  abs(quarter_inf - half_inf) <= BigFloat(1);
    report.note = "inferred ln C = " + report.min_deviation.str(6, std::ios_base::scientific);
    return report;
}

}  // namespace qcalc::growth
