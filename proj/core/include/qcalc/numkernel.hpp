// q-shifted factorials, the two q-exponentials, Euler's series, and the
// product phi(z) = prod_{s>=1}(1 - q^s z), all with certified truncation.
// Zeros and poles that sit exactly on the q-power grid are detected
// structurally (by index), never by comparing a computed product against 0.
#pragma once

#include <optional>

#include "qcalc/context.hpp"
#include "qcalc/errors.hpp"
#include "qcalc/scalar.hpp"
#include "qcalc/summation.hpp"

namespace qcalc::numkernel {

using boost::multiprecision::abs;

namespace detail {

inline double approx_log2(const Rational& u) {
    const BigInt num = boost::multiprecision::numerator(u);
    const BigInt den = boost::multiprecision::denominator(u);
    return static_cast<double>(boost::multiprecision::msb(num)) -
           static_cast<double>(boost::multiprecision::msb(den));
}

inline double approx_log2(const BigFloat& u) {
    return boost::multiprecision::log2(u).convert_to<double>();
}

}  // namespace detail

// If u = q^{-j} for an integer j >= min_index, returns j. Exact mode compares
// rationals; float mode accepts a relative distance below 2^{-precision/2}.
template <class R>
std::optional<long> inverse_power_index(const R& u, const QParam& q, long min_index,
                                        const NumericContext& ctx) {
    if (u <= 0) return std::nullopt;
    const double jstar = detail::approx_log2(u) / q.log2_inv_q();
    const long lo = static_cast<long>(std::floor(jstar)) - 2;
    const long hi = static_cast<long>(std::ceil(jstar)) + 2;
    for (long j = std::max(lo, min_index); j <= hi; ++j) {
        const R probe = u * q.pow_as<R>(j);
        if constexpr (scalar_is_exact_v<R>) {
            if (probe == 1) return j;
        } else {
            const R gap = boost::multiprecision::ldexp(
                BigFloat(1), -static_cast<long>(ctx.precision_bits / 2));
            if (abs(probe - R(1)) < gap) return j;
        }
    }
    return std::nullopt;
}

// (a;q)_j = prod_{s=0}^{j-1} (1 - a q^s). Finite, hence exact in exact mode.
template <class R>
R q_pochhammer(const R& a, const QParam& q, unsigned j) {
    const R qr = from_rational<R>(q.value());
    R result(1);
    R qpow(1);
    for (unsigned s = 0; s < j; ++s) {
        result *= R(1) - a * qpow;
        qpow *= qr;
    }
    return result;
}

// e_q(t) = prod_{j>=0} (1 - t(1-q) q^j)^{-1}. Poles at t = q^{-j}/(1-q).
template <class R>
Certified<R> e_q(const R& t, const QParam& q, const NumericContext& ctx) {
    check_mode<R>(ctx);
    ModeGuard<R> guard(ctx);
    const R one_minus_q = from_rational<R>(q.one_minus_q());
    const R u = at_least_precision(t, ctx.precision_bits) * one_minus_q;
    if (auto j = inverse_power_index(u, q, 0, ctx)) {
        throw PoleError("e_q pole: t = q^{-" + std::to_string(*j) + "}/(1-q)");
    }
    const R qr = from_rational<R>(q.value());
    const R abs_u = abs(u);
    R qpow(1);
    auto factors = [&]() {
        R x = -u * qpow;
        qpow *= qr;
        return x;
    };
    auto tail_sum = [&](long j) { return abs_u * q.pow_as<R>(j) / one_minus_q; };
    const R stop = ctx.tolerance_as<R>() / R(4);
    auto prod = qcalc::detail::product_dominated<R>(factors, tail_sum, /*reciprocal=*/true, stop);
    TailCertificate<R> cert;
    cert.truncation_index = prod.factors_used;
    cert.bound = prod.tail_multiplier_bound * abs(prod.value) +
                 qcalc::detail::rounding_slop(ctx.precision_bits, 3 * prod.factors_used,
                                              abs(prod.value));
    cert.method = "geometric-product-tail";
    return Certified<R>{prod.value, cert};
}

// E_q(t) = prod_{j>=0} (1 + t(1-q) q^j). Entire; vanishes exactly when
// t(1-q) = -q^{-j}, which is detected structurally and returned as exact 0.
template <class R>
Certified<R> E_q(const R& t, const QParam& q, const NumericContext& ctx) {
    check_mode<R>(ctx);
    ModeGuard<R> guard(ctx);
    const R one_minus_q = from_rational<R>(q.one_minus_q());
    const R u = at_least_precision(t, ctx.precision_bits) * one_minus_q;
    if (auto j = inverse_power_index(R(-u), q, 0, ctx)) {
        TailCertificate<R> cert = TailCertificate<R>::zero_width(*j);
        cert.method = "structural-zero";
        return Certified<R>{R(0), cert};
    }
    const R qr = from_rational<R>(q.value());
    const R abs_u = abs(u);
    R qpow(1);
    auto factors = [&]() {
        R x = u * qpow;
        qpow *= qr;
        return x;
    };
    auto tail_sum = [&](long j) { return abs_u * q.pow_as<R>(j) / one_minus_q; };
    const R stop = ctx.tolerance_as<R>() / R(4);
    auto prod = qcalc::detail::product_dominated<R>(factors, tail_sum, /*reciprocal=*/false, stop);
    TailCertificate<R> cert;
    cert.truncation_index = prod.factors_used;
    cert.bound = prod.tail_multiplier_bound * abs(prod.value) +
                 qcalc::detail::rounding_slop(ctx.precision_bits, 3 * prod.factors_used,
                                              abs(prod.value));
    cert.method = "geometric-product-tail";
    return Certified<R>{prod.value, cert};
}

// Euler's series sum_{j>=0} q^{j(j-1)/2} t^j / (q;q)_j, which equals
// prod_{j>=0} (1 + q^j t). Terms satisfy a_{j+1} = a_j q^j t / (1 - q^{j+1}).
template <class R>
Certified<R> euler_series(const R& t, const QParam& q, const NumericContext& ctx) {
    check_mode<R>(ctx);
    ModeGuard<R> guard(ctx);
    const R qr = from_rational<R>(q.value());
    const R t_w = at_least_precision(t, ctx.precision_bits);
    const R abs_t = abs(t_w);
    R a(1);
    R qj(1);  // q^j for the term last produced
    bool first = true;
    auto terms = [&]() {
        if (first) {
            first = false;
            return a;
        }
        const R qj1 = qj * qr;
        a = a * qj * t_w / (R(1) - qj1);
        qj = qj1;
        return a;
    };
    auto ratio_bound = [&](long j) {
        return q.pow_as<R>(j) * abs_t / (R(1) - q.pow_as<R>(j + 1));
    };
    const R stop = ctx.tolerance_as<R>() / R(4);
    auto series = qcalc::detail::sum_dominated<R>(terms, ratio_bound, stop);
    TailCertificate<R> cert;
    cert.truncation_index = series.last_index;
    const R magnitude = std::max(series.peak, abs(series.value));
    const long n = series.last_index + 1;
    cert.bound = series.tail_bound +
                 qcalc::detail::rounding_slop(ctx.precision_bits, 4 * n * n, magnitude);
    cert.method = "geometric-series-tail";
    return Certified<R>{series.value, cert};
}

// phi(z) = prod_{s>=1} (1 - q^s z). Returns exact 0 (zero-width certificate)
// at the structural zeros z = q^{-m}, m >= 1.
template <class R>
Certified<R> phi(const R& z, const QParam& q, const NumericContext& ctx) {
    check_mode<R>(ctx);
    ModeGuard<R> guard(ctx);
    const R z_w = at_least_precision(z, ctx.precision_bits);
    if (auto m = inverse_power_index(z_w, q, 1, ctx)) {
        TailCertificate<R> cert = TailCertificate<R>::zero_width(*m);
        cert.method = "structural-zero";
        return Certified<R>{R(0), cert};
    }
    const R qr = from_rational<R>(q.value());
    const R one_minus_q = from_rational<R>(q.one_minus_q());
    const R abs_z = abs(z_w);
    R qpow = qr;  // q^s starting at s = 1
    auto factors = [&]() {
        R x = -z_w * qpow;
        qpow *= qr;
        return x;
    };
    auto tail_sum = [&](long s) { return abs_z * q.pow_as<R>(s) / one_minus_q; };
    const R stop = ctx.tolerance_as<R>() / R(4);
    auto prod = qcalc::detail::product_dominated<R>(factors, tail_sum, /*reciprocal=*/false, stop,
                                                    /*first_index=*/1);
    TailCertificate<R> cert;
    cert.truncation_index = prod.factors_used;
    cert.bound = prod.tail_multiplier_bound * abs(prod.value) +
                 qcalc::detail::rounding_slop(ctx.precision_bits, 3 * prod.factors_used,
                                              abs(prod.value));
    cert.method = "geometric-product-tail";
    return Certified<R>{prod.value, cert};
}

}  // namespace qcalc::numkernel
