// Jackson q-integration over (0, x) and (0, inf) on lattice functions, and
// the q-derivative. Infinite integrals refuse to evaluate unless both tails
// carry certified bounds; silent truncation is the main hazard here.
#pragma once

#include <algorithm>

#include "qcalc/context.hpp"
#include "qcalc/errors.hpp"
#include "qcalc/lattice.hpp"

namespace qcalc::jackson {

using boost::multiprecision::abs;

namespace detail {

template <class R>
struct WeightedSum {
    R sum{0};
    R abs_sum{0};
    long terms = 0;
};

// Sum of f(q^n) q^n for n in [from, to], accumulated small-magnitude-first
// within each directional pass.
template <class R>
void add_weighted_range_descending(WeightedSum<R>& acc, const LatticeFunction<R>& f,
                                   const QParam& q, long from, long to, unsigned bits) {
    if (from > to) return;
    const R qr = from_rational<R>(q.value());
    R weight = q.pow_as<R>(to);
    for (long n = to; n >= from; --n) {
        const R term = at_least_precision(f.eval(n), bits) * weight;
        acc.sum += term;
        acc.abs_sum += abs(term);
        ++acc.terms;
        if (n > from) weight /= qr;
    }
}

template <class R>
void add_weighted_range_ascending(WeightedSum<R>& acc, const LatticeFunction<R>& f,
                                  const QParam& q, long from, long to, unsigned bits) {
    if (from > to) return;
    const R qr = from_rational<R>(q.value());
    R weight = q.pow_as<R>(from);
    for (long n = from; n <= to; ++n) {
        const R term = at_least_precision(f.eval(n), bits) * weight;
        acc.sum += term;
        acc.abs_sum += abs(term);
        ++acc.terms;
        weight *= qr;
    }
}

// Bound on sum_{n < n_lo} |f(q^n)| q^n, from the stored bound or the decay
// envelope. Throws DivergentTail when neither certifies it.
template <class R>
R lower_tail_bound_or_throw(const LatticeFunction<R>& f, const QParam& q,
                            const NumericContext& ctx) {
    if (f.lower_tail_bound()) return *f.lower_tail_bound();
    if (f.decay_upper()) {
        return envelope_moment_tail(*f.decay_upper(), q, -f.window().n_lo, 0, ctx);
    }
    throw DivergentTail("large-t tail of the q-integral is not certified");
}

template <class R>
R upper_tail_bound_or_throw(const LatticeFunction<R>& f) {
    if (f.upper_tail_bound()) return *f.upper_tail_bound();
    throw DivergentTail("near-zero tail of the q-integral is not certified");
}

}  // namespace detail

// integral_0^x f d_q t = x(1-q) sum_{j>=0} f(x q^j) q^j at the lattice point
// x = q^m, equivalently (1-q) sum_{n>=m} f(q^n) q^n.
template <class R>
Certified<R> q_integral_0_to_x(const LatticeFunction<R>& f, long x_index, const QParam& q,
                               const NumericContext& ctx) {
    check_mode<R>(ctx);
    ModeGuard<R> guard(ctx);
    const LatticeWindow& w = f.window();
    if (x_index < w.n_lo && !f.has_closed_form()) {
        throw InsufficientSupport("integration from below the window needs a closed form");
    }
    const R one_minus_q = from_rational<R>(q.one_minus_q());
    detail::WeightedSum<R> acc;
    detail::add_weighted_range_descending(acc, f, q, x_index, std::max(w.n_hi, x_index - 1),
                                          ctx.precision_bits);
    const R tail = detail::upper_tail_bound_or_throw(f);
    const R value = one_minus_q * acc.sum;
    TailCertificate<R> cert;
    cert.truncation_index = w.n_hi;
    cert.bound = one_minus_q * tail +
                 qcalc::detail::rounding_slop(ctx.precision_bits, 3 * acc.terms, acc.abs_sum);
    cert.method = "declared-upper-tail";
    return Certified<R>{value, cert};
}

// integral_0^inf f d_q t = (1-q) sum_{n in Z} f(q^n) q^n.
template <class R>
Certified<R> q_integral_0_to_inf(const LatticeFunction<R>& f, const QParam& q,
                                 const NumericContext& ctx) {
    check_mode<R>(ctx);
    ModeGuard<R> guard(ctx);
    const LatticeWindow& w = f.window();
    const R lower_tail = detail::lower_tail_bound_or_throw(f, q, ctx);
    const R upper_tail = detail::upper_tail_bound_or_throw(f);
    const R one_minus_q = from_rational<R>(q.one_minus_q());
    // Two passes meeting near the largest-magnitude region keep each pass
    // ordered small-to-large.
    const long mid = std::clamp(0L, w.n_lo, w.n_hi);
    detail::WeightedSum<R> acc;
    detail::add_weighted_range_descending(acc, f, q, mid, w.n_hi, ctx.precision_bits);
    detail::add_weighted_range_ascending(acc, f, q, w.n_lo, mid - 1, ctx.precision_bits);
    const R value = one_minus_q * acc.sum;
    TailCertificate<R> cert;
    cert.truncation_index = w.n_hi;
    cert.bound = one_minus_q * (lower_tail + upper_tail) +
                 qcalc::detail::rounding_slop(ctx.precision_bits, 3 * acc.terms, acc.abs_sum);
    cert.method = "two-sided-tail";
    return Certified<R>{value, cert};
}

// D_q F(x) = (F(x) - F(qx)) / ((1-q) x), x != 0.
template <class R, class F>
R q_derivative(F&& func, const R& x, const QParam& q) {
    if (x == 0) throw ZeroArgument("q-derivative is undefined at x = 0");
    const R qr = from_rational<R>(q.value());
    const R one_minus_q = from_rational<R>(q.one_minus_q());
    return (func(x) - func(qr * x)) / (one_minus_q * x);
}

}  // namespace qcalc::jackson
