// q-moment computation m_q(k) = (1-q) sum_n f(q^n) q^{n(k+1)} and
// moment-table comparison. Convergence at order k is decided by the density's
// tail descriptor, never by watching partial sums.
#pragma once

#include <algorithm>
#include <vector>

#include "qcalc/context.hpp"
#include "qcalc/errors.hpp"
#include "qcalc/qdensity.hpp"

namespace qcalc::qmoments {

using boost::multiprecision::abs;
using qdensity::QDensityHandle;

namespace detail {

// Bound on sum_{n > n_hi} |f(q^n)| q^{n(k+1)}: the order-0 tail scaled by the
// largest q^{nk} in that region, attained at n = n_hi + 1.
template <class R>
R upper_region_tail(const LatticeFunction<R>& f, const QParam& q, unsigned k) {
    if (!f.upper_tail_bound()) {
        throw DivergentMoment("near-zero tail of the density is not certified");
    }
    return *f.upper_tail_bound() * q.pow_as<R>((f.window().n_hi + 1) * static_cast<long>(k));
}

// Bound on sum_{n < n_lo} |f(q^n)| q^{n(k+1)}. Requires the decay envelope
// for k >= 1; a plain order-0 bound cannot control the q^{-jk} growth.
template <class R>
R lower_region_tail(const LatticeFunction<R>& f, const QParam& q, unsigned k,
                    const NumericContext& ctx) {
    if (f.decay_upper()) {
        return envelope_moment_tail(*f.decay_upper(), q, -f.window().n_lo, k, ctx);
    }
    if (k == 0 && f.lower_tail_bound()) return *f.lower_tail_bound();
    throw DivergentMoment("no tail certificate at order " + std::to_string(k) +
                          "; the k-th q-moment may diverge");
}

}  // namespace detail

// The k-th q-moment with certified error. Requires working precision of at
// least required_precision(k, q) in big-float mode.
template <class R>
Certified<R> q_moment(const QDensityHandle<R>& f, unsigned k, const NumericContext& ctx) {
    check_mode<R>(ctx);
    if constexpr (!scalar_is_exact_v<R>) {
        const unsigned needed = required_precision(k, f.q());
        if (ctx.precision_bits < needed) {
            throw PrecisionInsufficient("order " + std::to_string(k) + " needs " +
                                        std::to_string(needed) + " bits, context has " +
                                        std::to_string(ctx.precision_bits));
        }
    }
    ModeGuard<R> guard(ctx);
    const QParam& q = f.q();
    const LatticeWindow& w = f.base().window();
    const R lower_tail = detail::lower_region_tail(f.base(), q, k, ctx);
    const R upper_tail = detail::upper_region_tail(f.base(), q, k);

    const R one_minus_q = from_rational<R>(q.one_minus_q());
    const R step = q.pow_as<R>(static_cast<long>(k) + 1);
    // Magnitudes peak near n = -k; accumulate each side small-to-large.
    const long mid = std::clamp(-static_cast<long>(k), w.n_lo, w.n_hi);
    R sum(0);
    R abs_sum(0);
    {
        R weight = q.pow_as<R>(w.n_hi * (static_cast<long>(k) + 1));
        for (long n = w.n_hi; n >= mid; --n) {
            const R term = at_least_precision(f.value_at(n), ctx.precision_bits) * weight;
            sum += term;
            abs_sum += abs(term);
            if (n > mid) weight /= step;
        }
    }
    if (mid > w.n_lo) {
        R weight = q.pow_as<R>(w.n_lo * (static_cast<long>(k) + 1));
        R low(0);
        R low_abs(0);
        for (long n = w.n_lo; n < mid; ++n) {
            const R term = at_least_precision(f.value_at(n), ctx.precision_bits) * weight;
            low += term;
            low_abs += abs(term);
            weight *= step;
        }
        sum += low;
        abs_sum += low_abs;
    }
    const R value = one_minus_q * sum;
    TailCertificate<R> cert;
    cert.truncation_index = w.n_lo;
    cert.bound = one_minus_q * (lower_tail + upper_tail) +
                 qcalc::detail::rounding_slop(ctx.precision_bits, 4 * w.size(), abs_sum);
    cert.method = "two-sided-moment-tail";
    return Certified<R>{value, cert};
}

template <class R>
struct MomentTable {
    Rational q;
    NumericContext ctx;
    std::vector<Certified<R>> entries;  // index k = 0 .. K

    unsigned max_order() const { return static_cast<unsigned>(entries.size()) - 1; }
};

// Orders 0..K under one precision provisioned for K.
template <class R>
MomentTable<R> moment_table(const QDensityHandle<R>& f, unsigned K, const NumericContext& ctx) {
    check_mode<R>(ctx);
    MomentTable<R> table{f.q().value(), ctx, {}};
    table.entries.reserve(K + 1);
    for (unsigned k = 0; k <= K; ++k) {
        table.entries.push_back(q_moment(f, k, ctx));
    }
    return table;
}

template <class R>
struct MatchReport {
    bool match = true;
    unsigned first_mismatch_order = 0;
    R max_deviation = R(0);
};

// Entry-wise |A_k - B_k| <= cert_A + cert_B.
template <class R>
MatchReport<R> tables_match(const MomentTable<R>& a, const MomentTable<R>& b) {
    if (a.entries.size() != b.entries.size()) {
        throw OrderMismatch("moment tables have different maximal orders");
    }
    if (a.q != b.q) {
        throw OrderMismatch("moment tables were computed for different q");
    }
    MatchReport<R> report;
    bool first = true;
    for (unsigned k = 0; k < a.entries.size(); ++k) {
        const R dev = abs(a.entries[k].value - b.entries[k].value);
        if (dev > report.max_deviation) report.max_deviation = dev;
        if (dev > a.entries[k].cert.bound + b.entries[k].cert.bound && first) {
            report.match = false;
            report.first_mismatch_order = k;
            first = false;
        }
    }
    return report;
}

}  // namespace qcalc::qmoments
