// The explicit moment-killing perturbation for heavy-tailed q-densities:
// h~(q^{-j}) = (-1)^j q^{j(j+1)/2} / ((q;q)_j f(q^{-j})) for j >= 0, zero on
// (0,1). Normalized by its lattice sup it perturbs f into a one-parameter
// family sharing every q-moment. Orthogonality is verified along two
// independent routes: the alternating series with certified truncation, and
// the structural zero of phi at q^{-(k+1)}.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qcalc/context.hpp"
#include "qcalc/errors.hpp"
#include "qcalc/qdensity.hpp"
#include "qcalc/qmoments.hpp"

namespace qcalc::stieltjes {

using boost::multiprecision::abs;
using qdensity::QDensityHandle;

template <class R>
struct SupNormResult {
    R value;                            // certified upper bound for sup_j |h~(q^{-j})|
    std::optional<long> attained_index; // lattice index n = -j* of the maximum, if attained
    TailCertificate<R> cert;            // value - sup <= cert.bound
};

template <class R>
struct OrthogonalityCheck {
    Certified<R> residual;      // series value with truncation + rounding certificate
    R peak;                     // largest term magnitude in the sum
    bool product_oracle_zero;   // phi(q^{-(k+1)}) detected as a structural zero
    bool agreement;             // |residual| <= certificate
};

template <class R>
struct Perturbation {
    QParam q;
    LatticeFunction<R> base;    // h values; window [-J, 0], h = 0 for n >= 1
    SupNormResult<R> sup;       // certificate for sup |h| = 1 after scaling
    R scale;                    // the M that divided h~
    unsigned orthogonality_certified_up_to = 0;
    std::vector<OrthogonalityCheck<R>> residuals;  // index k = 0..K
};

template <class R>
struct StieltjesMember {
    Rational epsilon;
    QDensityHandle<R> handle;
};

namespace detail {

// |h~_{j+1}| / |h~_j| for the q-exponential family: (q^{j+1} + c)/(1 - q^{j+1})
// with c = lambda(1-q), strictly decreasing in j with limit c.
template <class R>
R family_ratio(const R& qpow_j1, const R& c) {
    return (qpow_j1 + c) / (R(1) - qpow_j1);
}

// Certified lower bound for (q;q)_inf = prod_{s>=1}(1-q^s), via a partial
// product times the Weierstrass bound 1 - sum of the remaining q^s.
template <class R>
R pochhammer_inf_lower(const QParam& q, const NumericContext& ctx) {
    const R qr = from_rational<R>(q.value());
    const R tol = ctx.tolerance_as<R>();
    R p(1);
    R qpow = qr;
    long s = 1;
    while (qpow / (R(1) - qr) > tol && s < 100000) {
        p *= R(1) - qpow;
        qpow *= qr;
        ++s;
    }
    R rest = R(1) - qpow / (R(1) - qr);
    if (rest < 0) rest = R(0);
    return p * rest;
}

}  // namespace detail

// The unnormalized perturbation on the window [-J, 0]. For the q-exponential
// family the values use the cancellation-free form
//   h~(q^{-j}) = (-1)^j prod_{s=1}^{j}(q^s + lambda(1-q)) / ((q;q)_j f(1)),
// which is what the factorized density values cancel against exactly.
template <class R>
LatticeFunction<R> build_h_tilde(const QDensityHandle<R>& f, const LatticeWindow& window,
                                 const NumericContext& ctx) {
    check_mode<R>(ctx);
    ModeGuard<R> guard(ctx);
    const QParam& q = f.q();
    const long J = -window.n_lo;
    if (J < 0) throw InvalidParameter("perturbation window must reach lattice index 0");

    std::vector<R> values(static_cast<std::size_t>(J) + 1);
    const R qr = from_rational<R>(q.value());
    if (f.family()) {
        const R c = from_rational<R>(f.family()->lambda * q.one_minus_q());
        const R f1 = at_least_precision(f.family()->f_at_one.value, ctx.precision_bits);
        if (f1 <= 0) throw ZeroDensityValue("density vanishes at t = 1");
        R v = R(1) / f1;  // h~_0
        R qpow = qr;      // q^{j+1}
        values[static_cast<std::size_t>(J)] = v;
        for (long j = 1; j <= J; ++j) {
            v = -v * (qpow + c) / (R(1) - qpow);
            qpow *= qr;
            values[static_cast<std::size_t>(J - j)] = v;
        }
    } else {
        R num(1);  // q^{j(j+1)/2}
        R poch(1); // (q;q)_j
        R qpow = qr;
        for (long j = 0; j <= J; ++j) {
            const R fj = at_least_precision(f.value_at(-j), ctx.precision_bits);
            if (fj <= 0) {
                throw ZeroDensityValue("density vanishes at lattice index " + std::to_string(-j));
            }
            R v = num / (poch * fj);
            values[static_cast<std::size_t>(J - j)] = (j % 2 == 0) ? v : -v;
            num *= qpow;
            poch *= R(1) - qpow;
            qpow *= qr;
        }
    }

    LatticeFunctionData<R> data;
    data.window = LatticeWindow{-J, 0};
    data.values = std::move(values);
    data.upper_tail_bound = R(0);  // h~ vanishes on (0,1)
    if (f.family()) {
        // Same recurrence as the stored walk, so the extension is
        // bit-identical where they overlap.
        const Rational lambda = f.family()->lambda;
        const R f1 = at_least_precision(f.family()->f_at_one.value, ctx.precision_bits);
        const QParam q_copy = q;
        const NumericContext ctx_copy = ctx;
        data.closed_form = [lambda, f1, q_copy, ctx_copy](long n) -> R {
            if (n >= 1) return R(0);
            ModeGuard<R> inner_guard(ctx_copy);
            const R qr = from_rational<R>(q_copy.value());
            const R c = from_rational<R>(lambda * q_copy.one_minus_q());
            R v = R(1) / f1;
            R qpow = qr;
            for (long j = 1; j <= -n; ++j) {
                v = -v * (qpow + c) / (R(1) - qpow);
                qpow *= qr;
            }
            return v;
        };
    } else {
        data.closed_form = [](long n) -> R {
            if (n >= 1) return R(0);
            throw InsufficientSupport("perturbation value below the stored window");
        };
    }
    return LatticeFunction<R>(std::move(data));
}

// sup_j |h~(q^{-j})| with a certificate that the unscanned tail cannot exceed
// it. Family densities use the exact ratio recurrence; custom densities need
// a decay descriptor. UnboundedPerturbation is raised only on proof that
// |h~| grows without bound.
template <class R>
SupNormResult<R> sup_norm(const LatticeFunction<R>& h_tilde, const QDensityHandle<R>& f,
                          const NumericContext& ctx) {
    check_mode<R>(ctx);
    ModeGuard<R> guard(ctx);
    const QParam& q = f.q();
    const long J = -h_tilde.window().n_lo;

    bool all_zero = true;
    for (long j = 0; j <= J; ++j) {
        if (h_tilde.at(-j) != 0) {
            all_zero = false;
            break;
        }
    }
    if (all_zero) {
        throw DegeneratePerturbation("perturbation is identically zero on the lattice");
    }

    if (f.family()) {
        const Rational c_rat = f.family()->lambda * q.one_minus_q();
        if (c_rat > 1) {
            throw UnboundedPerturbation(
                "|h~| grows without bound: per-step ratio stays above lambda(1-q) = " +
                c_rat.str() + " > 1");
        }
        const R c = from_rational<R>(c_rat);
        const R qr = from_rational<R>(q.value());
        const R one_minus_q = from_rational<R>(q.one_minus_q());
        const R tol = ctx.tolerance_as<R>();
        // Walk |h~_j| by the exact recurrence until either the ratio drops
        // below 1 (maximum attained) or, at the boundary c = 1, the remaining
        // growth factor is certifiably below 1 + tol.
        R v = abs(at_least_precision(h_tilde.at(0), ctx.precision_bits));
        R best = v;
        long best_j = 0;
        R qpow = qr;  // q^{j+1}
        for (long j = 0; j < 4000000; ++j) {
            const R ratio = detail::family_ratio(qpow, c);
            if (ratio < 1) {
                TailCertificate<R> cert;
                cert.truncation_index = j;
                cert.bound = R(0);
                cert.method = "monotone-ratio-descent";
                return SupNormResult<R>{best, -best_j, cert};
            }
            // (q^s + c)/(1 - q^s) <= 1 + 3 q^s for c <= 1, q^s <= 1/3, so the
            // growth left beyond index j is at most 1 + 6 q^{j+1}/(1-q).
            const R tail_sum = qpow / one_minus_q;
            if (R(3) * qpow <= R(1) && R(6) * tail_sum <= tol) {
                const R bound = R(6) * tail_sum * v;
                TailCertificate<R> cert;
                cert.truncation_index = j;
                cert.bound = bound;
                cert.method = "certified-supremum-limit";
                return SupNormResult<R>{v * (R(1) + R(6) * tail_sum), std::nullopt, cert};
            }
            v = v * (qpow + c) / (R(1) - qpow);
            qpow *= qr;
            if (v > best) {
                best = v;
                best_j = j + 1;
            }
        }
        throw Error("InternalError", "sup-norm scan failed to terminate");
    }

    // Custom density: scan the stored window, then control the tail through
    // the declared envelopes.
    R best(0);
    long best_j = 0;
    for (long j = 0; j <= J; ++j) {
        const R v = abs(at_least_precision(h_tilde.at(-j), ctx.precision_bits));
        if (v > best) {
            best = v;
            best_j = j;
        }
    }
    if (f.base().decay_lower() && f.base().decay_lower()->growth >= 1) {
        const auto& env = *f.base().decay_lower();
        if (!(env.scale > 0)) {
            throw InsufficientSupport("lower decay envelope has nonpositive scale");
        }
        // |h~_j| <= 1 / ((q;q)_inf * scale * growth^j) for j > J.
        const R poch_inf = detail::pochhammer_inf_lower(q, ctx);
        const R tail_cap =
            R(1) / (poch_inf * env.scale * ScalarTraits<R>::pow_int(env.growth, J + 1));
        if (tail_cap <= best) {
            TailCertificate<R> cert;
            cert.truncation_index = J;
            cert.bound = R(0);
            cert.method = "envelope-tail-dominated";
            return SupNormResult<R>{best, -best_j, cert};
        }
        TailCertificate<R> cert;
        cert.truncation_index = J;
        cert.bound = tail_cap - best;
        cert.method = "certified-supremum-envelope";
        return SupNormResult<R>{tail_cap, std::nullopt, cert};
    }
    if (f.base().decay_upper() && f.base().decay_upper()->growth < 1) {
        // |h~_j| >= 1/(scale * growth^j) -> infinity.
        throw UnboundedPerturbation(
            "|h~| grows without bound: the density decays faster than q^{j(j+1)/2}");
    }
    throw InsufficientSupport("no decay descriptor controls the perturbation tail");
}

namespace detail {

// The alternating series (1-q) sum_j (-1)^j q^{j(j+1)/2}/(q;q)_j q^{-j(k+1)},
// divided by `scale`. Exactly zero analytically; the partial sum measures the
// implementation's cancellation fidelity.
template <class R>
OrthogonalityCheck<R> orthogonality_series(const QParam& q, unsigned k, const R& scale,
                                           const NumericContext& ctx) {
    ModeGuard<R> guard(ctx);
    const R qr = from_rational<R>(q.value());
    const R shift = q.pow_as<R>(-(static_cast<long>(k) + 1));
    R a(1);
    R qpow = qr;  // q^{j+1}
    bool first = true;
    auto terms = [&]() {
        if (first) {
            first = false;
            return a;
        }
        a = -a * qpow * shift / (R(1) - qpow);
        qpow *= qr;
        return a;
    };
    auto ratio_bound = [&](long j) {
        return q.pow_as<R>(j - static_cast<long>(k)) / (R(1) - q.pow_as<R>(j + 1));
    };
    // Peak magnitude is at least q^{-k(k+1)/2}; stop relative to that.
    const R peak_floor = q.pow_as<R>(-static_cast<long>(k) * (static_cast<long>(k) + 1) / 2);
    const R stop = ctx.tolerance_as<R>() * peak_floor / R(4);
    auto series = qcalc::detail::sum_dominated<R>(terms, ratio_bound, stop);

    const R one_minus_q = from_rational<R>(q.one_minus_q());
    const long n = series.last_index + 1;
    const R slop =
        qcalc::detail::rounding_slop(ctx.precision_bits, 4 * n * n, series.peak);
    OrthogonalityCheck<R> check;
    check.residual.value = one_minus_q * series.value / scale;
    check.residual.cert.truncation_index = series.last_index;
    check.residual.cert.bound = one_minus_q * (series.tail_bound + slop) / scale;
    check.residual.cert.method = "alternating-series-tail";
    check.peak = one_minus_q * series.peak / scale;
    return check;
}

}  // namespace detail

// Residual of the order-k orthogonality sum, its certificate, and the two
// oracle verdicts. Raises PrecisionInsufficient when the certificate cannot
// reach the relative-cancellation target tol * peak.
template <class R>
OrthogonalityCheck<R> verify_orthogonality(const QDensityHandle<R>& f, const R& scale, unsigned k,
                                           const NumericContext& ctx) {
    check_mode<R>(ctx);
    ModeGuard<R> guard(ctx);
    const QParam& q = f.q();
    OrthogonalityCheck<R> check = detail::orthogonality_series(q, k, scale, ctx);

    const Certified<R> oracle = numkernel::phi(q.pow_as<R>(-(static_cast<long>(k) + 1)), q, ctx);
    check.product_oracle_zero = oracle.value == 0 && oracle.cert.bound == 0;

    const R target = ctx.tolerance_as<R>() * check.peak;
    if (check.residual.cert.bound > target) {
        throw PrecisionInsufficient(
            "orthogonality certificate exceeds the cancellation target at order " +
            std::to_string(k) + "; provision required_precision(k, q) bits");
    }
    check.agreement = abs(check.residual.value) <= check.residual.cert.bound &&
                      check.product_oracle_zero;
    return check;
}

template <class R>
OrthogonalityCheck<R> verify_orthogonality(const QDensityHandle<R>& f, const Perturbation<R>& h,
                                           unsigned k, const NumericContext& ctx) {
    return verify_orthogonality(f, h.scale, k, ctx);
}

// h = h~ / M with orthogonality certified for k = 0..K.
template <class R>
Perturbation<R> make_perturbation(const QDensityHandle<R>& f, const LatticeWindow& window,
                                  unsigned K, const NumericContext& ctx) {
    check_mode<R>(ctx);
    const QParam& q = f.q();
    if constexpr (!scalar_is_exact_v<R>) {
        const unsigned needed = required_precision(K, q);
        if (ctx.precision_bits < needed) {
            throw PrecisionInsufficient("orthogonality up to order " + std::to_string(K) +
                                        " needs " + std::to_string(needed) +
                                        " bits, context has " +
                                        std::to_string(ctx.precision_bits));
        }
    }
    ModeGuard<R> guard(ctx);
    LatticeFunction<R> h_tilde = build_h_tilde(f, window, ctx);
    SupNormResult<R> sup = sup_norm(h_tilde, f, ctx);

    R scale = sup.value;
    if constexpr (!scalar_is_exact_v<R>) {
        // Keep |h| < 1 strictly despite rounding in the division below.
        scale *= R(1) + boost::multiprecision::ldexp(
                            BigFloat(1), 8 - static_cast<long>(ctx.precision_bits));
    }

    LatticeFunctionData<R> data = h_tilde.data();
    for (R& v : data.values) v /= scale;
    if (data.closed_form) {
        auto inner = data.closed_form;
        const R m = scale;
        data.closed_form = [inner, m](long n) { return inner(n) / m; };
    }

    Perturbation<R> p{q, LatticeFunction<R>(std::move(data)), sup, scale, K, {}};
    p.residuals.reserve(K + 1);
    for (unsigned k = 0; k <= K; ++k) {
        p.residuals.push_back(verify_orthogonality(f, scale, k, ctx));
    }
    return p;
}

// Members g_eps with lattice values f(q^n)(1 + eps h(q^n)), each certified
// nonnegative and q-normalized.
template <class R>
std::vector<StieltjesMember<R>> stieltjes_class(const QDensityHandle<R>& f,
                                                const Perturbation<R>& h,
                                                const std::vector<Rational>& eps_grid,
                                                const NumericContext& ctx) {
    check_mode<R>(ctx);
    ModeGuard<R> guard(ctx);
    const QParam& q = f.q();
    for (const Rational& eps : eps_grid) {
        if (eps < -1 || eps > 1) {
            throw EpsilonOutOfRange("epsilon = " + eps.str() + " outside [-1, 1]");
        }
    }
    const LatticeWindow& fw = f.base().window();
    const LatticeWindow& hw = h.base.window();
    LatticeWindow w{std::max(fw.n_lo, hw.n_lo), fw.n_hi};

    std::vector<StieltjesMember<R>> members;
    members.reserve(eps_grid.size());
    for (const Rational& eps_rat : eps_grid) {
        const R eps = from_rational<R>(eps_rat);
        LatticeFunctionData<R> data;
        data.window = w;
        data.values.reserve(static_cast<std::size_t>(w.size()));
        for (long n = w.n_lo; n <= w.n_hi; ++n) {
            const R hv = n >= 1 ? R(0) : at_least_precision(h.base.at(n), ctx.precision_bits);
            const R fv = at_least_precision(f.value_at(n), ctx.precision_bits);
            R v = fv * (R(1) + eps * hv);
            if (v < 0) {
                // |h| <= 1 is certified; a negative here can only be the last
                // rounding of an exact zero.
                if constexpr (!scalar_is_exact_v<R>) {
                    const R ulp_scale = fv * boost::multiprecision::ldexp(
                                                 BigFloat(1),
                                                 16 - static_cast<long>(ctx.precision_bits));
                    if (-v <= ulp_scale) v = R(0);
                }
            }
            data.values.push_back(std::move(v));
        }
        // |1 + eps h| <= 2, so f's tail descriptors double.
        if (f.base().upper_tail_bound()) {
            data.upper_tail_bound = *f.base().upper_tail_bound() * R(2);
        }
        if (f.base().lower_tail_bound()) {
            data.lower_tail_bound = *f.base().lower_tail_bound() * R(2);
        }
        if (f.base().decay_upper()) {
            data.decay_upper = *f.base().decay_upper();
            data.decay_upper->scale *= R(2);
        }
        QDensityHandle<R> handle = qdensity::make_custom(std::move(data), q, ctx);
        members.push_back(StieltjesMember<R>{eps_rat, std::move(handle)});
    }
    return members;
}

}  // namespace qcalc::stieltjes
