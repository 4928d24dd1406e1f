// Construction, validation and equivalence of q-densities, the q-exponential
// family, and CDF reconstruction from lattice values.
#pragma once

#include <cstdlib>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcalc/context.hpp"
#include "qcalc/errors.hpp"
#include "qcalc/jackson.hpp"
#include "qcalc/lattice.hpp"
#include "qcalc/numkernel.hpp"

namespace qcalc::qdensity {

using boost::multiprecision::abs;

template <class R>
struct QExponentialFamily {
    Rational lambda;
    Certified<R> f_at_one;  // lambda * e_q(-lambda)
};

template <class R>
class QDensityHandle {
  public:
    QDensityHandle(QParam q, LatticeFunction<R> base, bool nonneg_certified, bool norm_certified,
                   Certified<R> mass, std::optional<QExponentialFamily<R>> family = {})
        : q_(std::move(q)),
          base_(std::move(base)),
          nonneg_certified_(nonneg_certified),
          norm_certified_(norm_certified),
          mass_(std::move(mass)),
          family_(std::move(family)) {}

    const QParam& q() const { return q_; }
    const LatticeFunction<R>& base() const { return base_; }
    bool nonneg_certified() const { return nonneg_certified_; }
    bool norm_certified() const { return norm_certified_; }
    const Certified<R>& mass() const { return mass_; }
    const std::optional<QExponentialFamily<R>>& family() const { return family_; }

    // f(q^n): stored inside the window, closed form outside.
    R value_at(long n) const { return base_.eval(n); }

  private:
    QParam q_;
    LatticeFunction<R> base_;
    bool nonneg_certified_;
    bool norm_certified_;
    Certified<R> mass_;
    std::optional<QExponentialFamily<R>> family_;
};

namespace detail {

// Values of lambda e_q(-lambda t) on the lattice. Points at or above 1 use
// the overflow-free factorization f(q^{-j}) = f(1) q^{j(j+1)/2} A_j with
// A_j = prod_{s=1}^{j} (q^s + lambda(1-q))^{-1}; points below 1 evaluate the
// e_q product directly. Deterministic for fixed (lambda, q, ctx), so the
// closed form reproduces stored values bit-for-bit in exact mode.
template <class R>
struct QExpEvaluator {
    Rational lambda;
    QParam q;
    NumericContext ctx;
    R f_at_one;

    R operator()(long n) const {
        ModeGuard<R> guard(ctx);
        if (n >= 1) {
            const R lam = from_rational<R>(lambda);
            const R t = -lam * q.pow_as<R>(n);
            return lam * numkernel::e_q(t, q, ctx).value;
        }
        const R qr = from_rational<R>(q.value());
        const R c = from_rational<R>(lambda * q.one_minus_q());
        R v = f_at_one;
        R qpow = qr;  // q^{j+1} while stepping from j to j+1
        for (long j = 0; j < -n; ++j) {
            v = v * qpow / (qpow + c);
            qpow *= qr;
        }
        return v;
    }
};

// Smallest window edge n_hi >= 0 with lambda q^{n_hi+1}/(1-q) <= budget,
// so the near-zero tail of the density is certified below budget.
inline long upper_edge_for(const Rational& lambda, const QParam& q, const Rational& budget) {
    const Rational limit = budget * q.one_minus_q() / lambda;
    long n = 0;
    Rational qpow = q.pow(1);
    while (qpow > limit) {
        qpow *= q.value();
        ++n;
        if (n > 2000000) throw Error("InternalError", "upper window edge ran away");
    }
    return n;
}

}  // namespace detail

struct QExponentialOptions {
    unsigned max_moment_order = 20;           // windows are sized to support orders up to this
    std::optional<LatticeWindow> window = {}; // explicit override
};

// The q-exponential density f(t) = lambda e_q(-lambda t), certified
// nonnegative and q-normalized.
template <class R>
QDensityHandle<R> make_q_exponential(const Rational& lambda, const QParam& q,
                                     const NumericContext& ctx,
                                     const QExponentialOptions& options = {}) {
    check_mode<R>(ctx);
    if (!(lambda > 0)) throw InvalidParameter("q-exponential parameter lambda must be positive");
    ModeGuard<R> guard(ctx);

    const R lam = from_rational<R>(lambda);
    const Certified<R> eq_at_lambda = numkernel::e_q(R(-lam), q, ctx);
    Certified<R> f1{lam * eq_at_lambda.value, eq_at_lambda.cert};
    f1.cert.bound *= lam;

    // |f(q^{-j})| <= f(1) q^{j(j+1)/2} kappa^j with kappa = 1/(lambda(1-q)).
    const Rational c_rat = lambda * q.one_minus_q();
    TailEnvelope<R> decay_upper{f1.value, from_rational<R>(Rational(1) / c_rat), 0};

    // A_j >= prod 1/(1+q^s) when lambda(1-q) <= 1, else A_j >= (q+c)^{-j}.
    TailEnvelope<R> decay_lower;
    if (c_rat <= 1) {
        Certified<R> inv_one_plus =
            numkernel::e_q(from_rational<R>(-q.value() / q.one_minus_q()), q, ctx);
        R lower = inv_one_plus.value - inv_one_plus.cert.bound;  // prod_{s>=1} 1/(1+q^s)
        if (lower < 0) lower = R(0);
        decay_lower = TailEnvelope<R>{f1.value * lower, R(1), 0};
    } else {
        decay_lower =
            TailEnvelope<R>{f1.value, from_rational<R>(Rational(1) / (q.value() + c_rat)), 0};
    }

    LatticeWindow w;
    if (options.window) {
        w = *options.window;
    } else {
        const Rational budget = ctx.target_tolerance / 16;
        w.n_hi = detail::upper_edge_for(lambda, q, budget);
        long J = options.max_moment_order + 18;
        NumericContext probe = ctx;
        for (;; ++J) {
            const R tail = envelope_moment_tail(decay_upper, q, J, 0, probe);
            if (tail <= from_rational<R>(budget)) break;
            if (J > 1000000) throw Error("InternalError", "lower window edge ran away");
        }
        w.n_lo = -J;
    }

    detail::QExpEvaluator<R> eval{lambda, q, ctx, f1.value};
    std::vector<R> values(static_cast<std::size_t>(w.size()));
    {
        // Shared recurrence walk for n <= 0; direct products for n >= 1.
        const R qr = from_rational<R>(q.value());
        const R c = from_rational<R>(c_rat);
        R v = f1.value;
        R qpow = qr;
        if (w.n_lo <= 0 && w.n_hi >= 0) values[static_cast<std::size_t>(-w.n_lo)] = v;
        for (long n = -1; n >= w.n_lo; --n) {
            v = v * qpow / (qpow + c);
            qpow *= qr;
            if (n <= w.n_hi) values[static_cast<std::size_t>(n - w.n_lo)] = v;
        }
        for (long n = std::max(1L, w.n_lo); n <= w.n_hi; ++n) {
            values[static_cast<std::size_t>(n - w.n_lo)] = eval(n);
        }
    }

    LatticeFunctionData<R> data;
    data.window = w;
    data.values = std::move(values);
    data.upper_tail_bound = lam * q.pow_as<R>(w.n_hi + 1) / from_rational<R>(q.one_minus_q());
    data.lower_tail_bound = std::nullopt;  // certified through the decay envelope
    data.closed_form = eval;
    data.decay_upper = decay_upper;
    data.decay_lower = decay_lower;
    LatticeFunction<R> base(std::move(data));

    const Certified<R> mass = jackson::q_integral_0_to_inf(base, q, ctx);
    const R tol = ctx.tolerance_as<R>();
    const bool norm = abs(mass.value - R(1)) <= tol + mass.cert.bound;

    return QDensityHandle<R>(q, std::move(base), /*nonneg=*/true, norm, mass,
                             QExponentialFamily<R>{lambda, f1});
}

// Wraps user-supplied lattice values (plus declared tails/envelopes) as a
// density handle. Nonnegativity is certified by scanning; normalization is
// certified only when the q-integral lands within tolerance of 1.
template <class R>
QDensityHandle<R> make_custom(LatticeFunctionData<R> data, const QParam& q,
                              const NumericContext& ctx) {
    check_mode<R>(ctx);
    ModeGuard<R> guard(ctx);
    for (R& v : data.values) v = at_least_precision(v, ctx.precision_bits);
    for (std::size_t i = 0; i < data.values.size(); ++i) {
        if (data.values[i] < 0) {
            throw NegativeValue("negative density value at lattice index " +
                                std::to_string(data.window.n_lo + static_cast<long>(i)));
        }
    }
    LatticeFunction<R> base(std::move(data));
    base.validate_against_closed_form(ctx);
    const Certified<R> mass = jackson::q_integral_0_to_inf(base, q, ctx);
    const R tol = ctx.tolerance_as<R>();
    const bool norm = abs(mass.value - R(1)) <= tol + mass.cert.bound;
    return QDensityHandle<R>(q, std::move(base), /*nonneg=*/true, norm, mass);
}

// Divides by the computed mass. Raises NotNormalized when the mass is zero or
// not certifiably positive.
template <class R>
QDensityHandle<R> normalize(const QDensityHandle<R>& f, const NumericContext& ctx) {
    check_mode<R>(ctx);
    ModeGuard<R> guard(ctx);
    const R m = f.mass().value;
    if (!(m > f.mass().cert.bound)) {
        throw NotNormalized("density mass is zero or not certifiably positive");
    }
    LatticeFunctionData<R> data = f.base().data();
    for (R& v : data.values) v /= m;
    if (data.upper_tail_bound) *data.upper_tail_bound /= m;
    if (data.lower_tail_bound) *data.lower_tail_bound /= m;
    if (data.decay_upper) data.decay_upper->scale /= m;
    if (data.decay_lower) data.decay_lower->scale /= m;
    if (data.closed_form) {
        auto inner = data.closed_form;
        data.closed_form = [inner, m](long n) { return inner(n) / m; };
    }
    return make_custom(std::move(data), f.q(), ctx);
}

template <class R>
struct EquivalenceReport {
    bool equivalent = true;
    std::optional<long> witness_index;  // smallest |n| where values differ
    R deviation = R(0);
};

// f ~ g iff they agree at every lattice point of the window: bit-exact in
// exact mode, within tol * max(1, |f(q^n)|) in float mode.
template <class R>
EquivalenceReport<R> equivalent(const QDensityHandle<R>& f, const QDensityHandle<R>& g,
                                const LatticeWindow& w, const NumericContext& ctx) {
    check_mode<R>(ctx);
    if (f.q().value() != g.q().value()) {
        throw InvalidParameter("densities live on different lattices");
    }
    ModeGuard<R> guard(ctx);
    const R tol = ctx.tolerance_as<R>();
    const long dmax = std::max(std::labs(w.n_lo), std::labs(w.n_hi));
    for (long d = 0; d <= dmax; ++d) {
        for (int side = 0; side < (d == 0 ? 1 : 2); ++side) {
            const long n = side == 0 ? d : -d;
            if (!w.contains(n)) continue;
            const R fv = f.value_at(n);
            const R gv = g.value_at(n);
            bool same;
            if constexpr (scalar_is_exact_v<R>) {
                same = fv == gv;
            } else {
                same = abs(fv - gv) <= tol * std::max(R(1), abs(fv));
            }
            if (!same) {
                return EquivalenceReport<R>{false, n, fv - gv};
            }
        }
    }
    return EquivalenceReport<R>{true, std::nullopt, R(0)};
}

// Lattice CDF per F(q^n) = (1-q) sum_{l >= n} g(q^l) q^l, with one extra
// stored index past n_hi so the q-derivative round trip closes at the edge.
template <class R>
class CdfTable {
  public:
    CdfTable(QParam q, LatticeWindow density_window, std::vector<R> values, R total_mass,
             R mass_halfwidth)
        : q_(std::move(q)),
          window_(density_window),
          values_(std::move(values)),
          total_mass_(std::move(total_mass)),
          mass_halfwidth_(std::move(mass_halfwidth)) {}

    const LatticeWindow& window() const { return window_; }
    const R& total_mass() const { return total_mass_; }
    const R& mass_halfwidth() const { return mass_halfwidth_; }
    static constexpr const char* interpolation_rule() { return "monotone-linear"; }

    // Stored lattice value; n may run one past the window's n_hi.
    const R& value_at(long n) const {
        if (n < window_.n_lo || n > window_.n_hi + 1) {
            throw InsufficientSupport("CDF index " + std::to_string(n) + " outside table");
        }
        return values_[static_cast<std::size_t>(n - window_.n_lo)];
    }

    // D_q F at the lattice point q^n from stored values; reproduces the
    // source density exactly in exact mode.
    R q_derivative_at(long n) const {
        const R num = value_at(n) - value_at(n + 1);
        return num / (from_rational<R>(q_.one_minus_q()) * q_.pow_as<R>(n));
    }

    // Monotone piecewise-linear evaluator: 0 for x <= 0, linear on each
    // lattice gap, constant right of the window.
    R operator()(const R& x) const {
        if (x <= 0) return R(0);
        const R p_lo = q_.pow_as<R>(window_.n_lo);
        if (x >= p_lo) return value_at(window_.n_lo);
        const R p_min = q_.pow_as<R>(window_.n_hi + 1);
        if (x <= p_min) return x / p_min * value_at(window_.n_hi + 1);
        // Locate n with q^{n+1} < x < q^n.
        long n = static_cast<long>(std::floor(-numkernel::detail::approx_log2(x) /
                                              q_.log2_inv_q()));
        n = std::clamp(n, window_.n_lo, window_.n_hi);
        while (n > window_.n_lo && x > q_.pow_as<R>(n)) --n;
        while (n < window_.n_hi && x <= q_.pow_as<R>(n + 1)) ++n;
        const R hi = q_.pow_as<R>(n);
        const R lo = q_.pow_as<R>(n + 1);
        const R f_hi = value_at(n);
        const R f_lo = value_at(n + 1);
        return f_lo + (x - lo) / (hi - lo) * (f_hi - f_lo);
    }

  private:
    QParam q_;
    LatticeWindow window_;
    std::vector<R> values_;  // indices window_.n_lo .. window_.n_hi + 1
    R total_mass_;
    R mass_halfwidth_;
};

template <class R>
CdfTable<R> build_cdf(const QDensityHandle<R>& g, const LatticeWindow& w,
                      const NumericContext& ctx) {
    check_mode<R>(ctx);
    if (!g.norm_certified()) {
        throw NotNormalized("CDF construction requires a normalized density");
    }
    ModeGuard<R> guard(ctx);
    const QParam& q = g.q();
    const R one_minus_q = from_rational<R>(q.one_minus_q());

    if (!g.base().upper_tail_bound()) {
        throw DivergentTail("near-zero tail of the density is not certified");
    }
    // Mass sitting below the table: summable stored values past w.n_hi plus
    // half of the declared tail bound (its uncertainty is the half-width).
    R beyond(0);
    const long g_hi = g.base().window().n_hi;
    {
        const R qr = from_rational<R>(q.value());
        R weight = q.pow_as<R>(g_hi);
        for (long n = g_hi; n > w.n_hi; --n) {
            beyond += at_least_precision(g.value_at(n), ctx.precision_bits) * weight;
            weight /= qr;
        }
    }
    const R tail_halfwidth = one_minus_q * (*g.base().upper_tail_bound()) / R(2);
    R running = one_minus_q * beyond + tail_halfwidth;  // estimate of F(q^{w.n_hi+1})

    std::vector<R> values(static_cast<std::size_t>(w.size() + 1));
    values[static_cast<std::size_t>(w.n_hi + 1 - w.n_lo)] = running;
    const R qr = from_rational<R>(q.value());
    R weight = q.pow_as<R>(w.n_hi);
    for (long n = w.n_hi; n >= w.n_lo; --n) {
        running += one_minus_q * at_least_precision(g.value_at(n), ctx.precision_bits) * weight;
        values[static_cast<std::size_t>(n - w.n_lo)] = running;
        if (n > w.n_lo) weight /= qr;
    }
    return CdfTable<R>(q, w, std::move(values), g.mass().value,
                       tail_halfwidth + g.mass().cert.bound);
}

}  // namespace qcalc::qdensity
