// Functions known through their values on the lattice {q^n : n in Z}, over a
// finite index window plus certified tail descriptors. Index n denotes the
// point t = q^n: large positive n sits near 0, large negative n at large t.
#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "qcalc/context.hpp"
#include "qcalc/errors.hpp"
#include "qcalc/scalar.hpp"
#include "qcalc/summation.hpp"

namespace qcalc {

struct LatticeWindow {
    long n_lo = 0;
    long n_hi = 0;
    long size() const { return n_hi - n_lo + 1; }
    bool contains(long n) const { return n >= n_lo && n <= n_hi; }
};

// Large-t decay descriptor: bounds f at the points q^{-j} by
// scale * q^{j(j+1)/2} * growth^j for all j >= from_index. Used as an upper
// bound on |f| (tail and moment certification) or as a lower bound on f
// (perturbation boundedness).
template <class R>
struct TailEnvelope {
    R scale = R(0);
    R growth = R(1);
    long from_index = 0;
};

template <class R>
struct LatticeFunctionData {
    LatticeWindow window;
    std::vector<R> values;
    std::optional<R> upper_tail_bound;  // bound on sum_{n > n_hi} |f(q^n)| q^n
    std::optional<R> lower_tail_bound;  // bound on sum_{n < n_lo} |f(q^n)| q^n
    std::function<R(long)> closed_form; // evaluator by lattice index, optional
    std::optional<TailEnvelope<R>> decay_upper;  // |f(q^{-j})| <= envelope
    std::optional<TailEnvelope<R>> decay_lower;  // f(q^{-j}) >= envelope
};

template <class R>
class LatticeFunction {
  public:
    explicit LatticeFunction(LatticeFunctionData<R> data) : d_(std::move(data)) {
        if (d_.window.n_lo > d_.window.n_hi) {
            throw InvalidParameter("lattice window has n_lo > n_hi");
        }
        if (static_cast<long>(d_.values.size()) != d_.window.size()) {
            throw InvalidParameter("lattice value count does not match the window");
        }
        for (const R& v : d_.values) {
            if (!is_finite(v)) throw InvalidParameter("non-finite lattice value");
        }
    }

    const LatticeWindow& window() const { return d_.window; }
    bool has_closed_form() const { return static_cast<bool>(d_.closed_form); }

    const R& at(long n) const {
        if (!d_.window.contains(n)) {
            throw InsufficientSupport("lattice index " + std::to_string(n) +
                                      " outside window [" + std::to_string(d_.window.n_lo) +
                                      ", " + std::to_string(d_.window.n_hi) + "]");
        }
        return d_.values[static_cast<std::size_t>(n - d_.window.n_lo)];
    }

    // Stored value inside the window, closed form outside it.
    R eval(long n) const {
        if (d_.window.contains(n)) return at(n);
        if (d_.closed_form) return d_.closed_form(n);
        throw InsufficientSupport("no closed form to evaluate lattice index " +
                                  std::to_string(n));
    }

    const std::optional<R>& upper_tail_bound() const { return d_.upper_tail_bound; }
    const std::optional<R>& lower_tail_bound() const { return d_.lower_tail_bound; }
    const std::optional<TailEnvelope<R>>& decay_upper() const { return d_.decay_upper; }
    const std::optional<TailEnvelope<R>>& decay_lower() const { return d_.decay_lower; }

    // Checks that stored values agree with the closed form at every window
    // index: bit-exact in exact mode, within the context tolerance otherwise.
    void validate_against_closed_form(const NumericContext& ctx) const {
        if (!d_.closed_form) return;
        using boost::multiprecision::abs;
        const R tol = ctx.tolerance_as<R>();
        for (long n = d_.window.n_lo; n <= d_.window.n_hi; ++n) {
            const R stored = at(n);
            const R closed = d_.closed_form(n);
            if constexpr (scalar_is_exact_v<R>) {
                if (stored != closed) {
                    throw InvalidParameter("stored value differs from closed form at index " +
                                           std::to_string(n));
                }
            } else {
                const R scale = std::max(R(1), abs(stored));
                if (abs(stored - closed) > tol * scale) {
                    throw InvalidParameter("stored value differs from closed form at index " +
                                           std::to_string(n));
                }
            }
        }
    }

    LatticeFunction with_values(std::vector<R> values) const {
        LatticeFunctionData<R> d = d_;
        d.values = std::move(values);
        return LatticeFunction(std::move(d));
    }

    LatticeFunctionData<R> data() const { return d_; }

  private:
    static bool is_finite(const R& v) {
        if constexpr (scalar_is_exact_v<R>) {
            return true;
        } else {
            return boost::multiprecision::isfinite(v);
        }
    }

    LatticeFunctionData<R> d_;
};

// Certified upper bound on sum_{j > J} envelope(j) * q^{-j(k+1)}, the
// large-t contribution to the order-k q-moment sum beyond window edge J.
// Terms decay with ratio growth * q^{j-k}; the sum always converges.
template <class R>
R envelope_moment_tail(const TailEnvelope<R>& env, const QParam& q, long J, unsigned k,
                       const NumericContext& ctx) {
    if (J + 1 < env.from_index) {
        throw InsufficientSupport("window does not reach the envelope's validity range");
    }
    using boost::multiprecision::abs;
    const R qr = from_rational<R>(q.value());
    const long j0 = J + 1;
    // T_j = scale * q^{j(j+1)/2} * growth^j * q^{-j(k+1)}; T_{j+1}/T_j = growth*q^{j+1-(k+1)}.
    R term = env.scale * q.pow_as<R>(j0 * (j0 + 1) / 2) *
             ScalarTraits<R>::pow_int(env.growth, j0) * q.pow_as<R>(-j0 * (static_cast<long>(k) + 1));
    long j = j0;
    bool first = true;
    auto gen = [&]() {
        if (first) {
            first = false;
            return term;
        }
        term *= env.growth * q.pow_as<R>(j + 1 - (static_cast<long>(k) + 1));
        ++j;
        return term;
    };
    auto ratio_bound = [&](long i) {
        // i counts terms from 0 at j0
        return env.growth * q.pow_as<R>(j0 + i - static_cast<long>(k));
    };
    const R stop = ctx.tolerance_as<R>() / R(8);
    auto sum = qcalc::detail::sum_dominated<R>(gen, ratio_bound, stop);
    return sum.value + sum.tail_bound;
}

}  // namespace qcalc
