#include <doctest.h>

#include <qcalc/jackson.hpp>
#include <qcalc/qdensity.hpp>

#include "oracles.hpp"

using namespace qcalc;
using boost::multiprecision::abs;

namespace {
const QParam q_half{Rational(1, 2)};

NumericContext float_ctx(unsigned bits = 320) {
    return NumericContext::big_float(bits, rational_pow(Rational(10), -32));
}

// Constant function on a window, tails certified for c >= 0 by the geometric
// series sum_{n>n_hi} c q^n = c q^{n_hi+1}/(1-q); no large-t tail (declared
// zero beyond the window only if c == 0, otherwise the caller must not ask
// for the infinite integral).
template <class R>
LatticeFunction<R> constant_on(long n_lo, long n_hi, const R& c, const QParam& q) {
    LatticeFunctionData<R> d;
    d.window = LatticeWindow{n_lo, n_hi};
    d.values.assign(static_cast<std::size_t>(n_hi - n_lo + 1), c);
    d.upper_tail_bound = c * q.pow_as<R>(n_hi + 1) / from_rational<R>(q.one_minus_q());
    d.closed_form = [c](long) { return c; };
    return LatticeFunction<R>(LatticeFunctionData<R>(d));
}
}  // namespace

TEST_CASE("q-integral over (0,1) of simple integrands") {
    SUBCASE("constant 1 integrates to 1 (geometric sum)") {
        auto f = constant_on<Rational>(0, 200, Rational(1), q_half);
        const auto r = jackson::q_integral_0_to_x(f, 0, q_half, NumericContext::exact());
        CHECK(abs(r.value - 1) <= r.cert.bound);
    }
    SUBCASE("identity function integrates to 1/(1+q) = 2/3") {
        LatticeFunctionData<Rational> d;
        d.window = LatticeWindow{0, 220};
        d.values.clear();
        for (long n = 0; n <= 220; ++n) d.values.push_back(q_half.pow(n));
        // sum_{n>220} q^n q^n = q^{442}/(1-q^2)
        d.upper_tail_bound = q_half.pow(442) / (Rational(1) - q_half.pow(2));
        LatticeFunction<Rational> f{std::move(d)};
        const auto r = jackson::q_integral_0_to_x(f, 0, q_half, NumericContext::exact());
        CHECK(abs(r.value - Rational(2, 3)) <= r.cert.bound);
    }
    SUBCASE("q-exponential density against the 500-term brute sum") {
        const auto ctx = float_ctx();
        auto f = qdensity::make_q_exponential<BigFloat>(Rational(2), q_half, ctx);
        const auto r = jackson::q_integral_0_to_x(f.base(), 0, q_half, ctx);
        PrecisionGuard guard(640);
        const BigFloat expect("7.902887791024462011450219461485128738830233828e-01");
        CHECK(abs(r.value - expect) <= BigFloat("1e-29"));
    }
    SUBCASE("integrating from below the window requires a closed form") {
        LatticeFunctionData<Rational> d;
        d.window = LatticeWindow{0, 10};
        d.values.assign(11, Rational(1));
        d.upper_tail_bound = Rational(1, 1024);
        LatticeFunction<Rational> f{std::move(d)};
        CHECK_THROWS_AS(
            (void)jackson::q_integral_0_to_x(f, -3, q_half, NumericContext::exact()),
            InsufficientSupport);
    }
}

TEST_CASE("q-integral over (0,inf)") {
    SUBCASE("normalized q-exponential integrates to 1") {
        const auto ctx = float_ctx();
        auto f = qdensity::make_q_exponential<BigFloat>(Rational(2), q_half, ctx);
        const auto r = jackson::q_integral_0_to_inf(f.base(), q_half, ctx);
        CHECK(abs(r.value - 1) <= BigFloat("1e-25"));
    }
    SUBCASE("zero function integrates to 0") {
        LatticeFunctionData<Rational> d;
        d.window = LatticeWindow{-5, 5};
        d.values.assign(11, Rational(0));
        d.upper_tail_bound = Rational(0);
        d.lower_tail_bound = Rational(0);
        LatticeFunction<Rational> f{std::move(d)};
        const auto r = jackson::q_integral_0_to_inf(f, q_half, NumericContext::exact());
        CHECK(r.value == 0);
        CHECK(r.cert.bound == 0);
    }
    SUBCASE("theta-like values f(q^n) = q^{n^2} against the two-sided oracle") {
        const auto ctx = float_ctx(640);
        PrecisionGuard guard(640);
        LatticeFunctionData<BigFloat> d;
        d.window = LatticeWindow{-60, 60};
        d.values.clear();
        for (long n = -60; n <= 60; ++n) d.values.push_back(q_half.pow_as<BigFloat>(n * n));
        // |f(q^{-j})| = q^{j^2} <= q^{j(j+1)/2} q^{j(j-1)/2}: envelope with growth q, valid j>=3
        d.decay_upper = TailEnvelope<BigFloat>{BigFloat(1), q_half.pow_as<BigFloat>(1), 3};
        d.upper_tail_bound = q_half.pow_as<BigFloat>(61 * 61 + 61) /
                             from_rational<BigFloat>(q_half.one_minus_q());
        LatticeFunction<BigFloat> f{std::move(d)};
        const auto r = jackson::q_integral_0_to_inf(f, q_half, ctx);
        // brute two-sided sum over n in [-200, 200]
        BigFloat brute(0);
        for (long n = 200; n >= -200; --n) {
            brute += q_half.pow_as<BigFloat>(n * n) * q_half.pow_as<BigFloat>(n);
        }
        brute *= from_rational<BigFloat>(q_half.one_minus_q());
        CHECK(abs(r.value - brute) <= BigFloat("1e-30") * brute);
    }
    SUBCASE("missing large-t certificate refuses to evaluate") {
        LatticeFunctionData<Rational> d;
        d.window = LatticeWindow{-5, 5};
        d.values.assign(11, Rational(1));
        d.upper_tail_bound = Rational(1);
        LatticeFunction<Rational> f{std::move(d)};
        CHECK_THROWS_AS((void)jackson::q_integral_0_to_inf(f, q_half, NumericContext::exact()),
                        DivergentTail);
    }
}

TEST_CASE("q-derivative") {
    SUBCASE("monomial: D_q x^2 = (1+q) x") {
        const auto sq = [](const Rational& x) { return x * x; };
        const Rational d = jackson::q_derivative(sq, Rational(1), q_half);
        CHECK(d == Rational(3, 2));
    }
    SUBCASE("constants differentiate to zero") {
        const auto c = [](const Rational&) { return Rational(7); };
        CHECK(jackson::q_derivative(c, Rational(5, 3), q_half) == 0);
        CHECK(jackson::q_derivative(c, Rational(-2), q_half) == 0);
    }
    SUBCASE("x = 0 is rejected") {
        const auto c = [](const Rational& x) { return x; };
        CHECK_THROWS_AS((void)jackson::q_derivative(c, Rational(0), q_half), ZeroArgument);
    }
}

TEST_CASE("linearity of the q-integral") {
    const auto ctx = NumericContext::exact();
    auto f = constant_on<Rational>(0, 150, Rational(3), q_half);
    auto g = constant_on<Rational>(0, 150, Rational(5, 7), q_half);
    const Rational alpha(2, 3), beta(-1, 4);
    LatticeFunctionData<Rational> d;
    d.window = LatticeWindow{0, 150};
    d.values.clear();
    for (long n = 0; n <= 150; ++n) {
        d.values.push_back(alpha * f.at(n) + beta * g.at(n));
    }
    d.upper_tail_bound = abs(alpha) * *f.upper_tail_bound() + abs(beta) * *g.upper_tail_bound();
    LatticeFunction<Rational> combo{std::move(d)};
    const auto rf = jackson::q_integral_0_to_x(f, 0, q_half, ctx);
    const auto rg = jackson::q_integral_0_to_x(g, 0, q_half, ctx);
    const auto rc = jackson::q_integral_0_to_x(combo, 0, q_half, ctx);
    const Rational combined_cert =
        abs(alpha) * rf.cert.bound + abs(beta) * rg.cert.bound + rc.cert.bound;
    CHECK(abs(rc.value - (alpha * rf.value + beta * rg.value)) <= combined_cert);
}

TEST_CASE("finite window vs infinite integral consistency") {
    const auto ctx = float_ctx();
    auto f = qdensity::make_q_exponential<BigFloat>(Rational(2), q_half, ctx);
    const auto full = jackson::q_integral_0_to_inf(f.base(), q_half, ctx);
    // integral over (0, q^{n_lo}) approaches the full mass as the window grows
    const auto partial =
        jackson::q_integral_0_to_x(f.base(), f.base().window().n_lo, q_half, ctx);
    // difference is the mass above q^{n_lo}, bounded by the lower tail certificate
    CHECK(abs(full.value - partial.value) <= full.cert.bound + partial.cert.bound +
                                                 BigFloat("1e-25"));
}
