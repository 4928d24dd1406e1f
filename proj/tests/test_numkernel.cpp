#include <doctest.h>

#include <qcalc/numkernel.hpp>

#include "oracles.hpp"

using namespace qcalc;
using boost::multiprecision::abs;
namespace nk = qcalc::numkernel;

namespace {
const QParam q_half{Rational(1, 2)};
const QParam q_tenth{Rational(1, 10)};
const QParam q_nine_tenths{Rational(9, 10)};

Rational tol(int e) { return rational_pow(Rational(10), -e); }

NumericContext float_ctx(unsigned bits = 320, int tol_exp = 32) {
    return NumericContext::big_float(bits, tol(tol_exp));
}
}  // namespace

TEST_CASE("q-pochhammer finite products") {
    const auto ctx = NumericContext::exact();
    (void)ctx;
    CHECK(nk::q_pochhammer(Rational(7, 3), q_half, 0) == 1);
    CHECK(nk::q_pochhammer(Rational(1, 2), q_half, 2) == Rational(3, 8));
    CHECK(nk::q_pochhammer(Rational(1, 2), q_half, 3) == Rational(21, 64));
    // float mode agrees with the long-product oracle
    PrecisionGuard guard(320);
    const BigFloat mine = nk::q_pochhammer(BigFloat(Rational(1, 2)), q_half, 3);
    CHECK(abs(mine - BigFloat(Rational(21, 64))) == 0);
}

TEST_CASE("e_q basics and poles") {
    const auto ctx = float_ctx();
    PrecisionGuard guard(320);
    SUBCASE("t = 0 gives exactly 1 with an empty product") {
        const auto r = nk::e_q(BigFloat(0), q_half, ctx);
        CHECK(r.value == 1);
        CHECK(r.cert.bound == 0);
    }
    SUBCASE("long-product oracle at t = -4") {
        const auto r = nk::e_q(BigFloat(-4), q_half, ctx);
        const BigFloat expect("6.990374029918459961832601795049570870565887240e-02");
        CHECK(abs(r.value - expect) <= BigFloat("1e-30"));
        const BigFloat brute = oracle::eq_product(Rational(-4), Rational(1, 2), 200, 640);
        CHECK(abs(r.value - brute) <= BigFloat("1e-30"));
    }
    SUBCASE("pole at t = q^{-j}/(1-q) is detected structurally") {
        // t = q^{-3}/(1-q) = 16
        CHECK_THROWS_AS((void)nk::e_q(BigFloat(16), q_half, ctx), PoleError);
        CHECK_THROWS_AS((void)nk::e_q(Rational(16), q_half, NumericContext::exact()), PoleError);
        // nearby non-pole evaluates fine
        CHECK_NOTHROW((void)nk::e_q(BigFloat(15), q_half, ctx));
    }
    SUBCASE("exact mode produces a rational with a certified tail") {
        const auto ectx = NumericContext::exact(tol(32));
        const auto r = nk::e_q(Rational(-2), q_half, ectx);
        const BigFloat brute = oracle::eq_product(Rational(-2), Rational(1, 2), 200, 640);
        PrecisionGuard g(640);
        CHECK(abs(BigFloat(r.value) - brute) <= BigFloat(r.cert.bound) + BigFloat("1e-120"));
    }
}

TEST_CASE("E_q basics and structural zeros") {
    const auto ctx = float_ctx();
    PrecisionGuard guard(320);
    SUBCASE("t = 0 gives exactly 1") {
        const auto r = nk::E_q(BigFloat(0), q_half, ctx);
        CHECK(r.value == 1);
    }
    SUBCASE("value at t = 1/(1-q) against the frozen oracle") {
        const auto r = nk::E_q(BigFloat(2), q_half, ctx);
        const BigFloat expect("4.768462058062743448299798577356794477543239033e+00");
        CHECK(abs(r.value - expect) <= BigFloat("1e-29"));
    }
    SUBCASE("t = -q^m/(1-q) stays strictly positive for m >= 1") {
        for (int m : {1, 2, 5}) {
            const BigFloat t = BigFloat(-2) * BigFloat(q_half.pow(m));
            const auto r = nk::E_q(t, q_half, ctx);
            CHECK(r.value > 0);
        }
    }
    SUBCASE("t = -q^{-j}/(1-q) is an exact zero") {
        // j = 2: t = -8
        const auto r = nk::E_q(BigFloat(-8), q_half, ctx);
        CHECK(r.value == 0);
        CHECK(r.cert.bound == 0);
        const auto e = nk::E_q(Rational(-8), q_half, NumericContext::exact());
        CHECK(e.value == 0);
    }
    SUBCASE("reciprocal identity e_q(-t) E_q(t) = 1") {
        for (const QParam& q : {q_half, q_tenth, q_nine_tenths}) {
            for (const Rational& t :
                 {Rational(-3), Rational(-1), Rational(1, 2), Rational(2), Rational(17, 5)}) {
                const auto e = nk::e_q(BigFloat(-t), q, ctx);
                const auto E = nk::E_q(BigFloat(t), q, ctx);
                CHECK(abs(e.value * E.value - 1) <= BigFloat("1e-30"));
            }
        }
    }
}

TEST_CASE("Euler series equals the product form") {
    const auto ctx = float_ctx();
    PrecisionGuard guard(320);
    SUBCASE("t = 0 keeps only the constant term") {
        const auto r = nk::euler_series(BigFloat(0), q_half, ctx);
        CHECK(r.value == 1);
    }
    SUBCASE("series vs product across the grid") {
        for (const QParam& q : {q_half, q_tenth, q_nine_tenths}) {
            for (const Rational& t :
                 {Rational(-3), Rational(-1), Rational(1, 2), Rational(2), q.pow(-8)}) {
                const auto series = nk::euler_series(BigFloat(t), q, ctx);
                const BigFloat product = oracle::euler_product(t, q.value(), 800, 640);
                CHECK(abs(series.value - product) <= BigFloat("1e-30"));
            }
        }
    }
    SUBCASE("frozen anchor at t = 2, q = 1/2") {
        const auto series = nk::euler_series(BigFloat(2), q_half, ctx);
        const BigFloat expect("1.430538617418823034489939573207038343262971710e+01");
        CHECK(abs(series.value - expect) <= BigFloat("1e-29"));
    }
    SUBCASE("t = -q^{-5} sits on a zero of the product") {
        const Rational t = -q_half.pow(-5);
        const auto series = nk::euler_series(BigFloat(t), q_half, ctx);
        CHECK(abs(series.value) <= series.cert.bound);
        const auto exact = nk::euler_series(t, q_half, NumericContext::exact(tol(32)));
        CHECK(abs(exact.value) <= exact.cert.bound);
    }
}

TEST_CASE("phi structural zeros and values") {
    const auto ctx = float_ctx();
    PrecisionGuard guard(320);
    SUBCASE("exact zero at z = q^{-m}") {
        for (const QParam& q : {q_half, q_nine_tenths}) {
            for (long m : {1L, 3L, 17L, 50L}) {
                const auto rf = nk::phi(q.pow_as<BigFloat>(-m), q, ctx);
                CHECK(rf.value == 0);
                CHECK(rf.cert.bound == 0);
                const auto re = nk::phi(q.pow(-m), q, NumericContext::exact());
                CHECK(re.value == 0);
                CHECK(re.cert.bound == 0);
            }
        }
    }
    SUBCASE("z = 0 gives 1") {
        const auto r = nk::phi(BigFloat(0), q_half, ctx);
        CHECK(r.value == 1);
    }
    SUBCASE("z = -q^{-10} against the long-product oracle") {
        const auto r = nk::phi(BigFloat(-1024), q_half, ctx);
        const BigFloat expect("3.992349160127921839240183105706210957121677483e+14");
        CHECK(abs(r.value - expect) <= BigFloat("1e-14"));  // 1e-29 relative
        const BigFloat brute = oracle::phi_product(Rational(-1024), Rational(1, 2), 300, 640);
        CHECK(abs(r.value - brute) <= BigFloat("1e-30") * abs(brute));
    }
    SUBCASE("arguments near a zero but outside the detection gap stay nonzero") {
        // z = q^{-3} (1 + 2^{-50}): relative distance far above 2^{-160}
        const BigFloat z =
            q_half.pow_as<BigFloat>(-3) * (BigFloat(1) + boost::multiprecision::ldexp(BigFloat(1), -50));
        const auto r = nk::phi(z, q_half, ctx);
        CHECK(r.value != 0);
    }
}

TEST_CASE("certificates shrink as precision grows") {
    BigFloat last_bound(-1);
    for (unsigned bits : {128u, 256u, 512u}) {
        const auto ctx = NumericContext::big_float(bits, tol(25));
        const auto r = nk::e_q(BigFloat(-4), q_half, ctx);
        if (last_bound >= 0) CHECK(r.cert.bound <= last_bound);
        last_bound = r.cert.bound;
    }
}

TEST_CASE("exact mode is reproducible bit for bit") {
    const auto ctx = NumericContext::exact(tol(32));
    const auto a = nk::euler_series(Rational(2), q_half, ctx);
    const auto b = nk::euler_series(Rational(2), q_half, ctx);
    CHECK(a.value == b.value);
    CHECK(a.cert.bound == b.cert.bound);
    // float-mode value lands inside the exact value's certificate window
    const auto f = nk::euler_series(BigFloat(2), q_half, float_ctx());
    PrecisionGuard guard(640);
    CHECK(abs(f.value - BigFloat(a.value)) <= BigFloat(a.cert.bound) + f.cert.bound);
}
