#include <doctest.h>

#include <qcalc/determinacy.hpp>

#include "oracles.hpp"

using namespace qcalc;
using boost::multiprecision::abs;
using determinacy::Verdict;
using qdensity::make_q_exponential;

namespace {
const QParam q_half{Rational(1, 2)};
const QParam q_nine_tenths{Rational(9, 10)};

NumericContext float_ctx(unsigned bits = 256) {
    return NumericContext::big_float(bits, rational_pow(Rational(10), -25));
}
}  // namespace

TEST_CASE("A_j products") {
    const auto ectx = NumericContext::exact();
    SUBCASE("empty product and single factor") {
        CHECK(determinacy::compute_A<Rational>(0, Rational(2), q_half, ectx) == 1);
        CHECK(determinacy::compute_A<Rational>(1, Rational(2), q_half, ectx) == Rational(2, 3));
    }
    SUBCASE("geometric bound for fast-decaying parameters") {
        // A_10 <= (1/(lambda(1-q)))^10 for lambda = 3, q = 1/2
        const Rational a10 = determinacy::compute_A<Rational>(10, Rational(3), q_half, ectx);
        CHECK(a10 <= rational_pow(Rational(2, 3), 10));
    }
    SUBCASE("recurrence is exact: A_{j+1} = A_j / (q^{j+1} + lambda(1-q))") {
        const Rational lambda(2);
        Rational a = determinacy::compute_A<Rational>(0, lambda, q_half, ectx);
        for (unsigned j = 0; j < 25; ++j) {
            const Rational next = determinacy::compute_A<Rational>(j + 1, lambda, q_half, ectx);
            CHECK(next == a / (q_half.pow(static_cast<long>(j) + 1) + lambda * q_half.one_minus_q()));
            a = next;
        }
    }
    SUBCASE("factorization f(q^{-j}) = f(1) q^{j(j+1)/2} A_j matches direct evaluation") {
        const auto ctx = float_ctx(320);
        auto f = make_q_exponential<BigFloat>(Rational(2), q_half, ctx);
        PrecisionGuard guard(640);
        for (long j = 0; j <= 40; ++j) {
            const BigFloat direct =
                oracle::qexp_density_at(Rational(2), Rational(1, 2), -j, 400, 640);
            const BigFloat factored = f.value_at(0) *
                                      q_half.pow_as<BigFloat>(j * (j + 1) / 2) *
                                      determinacy::compute_A<BigFloat>(
                                          static_cast<unsigned>(j), Rational(2), q_half, ctx);
            CHECK(abs(direct - factored) <= BigFloat("1e-28") * direct);
        }
    }
}

TEST_CASE("family classification dichotomy") {
    const auto ctx = float_ctx();
    SUBCASE("heavy-tail side, including the boundary") {
        for (auto& [lambda, q] :
             std::vector<std::pair<Rational, QParam>>{{Rational(2), q_half},
                                                      {Rational(1), q_nine_tenths},
                                                      {Rational(1999, 1000), q_half}}) {
            const auto report = determinacy::classify_q_exponential<BigFloat>(lambda, q, ctx);
            CHECK(report.verdict == Verdict::indeterminate_proved);
            CHECK(report.constant_estimate > 0);
        }
    }
    SUBCASE("fast-decay side") {
        for (auto& [lambda, q] :
             std::vector<std::pair<Rational, QParam>>{{Rational(3), q_half},
                                                      {Rational(2001, 1000), q_half},
                                                      {Rational(11), q_nine_tenths}}) {
            const auto report = determinacy::classify_q_exponential<BigFloat>(lambda, q, ctx);
            CHECK(report.verdict == Verdict::determinate_proved);
        }
    }
    SUBCASE("exactly one proved verdict for every parameter point") {
        for (const Rational& lambda : {Rational(1, 10), Rational(1), Rational(2),
                                       Rational(20001, 10000), Rational(5), Rational(100)}) {
            const auto report =
                determinacy::classify_q_exponential<BigFloat>(lambda, q_half, ctx);
            const bool indet = report.verdict == Verdict::indeterminate_proved;
            const bool det = report.verdict == Verdict::determinate_proved;
            CHECK(indet != det);
            CHECK(indet == (lambda <= Rational(2)));  // 1/(1-q) = 2
        }
    }
    SUBCASE("invalid lambda") {
        CHECK_THROWS_AS(
            (void)determinacy::classify_q_exponential<BigFloat>(Rational(0), q_half, ctx),
            InvalidParameter);
    }
}

TEST_CASE("heavy-tail evidence scan") {
    const auto ctx = float_ctx(320);
    SUBCASE("indeterminate family shows stable evidence") {
        auto f = make_q_exponential<BigFloat>(Rational(2), q_half, ctx,
                                              {.max_moment_order = 20,
                                               .window = LatticeWindow{-62, 110}});
        const auto report = determinacy::check_condition_W(f, 60, ctx);
        CHECK(report.verdict == Verdict::indeterminate_evidence);
        CHECK(report.witness.size() == 61);
        CHECK(report.constant_estimate > 0);
    }
    SUBCASE("critical-rate density gives constant ratios, estimate 1") {
        const auto ectx = NumericContext::exact(rational_pow(Rational(10), -25));
        LatticeFunctionData<Rational> d;
        d.window = LatticeWindow{-62, 40};
        d.values.clear();
        for (long n = -62; n <= 40; ++n) {
            d.values.push_back(n <= 0 ? q_half.pow((-n) * (-n + 1) / 2) : Rational(0));
        }
        d.upper_tail_bound = Rational(0);
        d.decay_upper = TailEnvelope<Rational>{Rational(1), Rational(1), 0};
        auto g = qdensity::make_custom(std::move(d), q_half, ectx);
        const auto report = determinacy::check_condition_W(g, 60, ectx);
        CHECK(report.verdict == Verdict::indeterminate_evidence);
        CHECK(report.constant_estimate == 1);
    }
    SUBCASE("determinate family trends to zero: inconclusive here") {
        auto f = make_q_exponential<BigFloat>(Rational(3), q_half, ctx,
                                              {.max_moment_order = 20,
                                               .window = LatticeWindow{-62, 110}});
        const auto report = determinacy::check_condition_W(f, 60, ctx);
        CHECK(report.verdict == Verdict::inconclusive);
    }
}

TEST_CASE("decay evidence scan") {
    const auto ctx = float_ctx(320);
    SUBCASE("determinate family shows decay evidence") {
        auto f = make_q_exponential<BigFloat>(Rational(3), q_half, ctx,
                                              {.max_moment_order = 20,
                                               .window = LatticeWindow{-62, 110}});
        const auto report = determinacy::check_decay_condition(f, 60, ctx);
        CHECK(report.verdict == Verdict::determinate_evidence);
    }
    SUBCASE("critical-rate density: constant ratios stay inconclusive") {
        const auto ectx = NumericContext::exact(rational_pow(Rational(10), -25));
        LatticeFunctionData<Rational> d;
        d.window = LatticeWindow{-62, 40};
        d.values.clear();
        for (long n = -62; n <= 40; ++n) {
            d.values.push_back(n <= 0 ? q_half.pow((-n) * (-n + 1) / 2) : Rational(0));
        }
        d.upper_tail_bound = Rational(0);
        d.decay_upper = TailEnvelope<Rational>{Rational(1), Rational(1), 0};
        auto g = qdensity::make_custom(std::move(d), q_half, ectx);
        const auto report = determinacy::check_decay_condition(g, 60, ectx);
        CHECK(report.verdict == Verdict::inconclusive);
    }
    SUBCASE("super-critical decay f(q^{-j}) = q^{j^2} is detected") {
        const auto ectx = NumericContext::exact(rational_pow(Rational(10), -25));
        LatticeFunctionData<Rational> d;
        d.window = LatticeWindow{-62, 40};
        d.values.clear();
        for (long n = -62; n <= 40; ++n) {
            d.values.push_back(n <= 0 ? q_half.pow(n * n) : Rational(0));
        }
        d.upper_tail_bound = Rational(0);
        d.decay_upper = TailEnvelope<Rational>{Rational(1), q_half.value(), 3};
        auto g = qdensity::make_custom(std::move(d), q_half, ectx);
        const auto report = determinacy::check_decay_condition(g, 60, ectx);
        CHECK(report.verdict == Verdict::determinate_evidence);
    }
}

TEST_CASE("evidence never contradicts the proved verdict") {
    const auto ctx = float_ctx(320);
    for (const Rational& lambda : {Rational(1), Rational(2), Rational(3), Rational(8)}) {
        const auto proved = determinacy::classify_q_exponential<BigFloat>(lambda, q_half, ctx);
        auto f = make_q_exponential<BigFloat>(lambda, q_half, ctx,
                                              {.max_moment_order = 20,
                                               .window = LatticeWindow{-45, 110}});
        const auto w_report = determinacy::check_condition_W(f, 40, ctx);
        const auto d_report = determinacy::check_decay_condition(f, 40, ctx);
        if (proved.verdict == Verdict::indeterminate_proved) {
            CHECK(w_report.verdict != Verdict::determinate_evidence);
            CHECK(d_report.verdict != Verdict::determinate_evidence);
        } else {
            CHECK(w_report.verdict != Verdict::indeterminate_evidence);
            CHECK(d_report.verdict != Verdict::indeterminate_evidence);
        }
    }
}
