// Classifies q-densities as q-moment determinate or indeterminate. The
// q-exponential family admits a proof either way, decided exactly by
// comparing lambda against 1/(1-q). General densities get scan-based
// evidence from the ratio r_j = f(q^{-j}) / q^{j(j+1)/2}: bounded below
// points at indeterminacy, decay to zero at determinacy, and a finite scan
// can never prove an all-j statement.
#pragma once

#include <string>
#include <vector>

#include "qcalc/context.hpp"
#include "qcalc/errors.hpp"
#include "qcalc/qdensity.hpp"

namespace qcalc::determinacy {

using boost::multiprecision::abs;
using qdensity::QDensityHandle;

enum class Verdict {
    indeterminate_proved,
    determinate_proved,
    indeterminate_evidence,
    determinate_evidence,
    inconclusive,
};

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::indeterminate_proved: return "indeterminate_proved";
        case Verdict::determinate_proved: return "determinate_proved";
        case Verdict::indeterminate_evidence: return "indeterminate_evidence";
        case Verdict::determinate_evidence: return "determinate_evidence";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

// Scan heuristics, echoed into every report so the evidence thresholds are
// visible to the caller.
struct EvidenceThresholds {
    double trend_keep = 0.5;   // last-third inf must be >= trend_keep * global inf
    double decay_drop = 0.25;  // r_J must be <= decay_drop * r_{J/2}
};

template <class R>
struct ClassificationReport {
    Verdict verdict = Verdict::inconclusive;
    std::vector<R> witness;  // r_j = f(q^{-j}) / q^{j(j+1)/2}, j = 0..scan depth
    R constant_estimate = R(0);  // inf of the witness over the scan
    EvidenceThresholds thresholds;
    std::string rationale;
};

// A_j = prod_{s=1}^{j} 1/(q^s + lambda(1-q)); A_0 = 1.
template <class R>
R compute_A(unsigned j, const Rational& lambda, const QParam& q, const NumericContext& ctx) {
    check_mode<R>(ctx);
    if (!(lambda > 0)) throw InvalidParameter("lambda must be positive");
    ModeGuard<R> guard(ctx);
    const R c = from_rational<R>(lambda * q.one_minus_q());
    const R qr = from_rational<R>(q.value());
    R qpow = qr;
    R a(1);
    for (unsigned s = 1; s <= j; ++s) {
        a /= qpow + c;
        qpow *= qr;
    }
    return a;
}

namespace detail {

template <class R>
std::vector<R> ratio_witness(const QDensityHandle<R>& f, unsigned scan_depth,
                             const NumericContext& ctx) {
    const QParam& q = f.q();
    std::vector<R> r;
    r.reserve(scan_depth + 1);
    R qpow_tri(1);  // q^{j(j+1)/2}
    const R qr = from_rational<R>(q.value());
    R qpow = qr;
    for (unsigned j = 0; j <= scan_depth; ++j) {
        r.push_back(at_least_precision(f.value_at(-static_cast<long>(j)), ctx.precision_bits) /
                    qpow_tri);
        qpow_tri *= qpow;  // multiply by q^{j+1}
        qpow *= qr;
    }
    return r;
}

template <class R>
R inf_over(const std::vector<R>& v, std::size_t from, std::size_t to) {
    R best = v[from];
    for (std::size_t i = from + 1; i <= to; ++i) {
        if (v[i] < best) best = v[i];
    }
    return best;
}

}  // namespace detail

// Exact dichotomy on the q-exponential family: indeterminate iff
// lambda <= 1/(1-q), equivalently lambda(1-q) <= 1, decided as rationals.
template <class R>
ClassificationReport<R> classify_q_exponential(const Rational& lambda, const QParam& q,
                                               const NumericContext& ctx,
                                               unsigned scan_depth = 40) {
    check_mode<R>(ctx);
    if (!(lambda > 0)) throw InvalidParameter("lambda must be positive");
    ModeGuard<R> guard(ctx);
    const Rational c = lambda * q.one_minus_q();

    ClassificationReport<R> report;
    const Certified<R> eq = numkernel::e_q(from_rational<R>(-lambda), q, ctx);
    const R f1 = from_rational<R>(lambda) * eq.value;
    report.witness.reserve(scan_depth + 1);
    {
        const R cr = from_rational<R>(c);
        const R qr = from_rational<R>(q.value());
        R qpow = qr;
        R a(1);  // A_j
        for (unsigned j = 0; j <= scan_depth; ++j) {
            report.witness.push_back(f1 * a);  // r_j = f(1) A_j
            a /= qpow + cr;
            qpow *= qr;
        }
    }
    report.constant_estimate = detail::inf_over(report.witness, 0, scan_depth);
    if (c <= 1) {
        report.verdict = Verdict::indeterminate_proved;
        report.rationale =
            "lambda(1-q) = " + c.str() +
            " <= 1: A_j >= prod_{s>=1} 1/(1+q^s) > 0, so the ratio f(q^-j)/q^{j(j+1)/2} "
            "is bounded below and the heavy-tail criterion applies";
    } else {
        report.verdict = Verdict::determinate_proved;
        report.rationale = "lambda(1-q) = " + c.str() +
                           " > 1: A_j <= (lambda(1-q))^{-j} -> 0, so f(q^-j) = "
                           "o(q^{j(j+1)/2}) and the decay criterion applies";
    }
    return report;
}

// Evidence scan for the heavy-tail lower bound: the ratio sequence must stay
// away from zero (last-third inf at least half the global inf).
template <class R>
ClassificationReport<R> check_condition_W(const QDensityHandle<R>& f, unsigned scan_depth,
                                          const NumericContext& ctx) {
    check_mode<R>(ctx);
    if (scan_depth < 6) throw InvalidParameter("scan depth must be at least 6");
    ModeGuard<R> guard(ctx);
    ClassificationReport<R> report;
    report.witness = detail::ratio_witness(f, scan_depth, ctx);
    report.constant_estimate = detail::inf_over(report.witness, 0, scan_depth);

    const std::size_t last_third_from = (2 * (scan_depth + 1)) / 3;
    const R tail_inf = detail::inf_over(report.witness, last_third_from, scan_depth);
    const R keep = from_rational<R>(Rational(1, 2));
    if (report.constant_estimate > 0 && tail_inf >= keep * report.constant_estimate) {
        report.verdict = Verdict::indeterminate_evidence;
        report.rationale = "ratio sequence bounded below over the scan and not trending to 0; "
                           "a finite scan cannot prove the bound for all j";
    } else {
        report.verdict = Verdict::inconclusive;
        report.rationale = "ratio sequence trends toward 0 or touches it within the scan";
    }
    return report;
}

// Evidence scan for the decay condition: strictly decreasing ratios over the
// last half of the scan and a factor-4 drop from the midpoint to the end.
template <class R>
ClassificationReport<R> check_decay_condition(const QDensityHandle<R>& f, unsigned scan_depth,
                                              const NumericContext& ctx) {
    check_mode<R>(ctx);
    if (scan_depth < 6) throw InvalidParameter("scan depth must be at least 6");
    ModeGuard<R> guard(ctx);
    ClassificationReport<R> report;
    report.witness = detail::ratio_witness(f, scan_depth, ctx);
    report.constant_estimate = detail::inf_over(report.witness, 0, scan_depth);

    const std::size_t half = scan_depth / 2;
    bool decreasing = true;
    for (std::size_t j = half; j < scan_depth; ++j) {
        if (!(report.witness[j + 1] < report.witness[j])) {
            decreasing = false;
            break;
        }
    }
    const R drop = from_rational<R>(Rational(1, 4));
    if (decreasing && report.witness[scan_depth] <= drop * report.witness[half]) {
        report.verdict = Verdict::determinate_evidence;
        report.rationale = "ratio sequence decreasing over the last half of the scan with at "
                           "least a factor-4 drop; a finite scan cannot prove the limit";
    } else {
        report.verdict = Verdict::inconclusive;
        report.rationale = "ratio sequence is not certifiably decaying within the scan";
    }
    return report;
}

}  // namespace qcalc::determinacy
