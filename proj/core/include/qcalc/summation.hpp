// Certified truncation machinery for the q-series and q-products used
// throughout: geometric-domination series summation and infinite products
// with provable tail bounds. Everything works identically for exact rationals
// (zero rounding slop) and MPFR floats (explicit forward-error slop).
#pragma once

#include <utility>

#include "qcalc/context.hpp"
#include "qcalc/errors.hpp"
#include "qcalc/scalar.hpp"

namespace qcalc::detail {

using boost::multiprecision::abs;

// Forward rounding-error allowance for `op_count` arithmetic operations on
// values of size `magnitude` at the given precision. Identically zero in
// exact arithmetic, and shrinks as precision grows.
template <class R>
R rounding_slop(unsigned precision_bits, long op_count, const R& magnitude) {
    if constexpr (scalar_is_exact_v<R>) {
        (void)precision_bits;
        (void)op_count;
        return R(0);
    } else {
        return ScalarTraits<R>::rounding_ulp(precision_bits) * R(op_count + 8) * abs(magnitude);
    }
}

template <class R>
struct SeriesSum {
    R value = R(0);
    R peak = R(0);           // largest |term| summed
    long last_index = -1;    // index of the last term included
    R first_omitted = R(0);  // |a_{last_index+1}|
    R tail_bound = R(0);     // 2 * first_omitted, valid by geometric domination
};

// Sums a_0 + a_1 + ... where `next_term()` yields successive terms and
// `ratio_bound(j)` is a non-increasing upper bound on |a_{j+1}/a_j|.
// Stops after a_N once |a_{N+1}| <= stop_below and ratio_bound(N+1) <= 1/2;
// the omitted tail is then at most 2|a_{N+1}|.
template <class R, class TermGen, class RatioBound>
SeriesSum<R> sum_dominated(TermGen&& next_term, RatioBound&& ratio_bound, const R& stop_below,
                           long max_terms = 1000000) {
    const R half = R(1) / R(2);
    SeriesSum<R> out;
    R a = next_term();  // a_0
    for (long j = 0;; ++j) {
        out.value += a;
        if (abs(a) > out.peak) out.peak = abs(a);
        out.last_index = j;
        R a1 = next_term();
        if (abs(a1) <= stop_below && ratio_bound(j + 1) <= half) {
            out.first_omitted = abs(a1);
            out.tail_bound = R(2) * out.first_omitted;
            return out;
        }
        a = std::move(a1);
        if (j >= max_terms) {
            throw Error("InternalError", "series failed to reach geometric domination");
        }
    }
}

template <class R>
struct ProductResult {
    R value = R(1);
    long factors_used = 0;
    R tail_multiplier_bound = R(0);  // |true/partial - 1| <= this
};

// Evaluates prod_{j>=j0} (1 + x_j)^(+/-1) where `next_x()` yields x_{j0},
// x_{j0+1}, ... and `tail_abs_sum(j)` is a non-increasing upper bound on
// sum_{i>=j} |x_i|. Stops once the remaining factors can move the product by
// at most `stop_below` in absolute value: with S = tail_abs_sum <= 1/4, the
// tail multiplier differs from 1 by at most 2S in either direction.
// Vanishing factors must be excluded by the caller beforehand.
template <class R, class FactorGen, class TailSum>
ProductResult<R> product_dominated(FactorGen&& next_x, TailSum&& tail_abs_sum, bool reciprocal,
                                   const R& stop_below, long first_index = 0,
                                   long max_factors = 1000000) {
    const R quarter = R(1) / R(4);
    ProductResult<R> out;
    for (long j = first_index;; ++j) {
        const R tail = tail_abs_sum(j);
        if (tail <= quarter && R(2) * tail * abs(out.value) <= stop_below) {
            out.tail_multiplier_bound = R(2) * tail;
            return out;
        }
        const R factor = R(1) + next_x();
        if (factor == 0) {
            throw Error("InternalError", "vanishing factor reached the product engine");
        }
        if (reciprocal) {
            out.value /= factor;
        } else {
            out.value *= factor;
        }
        ++out.factors_used;
        if (j - first_index >= max_factors) {
            throw Error("InternalError", "product failed to reach its tail bound");
        }
    }
}

}  // namespace qcalc::detail
