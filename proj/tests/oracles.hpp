// Independent brute-force oracles for the test suites: fixed-length direct
// products and sums at explicitly doubled precision. No truncation rules, no
// structural zero detection, no overflow-avoiding factorizations -- these
// deliberately avoid every code path of the library they check.
#pragma once

#include <qcalc/scalar.hpp>

namespace oracle {

using qcalc::BigFloat;
using qcalc::PrecisionGuard;
using qcalc::Rational;

// prod_{j=0}^{factors-1} (1 - t(1-q) q^j)^{-1}
inline BigFloat eq_product(const Rational& t, const Rational& q, int factors, unsigned bits) {
    PrecisionGuard guard(bits);
    const BigFloat u = BigFloat(t) * BigFloat(Rational(1) - q);
    const BigFloat qf(q);
    BigFloat qpow(1), p(1);
    for (int j = 0; j < factors; ++j) {
        p /= BigFloat(1) - u * qpow;
        qpow *= qf;
    }
    return p;
}

// prod_{j=0}^{factors-1} (1 + t(1-q) q^j)
inline BigFloat Eq_product(const Rational& t, const Rational& q, int factors, unsigned bits) {
    PrecisionGuard guard(bits);
    const BigFloat u = BigFloat(t) * BigFloat(Rational(1) - q);
    const BigFloat qf(q);
    BigFloat qpow(1), p(1);
    for (int j = 0; j < factors; ++j) {
        p *= BigFloat(1) + u * qpow;
        qpow *= qf;
    }
    return p;
}

// prod_{j=0}^{factors-1} (1 + q^j t)
inline BigFloat euler_product(const Rational& t, const Rational& q, int factors, unsigned bits) {
    PrecisionGuard guard(bits);
    const BigFloat tf(t), qf(q);
    BigFloat qpow(1), p(1);
    for (int j = 0; j < factors; ++j) {
        p *= BigFloat(1) + qpow * tf;
        qpow *= qf;
    }
    return p;
}

// prod_{s=1}^{factors} (1 - q^s z)
inline BigFloat phi_product(const Rational& z, const Rational& q, int factors, unsigned bits) {
    PrecisionGuard guard(bits);
    const BigFloat zf(z), qf(q);
    BigFloat qpow = qf, p(1);
    for (int s = 1; s <= factors; ++s) {
        p *= BigFloat(1) - qpow * zf;
        qpow *= qf;
    }
    return p;
}

// (q;q)_j
inline BigFloat pochhammer_q(const Rational& q, int j, unsigned bits) {
    PrecisionGuard guard(bits);
    const BigFloat qf(q);
    BigFloat qpow(1), p(1);
    for (int s = 0; s < j; ++s) {
        p *= BigFloat(1) - qf * qpow;
        qpow *= qf;
    }
    return p;
}

// lambda e_q(-lambda q^n) by direct product, any lattice index n.
inline BigFloat qexp_density_at(const Rational& lambda, const Rational& q, long n, int factors,
                                unsigned bits) {
    PrecisionGuard guard(bits);
    const BigFloat lam(lambda);
    const BigFloat u = lam * BigFloat(Rational(1) - q);  // -t(1-q) with t = -lambda q^n
    const BigFloat qf(q);
    BigFloat qpow = boost::multiprecision::pow(qf, static_cast<int>(n));
    BigFloat p(1);
    for (int j = 0; j < factors; ++j) {
        p /= BigFloat(1) + u * qpow;
        qpow *= qf;
    }
    return lam * p;
}

// (1-q) sum_{n=n_min}^{n_max} f(q^n) q^{n(k+1)} for the q-exponential,
// accumulated in plain ascending order (the reverse of the implementation).
inline BigFloat qexp_moment_brute(const Rational& lambda, const Rational& q, unsigned k,
                                  long n_min, long n_max, int factors, unsigned bits) {
    PrecisionGuard guard(bits);
    const BigFloat qf(q);
    BigFloat sum(0);
    for (long n = n_min; n <= n_max; ++n) {
        const BigFloat weight =
            boost::multiprecision::pow(qf, static_cast<int>(n * (static_cast<long>(k) + 1)));
        sum += qexp_density_at(lambda, q, n, factors, bits) * weight;
    }
    return BigFloat(Rational(1) - q) * sum;
}

// (-1)^j q^{j(j+1)/2} / ((q;q)_j f(q^{-j})) for the q-exponential density.
inline BigFloat h_tilde_brute(const Rational& lambda, const Rational& q, int j, int factors,
                              unsigned bits) {
    PrecisionGuard guard(bits);
    const BigFloat qf(q);
    const BigFloat num = boost::multiprecision::pow(qf, j * (j + 1) / 2);
    const BigFloat den =
        pochhammer_q(q, j, bits) * qexp_density_at(lambda, q, -static_cast<long>(j), factors, bits);
    BigFloat v = num / den;
    return (j % 2 == 0) ? v : -v;
}

}  // namespace oracle
