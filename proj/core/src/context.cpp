#include "qcalc/context.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace qcalc {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

// Decimal or scientific literal -> exact rational. "1.999" = 1999/1000,
// "1e-30" = 1/10^30.
Rational parse_decimal(const std::string& text) {
    std::string s = text;
    bool negative = false;
    std::size_t pos = 0;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
        negative = s[pos] == '-';
        ++pos;
    }
    std::string mantissa;
    long exponent = 0;
    const auto epos = s.find_first_of("eE", pos);
    std::string body = epos == std::string::npos ? s.substr(pos) : s.substr(pos, epos - pos);
    if (epos != std::string::npos) {
        const std::string etext = s.substr(epos + 1);
        if (etext.empty()) throw ParseError("empty exponent in '" + text + "'");
        char* end = nullptr;
        exponent = std::strtol(etext.c_str(), &end, 10);
        if (end == nullptr || *end != '\0') throw ParseError("bad exponent in '" + text + "'");
    }
    const auto dot = body.find('.');
    if (dot != std::string::npos) {
        const std::string frac = body.substr(dot + 1);
        body = body.substr(0, dot) + frac;
        exponent -= static_cast<long>(frac.size());
    }
    if (body.empty()) body = "0";
    if (!all_digits(body)) throw ParseError("not a number: '" + text + "'");
    Rational value{BigInt(body)};
    value *= rational_pow(Rational(10), exponent);
    return negative ? -value : value;
}

}  // namespace

ParsedNumber parse_number(const std::string& text) {
    if (text.empty()) throw ParseError("empty number literal");
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::string num = text.substr(0, slash);
        const std::string den = text.substr(slash + 1);
        bool negative = false;
        if (!num.empty() && (num[0] == '+' || num[0] == '-')) {
            negative = num[0] == '-';
            num = num.substr(1);
        }
        if (!all_digits(num) || !all_digits(den)) {
            throw ParseError("not a rational literal: '" + text + "'");
        }
        BigInt d(den);
        if (d == 0) throw ParseError("zero denominator in '" + text + "'");
        Rational value(BigInt(num), d);
        return ParsedNumber{negative ? -value : value, true};
    }
    return ParsedNumber{parse_decimal(text), false};
}

QParam::QParam(Rational q) : q_(std::move(q)) {
    if (!(q_ > 0 && q_ < 1)) {
        throw InvalidParameter("q must lie strictly inside (0,1), got " + q_.str());
    }
    const double qd = q_.convert_to<double>();
    log_inv_q_ = std::log(1.0 / qd);
    log2_inv_q_ = std::log2(1.0 / qd);
}

Rational NumericContext::default_tolerance() {
    return Rational(1, boost::multiprecision::pow(BigInt(10), 30U));
}

NumericContext NumericContext::big_float(unsigned precision_bits, const Rational& tolerance) {
    NumericContext ctx;
    ctx.mode = NumericMode::big_float;
    ctx.precision_bits = precision_bits;
    ctx.target_tolerance = tolerance;
    ctx.validate();
    return ctx;
}

NumericContext NumericContext::exact(const Rational& tolerance) {
    NumericContext ctx;
    ctx.mode = NumericMode::exact_rational;
    ctx.target_tolerance = tolerance;
    ctx.validate();
    return ctx;
}

void NumericContext::validate() const {
    if (mode == NumericMode::big_float && precision_bits < 64) {
        throw InvalidParameter("precision_bits must be at least 64");
    }
    if (!(target_tolerance > 0)) {
        throw InvalidParameter("target_tolerance must be positive");
    }
}

unsigned required_precision(unsigned max_order, const QParam& q) {
    const double peak_bits = 0.5 * (max_order + 1.0) * (max_order + 1.0) * q.log2_inv_q();
    return static_cast<unsigned>(std::ceil(peak_bits)) + 96;
}

}  // namespace qcalc
