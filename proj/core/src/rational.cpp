#include "semint/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace semint {

std::string to_fraction_string(const Rational& q) {
    BigInt n = numerator_of(q);
    BigInt d = denominator_of(q);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

namespace {

Rational parse_decimal(const std::string& text) {
    // [sign] digits [. digits] [e|E [sign] digits]
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        negative = text[pos] == '-';
        ++pos;
    }
    std::string digits;
    long frac_digits = 0;
    bool any = false;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        digits += text[pos++];
        any = true;
    }
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            digits += text[pos++];
            ++frac_digits;
            any = true;
        }
    }
    long exponent = 0;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        bool exp_neg = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            exp_neg = text[pos] == '-';
            ++pos;
        }
        bool exp_any = false;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            exponent = exponent * 10 + (text[pos++] - '0');
            exp_any = true;
        }
        if (!exp_any) throw std::invalid_argument("malformed exponent in rational: " + text);
        if (exp_neg) exponent = -exponent;
    }
    if (!any || pos != text.size()) {
        throw std::invalid_argument("malformed rational literal: " + text);
    }
    BigInt mantissa(digits.empty() ? "0" : digits);
    if (negative) mantissa = -mantissa;
    long ten_power = exponent - frac_digits;
    Rational value(mantissa);
    BigInt scale = 1;
    for (long i = 0; i < (ten_power < 0 ? -ten_power : ten_power); ++i) scale *= 10;
    if (ten_power >= 0) {
        value *= Rational(scale);
    } else {
        value /= Rational(scale);
    }
    return value;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    std::size_t slash = text.find('/');
    if (slash != std::string::npos) {
        Rational num = parse_decimal(text.substr(0, slash));
        Rational den = parse_decimal(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in rational: " + text);
        return num / den;
    }
    return parse_decimal(text);
}

std::uint64_t chebyshev_sample_bound(const Rational& eps, const Rational& delta) {
    if (eps <= 0 || delta <= 0) {
        throw std::invalid_argument("chebyshev_sample_bound requires positive eps and delta");
    }
    Rational bound = Rational(1) / (Rational(4) * eps * eps * delta);
    BigInt n = numerator_of(bound);
    BigInt d = denominator_of(bound);
    BigInt q = n / d;
    if (q * d != n) q += 1;  // ceiling
    return q.convert_to<std::uint64_t>();
}

}  // namespace semint
