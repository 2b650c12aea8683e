#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

namespace semint {

// Exact rational scalar used for every probability mass in the library.
// Floating point appears only in analysis metrics and rendered output.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt numerator_of(const Rational& q) {
    return boost::multiprecision::numerator(q);
}

inline BigInt denominator_of(const Rational& q) {
    return boost::multiprecision::denominator(q);
}

inline Rational rational_abs(const Rational& q) {
    return q < 0 ? Rational(-q) : q;
}

inline double to_double(const Rational& q) {
    return q.convert_to<double>();
}

// Renders as "num/den", or just "num" when the denominator is 1.
std::string to_fraction_string(const Rational& q);

// Accepts "a/b", integers, and decimal notation with an optional exponent
// ("0.05", "-3", "7/50", "1.2e-3"). Decimal inputs convert exactly.
Rational parse_rational(const std::string& text);

// Smallest N with 1/(4*eps^2*N) <= delta, i.e. ceil(1/(4*eps^2*delta)).
// Chebyshev sample-size bound for a Bernoulli frequency estimate.
std::uint64_t chebyshev_sample_bound(const Rational& eps, const Rational& delta);

}  // namespace semint
