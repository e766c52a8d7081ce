#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace stochstab {

/// Exact rational number used for utilities, costs, potentials and wastes.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses "n", "-n", "p/q" or a plain decimal such as "0.25" into an exact
/// rational. Throws ParseError on anything else or on a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" rendering; integers render without a denominator.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// Harmonic number 1 + 1/2 + ... + 1/n (0 for n = 0).
Rational harmonic(std::uint64_t n);

}  // namespace stochstab
