#include "stochstab/rational.hpp"

#include "stochstab/errors.hpp"

#include <cctype>

namespace stochstab {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

BigInt parse_integer(std::string_view s) {
  return BigInt(std::string(s));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  const std::string where = "rational '" + std::string(text) + "'";
  if (s.empty()) throw ParseError(where, "empty string");

  bool negative = false;
  if (s.front() == '-' || s.front() == '+') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  Rational value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw ParseError(where, "expected p/q");
    BigInt d = parse_integer(den);
    if (d == 0) throw ParseError(where, "zero denominator");
    value = Rational(parse_integer(num), d);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto whole = s.substr(0, dot);
    auto frac = s.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) || !all_digits(frac))
      throw ParseError(where, "malformed decimal");
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    BigInt w = whole.empty() ? BigInt(0) : parse_integer(whole);
    value = Rational(w * scale + parse_integer(frac), scale);
  } else {
    if (!all_digits(s)) throw ParseError(where, "expected an integer or p/q");
    value = Rational(parse_integer(s));
  }
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& value) {
  return value.convert_to<double>();
}

Rational harmonic(std::uint64_t n) {
  Rational h = 0;
  for (std::uint64_t k = 1; k <= n; ++k) h += Rational(1, k);
  return h;
}

}  // namespace stochstab
