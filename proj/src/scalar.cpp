#include "aek/scalar.hpp"

#include <gmp.h>

#include <charconv>
#include <stdexcept>
#include <system_error>

namespace aek {

namespace {

using Integer = boost::multiprecision::mpz_int;

std::optional<Integer> exact_integer_root(const Integer& v, int n) {
  if (v < 0) {
    if (n % 2 == 0) return std::nullopt;
    auto r = exact_integer_root(Integer(-v), n);
    if (!r) return std::nullopt;
    return Integer(-*r);
  }
  Integer root;
  const int exact = mpz_root(root.backend().data(), v.backend().data(), static_cast<unsigned long>(n));
  if (exact == 0) return std::nullopt;
  return root;
}

}  // namespace

std::optional<double> exact_root(double v, int n) {
  if (n <= 0) throw std::invalid_argument("exact_root: order must be positive");
  if (v < 0) {
    if (n % 2 == 0) return std::nullopt;
    return -std::pow(-v, 1.0 / n);
  }
  if (n == 2) return std::sqrt(v);
  return std::pow(v, 1.0 / n);
}

std::optional<Rational> exact_root(const Rational& v, int n) {
  if (n <= 0) throw std::invalid_argument("exact_root: order must be positive");
  const auto num = exact_integer_root(boost::multiprecision::numerator(v), n);
  if (!num) return std::nullopt;
  const auto den = exact_integer_root(boost::multiprecision::denominator(v), n);
  if (!den) return std::nullopt;
  return Rational(*num, *den);
}

Rational parse_rational(std::string_view text) {
  auto fail = [&] { return std::invalid_argument("not a rational literal: '" + std::string(text) + "'"); };
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw fail();

  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_rational(text.substr(0, slash));
    const Rational den = parse_rational(text.substr(slash + 1));
    if (den.is_zero()) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }

  bool negative = false;
  std::size_t pos = 0;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  std::string digits;
  long scale = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw fail();
  long exponent = 0;
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') throw fail();
    const auto rest = text.substr(pos + 1);
    const auto* first = rest.data();
    const auto* last = rest.data() + rest.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, exponent);
    if (ec != std::errc() || ptr != last) throw fail();
  }
  // Boost reads a leading 0 as an octal prefix.
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  Integer mantissa(digits);
  Rational value(mantissa);
  const long shift = exponent - scale;
  Integer ten_power = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(shift < 0 ? -shift : shift));
  if (shift < 0)
    value /= Rational(ten_power);
  else
    value *= Rational(ten_power);
  return negative ? Rational(-value) : value;
}

Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite value has no rational form");
  return Rational(v);
}

Rational rational_from_decimal(double v) { return parse_rational(format_double(v)); }

std::string format_double(double v) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buffer, ptr);
}

std::string format_rational(const Rational& v) { return v.str(); }

}  // namespace aek
