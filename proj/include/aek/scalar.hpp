#pragma once

// Scalar types used throughout the library.
//
// Every numeric template is instantiated for exactly two scalars: `double`
// and `Rational` (GMP rationals without expression templates, so they behave
// like plain value types inside Eigen). Mixing the two is a compile error.

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <optional>
#include <string>
#include <string_view>

namespace aek {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <class S>
concept ScalarType = std::same_as<S, double> || std::same_as<S, Rational>;

template <class S>
inline constexpr bool is_exact_v = std::same_as<S, Rational>;

template <class S>
using Vector2 = Eigen::Matrix<S, 2, 1>;
template <class S>
using Vector3 = Eigen::Matrix<S, 3, 1>;
template <class S>
using Vector4 = Eigen::Matrix<S, 4, 1>;
template <class S>
using Matrix2 = Eigen::Matrix<S, 2, 2>;
template <class S>
using Matrix3 = Eigen::Matrix<S, 3, 3>;
template <class S>
using Matrix4 = Eigen::Matrix<S, 4, 4>;

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.convert_to<double>(); }

template <ScalarType S>
S from_int(long n, long d = 1) {
  if constexpr (is_exact_v<S>)
    return Rational(n, d);
  else
    return static_cast<double>(n) / static_cast<double>(d);
}

inline double abs_value(double v) { return std::abs(v); }
inline Rational abs_value(const Rational& v) { return boost::multiprecision::abs(v); }

inline bool is_zero(double v) { return v == 0.0; }
inline bool is_zero(const Rational& v) { return v.is_zero(); }

/// Exact n-th root when it exists. For doubles this is the ordinary real root
/// (nullopt only for negative radicands of even roots).
std::optional<double> exact_root(double v, int n);
std::optional<Rational> exact_root(const Rational& v, int n);

/// Parses "p/q", an integer, or a plain decimal such as "-0.125" exactly.
Rational parse_rational(std::string_view text);

/// Exact conversion of the binary double value.
Rational rational_from_double(double v);

/// Rational from the shortest decimal that round-trips `v` (0.1 -> 1/10).
Rational rational_from_decimal(double v);

/// Shortest round-trip decimal.
std::string format_double(double v);
/// "p/q", or "p" when the denominator is 1.
std::string format_rational(const Rational& v);

inline std::string format_scalar(double v) { return format_double(v); }
inline std::string format_scalar(const Rational& v) { return format_rational(v); }

template <ScalarType To>
To scalar_cast(const double& v) {
  if constexpr (is_exact_v<To>)
    return rational_from_double(v);
  else
    return v;
}

template <ScalarType To>
To scalar_cast(const Rational& v) {
  if constexpr (is_exact_v<To>)
    return v;
  else
    return to_double(v);
}

}  // namespace aek
