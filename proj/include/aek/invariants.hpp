#pragma once

// Classical equi-affine invariants at the base point of a normalized frame:
// Transon planes, the cone of B. Su, Moutard quadrics and centers, and the
// affine curvature of planar sections.

#include "aek/frame.hpp"

namespace aek {

/// A unit tangent direction (xi, eta); (xi, eta) and (-xi, -eta) compare equal.
template <ScalarType S>
class TangentDirection {
 public:
  TangentDirection(S xi, S eta) : v_(std::move(xi), std::move(eta)) {
    const S n = v_.squaredNorm();
    if constexpr (is_exact_v<S>) {
      if (n != S(1)) throw std::invalid_argument("TangentDirection: not a unit vector");
    } else {
      if (std::abs(n - 1.0) > 1e-12) throw std::invalid_argument("TangentDirection: not a unit vector");
    }
  }
  explicit TangentDirection(const Vector2<S>& v) : TangentDirection(v(0), v(1)) {}

  static TangentDirection from_angle(double theta)
    requires std::same_as<S, double>
  {
    return {std::cos(theta), std::sin(theta)};
  }

  const S& xi() const { return v_(0); }
  const S& eta() const { return v_(1); }
  const Vector2<S>& vector() const { return v_; }
  /// Representative angle in [0, pi).
  double angle() const;

  friend bool operator==(const TangentDirection& a, const TangentDirection& b) {
    if constexpr (is_exact_v<S>) {
      return a.v_ == b.v_ || a.v_ == Vector2<S>(-b.v_);
    } else {
      return (a.v_ - b.v_).norm() < 1e-12 || (a.v_ + b.v_).norm() < 1e-12;
    }
  }

 private:
  Vector2<S> v_;
};

/// Graph z = x^2/2 + a3/6 x^3 + a4/24 x^4 + a5/120 x^5 + O(6) of a planar curve.
template <ScalarType S>
struct SectionJet {
  S a3{0};
  S a4{0};
  S a5{0};
};

/// f3(xi, eta) read from the normalized jet.
template <ScalarType S>
S cubic_form(const BlaschkeFrame<S>& frame, const S& xi, const S& eta);

/// G(xi, eta, X) = xi/2 (xi^2+eta^2) x + eta/2 (xi^2+eta^2) y + f3(xi, eta) z
/// and its partials in xi and eta, as linear forms in X. (xi, eta) need not be unit.
template <ScalarType S>
AffineForm3<S> transon_form(const BlaschkeFrame<S>& frame, const S& xi, const S& eta);
template <ScalarType S>
AffineForm3<S> transon_form_dxi(const BlaschkeFrame<S>& frame, const S& xi, const S& eta);
template <ScalarType S>
AffineForm3<S> transon_form_deta(const BlaschkeFrame<S>& frame, const S& xi, const S& eta);

template <ScalarType S>
Plane3<S> transon_plane(const BlaschkeFrame<S>& frame, const TangentDirection<S>& t);

/// Direction of the line G_xi = G_eta = 0, scaled to z = 1 when possible.
/// Throws DegenerateCone when the two covectors are parallel.
template <ScalarType S>
Vector3<S> su_cone_direction(const BlaschkeFrame<S>& frame, const TangentDirection<S>& t);

/// Projection to the xz-plane of the section by y = lambda z, with T = (1, 0).
template <ScalarType S>
SectionJet<S> section_projection(const BlaschkeFrame<S>& frame, const S& lambda);

template <ScalarType S>
S affine_curvature(const SectionJet<S>& s) {
  return (S(3) * s.a4 - S(5) * s.a3 * s.a3) / S(9);
}

/// Derivative of the affine curvature with respect to affine arc length.
template <ScalarType S>
S affine_curvature_derivative(const SectionJet<S>& s) {
  return (S(9) * s.a5 + S(40) * s.a3 * s.a3 * s.a3 - S(45) * s.a3 * s.a4) / S(27);
}

/// Affine normal (-a3/3, 1) of the planar graph at the origin.
template <ScalarType S>
Vector2<S> section_affine_normal(const SectionJet<S>& s) {
  return {-s.a3 / S(3), S(1)};
}

/// Moutard quadric of direction t, in local coordinates.
template <ScalarType S>
Quadric3<S> moutard_quadric(const BlaschkeFrame<S>& frame, const TangentDirection<S>& t);

/// Center of the Moutard quadric in local coordinates (nullopt = at infinity).
template <ScalarType S>
CenterPoint<S> moutard_center(const BlaschkeFrame<S>& frame, const TangentDirection<S>& t);

/// Center of affine curvature of the section through t and s(t), local coordinates.
template <ScalarType S>
CenterPoint<S> center_of_affine_curvature(const BlaschkeFrame<S>& frame, const TangentDirection<S>& t);

/// Whether a float denominator counts as zero relative to the coefficient scale.
template <ScalarType S>
bool negligible(const S& value, const S& scale) {
  if constexpr (is_exact_v<S>)
    return value.is_zero();
  else
    return std::abs(value) <= 1e-13 * std::max(1.0, std::abs(scale));
}

extern template class TangentDirection<double>;
extern template class TangentDirection<Rational>;

}  // namespace aek
