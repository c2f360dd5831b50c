#pragma once

// Blaschke normal form of a convex surface at a point.
//
// In local coordinates (x, y, z) the surface is the graph
//
//   z = 1/2 (x^2 + y^2) + f3(x, y) + f4(x, y) + f5(x, y) + O(6),
//   f3 = a (x^3 - 3 x y^2) + b (y^3 - 3 y x^2),
//
// i.e. the cubic part is apolar, the affine normal at the origin is (0, 0, 1)
// and world_from_local is unimodular (equi-affine normalization).

#include "aek/geometry.hpp"
#include "aek/jet.hpp"
#include "aek/surface.hpp"

#include <array>

namespace aek {

template <ScalarType S>
struct BlaschkeFrame {
  Jet2<S> normalized{5};
  AffineMap3<S> world_from_local;
  /// Chart coordinates of the base point (zero for synthetic frames).
  Vector2<S> base_point = Vector2<S>::Zero();
  S a{0};
  S b{0};
  /// f_{4-i,i}, i = 0..4.
  std::array<S, 5> f4{};
  S f50{0};
  S f31{0};

  /// Coefficient f_{i,j} of the normalized jet.
  S f(int i, int j) const { return normalized.coeff({i, j}); }
  S f40() const { return f4[0]; }
  S f22() const { return f4[2]; }
  S f13() const { return f4[3]; }
  S f04() const { return f4[4]; }

  /// (3 f30 + f12, 3 f03 + f21); both vanish for a normalized frame.
  Vector2<S> apolarity_residuals() const {
    return {S(3) * f(3, 0) + f(1, 2), S(3) * f(0, 3) + f(2, 1)};
  }

  /// Frame with world_from_local = identity built directly from normal-form
  /// coefficients; f5 lists f_{5-i,i}, i = 0..5.
  static BlaschkeFrame from_coefficients(const S& a, const S& b, const std::array<S, 5>& f4,
                                         const std::array<S, 6>& f5 = {});

  /// Re-reads a, b, f4, f50, f31 from the normalized jet.
  void refresh_coefficients();

  template <ScalarType T>
  BlaschkeFrame<T> cast() const {
    BlaschkeFrame<T> out;
    out.normalized = normalized.template cast<T>();
    out.world_from_local = world_from_local.template cast<T>();
    out.base_point = Vector2<T>(scalar_cast<T>(base_point(0)), scalar_cast<T>(base_point(1)));
    out.refresh_coefficients();
    return out;
  }
};

struct NormalizeOptions {
  int order = 5;
  /// Float-mode bound on the apolarity combinations after normalization.
  double apolarity_tolerance = 1e-10;
};

/// Normal form of `surface` at chart point p0.
/// Throws PatchBounds, NonConvexPoint, and (rational mode) NotRepresentable
/// when the normalizing map needs irrational entries.
template <ScalarType S>
BlaschkeFrame<S> normalize_at(const SurfaceModel<S>& surface, const Vector2<S>& p0,
                              const NormalizeOptions& options = {});

/// Rotates the local (x, y) axes so the new first axis is `direction`
/// (a unit vector in the current local coordinates): x_old = R x_new.
template <ScalarType S>
BlaschkeFrame<S> rotate_frame(const BlaschkeFrame<S>& frame, const Vector2<S>& direction);

BlaschkeFrame<double> rotate_frame(const BlaschkeFrame<double>& frame, double angle);

/// Rotation of local coordinates as an affine map (x_old = map(x_new)).
template <ScalarType S>
AffineMap3<S> local_rotation(const Vector2<S>& direction) {
  Matrix3<S> r = Matrix3<S>::Identity();
  r(0, 0) = direction(0);
  r(0, 1) = -direction(1);
  r(1, 0) = direction(1);
  r(1, 1) = direction(0);
  return AffineMap3<S>(r, Vector3<S>::Zero());
}

// Local -> world.
template <ScalarType S>
Vector3<S> pull_back_point(const BlaschkeFrame<S>& frame, const Vector3<S>& p) {
  return frame.world_from_local.apply(p);
}
template <ScalarType S>
Vector3<S> pull_back_vector(const BlaschkeFrame<S>& frame, const Vector3<S>& v) {
  return frame.world_from_local.apply_vector(v);
}
template <ScalarType S>
Plane3<S> pull_back(const BlaschkeFrame<S>& frame, const Plane3<S>& plane) {
  return plane.transformed(frame.world_from_local);
}
template <ScalarType S>
Quadric3<S> pull_back(const BlaschkeFrame<S>& frame, const Quadric3<S>& quadric) {
  return quadric.transformed(frame.world_from_local);
}
template <ScalarType S>
CenterPoint<S> pull_back(const BlaschkeFrame<S>& frame, const CenterPoint<S>& p) {
  if (!p) return std::nullopt;
  return pull_back_point(frame, *p);
}

// World -> local.
template <ScalarType S>
Vector3<S> push_forward_point(const BlaschkeFrame<S>& frame, const Vector3<S>& p) {
  return frame.world_from_local.apply_inverse(p);
}
template <ScalarType S>
Vector3<S> push_forward_vector(const BlaschkeFrame<S>& frame, const Vector3<S>& v) {
  return frame.world_from_local.apply_inverse_vector(v);
}
template <ScalarType S>
Plane3<S> push_forward(const BlaschkeFrame<S>& frame, const Plane3<S>& plane) {
  return plane.transformed(frame.world_from_local.inverse());
}
template <ScalarType S>
Quadric3<S> push_forward(const BlaschkeFrame<S>& frame, const Quadric3<S>& quadric) {
  return quadric.transformed(frame.world_from_local.inverse());
}

extern template struct BlaschkeFrame<double>;
extern template struct BlaschkeFrame<Rational>;

}  // namespace aek
