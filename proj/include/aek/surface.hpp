#pragma once

// Locally convex surfaces given as graphs z = phi(u, v) over a chart patch.

#include "aek/geometry.hpp"
#include "aek/jet.hpp"

#include <variant>
#include <vector>

namespace aek {

struct Patch {
  double u_min = -1.0;
  double u_max = 1.0;
  double v_min = -1.0;
  double v_max = 1.0;

  bool contains(double u, double v, double margin = 0.0) const {
    return u >= u_min + margin && u <= u_max - margin && v >= v_min + margin && v <= v_max - margin;
  }
};

template <ScalarType S>
class SurfaceModel {
 public:
  /// Global polynomial height; the jet order is the polynomial's degree.
  struct Polynomial {
    Jet2<S> height;
  };
  /// Lower cap of the sphere of the given radius centred at (0, 0, radius):
  /// z = r - sqrt(r^2 - u^2 - v^2).
  struct SphereCap {
    S radius;
  };

  static SurfaceModel polynomial(Jet2<S> height, Patch patch) {
    return SurfaceModel(Polynomial{std::move(height)}, patch);
  }
  static SurfaceModel sphere_cap(S radius, Patch patch) { return SurfaceModel(SphereCap{std::move(radius)}, patch); }

  const Patch& patch() const { return patch_; }
  bool is_polynomial() const { return std::holds_alternative<Polynomial>(shape_); }
  const Jet2<S>& polynomial_height() const { return std::get<Polynomial>(shape_).height; }
  const S& sphere_radius() const { return std::get<SphereCap>(shape_).radius; }

  /// Taylor jet of the height at `p`, in the displacement from `p`.
  /// Throws NotRepresentable when an exact jet would need irrational values.
  Jet2<S> jet_at(const Vector2<S>& p, int order) const;

  S height(const Vector2<S>& p) const { return jet_at(p, 0).constant_term(); }

  /// Hessian of the height at p (chart coordinates).
  Matrix2<S> hessian(const Vector2<S>& p) const;

  /// Image under a chart-compatible affine map of 3-space,
  /// (u, v, z) -> (B (u, v) + t, w . (u, v) + c z + gamma).
  /// Only polynomial surfaces can be transformed; the new patch is the
  /// bounding box of the image of the old one.
  SurfaceModel transformed(const AffineMap3<S>& map) const;

  template <ScalarType T>
  SurfaceModel<T> cast() const {
    if (is_polynomial()) return SurfaceModel<T>::polynomial(polynomial_height().template cast<T>(), patch_);
    return SurfaceModel<T>::sphere_cap(scalar_cast<T>(sphere_radius()), patch_);
  }

 private:
  SurfaceModel(std::variant<Polynomial, SphereCap> shape, Patch patch) : shape_(std::move(shape)), patch_(patch) {}

  std::variant<Polynomial, SphereCap> shape_;
  Patch patch_;
};

/// Chart points of a samples x samples grid over the patch where the height
/// Hessian fails to be positive definite (evaluated in floating point).
template <ScalarType S>
std::vector<Eigen::Vector2d> convexity_violations(const SurfaceModel<S>& surface, int samples = 9);

/// Throws NonConvexPoint listing the first violation, if any.
template <ScalarType S>
void require_convex(const SurfaceModel<S>& surface, int samples = 9);

extern template class SurfaceModel<double>;
extern template class SurfaceModel<Rational>;

}  // namespace aek
