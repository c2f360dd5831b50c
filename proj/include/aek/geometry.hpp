#pragma once

// Affine maps of 3-space and the implicit objects they act on.

#include "aek/errors.hpp"
#include "aek/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace aek {

/// A point of 3-space that may lie at infinity (nullopt). Used for centers of
/// quadrics, which are legitimately at infinity for paraboloids.
template <ScalarType S>
using CenterPoint = std::optional<Vector3<S>>;

template <ScalarType S>
bool near_zero_det(const S& det, const S& scale) {
  if constexpr (is_exact_v<S>)
    return det.is_zero();
  else
    return std::abs(det) <= 1e-13 * std::max(1.0, scale);
}

/// X -> linear * X + translation, with the inverse kept alongside.
template <ScalarType S>
class AffineMap3 {
 public:
  AffineMap3() : linear_(Matrix3<S>::Identity()), translation_(Vector3<S>::Zero()), inverse_(Matrix3<S>::Identity()) {}

  AffineMap3(const Matrix3<S>& linear, const Vector3<S>& translation) : linear_(linear), translation_(translation) {
    const S det = linear_.determinant();
    if (is_zero(det)) throw std::invalid_argument("AffineMap3: singular linear part");
    inverse_ = linear_.inverse();
  }

  static AffineMap3 identity() { return {}; }

  const Matrix3<S>& linear() const { return linear_; }
  const Vector3<S>& translation() const { return translation_; }
  const Matrix3<S>& inverse_linear() const { return inverse_; }
  S determinant() const { return linear_.determinant(); }

  Vector3<S> apply(const Vector3<S>& p) const { return linear_ * p + translation_; }
  Vector3<S> apply_vector(const Vector3<S>& v) const { return linear_ * v; }
  Vector3<S> apply_inverse(const Vector3<S>& p) const { return inverse_ * (p - translation_); }
  Vector3<S> apply_inverse_vector(const Vector3<S>& v) const { return inverse_ * v; }

  AffineMap3 inverse() const { return AffineMap3(inverse_, Vector3<S>(-(inverse_ * translation_))); }

  /// Homogeneous 4x4 matrix [[L, t], [0, 1]].
  Matrix4<S> homogeneous() const {
    Matrix4<S> m = Matrix4<S>::Zero();
    m.template topLeftCorner<3, 3>() = linear_;
    m.template topRightCorner<3, 1>() = translation_;
    m(3, 3) = S(1);
    return m;
  }

  /// (a * b)(X) = a(b(X)).
  friend AffineMap3 operator*(const AffineMap3& a, const AffineMap3& b) {
    return AffineMap3(a.linear_ * b.linear_, a.linear_ * b.translation_ + a.translation_);
  }

  template <ScalarType T>
  AffineMap3<T> cast() const {
    Matrix3<T> l;
    Vector3<T> t;
    for (int i = 0; i < 3; ++i) {
      t(i) = scalar_cast<T>(translation_(i));
      for (int j = 0; j < 3; ++j) l(i, j) = scalar_cast<T>(linear_(i, j));
    }
    return AffineMap3<T>(l, t);
  }

 private:
  Matrix3<S> linear_;
  Vector3<S> translation_;
  Matrix3<S> inverse_;
};

/// coeffs . X + constant; one row of a linear system in X.
template <ScalarType S>
struct AffineForm3 {
  Vector3<S> coeffs = Vector3<S>::Zero();
  S constant = S(0);

  S operator()(const Vector3<S>& x) const { return coeffs.dot(x) + constant; }

  friend AffineForm3 operator+(const AffineForm3& a, const AffineForm3& b) {
    return {a.coeffs + b.coeffs, a.constant + b.constant};
  }
  friend AffineForm3 operator-(const AffineForm3& a, const AffineForm3& b) {
    return {a.coeffs - b.coeffs, a.constant - b.constant};
  }
  friend AffineForm3 operator*(const S& s, const AffineForm3& a) { return {a.coeffs * s, a.constant * s}; }
  friend bool operator==(const AffineForm3& a, const AffineForm3& b) {
    return a.coeffs == b.coeffs && a.constant == b.constant;
  }
};

/// The plane normal . X = offset, stored with the largest-magnitude normal
/// component equal to +1 (first such component on ties).
template <ScalarType S>
class Plane3 {
 public:
  Plane3(const Vector3<S>& normal, const S& offset) {
    int pivot = 0;
    S best = abs_value(normal(0));
    for (int i = 1; i < 3; ++i) {
      const S a = abs_value(normal(i));
      if (a > best) {
        best = a;
        pivot = i;
      }
    }
    if (is_zero(best)) throw std::invalid_argument("Plane3: zero normal covector");
    const S scale = normal(pivot);
    normal_ = normal / scale;
    offset_ = offset / scale;
  }

  /// The plane form(X) = 0.
  static Plane3 from_form(const AffineForm3<S>& form) { return Plane3(form.coeffs, -form.constant); }

  const Vector3<S>& normal() const { return normal_; }
  const S& offset() const { return offset_; }

  S evaluate(const Vector3<S>& x) const { return normal_.dot(x) - offset_; }

  /// Image under `map` (points transform by map; covectors by its inverse transpose).
  Plane3 transformed(const AffineMap3<S>& map) const {
    const Vector3<S> n = map.inverse_linear().transpose() * normal_;
    return Plane3(n, offset_ + n.dot(map.translation()));
  }

  friend bool operator==(const Plane3& a, const Plane3& b) { return a.normal_ == b.normal_ && a.offset_ == b.offset_; }

 private:
  Vector3<S> normal_;
  S offset_;
};

/// Scale-free distance between planes: angle between normals plus the gap
/// between max-normalized offsets.
template <ScalarType S>
double plane_distance(const Plane3<S>& p, const Plane3<S>& q) {
  Eigen::Vector3d a, b;
  for (int i = 0; i < 3; ++i) {
    a(i) = to_double(p.normal()(i));
    b(i) = to_double(q.normal()(i));
  }
  const double c = std::clamp(std::abs(a.dot(b)) / (a.norm() * b.norm()), 0.0, 1.0);
  // acos loses precision near 1; use the cross-product form instead.
  const double angle = std::atan2(a.cross(b).norm(), a.norm() * b.norm() * c);
  const double sign = a.dot(b) < 0 ? -1.0 : 1.0;
  return angle + std::abs(to_double(p.offset()) - sign * to_double(q.offset()));
}

/// Quadric X^T Q X = 0 in homogeneous coordinates (x, y, z, 1).
template <ScalarType S>
class Quadric3 {
 public:
  explicit Quadric3(const Matrix4<S>& m) : matrix_((m + m.transpose()) / S(2)) {}

  const Matrix4<S>& matrix() const { return matrix_; }

  S evaluate(const Vector3<S>& x) const {
    Vector4<S> h;
    h << x, S(1);
    return h.dot(matrix_ * h);
  }

  /// Center (where the gradient vanishes); nullopt when it lies at infinity.
  CenterPoint<S> center() const {
    const Matrix3<S> a = matrix_.template topLeftCorner<3, 3>();
    const Vector3<S> b = matrix_.template topRightCorner<3, 1>();
    S scale(0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) scale = std::max<S>(scale, abs_value(a(i, j)));
    if (near_zero_det<S>(a.determinant(), S(scale * scale * scale))) return std::nullopt;
    return Vector3<S>(-(a.inverse() * b));
  }

  Quadric3 transformed(const AffineMap3<S>& map) const {
    const Matrix4<S> inv = map.inverse().homogeneous();
    return Quadric3(inv.transpose() * matrix_ * inv);
  }

 private:
  Matrix4<S> matrix_;
};

}  // namespace aek
