#include "aek/frame.hpp"

#include <sstream>

namespace aek {

namespace {

template <ScalarType S>
S require_root(const S& v, int n, const char* what) {
  auto r = exact_root(v, n);
  if (!r) throw NotRepresentable(std::string(what) + " has no exact rational value");
  return *r;
}

template <ScalarType S>
void check_apolar(const BlaschkeFrame<S>& frame, double tol) {
  const Vector2<S> r = frame.apolarity_residuals();
  if constexpr (is_exact_v<S>) {
    if (!r(0).is_zero() || !r(1).is_zero()) throw std::logic_error("normalization left a non-apolar cubic");
  } else {
    if (std::abs(r(0)) > tol || std::abs(r(1)) > tol) {
      std::ostringstream msg;
      msg << "apolarity residuals (" << r(0) << ", " << r(1) << ") exceed " << tol;
      throw std::logic_error(msg.str());
    }
  }
}

}  // namespace

template <ScalarType S>
void BlaschkeFrame<S>::refresh_coefficients() {
  a = f(3, 0);
  b = f(0, 3);
  for (int i = 0; i < 5; ++i) f4[i] = f(4 - i, i);
  f50 = f(5, 0);
  f31 = f(3, 1);
}

template <ScalarType S>
BlaschkeFrame<S> BlaschkeFrame<S>::from_coefficients(const S& a, const S& b, const std::array<S, 5>& f4,
                                                     const std::array<S, 6>& f5) {
  BlaschkeFrame out;
  Jet2<S> j(5);
  j.set_coeff({2, 0}, S(1) / S(2));
  j.set_coeff({0, 2}, S(1) / S(2));
  j.set_coeff({3, 0}, a);
  j.set_coeff({1, 2}, S(-3) * a);
  j.set_coeff({0, 3}, b);
  j.set_coeff({2, 1}, S(-3) * b);
  for (int i = 0; i < 5; ++i) j.set_coeff({4 - i, i}, f4[i]);
  for (int i = 0; i < 6; ++i) j.set_coeff({5 - i, i}, f5[i]);
  out.normalized = std::move(j);
  out.refresh_coefficients();
  return out;
}

template <ScalarType S>
BlaschkeFrame<S> normalize_at(const SurfaceModel<S>& surface, const Vector2<S>& p0, const NormalizeOptions& options) {
  const int order = options.order;
  if (!surface.patch().contains(to_double(p0(0)), to_double(p0(1)))) {
    std::ostringstream msg;
    msg << "chart point (" << to_double(p0(0)) << ", " << to_double(p0(1)) << ") lies outside the patch";
    throw PatchBounds(msg.str());
  }

  // (i) recentre and drop the tangent affine part.
  Jet2<S> j = surface.jet_at(p0, order);
  const S z0 = j.constant_term();
  const Vector2<S> g(j.coeff({1, 0}), j.coeff({0, 1}));
  Matrix2<S> h;
  h << S(2) * j.coeff({2, 0}), j.coeff({1, 1}), j.coeff({1, 1}), S(2) * j.coeff({0, 2});
  const S det_h = h.determinant();
  if (!(h(0, 0) > S(0)) || !(det_h > S(0))) {
    std::ostringstream msg;
    msg << "Hessian at (" << to_double(p0(0)) << ", " << to_double(p0(1)) << ") is not positive definite";
    throw NonConvexPoint(msg.str());
  }
  j[0] = S(0);
  j.set_coeff({1, 0}, S(0));
  j.set_coeff({0, 1}, S(0));

  // (ii) (x, y) = L (x~, y~), z = c z~ with L^T H L = c I and det(L) c = 1.
  const S sqrt_det = require_root(det_h, 2, "sqrt(det Hessian)");
  const S sqrt_h_scale = require_root(S(h.trace() + S(2) * sqrt_det), 2, "Hessian square root");
  const Matrix2<S> sqrt_h = (h + sqrt_det * Matrix2<S>::Identity()) / sqrt_h_scale;
  const S s = require_root(det_h, 8, "det(Hessian)^(1/8)");
  const S c = s * s;
  const Matrix2<S> l = sqrt_h.inverse() * s;

  const auto x = Jet2<S>::variable(0, order);
  const auto y = Jet2<S>::variable(1, order);
  Jet2<S> k = compose<S, 2, 2>(j, {l(0, 0) * x + l(0, 1) * y, l(1, 0) * x + l(1, 1) * y});
  k *= S(1) / c;

  // (iii) shear x~ = x + alpha z, y~ = y + beta z and solve z = K(x + alpha z, y + beta z).
  const S alpha = -(S(3) * k.coeff({3, 0}) + k.coeff({1, 2})) / S(2);
  const S beta = -(S(3) * k.coeff({0, 3}) + k.coeff({2, 1})) / S(2);
  Jet2<S> zbar(order);
  for (int it = 0; it < order; ++it) zbar = compose<S, 2, 2>(k, {x + alpha * zbar, y + beta * zbar});

  Matrix3<S> t_lin = Matrix3<S>::Identity();
  t_lin(2, 0) = g(0);
  t_lin(2, 1) = g(1);
  Matrix3<S> scale = Matrix3<S>::Zero();
  scale.template topLeftCorner<2, 2>() = l;
  scale(2, 2) = c;
  Matrix3<S> shear = Matrix3<S>::Identity();
  shear(0, 2) = alpha;
  shear(1, 2) = beta;

  BlaschkeFrame<S> frame;
  frame.normalized = zbar.with_order(5);
  frame.world_from_local = AffineMap3<S>(t_lin * scale * shear, Vector3<S>(p0(0), p0(1), z0));
  frame.base_point = p0;
  frame.refresh_coefficients();
  check_apolar(frame, options.apolarity_tolerance);
  return frame;
}

template <ScalarType S>
BlaschkeFrame<S> rotate_frame(const BlaschkeFrame<S>& frame, const Vector2<S>& direction) {
  const S& c = direction(0);
  const S& s = direction(1);
  if constexpr (is_exact_v<S>) {
    if (c * c + s * s != S(1)) throw std::invalid_argument("rotate_frame: direction is not a unit vector");
  } else {
    if (std::abs(c * c + s * s - 1.0) > 1e-12) throw std::invalid_argument("rotate_frame: direction is not a unit vector");
  }
  const int order = frame.normalized.order();
  const auto x = Jet2<S>::variable(0, order);
  const auto y = Jet2<S>::variable(1, order);
  BlaschkeFrame<S> out;
  out.normalized = compose<S, 2, 2>(frame.normalized, {c * x - s * y, s * x + c * y});
  out.world_from_local = frame.world_from_local * local_rotation(direction);
  out.base_point = frame.base_point;
  out.refresh_coefficients();
  return out;
}

BlaschkeFrame<double> rotate_frame(const BlaschkeFrame<double>& frame, double angle) {
  return rotate_frame(frame, Eigen::Vector2d(std::cos(angle), std::sin(angle)));
}

template struct BlaschkeFrame<double>;
template struct BlaschkeFrame<Rational>;
template BlaschkeFrame<double> normalize_at(const SurfaceModel<double>&, const Vector2<double>&,
                                            const NormalizeOptions&);
template BlaschkeFrame<Rational> normalize_at(const SurfaceModel<Rational>&, const Vector2<Rational>&,
                                              const NormalizeOptions&);
template BlaschkeFrame<double> rotate_frame(const BlaschkeFrame<double>&, const Vector2<double>&);
template BlaschkeFrame<Rational> rotate_frame(const BlaschkeFrame<Rational>&, const Vector2<Rational>&);

}  // namespace aek
