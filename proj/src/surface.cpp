#include "aek/surface.hpp"

#include <algorithm>
#include <sstream>

namespace aek {

namespace {

template <ScalarType S>
S require_sqrt(const S& v, const char* what) {
  auto r = exact_root(v, 2);
  if (!r) throw NotRepresentable(std::string(what) + " is not exactly representable in rational mode");
  return *r;
}

}  // namespace

template <ScalarType S>
Jet2<S> SurfaceModel<S>::jet_at(const Vector2<S>& p, int order) const {
  if (const auto* poly = std::get_if<Polynomial>(&shape_)) {
    return taylor_shift(poly->height, p).with_order(order);
  }
  const S& r = std::get<SphereCap>(shape_).radius;
  const S w0 = r * r - p(0) * p(0) - p(1) * p(1);
  if (w0 <= S(0)) throw PatchBounds("point lies outside the sphere cap's chart disc");
  const S s0 = require_sqrt(w0, "sphere height");
  if (order == 0) return Jet2<S>::constant(r - s0, 0);

  // r^2 - (u0 + x)^2 - (v0 + y)^2 = w0 - h
  const auto x = Jet2<S>::variable(0, order);
  const auto y = Jet2<S>::variable(1, order);
  const Jet2<S> h = S(2) * p(0) * x + x * x + S(2) * p(1) * y + y * y;

  // sqrt(w0 - h) = s0 * sum_k binom(1/2, k) (-h / w0)^k
  std::vector<S> series;
  S binom(1);
  S scale(1);
  for (int k = 0; k <= order; ++k) {
    series.push_back(s0 * binom * scale);
    binom = binom * (S(1) / S(2) - S(k)) / S(k + 1);
    scale = scale * (S(-1) / w0);
  }
  return Jet2<S>::constant(r, order) - series_compose<S, 2>(series, h);
}

template <ScalarType S>
Matrix2<S> SurfaceModel<S>::hessian(const Vector2<S>& p) const {
  const auto j = jet_at(p, 2);
  Matrix2<S> m;
  m << S(2) * j.coeff({2, 0}), j.coeff({1, 1}), j.coeff({1, 1}), S(2) * j.coeff({0, 2});
  return m;
}

template <ScalarType S>
SurfaceModel<S> SurfaceModel<S>::transformed(const AffineMap3<S>& map) const {
  if (!is_polynomial()) throw std::invalid_argument("only polynomial surfaces can be transformed");
  const Matrix3<S>& l = map.linear();
  if (!is_zero(l(0, 2)) || !is_zero(l(1, 2)) || is_zero(l(2, 2)))
    throw std::invalid_argument("map does not preserve the graph structure over the chart");
  const Matrix2<S> b = l.template topLeftCorner<2, 2>();
  if (is_zero(b.determinant())) throw std::invalid_argument("singular chart map");
  const Matrix2<S> m = b.inverse();
  const Vector2<S> t = map.translation().template head<2>();
  const Vector2<S> shift = -(m * t);
  const S c = l(2, 2);
  const Vector2<S> w(l(2, 0), l(2, 1));
  const S gamma = map.translation()(2);

  const Jet2<S>& phi = polynomial_height();
  const int order = phi.order();
  const auto x = Jet2<S>::variable(0, order);
  const auto y = Jet2<S>::variable(1, order);
  const Jet2<S> mx = m(0, 0) * x + m(0, 1) * y;
  const Jet2<S> my = m(1, 0) * x + m(1, 1) * y;
  Jet2<S> height = c * compose<S, 2, 2>(taylor_shift(phi, shift), {mx, my});
  height += w(0) * mx + w(1) * my + Jet2<S>::constant(w.dot(shift) + gamma, order);

  // Bounding box of the transformed patch corners.
  double u_lo = 1e300, u_hi = -1e300, v_lo = 1e300, v_hi = -1e300;
  for (double u : {patch_.u_min, patch_.u_max})
    for (double v : {patch_.v_min, patch_.v_max}) {
      const double nu = to_double(b(0, 0)) * u + to_double(b(0, 1)) * v + to_double(t(0));
      const double nv = to_double(b(1, 0)) * u + to_double(b(1, 1)) * v + to_double(t(1));
      u_lo = std::min(u_lo, nu);
      u_hi = std::max(u_hi, nu);
      v_lo = std::min(v_lo, nv);
      v_hi = std::max(v_hi, nv);
    }
  return polynomial(std::move(height), Patch{u_lo, u_hi, v_lo, v_hi});
}

template <ScalarType S>
std::vector<Eigen::Vector2d> convexity_violations(const SurfaceModel<S>& surface, int samples) {
  const SurfaceModel<double> approx = surface.template cast<double>();
  const Patch& patch = surface.patch();
  std::vector<Eigen::Vector2d> out;
  const int n = std::max(samples, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = patch.u_min + (patch.u_max - patch.u_min) * i / (n - 1);
      const double v = patch.v_min + (patch.v_max - patch.v_min) * j / (n - 1);
      bool convex = false;
      try {
        const Eigen::Matrix2d h = approx.hessian(Eigen::Vector2d(u, v));
        convex = h(0, 0) > 0 && h.determinant() > 0;
      } catch (const GeometryError&) {
        convex = false;
      }
      if (!convex) out.emplace_back(u, v);
    }
  return out;
}

template <ScalarType S>
void require_convex(const SurfaceModel<S>& surface, int samples) {
  const auto bad = convexity_violations(surface, samples);
  if (bad.empty()) return;
  std::ostringstream msg;
  msg << "Hessian is not positive definite at chart point (" << bad.front()(0) << ", " << bad.front()(1) << ")";
  if (bad.size() > 1) msg << " and " << bad.size() - 1 << " other sample(s)";
  throw NonConvexPoint(msg.str());
}

template class SurfaceModel<double>;
template class SurfaceModel<Rational>;
template std::vector<Eigen::Vector2d> convexity_violations(const SurfaceModel<double>&, int);
template std::vector<Eigen::Vector2d> convexity_violations(const SurfaceModel<Rational>&, int);
template void require_convex(const SurfaceModel<double>&, int);
template void require_convex(const SurfaceModel<Rational>&, int);

}  // namespace aek
