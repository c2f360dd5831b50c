#include "aek/invariants.hpp"

#include <numbers>

namespace aek {

template <ScalarType S>
double TangentDirection<S>::angle() const {
  double th = std::atan2(to_double(v_(1)), to_double(v_(0)));
  if (th < 0) th += std::numbers::pi;
  if (th >= std::numbers::pi) th -= std::numbers::pi;
  return th;
}

namespace {

template <ScalarType S>
std::array<S, 4> cubic_coeffs(const BlaschkeFrame<S>& frame) {
  return {frame.f(3, 0), frame.f(2, 1), frame.f(1, 2), frame.f(0, 3)};
}

template <ScalarType S>
S ipow(const S& x, int e) {
  S r(1);
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// Rotated frame plus the rotation taking its coordinates back to the frame's.
template <ScalarType S>
std::pair<BlaschkeFrame<S>, AffineMap3<S>> aligned(const BlaschkeFrame<S>& frame, const TangentDirection<S>& t) {
  return {rotate_frame(frame, t.vector()), local_rotation(t.vector())};
}

}  // namespace

template <ScalarType S>
S cubic_form(const BlaschkeFrame<S>& frame, const S& xi, const S& eta) {
  const auto c = cubic_coeffs(frame);
  S r(0);
  for (int i = 0; i < 4; ++i) r += c[i] * ipow(xi, 3 - i) * ipow(eta, i);
  return r;
}

template <ScalarType S>
AffineForm3<S> transon_form(const BlaschkeFrame<S>& frame, const S& xi, const S& eta) {
  const S n2 = xi * xi + eta * eta;
  return {Vector3<S>(xi * n2 / S(2), eta * n2 / S(2), cubic_form(frame, xi, eta)), S(0)};
}

template <ScalarType S>
AffineForm3<S> transon_form_dxi(const BlaschkeFrame<S>& frame, const S& xi, const S& eta) {
  const auto c = cubic_coeffs(frame);
  S dz(0);
  for (int i = 0; i < 3; ++i) dz += S(3 - i) * c[i] * ipow(xi, 2 - i) * ipow(eta, i);
  return {Vector3<S>((S(3) * xi * xi + eta * eta) / S(2), xi * eta, dz), S(0)};
}

template <ScalarType S>
AffineForm3<S> transon_form_deta(const BlaschkeFrame<S>& frame, const S& xi, const S& eta) {
  const auto c = cubic_coeffs(frame);
  S dz(0);
  for (int i = 1; i < 4; ++i) dz += S(i) * c[i] * ipow(xi, 3 - i) * ipow(eta, i - 1);
  return {Vector3<S>(xi * eta, (xi * xi + S(3) * eta * eta) / S(2), dz), S(0)};
}

template <ScalarType S>
Plane3<S> transon_plane(const BlaschkeFrame<S>& frame, const TangentDirection<S>& t) {
  return Plane3<S>::from_form(transon_form(frame, t.xi(), t.eta()));
}

template <ScalarType S>
Vector3<S> su_cone_direction(const BlaschkeFrame<S>& frame, const TangentDirection<S>& t) {
  const Vector3<S> n1 = transon_form_dxi(frame, t.xi(), t.eta()).coeffs;
  const Vector3<S> n2 = transon_form_deta(frame, t.xi(), t.eta()).coeffs;
  const Vector3<S> d = n1.cross(n2);
  S scale(0);
  for (int i = 0; i < 3; ++i) scale = std::max<S>(scale, abs_value(d(i)));
  bool degenerate;
  if constexpr (is_exact_v<S>)
    degenerate = scale.is_zero();
  else
    degenerate = scale <= 1e-14 * n1.norm() * n2.norm();
  if (degenerate) throw DegenerateCone("G_xi and G_eta have parallel covectors");
  if (!is_zero(d(2))) return d / d(2);
  return d / scale;
}

template <ScalarType S>
SectionJet<S> section_projection(const BlaschkeFrame<S>& frame, const S& lambda) {
  const int order = frame.normalized.order();
  const auto x = Jet1<S>::variable(0, order);
  Jet1<S> g(order);
  for (int it = 0; it < order; ++it) g = compose<S, 2, 1>(frame.normalized, {x, lambda * g});
  return {S(6) * g.coeff({3}), S(24) * g.coeff({4}), S(120) * g.coeff({5})};
}

template <ScalarType S>
Quadric3<S> moutard_quadric(const BlaschkeFrame<S>& frame, const TangentDirection<S>& t) {
  const auto [g, back] = aligned(frame, t);
  const S f30 = g.f(3, 0);
  const S f21 = g.f(2, 1);
  // 1/2 (x^2 + y^2) + 2 f21 y z + 2 f30 x z + 4 (f40 - 2 f30^2) z^2 - z = 0
  Matrix4<S> m = Matrix4<S>::Zero();
  m(0, 0) = S(1) / S(2);
  m(1, 1) = S(1) / S(2);
  m(0, 2) = m(2, 0) = f30;
  m(1, 2) = m(2, 1) = f21;
  m(2, 2) = S(4) * (g.f40() - S(2) * f30 * f30);
  m(2, 3) = m(3, 2) = S(-1) / S(2);
  return Quadric3<S>(m).transformed(back);
}

template <ScalarType S>
CenterPoint<S> moutard_center(const BlaschkeFrame<S>& frame, const TangentDirection<S>& t) {
  const auto [g, back] = aligned(frame, t);
  const S f30 = g.f(3, 0);
  const S f21 = g.f(2, 1);
  const S den = S(4) * (S(2) * g.f40() - S(5) * f30 * f30 - f21 * f21);
  const S scale = S(8) * abs_value(g.f40()) + S(20) * f30 * f30 + S(4) * f21 * f21;
  if (negligible(den, scale)) return std::nullopt;
  return back.apply(Vector3<S>(S(-2) * f30 / den, S(-2) * f21 / den, S(1) / den));
}

template <ScalarType S>
CenterPoint<S> center_of_affine_curvature(const BlaschkeFrame<S>& frame, const TangentDirection<S>& t) {
  const auto [g, back] = aligned(frame, t);
  // The plane spanned by T = (1,0,0) and s(T) is y = lambda z.
  const S lambda = S(-2) * g.f(2, 1);
  const SectionJet<S> sec = section_projection(g, lambda);
  const S mu = affine_curvature(sec);
  const S scale = (S(3) * abs_value(sec.a4) + S(5) * sec.a3 * sec.a3) / S(9);
  if (negligible(mu, scale)) return std::nullopt;
  const Vector2<S> n = section_affine_normal(sec);
  // In-plane coordinates (x, z) embed as x e1 + z (0, lambda, 1).
  return back.apply(Vector3<S>(n(0) / mu, lambda * n(1) / mu, n(1) / mu));
}

template class TangentDirection<double>;
template class TangentDirection<Rational>;

#define AEK_INVARIANTS_INSTANTIATE(S)                                                                 \
  template S cubic_form(const BlaschkeFrame<S>&, const S&, const S&);                                 \
  template AffineForm3<S> transon_form(const BlaschkeFrame<S>&, const S&, const S&);                  \
  template AffineForm3<S> transon_form_dxi(const BlaschkeFrame<S>&, const S&, const S&);              \
  template AffineForm3<S> transon_form_deta(const BlaschkeFrame<S>&, const S&, const S&);             \
  template Plane3<S> transon_plane(const BlaschkeFrame<S>&, const TangentDirection<S>&);              \
  template Vector3<S> su_cone_direction(const BlaschkeFrame<S>&, const TangentDirection<S>&);         \
  template SectionJet<S> section_projection(const BlaschkeFrame<S>&, const S&);                       \
  template Quadric3<S> moutard_quadric(const BlaschkeFrame<S>&, const TangentDirection<S>&);          \
  template CenterPoint<S> moutard_center(const BlaschkeFrame<S>&, const TangentDirection<S>&);        \
  template CenterPoint<S> center_of_affine_curvature(const BlaschkeFrame<S>&, const TangentDirection<S>&);

AEK_INVARIANTS_INSTANTIATE(double)
AEK_INVARIANTS_INSTANTIATE(Rational)
#undef AEK_INVARIANTS_INSTANTIATE

}  // namespace aek
