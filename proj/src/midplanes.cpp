#include "aek/midplanes.hpp"

#include <cmath>

namespace aek {

namespace {

template <ScalarType S>
using J4 = Jet4<S>;

template <ScalarType S>
J4<S> var(int k, int order) {
  return J4<S>::variable(k, order);
}

template <ScalarType S>
J4<S> eval_cubic(const Cubic<S>& c, const J4<S>& x, const J4<S>& y) {
  const J4<S> x2 = x * x;
  const J4<S> y2 = y * y;
  return c.c[0] * (x2 * x) + c.c[1] * (x2 * y) + c.c[2] * (x * y2) + c.c[3] * (y2 * y);
}

template <ScalarType S>
AffineForm3<S> value_form(const LinearFormJet<S>& l) {
  return {Vector3<S>(l.cx.constant_term(), l.cy.constant_term(), l.cz.constant_term()), l.c1.constant_term()};
}

template <ScalarType S>
AffineForm3<S> derivative_form(const LinearFormJet<S>& l, int k) {
  typename J4<S>::Exponents e{};
  e[k] = 1;
  return {Vector3<S>(l.cx.coeff(e), l.cy.coeff(e), l.cz.coeff(e)), l.c1.coeff(e)};
}

template <ScalarType S>
double max_abs(const LinearFormJet<S>& l) {
  return to_double(l.max_abs_coeff());
}

template <ScalarType S>
double form_gap(const AffineForm3<S>& a, const AffineForm3<S>& b) {
  double m = std::abs(to_double(a.constant - b.constant));
  for (int i = 0; i < 3; ++i) m = std::max(m, std::abs(to_double(a.coeffs(i) - b.coeffs(i))));
  return m;
}

template <ScalarType S>
EnvelopeSystem<S> envelope_from_jets(const Jet2<S>& h1, const Jet2<S>& h2, const Vector2<S>& p1,
                                     const Vector2<S>& p2) {
  // Degeneracy is judged against |C| |N1| |N2|, the natural size of the covector.
  const Vector3<S> c((p1(0) - p2(0)) / S(2), (p1(1) - p2(1)) / S(2), (h1.constant_term() - h2.constant_term()) / S(2));
  const Vector3<S> n1(-h1.coeff({1, 0}), -h1.coeff({0, 1}), S(1));
  const Vector3<S> n2(-h2.coeff({1, 0}), -h2.coeff({0, 1}), S(1));
  const Vector3<S> k = n2 * n1.dot(c) + n1 * n2.dot(c);
  bool degenerate;
  if constexpr (is_exact_v<S>)
    degenerate = k.isZero();
  else
    degenerate = k.norm() <= 1e-14 * c.norm() * n1.norm() * n2.norm();
  if (degenerate) throw DegeneratePair("mid-plane covector vanishes (coincident points or parallel tangent planes)");

  const auto l = mid_plane_form(h1, h2, p1, p2, 1);
  EnvelopeSystem<S> sys;
  const auto du1 = derivative_form(l, 0), dv1 = derivative_form(l, 1);
  const auto du2 = derivative_form(l, 2), dv2 = derivative_form(l, 3);
  sys.rows = {value_form(l), du1 - du2, dv1 - dv2, du1 + du2, dv1 + dv2};
  return sys;
}

}  // namespace

template <ScalarType S>
HForms<S> h_forms(const BlaschkeFrame<S>& frame) {
  const S& a = frame.a;
  const S& b = frame.b;
  const S f40 = frame.f4[0], f31 = frame.f4[1], f22 = frame.f4[2], f13 = frame.f4[3], f04 = frame.f4[4];
  const S half(S(1) / S(2));
  const S quarter(S(1) / S(4));
  HForms<S> h;
  h.h1[0].c = {S(5) * a * half, S(-3) * b, S(3) * a * half, S(-2) * b};
  h.h1[1].c = {S(-3) * b * half, S(0), S(-9) * b * half, S(-3) * a};
  h.h1[2].c = {S(2) * f40, S(3) * f31 * half, f22, f13 * half};
  h.h1[3].c = {quarter, S(0), quarter, S(0)};
  h.h2[0].c = {S(-3) * b, S(-9) * a * half, S(0), S(-3) * a * half};
  h.h2[1].c = {S(-2) * a, S(3) * b * half, S(-3) * a, S(5) * b * half};
  h.h2[2].c = {f31 * half, f22, S(3) * f13 * half, S(2) * f04};
  h.h2[3].c = {S(0), quarter, S(0), quarter};
  return h;
}

template <ScalarType S>
LinearFormJet<S> mid_plane_form(const Jet2<S>& h1, const Jet2<S>& h2, const Vector2<S>& p1, const Vector2<S>& p2,
                                int order) {
  const auto du1 = var<S>(0, order), dv1 = var<S>(1, order);
  const auto du2 = var<S>(2, order), dv2 = var<S>(3, order);
  const std::array<J4<S>, 2> s1{du1, dv1};
  const std::array<J4<S>, 2> s2{du2, dv2};

  const J4<S> one = J4<S>::constant(S(1), order);
  const std::array<J4<S>, 3> pt1{J4<S>::constant(p1(0), order) + du1, J4<S>::constant(p1(1), order) + dv1,
                                 compose<S, 2, 4>(h1, s1)};
  const std::array<J4<S>, 3> pt2{J4<S>::constant(p2(0), order) + du2, J4<S>::constant(p2(1), order) + dv2,
                                 compose<S, 2, 4>(h2, s2)};
  const std::array<J4<S>, 3> n1{-compose<S, 2, 4>(partial(h1, 0), s1), -compose<S, 2, 4>(partial(h1, 1), s1), one};
  const std::array<J4<S>, 3> n2{-compose<S, 2, 4>(partial(h2, 0), s2), -compose<S, 2, 4>(partial(h2, 1), s2), one};

  const S half = S(1) / S(2);
  std::array<J4<S>, 3> c{J4<S>(order), J4<S>(order), J4<S>(order)};
  std::array<J4<S>, 3> m{J4<S>(order), J4<S>(order), J4<S>(order)};
  for (int i = 0; i < 3; ++i) {
    c[i] = half * (pt1[i] - pt2[i]);
    m[i] = half * (pt1[i] + pt2[i]);
  }
  J4<S> n1c = n1[0] * c[0] + n1[1] * c[1] + n1[2] * c[2];
  J4<S> n2c = n2[0] * c[0] + n2[1] * c[1] + n2[2] * c[2];
  std::array<J4<S>, 3> k{J4<S>(order), J4<S>(order), J4<S>(order)};
  for (int i = 0; i < 3; ++i) k[i] = n1c * n2[i] + n2c * n1[i];
  const J4<S> offset = k[0] * m[0] + k[1] * m[1] + k[2] * m[2];
  return LinearFormJet<S>(k[0], k[1], k[2], -offset);
}

template <ScalarType S>
LinearFormJet<S> expand_F(const BlaschkeFrame<S>& frame, int order) {
  const Vector2<S> zero = Vector2<S>::Zero();
  return mid_plane_form(frame.normalized, frame.normalized, zero, zero, order);
}

template <ScalarType S>
EnvelopeSystem<S> envelope_system(const SurfaceModel<S>& surface, const Vector2<S>& p1, const Vector2<S>& p2) {
  return envelope_from_jets(surface.jet_at(p1, 2), surface.jet_at(p2, 2), p1, p2);
}

template <ScalarType S>
EnvelopeSystem<S> envelope_system(const BlaschkeFrame<S>& frame, const Vector2<S>& p1, const Vector2<S>& p2) {
  return envelope_from_jets(taylor_shift(frame.normalized, p1), taylor_shift(frame.normalized, p2), p1, p2);
}

template <ScalarType S>
Plane3<S> mid_plane(const SurfaceModel<S>& surface, const Vector2<S>& p1, const Vector2<S>& p2) {
  return Plane3<S>::from_form(envelope_system(surface, p1, p2).rows[0]);
}

template <ScalarType S>
Plane3<S> mid_plane(const BlaschkeFrame<S>& frame, const Vector2<S>& p1, const Vector2<S>& p2) {
  return Plane3<S>::from_form(envelope_system(frame, p1, p2).rows[0]);
}

template <ScalarType S>
LinearFormJet<S> transon_jet(const BlaschkeFrame<S>& frame, int order) {
  const J4<S> du = var<S>(0, order) - var<S>(2, order);
  const J4<S> dv = var<S>(1, order) - var<S>(3, order);
  const J4<S> n2 = du * du + dv * dv;
  const S half = S(1) / S(2);
  const Cubic<S> f3{{frame.f(3, 0), frame.f(2, 1), frame.f(1, 2), frame.f(0, 3)}};
  return LinearFormJet<S>(half * (du * n2), half * (dv * n2), eval_cubic(f3, du, dv), J4<S>(order));
}

template <ScalarType S>
LinearFormJet<S> h_jet(const HForms<S>& h, int order) {
  const J4<S> du = var<S>(0, order) - var<S>(2, order);
  const J4<S> dv = var<S>(1, order) - var<S>(3, order);
  const J4<S> su = var<S>(0, order) + var<S>(2, order);
  const J4<S> sv = var<S>(1, order) + var<S>(3, order);
  auto form = [&](const std::array<Cubic<S>, 4>& hh) {
    return LinearFormJet<S>(eval_cubic(hh[0], du, dv), eval_cubic(hh[1], du, dv), eval_cubic(hh[2], du, dv),
                            -eval_cubic(hh[3], du, dv));
  };
  return su * form(h.h1) + sv * form(h.h2);
}

namespace {

template <ScalarType S>
LemmaReport residual_report(std::string name, const LinearFormJet<S>& residual, std::size_t checked,
                            double float_tol) {
  LemmaReport r;
  r.name = std::move(name);
  r.max_residual = max_abs(residual);
  r.exact_zero = residual.is_zero();
  r.passed = is_exact_v<S> ? r.exact_zero : r.max_residual <= float_tol;
  r.coefficients_checked = checked;
  return r;
}

}  // namespace

template <ScalarType S>
LemmaReport verify_lemma_main3(const BlaschkeFrame<S>& frame, double float_tol) {
  const auto f = expand_F(frame, 4);
  const auto residual = f.up_to_degree(3) - midplane_scale<S>() * transon_jet(frame, 4);
  const auto& table = monomial_table<4>(4);
  return residual_report("main3", residual, 4 * table.degree_start[4], float_tol);
}

template <ScalarType S>
LemmaReport verify_lemma_main4(const BlaschkeFrame<S>& frame, const HForms<S>& h, double float_tol) {
  const auto f = expand_F(frame, 4);
  const auto residual = f.homogeneous_part(4) - midplane_scale<S>() * h_jet(h, 4);
  const auto& table = monomial_table<4>(4);
  return residual_report("main4", residual, 4 * (table.degree_start[5] - table.degree_start[4]), float_tol);
}

ProbeReport fit_convergence(std::vector<double> t, std::vector<double> distance) {
  ProbeReport r;
  r.t = std::move(t);
  r.distance = std::move(distance);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    if (r.distance[i] != 0.0) r.exact_zero = false;
    if (!(r.distance[i] > 0.0) || !(r.t[i] > 0.0)) continue;
    const double x = std::log(r.t[i]);
    const double y = std::log(r.distance[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (r.exact_zero) {
    r.fitted_order = std::numeric_limits<double>::infinity();
  } else if (n < 2) {
    r.fitted_order = std::numeric_limits<double>::quiet_NaN();
  } else {
    r.fitted_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return r;
}

template <ScalarType S>
ProbeReport midplane_limit_probe(const BlaschkeFrame<S>& frame, const TangentDirection<S>& dir,
                                 const std::vector<S>& t_values) {
  const Plane3<S> limit = transon_plane(frame, dir);
  std::vector<double> ts, ds;
  for (const S& t : t_values) {
    const Vector2<S> half_step = dir.vector() * (t / S(2));
    const Plane3<S> p = mid_plane(frame, half_step, Vector2<S>(-half_step));
    ts.push_back(to_double(t));
    if constexpr (is_exact_v<S>) {
      ds.push_back(p == limit ? 0.0 : plane_distance(p, limit));
    } else {
      ds.push_back(plane_distance(p, limit));
    }
  }
  return fit_convergence(std::move(ts), std::move(ds));
}

template <ScalarType S>
std::array<ProbeReport, 4> envelope_limit_probe(const BlaschkeFrame<S>& frame, const TangentDirection<S>& dir,
                                                const std::vector<S>& t_values, const Vector2<S>& offset) {
  const S& xi = dir.xi();
  const S& eta = dir.eta();
  const S two_kappa = S(2) * midplane_scale<S>();
  const HForms<S> h = h_forms(frame);
  const std::array<AffineForm3<S>, 4> limits{two_kappa * transon_form_dxi(frame, xi, eta),
                                             two_kappa * transon_form_deta(frame, xi, eta),
                                             two_kappa * h.h1_form(xi, eta), two_kappa * h.h2_form(xi, eta)};
  std::array<std::vector<double>, 4> ds;
  std::vector<double> ts;
  for (const S& t : t_values) {
    const Vector2<S> c = offset * t;
    const Vector2<S> half_step = dir.vector() * (t / S(2));
    const auto sys = envelope_system(frame, Vector2<S>(c + half_step), Vector2<S>(c - half_step));
    ts.push_back(to_double(t));
    const S t2 = t * t;
    const S t3 = t2 * t;
    for (int k = 0; k < 4; ++k) {
      const S inv = S(1) / (k < 2 ? t2 : t3);
      ds[k].push_back(form_gap(inv * sys.rows[k + 1], limits[k]));
    }
  }
  std::array<ProbeReport, 4> out;
  for (int k = 0; k < 4; ++k) out[k] = fit_convergence(ts, ds[k]);
  return out;
}

#define AEK_MIDPLANES_INSTANTIATE(S)                                                                              \
  template HForms<S> h_forms(const BlaschkeFrame<S>&);                                                            \
  template LinearFormJet<S> mid_plane_form(const Jet2<S>&, const Jet2<S>&, const Vector2<S>&, const Vector2<S>&,  \
                                           int);                                                                  \
  template LinearFormJet<S> expand_F(const BlaschkeFrame<S>&, int);                                               \
  template EnvelopeSystem<S> envelope_system(const SurfaceModel<S>&, const Vector2<S>&, const Vector2<S>&);       \
  template EnvelopeSystem<S> envelope_system(const BlaschkeFrame<S>&, const Vector2<S>&, const Vector2<S>&);      \
  template Plane3<S> mid_plane(const SurfaceModel<S>&, const Vector2<S>&, const Vector2<S>&);                     \
  template Plane3<S> mid_plane(const BlaschkeFrame<S>&, const Vector2<S>&, const Vector2<S>&);                    \
  template LinearFormJet<S> transon_jet(const BlaschkeFrame<S>&, int);                                            \
  template LinearFormJet<S> h_jet(const HForms<S>&, int);                                                         \
  template LemmaReport verify_lemma_main3(const BlaschkeFrame<S>&, double);                                       \
  template LemmaReport verify_lemma_main4(const BlaschkeFrame<S>&, const HForms<S>&, double);                     \
  template ProbeReport midplane_limit_probe(const BlaschkeFrame<S>&, const TangentDirection<S>&,                  \
                                            const std::vector<S>&);                                               \
  template std::array<ProbeReport, 4> envelope_limit_probe(const BlaschkeFrame<S>&, const TangentDirection<S>&,   \
                                                           const std::vector<S>&, const Vector2<S>&);

AEK_MIDPLANES_INSTANTIATE(double)
AEK_MIDPLANES_INSTANTIATE(Rational)
#undef AEK_MIDPLANES_INSTANTIATE

}  // namespace aek
