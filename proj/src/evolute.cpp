#include "aek/evolute.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace aek {

namespace {

template <ScalarType S>
S power(const S& x, int n) {
  S r(1);
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

template <ScalarType S>
S max_abs(const auto& values) {
  S m(0);
  for (const auto& v : values) m = std::max<S>(m, abs_value(v));
  return m;
}

double wrap_pi(double theta) {
  constexpr double pi = std::numbers::pi;
  theta = std::fmod(theta, pi);
  if (theta < 0) theta += pi;
  if (theta >= pi) theta -= pi;
  return theta;
}

double circular_gap(double a, double b, double period) {
  const double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

template <ScalarType S>
Matrix3<S> drop_row(const Matrix4<S>& m, int row, int col) {
  Matrix3<S> out;
  for (int i = 0, r = 0; i < 4; ++i) {
    if (i == row) continue;
    for (int j = 0, c = 0; j < 4; ++j) {
      if (j == col) continue;
      out(r, c++) = m(i, j);
    }
    ++r;
  }
  return out;
}

// Absolute threshold below which a float determinant of entries bounded by scale is zero.
template <ScalarType S>
bool det_vanishes(const S& det, const S& scale, double tol) {
  if constexpr (is_exact_v<S>)
    return det.is_zero();
  else
    return std::abs(det) <= tol * std::max(1.0, scale * scale * scale);
}

}  // namespace

template <ScalarType S>
S DirectionSextic<S>::eval(const std::array<S, 7>& c, const S& xi, const S& eta) {
  S r(0);
  for (int i = 0; i < 7; ++i) r += c[i] * power(xi, 6 - i) * power(eta, i);
  return r;
}

template <ScalarType S>
S DirectionSextic<S>::angular_derivative(const S& xi, const S& eta) const {
  S dxi(0), deta(0);
  for (int i = 0; i < 7; ++i) {
    if (i < 6) dxi += S(6 - i) * q[i] * power(xi, 5 - i) * power(eta, i);
    if (i > 0) deta += S(i) * q[i] * power(xi, 6 - i) * power(eta, i - 1);
  }
  return -eta * dxi + xi * deta;
}

template <ScalarType S>
S DirectionSextic<S>::scale() const {
  return max_abs<S>(q);
}

template <ScalarType S>
DirectionSextic<S> direction_sextic(const BlaschkeFrame<S>& frame) {
  const S& a = frame.a;
  const S& b = frame.b;
  const S ab = a * b;
  const S d = a * a - b * b;
  const S f40 = frame.f40(), f31 = frame.f4[1], f22 = frame.f22(), f13 = frame.f13(), f04 = frame.f04();
  DirectionSextic<S> s;
  s.q3 = {ab, S(3) * d, S(-15) * ab, S(-10) * d, S(15) * ab, S(3) * d, -ab};
  s.q4 = {-f31,
          S(4) * f40 - S(2) * f22,
          S(2) * f31 - S(3) * f13,
          S(4) * (f40 - f04),
          S(3) * f31 - S(2) * f13,
          S(2) * f22 - S(4) * f04,
          f13};
  for (int i = 0; i < 7; ++i) s.q[i] = S(12) * s.q3[i] + s.q4[i];
  return s;
}

template <ScalarType S>
Matrix4<S> limit_system_matrix(const BlaschkeFrame<S>& frame, const S& xi, const S& eta) {
  const auto h = h_forms(frame);
  const std::array<AffineForm3<S>, 4> rows{transon_form_dxi(frame, xi, eta), transon_form_deta(frame, xi, eta),
                                           h.h1_form(xi, eta), h.h2_form(xi, eta)};
  Matrix4<S> m;
  for (int i = 0; i < 4; ++i) {
    m.template block<1, 3>(i, 0) = rows[i].coeffs.transpose();
    m(i, 3) = rows[i].constant;
  }
  return m;
}

template <ScalarType S>
S discriminant_D(const BlaschkeFrame<S>& frame, const S& xi, const S& eta) {
  return limit_system_matrix(frame, xi, eta).determinant();
}

DirectionSet directions_of(const DirectionSextic<double>& q, double frame_scale, const DirectionOptions& options) {
  DirectionSet out;
  const double qs = q.scale();
  if (qs <= options.zero_tol * std::max(1.0, frame_scale)) {
    out.identically_zero = true;
    return out;
  }
  const auto g = [&](double th) { return q(std::cos(th), std::sin(th)); };
  const auto dg = [&](double th) { return q.angular_derivative(std::cos(th), std::sin(th)); };

  std::vector<double> candidates{std::numbers::pi / 2};
  int n = 6;
  while (n > 0 && std::abs(q.q[n]) <= 1e-14 * qs) --n;
  if (n > 0) {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -q.q[i] / q.q[n];
    const Eigen::VectorXcd roots = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();
    for (const auto& r : roots)
      if (std::abs(r.imag()) <= 1e-6 * (1.0 + std::abs(r))) candidates.push_back(std::atan(r.real()));
  }

  std::vector<DirectionRoot> found;
  for (double th : candidates) {
    for (int it = 0; it < 3; ++it) {
      const double d = dg(th);
      if (d == 0.0) break;
      const double step = g(th) / d;
      if (std::abs(step) > 1e-3) break;
      th -= step;
    }
    th = wrap_pi(th);
    if (std::abs(g(th)) > options.root_tol * qs) continue;
    const bool duplicate = std::any_of(found.begin(), found.end(), [&](const DirectionRoot& r) {
      return circular_gap(r.theta, th, std::numbers::pi) < 1e-7;
    });
    if (duplicate) continue;
    DirectionRoot root;
    root.theta = th;
    root.q_value = g(th);
    root.q_derivative = dg(th);
    root.simple = std::abs(root.q_derivative) >= options.multiple_tol * qs;
    found.push_back(root);
  }
  std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return x.theta < y.theta; });
  out.roots = std::move(found);
  return out;
}

template <ScalarType S>
DirectionSet evolute_directions(const BlaschkeFrame<S>& frame, const DirectionOptions& options) {
  const auto q = direction_sextic(frame);
  if constexpr (is_exact_v<S>) {
    if (std::all_of(q.q.begin(), q.q.end(), [](const S& c) { return c.is_zero(); })) return {true, {}};
  }
  DirectionSextic<double> qd;
  for (int i = 0; i < 7; ++i) {
    qd.q3[i] = to_double(q.q3[i]);
    qd.q4[i] = to_double(q.q4[i]);
    qd.q[i] = to_double(q.q[i]);
  }
  const double a = to_double(frame.a), b = to_double(frame.b);
  double scale = 12.0 * (a * a + b * b);
  for (const auto& c : frame.f4) scale = std::max(scale, std::abs(to_double(c)));
  return directions_of(qd, scale, options);
}

template <ScalarType S>
SectionJet<S> gamma_section(const BlaschkeFrame<S>& frame) {
  const S& a = frame.a;
  const S& b = frame.b;
  SectionJet<S> s;
  s.a3 = S(6) * a;
  s.a4 = S(24) * (frame.f40() - S(9) * b * b / S(2));
  s.a5 = S(120) * (S(-27) * a * b * b + S(3) * b * frame.f4[1] + frame.f50);
  return s;
}

template <ScalarType S>
S mu_gamma_prime(const BlaschkeFrame<S>& frame, const TangentDirection<S>& t) {
  return affine_curvature_derivative(gamma_section(rotate_frame(frame, t.vector())));
}

template <ScalarType S>
EvoluteSolution<S> solve_evolute_point(const BlaschkeFrame<S>& frame, const TangentDirection<S>& t,
                                       const SolveOptions& options) {
  const S& xi = t.xi();
  const S& eta = t.eta();
  const auto q = direction_sextic(frame);
  const S qv = q(xi, eta);
  if constexpr (is_exact_v<S>) {
    if (!qv.is_zero()) throw NoSolution("q does not vanish at the direction");
  } else {
    if (std::abs(qv) > options.q_tol * std::max(1.0, q.scale())) throw NoSolution("q does not vanish at the direction");
  }

  const Matrix4<S> m = limit_system_matrix(frame, xi, eta);
  S row_scale(0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) row_scale = std::max<S>(row_scale, abs_value(m(i, j)));

  EvoluteSolution<S> sol;
  sol.theta = t.angle();
  sol.D = m.determinant();
  const S dq = q.angular_derivative(xi, eta);
  if constexpr (is_exact_v<S>)
    sol.simple_root = !dq.is_zero();
  else
    sol.simple_root = std::abs(dq) >= DirectionOptions{}.multiple_tol * std::max(1.0, q.scale());
  sol.mu_gamma_prime = mu_gamma_prime(frame, t);

  int best = -1;
  S best_det(0);
  for (int k = 0; k < 4; ++k) {
    const S det = abs_value(drop_row(m, k, 3).determinant());
    if (best < 0 || det > best_det) {
      best = k;
      best_det = det;
    }
  }

  if (det_vanishes(best_det, row_scale, options.rank_tol)) {
    // Coefficient rank < 3: the limit point may still exist projectively.
    S minor_max(0);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) minor_max = std::max<S>(minor_max, abs_value(drop_row(m, i, j).determinant()));
    S full_scale = row_scale;
    for (int i = 0; i < 4; ++i) full_scale = std::max<S>(full_scale, abs_value(m(i, 3)));
    if (det_vanishes(minor_max, full_scale, options.rank_tol))
      throw RankDeficient("limit system has no isolated solution");
    Vector3<S> dir = Vector3<S>::Zero();
    S dir_norm(0);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        const Vector3<S> c = Vector3<S>(m.template block<1, 3>(i, 0).transpose())
                                 .cross(Vector3<S>(m.template block<1, 3>(j, 0).transpose()));
        const S n = max_abs<S>(c);
        if (n > dir_norm) {
          dir = c;
          dir_norm = n;
        }
      }
    bool rank_one;
    if constexpr (is_exact_v<S>)
      rank_one = dir_norm.is_zero();
    else
      rank_one = dir_norm <= options.rank_tol * std::max(1.0, row_scale * row_scale);
    if (rank_one) throw RankDeficient("coefficient rank below 2");
    sol.at_infinity = true;
    sol.center_local = dir / dir_norm;
    sol.center_world = frame.world_from_local.apply_vector(sol.center_local);
    sol.dropped_row = best;
    return sol;
  }

  Matrix3<S> a;
  Vector3<S> rhs;
  for (int i = 0, r = 0; i < 4; ++i) {
    if (i == best) continue;
    a.row(r) = m.template block<1, 3>(i, 0);
    rhs(r++) = -m(i, 3);
  }
  Vector3<S> x;
  if constexpr (is_exact_v<S>)
    x = a.inverse() * rhs;
  else
    x = a.fullPivLu().solve(rhs);
  for (int i = 0; i < 4; ++i) sol.residuals[i] = m.template block<1, 3>(i, 0).dot(x) + m(i, 3);
  sol.dropped_row = best;
  sol.dropped_residual = sol.residuals[best];
  sol.center_local = x;
  sol.center_world = pull_back_point(frame, x);
  if (const auto mc = moutard_center(frame, t)) {
    Eigen::Vector3d gap;
    for (int i = 0; i < 3; ++i) gap(i) = to_double(x(i) - (*mc)(i));
    sol.moutard_gap = gap.norm();
  }
  return sol;
}

EvoluteSolution<double> solve_evolute_point(const BlaschkeFrame<double>& frame, double theta,
                                            const SolveOptions& options) {
  return solve_evolute_point(frame, TangentDirection<double>::from_angle(theta), options);
}

double cubic_killing_b(const BlaschkeFrame<double>& frame, std::optional<double> reference_angle,
                       double* angle_out) {
  const double r = std::hypot(frame.a, frame.b);
  const double base = std::atan2(frame.a, frame.b) / 3.0;
  int best_k = 0;
  if (reference_angle) {
    double best_gap = 1e300;
    for (int k = 0; k < 6; ++k) {
      const double gap = circular_gap(base + k * std::numbers::pi / 3, *reference_angle, 2 * std::numbers::pi);
      if (gap < best_gap) {
        best_gap = gap;
        best_k = k;
      }
    }
  }
  if (angle_out) *angle_out = base + best_k * std::numbers::pi / 3;
  return best_k % 2 == 0 ? r : -r;
}

double pick_derivative(const SurfaceModel<double>& surface, const Eigen::Vector2d& p0, const Eigen::Vector2d& w,
                       double h) {
  if (w.norm() == 0.0) throw std::invalid_argument("pick_derivative: zero direction");
  const Eigen::Vector2d step = h * w;
  for (const Eigen::Vector2d& p : {Eigen::Vector2d(p0 + step), Eigen::Vector2d(p0 - step)})
    if (!surface.patch().contains(p(0), p(1))) throw PatchBounds("pick_derivative: stencil leaves the patch");
  double ref = 0.0;
  cubic_killing_b(normalize_at(surface, p0), std::nullopt, &ref);
  const double plus = cubic_killing_b(normalize_at(surface, Eigen::Vector2d(p0 + step)), ref);
  const double minus = cubic_killing_b(normalize_at(surface, Eigen::Vector2d(p0 - step)), ref);
  return (plus - minus) / (2.0 * h);
}

RegularityReport regularity_report(const SurfaceModel<double>& surface, const Eigen::Vector2d& p0, double theta,
                                   const RegularityOptions& options) {
  RegularityReport rep;
  rep.theta = theta;
  const auto frame = normalize_at(surface, p0);
  const auto q = direction_sextic(frame);
  const double qs = q.scale();
  const DirectionSet set = evolute_directions(frame);
  rep.simple_root = !set.identically_zero &&
                    std::abs(q.angular_derivative(std::cos(theta), std::sin(theta))) >= DirectionOptions{}.multiple_tol * qs;
  for (int k = 0; k < 8; ++k) {
    const double phi = k * std::numbers::pi / 8;
    rep.pick_derivatives[k] = pick_derivative(surface, p0, Eigen::Vector2d(std::cos(phi), std::sin(phi)), options.h);
    rep.pick_derivative_nonzero = rep.pick_derivative_nonzero || std::abs(rep.pick_derivatives[k]) > options.pick_tol;
  }
  rep.mu_gamma_prime = mu_gamma_prime(frame, TangentDirection<double>::from_angle(theta));
  double scale = 1.0;
  for (double c : {frame.a, frame.b, frame.f50, frame.f4[1], frame.f40()}) scale = std::max(scale, std::abs(c));
  rep.mu_gamma_prime_nonzero = std::abs(rep.mu_gamma_prime) > options.mu_tol * scale * scale * scale;
  rep.regular = rep.pick_derivative_nonzero && rep.mu_gamma_prime_nonzero;
  return rep;
}

#define AEK_INSTANTIATE_EVOLUTE(S)                                                                             \
  template struct DirectionSextic<S>;                                                                          \
  template DirectionSextic<S> direction_sextic(const BlaschkeFrame<S>&);                                       \
  template Matrix4<S> limit_system_matrix(const BlaschkeFrame<S>&, const S&, const S&);                        \
  template S discriminant_D(const BlaschkeFrame<S>&, const S&, const S&);                                      \
  template DirectionSet evolute_directions(const BlaschkeFrame<S>&, const DirectionOptions&);                  \
  template SectionJet<S> gamma_section(const BlaschkeFrame<S>&);                                               \
  template S mu_gamma_prime(const BlaschkeFrame<S>&, const TangentDirection<S>&);                              \
  template EvoluteSolution<S> solve_evolute_point(const BlaschkeFrame<S>&, const TangentDirection<S>&,         \
                                                  const SolveOptions&);

AEK_INSTANTIATE_EVOLUTE(double)
AEK_INSTANTIATE_EVOLUTE(Rational)

}  // namespace aek
