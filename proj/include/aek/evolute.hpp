#pragma once

// Directions along which the envelope of mid-planes has a limit point, and the
// limit points themselves.

#include "aek/invariants.hpp"
#include "aek/midplanes.hpp"

#include <optional>
#include <vector>

namespace aek {

/// Binary sextics stored as c[i] for xi^(6-i) eta^i.
template <ScalarType S>
struct DirectionSextic {
  std::array<S, 7> q3{};
  std::array<S, 7> q4{};
  std::array<S, 7> q{};

  S operator()(const S& xi, const S& eta) const { return eval(q, xi, eta); }
  /// d/dtheta of q(cos theta, sin theta), written at (xi, eta).
  S angular_derivative(const S& xi, const S& eta) const;
  /// Largest |coefficient| of q.
  S scale() const;

  static S eval(const std::array<S, 7>& c, const S& xi, const S& eta);
};

template <ScalarType S>
DirectionSextic<S> direction_sextic(const BlaschkeFrame<S>& frame);

/// det of the rows (x, y, z, constant) of G_xi, G_eta, H1, H2 at (xi, eta).
template <ScalarType S>
S discriminant_D(const BlaschkeFrame<S>& frame, const S& xi, const S& eta);

/// The 4x4 matrix behind discriminant_D.
template <ScalarType S>
Matrix4<S> limit_system_matrix(const BlaschkeFrame<S>& frame, const S& xi, const S& eta);

struct DirectionOptions {
  /// q counts as identically zero when every coefficient is below zero_tol * max(1, |coefficients of the frame|).
  double zero_tol = 1e-12;
  /// A polished angle is accepted when |q| <= root_tol * |q|_max.
  double root_tol = 1e-8;
  /// A root is multiple when |dq/dtheta| < multiple_tol * |q|_max.
  double multiple_tol = 1e-6;
};

struct DirectionRoot {
  double theta = 0.0;  // [0, pi)
  bool simple = true;
  double q_value = 0.0;
  double q_derivative = 0.0;
};

struct DirectionSet {
  bool identically_zero = false;
  std::vector<DirectionRoot> roots;
};

/// Real roots of theta -> q(cos theta, sin theta) on [0, pi). Computed in double.
template <ScalarType S>
DirectionSet evolute_directions(const BlaschkeFrame<S>& frame, const DirectionOptions& options = {});
DirectionSet directions_of(const DirectionSextic<double>& q, double frame_scale, const DirectionOptions& options = {});

template <ScalarType S>
struct EvoluteSolution {
  double theta = 0.0;
  bool at_infinity = false;
  /// Set unless at_infinity; for at_infinity, the direction of the limit point.
  Vector3<S> center_local = Vector3<S>::Zero();
  Vector3<S> center_world = Vector3<S>::Zero();
  /// Residuals of G_xi, G_eta, H1, H2 at the solution.
  std::array<S, 4> residuals{};
  /// Row (0..3) left out of the solved 3x3 subsystem.
  int dropped_row = 3;
  S dropped_residual{0};
  S D{0};
  bool simple_root = true;
  S mu_gamma_prime{0};
  /// Distance to the Moutard center (local), when that center is finite.
  std::optional<double> moutard_gap;
};

struct SolveOptions {
  /// NoSolution when |q(T)| > q_tol * max(1, |q|_max).
  double q_tol = 1e-8;
  /// Float determinant threshold relative to the row scale.
  double rank_tol = 1e-11;
};

/// Solves G_xi = G_eta = H1 = H2 = 0 at t (G is implied by Euler's relation).
/// Throws NoSolution when t is not a root of q and RankDeficient when the
/// system has no isolated solution, affine or projective.
template <ScalarType S>
EvoluteSolution<S> solve_evolute_point(const BlaschkeFrame<S>& frame, const TangentDirection<S>& t,
                                       const SolveOptions& options = {});
EvoluteSolution<double> solve_evolute_point(const BlaschkeFrame<double>& frame, double theta,
                                            const SolveOptions& options = {});

/// a^2 + b^2.
template <ScalarType S>
S pick_invariant(const BlaschkeFrame<S>& frame) {
  return frame.a * frame.a + frame.b * frame.b;
}

/// Signed b in the frame rotated so the cubic form vanishes on the x-axis.
/// With a reference angle, the rotation nearest to it (mod pi/3) is used.
double cubic_killing_b(const BlaschkeFrame<double>& frame, std::optional<double> reference_angle = std::nullopt,
                       double* angle_out = nullptr);

/// Derivative of the cubic-killing b along p0 + s w by central differences.
double pick_derivative(const SurfaceModel<double>& surface, const Eigen::Vector2d& p0, const Eigen::Vector2d& w,
                       double h = 1e-4);

/// mu' of the section through t by s(t), from the order-5 coefficients.
template <ScalarType S>
S mu_gamma_prime(const BlaschkeFrame<S>& frame, const TangentDirection<S>& t);

/// Section coefficients (a3, a4, a5) of the section through (1, 0) by s((1, 0)).
template <ScalarType S>
SectionJet<S> gamma_section(const BlaschkeFrame<S>& frame);

struct RegularityReport {
  double theta = 0.0;
  bool simple_root = false;
  std::array<double, 8> pick_derivatives{};
  bool pick_derivative_nonzero = false;
  double mu_gamma_prime = 0.0;
  bool mu_gamma_prime_nonzero = false;
  bool regular = false;
};

struct RegularityOptions {
  double pick_tol = 1e-6;
  double mu_tol = 1e-9;
  double h = 1e-4;
};

RegularityReport regularity_report(const SurfaceModel<double>& surface, const Eigen::Vector2d& p0, double theta,
                                   const RegularityOptions& options = {});

}  // namespace aek
