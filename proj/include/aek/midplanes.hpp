#pragma once

// Mid-planes of point pairs on a graph surface and their small-pair limits.
//
// For p_i = (u_i, v_i, f(u_i, v_i)) with normals N_i = (-f_x, -f_y, 1)(u_i, v_i),
// C = (p1 - p2)/2 and M = (p1 + p2)/2 the mid-plane is F = 0 with
//
//   F(u1, v1, u2, v2, X) = [(N1 . C) N2 + (N2 . C) N1] . (X - M).
//
// At a normalized point F = kappa (G + H1 su + H2 sv) + O(5) with kappa = -1/2,
// su = u1 + u2, sv = v1 + v2 and G, H1, H2 evaluated at (du, dv) = (u1 - u2, v1 - v2).

#include "aek/invariants.hpp"
#include "aek/jet.hpp"

#include <array>
#include <limits>
#include <string>
#include <vector>

namespace aek {

/// Overall factor between F and its limit forms.
template <ScalarType S>
S midplane_scale() {
  return S(-1) / S(2);
}

/// A homogeneous cubic c0 xi^3 + c1 xi^2 eta + c2 xi eta^2 + c3 eta^3.
template <ScalarType S>
struct Cubic {
  std::array<S, 4> c{};
  S operator()(const S& xi, const S& eta) const {
    return c[0] * xi * xi * xi + c[1] * xi * xi * eta + c[2] * xi * eta * eta + c[3] * eta * eta * eta;
  }
};

/// H1 = H11 x + H12 y + H13 z - H14 and H2 = H21 x + H22 y + H23 z - H24.
template <ScalarType S>
struct HForms {
  std::array<Cubic<S>, 4> h1;
  std::array<Cubic<S>, 4> h2;

  AffineForm3<S> h1_form(const S& xi, const S& eta) const { return eval(h1, xi, eta); }
  AffineForm3<S> h2_form(const S& xi, const S& eta) const { return eval(h2, xi, eta); }

 private:
  static AffineForm3<S> eval(const std::array<Cubic<S>, 4>& h, const S& xi, const S& eta) {
    return {Vector3<S>(h[0](xi, eta), h[1](xi, eta), h[2](xi, eta)), -h[3](xi, eta)};
  }
};

/// The H forms of a normalized frame (needs a, b and the quartic coefficients).
template <ScalarType S>
HForms<S> h_forms(const BlaschkeFrame<S>& frame);

/// F around a pair, in the perturbations (du1, dv1, du2, dv2) of the two chart
/// points. h1, h2 are the height jets re-centred at p1, p2.
template <ScalarType S>
LinearFormJet<S> mid_plane_form(const Jet2<S>& h1, const Jet2<S>& h2, const Vector2<S>& p1, const Vector2<S>& p2,
                                int order);

/// Expansion of F about (0, 0, 0, 0) for a normalized frame, in (u1, v1, u2, v2).
template <ScalarType S>
LinearFormJet<S> expand_F(const BlaschkeFrame<S>& frame, int order = 4);

/// Rows F, F_u1 - F_u2, F_v1 - F_v2, F_u1 + F_u2, F_v1 + F_v2.
template <ScalarType S>
struct EnvelopeSystem {
  std::array<AffineForm3<S>, 5> rows;
};

/// Chart points of a pair on a surface (world coordinates) or on a frame's
/// normalized graph (local coordinates). Throw DegeneratePair when F vanishes
/// identically in X.
template <ScalarType S>
EnvelopeSystem<S> envelope_system(const SurfaceModel<S>& surface, const Vector2<S>& p1, const Vector2<S>& p2);
template <ScalarType S>
EnvelopeSystem<S> envelope_system(const BlaschkeFrame<S>& frame, const Vector2<S>& p1, const Vector2<S>& p2);
template <ScalarType S>
Plane3<S> mid_plane(const SurfaceModel<S>& surface, const Vector2<S>& p1, const Vector2<S>& p2);
template <ScalarType S>
Plane3<S> mid_plane(const BlaschkeFrame<S>& frame, const Vector2<S>& p1, const Vector2<S>& p2);

/// G(du, dv, X) as a linear form jet in (u1, v1, u2, v2).
template <ScalarType S>
LinearFormJet<S> transon_jet(const BlaschkeFrame<S>& frame, int order);
/// H1(du, dv, X) su + H2(du, dv, X) sv as a linear form jet in (u1, v1, u2, v2).
template <ScalarType S>
LinearFormJet<S> h_jet(const HForms<S>& h, int order);

struct LemmaReport {
  std::string name;
  /// Largest |coefficient| of the residual.
  double max_residual = 0.0;
  bool exact_zero = false;
  bool passed = false;
  std::size_t coefficients_checked = 0;
};

/// Order <= 3 part of F against kappa G.
template <ScalarType S>
LemmaReport verify_lemma_main3(const BlaschkeFrame<S>& frame, double float_tol = 1e-12);
/// Order 4 part of F against kappa (H1 su + H2 sv), using the supplied H forms.
template <ScalarType S>
LemmaReport verify_lemma_main4(const BlaschkeFrame<S>& frame, const HForms<S>& h, double float_tol = 1e-12);
template <ScalarType S>
LemmaReport verify_lemma_main4(const BlaschkeFrame<S>& frame, double float_tol = 1e-12) {
  return verify_lemma_main4(frame, h_forms(frame), float_tol);
}

struct ProbeReport {
  std::vector<double> t;
  std::vector<double> distance;
  /// Least-squares slope of log(distance) against log(t); infinite when every distance is 0.
  double fitted_order = std::numeric_limits<double>::infinity();
  bool exact_zero = true;
};

/// Fits the convergence order of a distance sequence.
ProbeReport fit_convergence(std::vector<double> t, std::vector<double> distance);

/// Plane distance between the mid-plane of p1,2 = +-(t/2)(xi, eta) and the Transon plane.
template <ScalarType S>
ProbeReport midplane_limit_probe(const BlaschkeFrame<S>& frame, const TangentDirection<S>& dir,
                                 const std::vector<S>& t_values);

/// Envelope rows 2-5 for pairs c +- (t/2)(xi, eta), c = t * offset, scaled by
/// t^-2 (rows 2, 3) and t^-3 (rows 4, 5), against 2 kappa (G_xi, G_eta, H1, H2).
/// One report per row; distances are max-abs coefficient gaps.
template <ScalarType S>
std::array<ProbeReport, 4> envelope_limit_probe(const BlaschkeFrame<S>& frame, const TangentDirection<S>& dir,
                                                const std::vector<S>& t_values,
                                                const Vector2<S>& offset = Vector2<S>::Zero());

}  // namespace aek
