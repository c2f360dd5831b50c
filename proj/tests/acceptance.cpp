// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "aek/evolute.hpp"
#include "aek/midplanes.hpp"
#include "aek/trace.hpp"
#include "oracle/affine_arc.hpp"
#include "oracle/sparse_poly.hpp"
#include "support/random.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

using namespace aek;
using aek::testkit::Rng;

namespace {

using Q = Rational;
constexpr double kPi = std::numbers::pi;

// Pinned tolerances and limits.
constexpr double kSolveVsMoutardRel = 1e-10;
constexpr double kRootAngleTol = 1e-8;
constexpr double kMinFittedOrder = 0.9;
constexpr double kCurvatureCenterRel = 1e-10;
constexpr double kCircleCurvatureTol = 1e-12;
constexpr double kConicDerivativeTol = 1e-10;
constexpr double kArcOracleTol = 1e-6;
constexpr double kDegenerateCenterTol = 1e-10;
constexpr double kCovarianceRel = 1e-8;
constexpr double kLimitExpansionSeconds = 10;
constexpr double kLimitSolveSeconds = 5;
constexpr double kLimitCovarianceSeconds = 60;

struct Outcome {
  bool passed = true;
  std::string detail;
  void require(bool ok, const std::string& why) {
    if (!ok && passed) detail = why;
    passed = passed && ok;
  }
};

int failures = 0;

void criterion(int id, const char* title, double limit_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_seconds > 0 && secs >= limit_seconds) {
    r.require(false, "runtime " + std::to_string(secs) + " s over the limit");
  }
  if (!r.passed) ++failures;
  char timing[64];
  if (limit_seconds > 0)
    std::snprintf(timing, sizeof timing, "%.3f s (limit %.0f s)", secs, limit_seconds);
  else
    std::snprintf(timing, sizeof timing, "%.3f s", secs);
  std::printf("%s  %2d  %-62s %s%s%s\n", r.passed ? "PASS" : "FAIL", id, title, timing, r.detail.empty() ? "" : "  -- ",
              r.detail.c_str());
  std::fflush(stdout);
}

oracle::Poly2 poly_of(const Jet2<Q>& j) {
  oracle::Poly2 p;
  for (std::size_t i = 0; i < j.size(); ++i)
    if (!j[i].is_zero()) p[{j.exponents(i)[0], j.exponents(i)[1]}] = j[i];
  return p;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

int main() {
  criterion(1, "mid-plane expansion: orders <= 3 and 4 exact, 20 rational frames", kLimitExpansionSeconds, [] {
    Outcome r;
    Rng rng(101);
    const Q kappa = midplane_scale<Q>();
    for (int trial = 0; trial < 20; ++trial) {
      const auto f = testkit::random_frame<Q>(rng);
      const auto F = expand_F(f, 4);
      const auto ref = oracle::mid_plane_expansion(poly_of(f.normalized), 4);
      const std::array<const Jet4<Q>*, 4> parts{&F.cx, &F.cy, &F.cz, &F.c1};
      for (int c = 0; c < 4; ++c)
        for (std::size_t i = 0; i < parts[c]->size(); ++i)
          r.require((*parts[c])[i] == ref[c].at(parts[c]->exponents(i)), "expand_F disagrees with the sparse oracle");
      const auto g = transon_jet(f, 4);
      const auto h = h_jet(h_forms(f), 4);
      r.require((F.up_to_degree(3) - kappa * g.up_to_degree(3)).is_zero(), "order <= 3 residual is nonzero");
      r.require((F.homogeneous_part(4) - kappa * h.homogeneous_part(4)).is_zero(), "order 4 residual is nonzero");
    }
    return r;
  });

  criterion(2, "cone direction at (1,0) equals (-2 f30, -2 f21, 1) exactly", 0, [] {
    Outcome r;
    Rng rng(102);
    const TangentDirection<Q> e1(Q(1), Q(0));
    for (int trial = 0; trial < 50; ++trial) {
      const auto f = testkit::random_frame<Q>(rng);
      r.require(su_cone_direction(f, e1) == Vector3<Q>(-2 * f.f(3, 0), -2 * f.f(2, 1), 1), "random frame mismatch");
    }
    // Frames obtained by normalizing rational surfaces whose Hessian is the identity at the origin.
    for (int trial = 0; trial < 10; ++trial) {
      Jet2<Q> h(5);
      h.set_coeff({2, 0}, Q(1, 2));
      h.set_coeff({0, 2}, Q(1, 2));
      for (std::size_t i = 0; i < h.size(); ++i)
        if (h.degree(i) >= 3) h[i] = testkit::random_rational(rng, 3, 4);
      const auto f = normalize_at(SurfaceModel<Q>::polynomial(h, Patch{}), Vector2<Q>(0, 0));
      r.require(su_cone_direction(f, e1) == Vector3<Q>(-2 * f.f(3, 0), -2 * f.f(2, 1), 1), "normalized frame mismatch");
    }
    return r;
  });

  criterion(3, "limit-system solution = Moutard center, 100 frames, rel 1e-10", kLimitSolveSeconds, [] {
    Outcome r;
    Rng rng(103);
    int frames = 0;
    double worst = 0;
    while (frames < 100) {
      const auto f = testkit::random_frame<double>(rng);
      bool solvable = false;
      for (const auto& root : evolute_directions(f).roots) {
        const auto t = TangentDirection<double>::from_angle(root.theta);
        const auto mc = moutard_center(f, t);
        if (!mc) continue;
        const auto sol = solve_evolute_point(f, t);
        solvable = true;
        r.require(!sol.at_infinity, "solution at infinity with a finite Moutard center");
        worst = std::max(worst, testkit::rel_err(sol.center_local, *mc));
      }
      frames += solvable;
    }
    r.require(worst < kSolveVsMoutardRel, "max rel err " + fmt(worst));
    r.detail = r.passed ? "max rel err " + fmt(worst) : r.detail;
    return r;
  });

  criterion(4, "D = -3/32 (xi^2+eta^2)^2 (12 q3 + q4) exactly, 100 frames", 0, [] {
    Outcome r;
    Rng rng(104);
    for (int trial = 0; trial < 100; ++trial) {
      const auto f = testkit::random_frame<Q>(rng);
      const auto q = direction_sextic(f);
      Q xi = testkit::random_rational(rng), eta = testkit::random_rational(rng);
      if (xi.is_zero() && eta.is_zero()) xi = 1;
      const Q n = xi * xi + eta * eta;
      const Q combined = 12 * DirectionSextic<Q>::eval(q.q3, xi, eta) + DirectionSextic<Q>::eval(q.q4, xi, eta);
      r.require(discriminant_D(f, xi, eta) == Q(-3, 32) * n * n * combined, "identity fails");
    }
    return r;
  });

  criterion(5, "a = 1, b = 0, f4 = 0: six roots at k pi/6 within 1e-8", 0, [] {
    Outcome r;
    const auto check = [&](const DirectionSet& set) {
      r.require(!set.identically_zero && set.roots.size() == 6, std::to_string(set.roots.size()) + " roots");
      for (std::size_t k = 0; k < std::min<std::size_t>(6, set.roots.size()); ++k)
        r.require(std::abs(set.roots[k].theta - k * kPi / 6) < kRootAngleTol, "root " + std::to_string(k) + " off");
    };
    check(evolute_directions(BlaschkeFrame<double>::from_coefficients(1.0, 0.0, {})));
    check(evolute_directions(BlaschkeFrame<Q>::from_coefficients(Q(1), Q(0), {})));
    return r;
  });

  criterion(6, "mid-plane -> Transon plane, 10 frames, fitted order >= 0.9", 0, [] {
    Outcome r;
    Rng rng(106);
    double worst = 1e300;
    for (int trial = 0; trial < 10; ++trial) {
      const auto f = testkit::random_frame<double>(rng);
      const TangentDirection<double> t(testkit::random_unit(rng));
      const auto p = midplane_limit_probe(f, t, {1e-1, 1e-2, 1e-3, 1e-4});
      for (std::size_t i = 1; i < p.distance.size(); ++i)
        r.require(p.distance[i] < p.distance[i - 1], "distance not decreasing");
      worst = std::min(worst, p.fitted_order);
    }
    r.require(worst >= kMinFittedOrder, "min fitted order " + fmt(worst));
    if (r.passed) r.detail = "min fitted order " + fmt(worst);
    return r;
  });

  criterion(7, "affine-curvature center = Moutard center (100 float, 5 exact)", 0, [] {
    Outcome r;
    Rng rng(107);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto f = testkit::random_frame<double>(rng);
      const TangentDirection<double> t(testkit::random_unit(rng));
      const auto c = center_of_affine_curvature(f, t);
      const auto m = moutard_center(f, t);
      r.require(c.has_value() == m.has_value(), "one center at infinity, the other finite");
      if (c && m) worst = std::max(worst, testkit::rel_err(*c, *m));
    }
    r.require(worst < kCurvatureCenterRel, "max rel err " + fmt(worst));
    const TangentDirection<Q> e1(Q(1), Q(0));
    for (int trial = 0; trial < 5; ++trial) {
      const auto f = testkit::random_frame<Q>(rng);
      const Q den = 4 * (2 * f.f40() - 5 * f.f(3, 0) * f.f(3, 0) - f.f(2, 1) * f.f(2, 1));
      const Vector3<Q> formula = Vector3<Q>(-2 * f.f(3, 0), -2 * f.f(2, 1), 1) / den;
      const auto c = center_of_affine_curvature(f, e1);
      const auto m = moutard_center(f, e1);
      r.require(c && m && *c == formula && *m == formula, "closed form mismatch on a rational fixture");
    }
    return r;
  });

  criterion(8, "planar affine curvature: circle, conics, arc-length ODE oracle", 0, [] {
    Outcome r;
    // x^2 + (z - 1)^2 = 1 near the origin: z = x^2/2 + x^4/8 + ..., so a4 = 3.
    const double mu = affine_curvature(SectionJet<double>{0.0, 3.0, 0.0});
    r.require(std::abs(mu - 1.0) <= kCircleCurvatureTol, "circle mu = " + fmt(mu));
    // z = x^2/2 + p x z + q z^2 as a series: parabola, circle, ellipse.
    for (const auto& [p, q] : {std::pair{0.0, 0.0}, {0.0, 0.5}, {0.0, 0.125}, {0.3, 0.2}}) {
      const auto x = Jet1<double>::variable(0, 5);
      Jet1<double> z(5);
      for (int it = 0; it < 5; ++it) z = 0.5 * (x * x) + p * (x * z) + q * (z * z);
      const SectionJet<double> s{6 * z.coeff({3}), 24 * z.coeff({4}), 120 * z.coeff({5})};
      r.require(std::abs(affine_curvature_derivative(s)) <= kConicDerivativeTol, "conic mu' nonzero");
    }
    Rng rng(108);
    double worst = 0;
    for (int trial = 0; trial < 10; ++trial) {
      const double a3 = testkit::random_double(rng), a4 = testkit::random_double(rng), a5 = testkit::random_double(rng);
      const auto g = [=](double x) {
        return x * x / 2 + a3 / 6 * x * x * x + a4 / 24 * x * x * x * x + a5 / 120 * x * x * x * x * x;
      };
      const auto g2 = [=](double x) { return 1 + a3 * x + a4 / 2 * x * x + a5 / 6 * x * x * x; };
      const auto num = oracle::arc_length_curvature(g, g2);
      worst = std::max(worst, std::abs(num.mu_prime - affine_curvature_derivative(SectionJet<double>{a3, a4, a5})));
    }
    r.require(worst <= kArcOracleTol, "max |mu' - oracle| " + fmt(worst));
    if (r.passed) r.detail = "max |mu' - oracle| " + fmt(worst);
    return r;
  });

  criterion(9, "sphere: q = 0 and centers at the center; paraboloid at infinity", 0, [] {
    Outcome r;
    Rng rng(109);
    const auto sphere = SurfaceModel<double>::sphere_cap(1.0, Patch{-0.6, 0.6, -0.6, 0.6});
    const Eigen::Vector3d centre(0, 0, 1);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::Vector2d p(0.5 * testkit::random_double(rng), 0.5 * testkit::random_double(rng));
      const auto f = normalize_at(sphere, p);
      r.require(evolute_directions(f).identically_zero, "sphere q not identically zero");
      for (int k = 0; k < 6; ++k) {
        const auto m = moutard_center(f, TangentDirection<double>::from_angle(k * kPi / 6 + 0.1));
        r.require(m && (pull_back_point(f, *m) - centre).norm() <= kDegenerateCenterTol, "sphere center off");
      }
    }
    const auto exact_sphere = normalize_at(SurfaceModel<Q>::sphere_cap(Q(1), Patch{-0.6, 0.6, -0.6, 0.6}),
                                           Vector2<Q>(0, 0));
    r.require(evolute_directions(exact_sphere).identically_zero, "exact sphere q not identically zero");

    Jet2<Q> h(2);
    h.set_coeff({2, 0}, Q(1, 2));
    h.set_coeff({0, 2}, Q(1, 2));
    const auto paraboloid = SurfaceModel<Q>::polynomial(h, Patch{});
    for (int trial = 0; trial < 10; ++trial) {
      const Vector2<Q> p(testkit::random_rational(rng, 3, 4), testkit::random_rational(rng, 3, 4));
      if (!paraboloid.patch().contains(to_double(p(0)), to_double(p(1)))) continue;
      const auto f = normalize_at(paraboloid, p);
      r.require(evolute_directions(f).identically_zero, "paraboloid q not identically zero");
      for (int k = 0; k < 4; ++k) {
        const TangentDirection<Q> t(testkit::random_rational_unit(rng));
        r.require(!moutard_center(f, t).has_value(), "paraboloid Moutard center finite");
        r.require(solve_evolute_point(f, t).at_infinity, "paraboloid limit point finite");
      }
    }
    return r;
  });

  criterion(10, "trace commutes with 5 unimodular maps on a 9x9 grid, rel 1e-8", kLimitCovarianceSeconds, [] {
    Outcome r;
    Rng rng(110);
    Jet2<double> h(5);
    h.set_coeff({2, 0}, 0.5);
    h.set_coeff({0, 2}, 0.5);
    for (std::size_t i = 0; i < h.size(); ++i)
      if (h.degree(i) >= 3) h[i] = 0.3 * testkit::random_double(rng);
    const auto s = SurfaceModel<double>::polynomial(h, Patch{-0.3, 0.3, -0.3, 0.3});
    const auto grid = GridSpec::over_patch(s.patch(), 9, 1e-6);
    const auto base = trace_evolute(s, grid);
    double worst = 0;
    std::size_t compared = 0;
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::Matrix2d b;
      do {
        b << 1 + 0.4 * testkit::random_double(rng), 0.4 * testkit::random_double(rng),
            0.4 * testkit::random_double(rng), 1 + 0.4 * testkit::random_double(rng);
      } while (b.determinant() < 0.3);
      Eigen::Matrix3d l = Eigen::Matrix3d::Zero();
      l.topLeftCorner<2, 2>() = b;
      l(2, 0) = testkit::random_double(rng);
      l(2, 1) = testkit::random_double(rng);
      l(2, 2) = 1 / b.determinant();
      const AffineMap3<double> a(l, Eigen::Vector3d(testkit::random_double(rng), testkit::random_double(rng),
                                                    testkit::random_double(rng)));
      const auto moved = trace_evolute(s.transformed(a), grid.mapped(b, a.translation().head<2>()));
      for (std::size_t k = 0; k < base.samples.size(); ++k) {
        const auto& p = base.samples[k];
        const auto& q = moved.samples[k];
        r.require(p.status == q.status && p.roots.size() == q.roots.size(), "sample status or root count differs");
        for (const auto& root : p.roots) {
          if (!root.solution || root.solution->at_infinity) continue;
          const Eigen::Vector3d expect = a.apply(root.solution->center_world);
          double best = 1e300;
          for (const auto& other : q.roots)
            if (other.solution) best = std::min(best, testkit::rel_err(other.solution->center_world, expect));
          worst = std::max(worst, best);
          ++compared;
        }
      }
    }
    r.require(compared > 0, "nothing compared");
    r.require(worst < kCovarianceRel, "max rel err " + fmt(worst));
    if (r.passed) r.detail = std::to_string(compared) + " points, max rel err " + fmt(worst);
    return r;
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
