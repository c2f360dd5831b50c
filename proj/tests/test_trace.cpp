#include "aek/trace.hpp"
#include "support/random.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <set>

using namespace aek;
using aek::testkit::Rng;

namespace {

constexpr double kPi = std::numbers::pi;

SurfaceModel<double> graph(std::initializer_list<std::pair<std::array<int, 2>, double>> terms, Patch patch) {
  Jet2<double> h(5);
  h.set_coeff({2, 0}, 0.5);
  h.set_coeff({0, 2}, 0.5);
  for (const auto& [e, c] : terms) h.set_coeff(e, h.coeff(e) + c);
  return SurfaceModel<double>::polynomial(h, patch);
}

SurfaceModel<double> random_graph(Rng& rng, Patch patch) {
  Jet2<double> h(5);
  h.set_coeff({2, 0}, 0.5);
  h.set_coeff({0, 2}, 0.5);
  for (std::size_t i = 0; i < h.size(); ++i)
    if (h.degree(i) >= 3) h[i] = 0.3 * testkit::random_double(rng);
  return SurfaceModel<double>::polynomial(h, patch);
}

// Chart-compatible unimodular map: (u, v, z) -> (B (u, v) + t, w . (u, v) + z / det B + g).
AffineMap3<double> random_chart_map(Rng& rng) {
  Eigen::Matrix2d b;
  do {
    b << 1 + 0.4 * testkit::random_double(rng), 0.4 * testkit::random_double(rng), 0.4 * testkit::random_double(rng),
        1 + 0.4 * testkit::random_double(rng);
  } while (b.determinant() < 0.3);
  Eigen::Matrix3d l = Eigen::Matrix3d::Zero();
  l.topLeftCorner<2, 2>() = b;
  l(2, 0) = testkit::random_double(rng);
  l(2, 1) = testkit::random_double(rng);
  l(2, 2) = 1 / b.determinant();
  return AffineMap3<double>(l, Eigen::Vector3d(testkit::random_double(rng), testkit::random_double(rng),
                                               testkit::random_double(rng)));
}

const RootSample& nearest_root(const GridSample& s, double chart_angle) {
  const RootSample* best = nullptr;
  double gap = 1e9;
  for (const auto& r : s.roots) {
    const double d = std::min(std::abs(r.chart_angle - chart_angle), kPi - std::abs(r.chart_angle - chart_angle));
    if (d < gap) {
      gap = d;
      best = &r;
    }
  }
  return *best;
}

}  // namespace

TEST(Grid, PointsAndMapping) {
  const auto g = GridSpec::over_patch(Patch{-1, 1, -0.5, 0.5}, 5, 0.1);
  EXPECT_EQ(g.size(), 25u);
  EXPECT_TRUE(g.point(0, 0).isApprox(Eigen::Vector2d(-0.9, -0.4)));
  EXPECT_TRUE(g.point(4, 4).isApprox(Eigen::Vector2d(0.9, 0.4)));
  Eigen::Matrix2d b;
  b << 2, 1, 0, 1;
  const Eigen::Vector2d t(0.5, -1);
  const auto m = g.mapped(b, t);
  EXPECT_TRUE(m.point(3, 1).isApprox(b * g.point(3, 1) + t));
}

TEST(Trace, SphereIsOneDegeneratePoint) {
  const auto s = SurfaceModel<double>::sphere_cap(1.0, Patch{-0.5, 0.5, -0.5, 0.5});
  const auto r = trace_evolute(s, GridSpec::over_patch(s.patch(), 7));
  ASSERT_EQ(r.branches.size(), 1u);
  EXPECT_TRUE(r.branches[0].degenerate);
  EXPECT_EQ(r.branches[0].members.size(), 49u);
  for (const auto& sample : r.samples) {
    EXPECT_EQ(sample.status, SampleStatus::IdenticallyZero);
    ASSERT_TRUE(sample.degenerate_center.has_value());
    EXPECT_LT((*sample.degenerate_center - Eigen::Vector3d(0, 0, 1)).norm(), 1e-10);
  }
}

TEST(Trace, CubicExampleSeedsSixBranches) {
  const auto s = graph({{{3, 0}, 1.0}, {{1, 2}, -3.0}}, Patch{-0.2, 0.2, -0.2, 0.2});
  const auto r = trace_evolute(s, GridSpec::over_patch(s.patch(), 5));
  const auto& center = r.samples[r.grid.index(2, 2)];
  ASSERT_EQ(center.status, SampleStatus::Ok);
  ASSERT_EQ(center.roots.size(), 6u);
  std::set<int> ids;
  for (int k = 0; k < 6; ++k) {
    EXPECT_NEAR(center.roots[k].chart_angle, k * kPi / 6, 1e-8);
    ids.insert(center.roots[k].branch);
  }
  EXPECT_EQ(ids.size(), 6u);
  for (const auto& b : r.branches) EXPECT_LT(b.max_angle_jump, 0.2);
}

TEST(Trace, NonConvexSamplesAreRecorded) {
  const auto s = graph({{{4, 0}, -1.0}}, Patch{-0.6, 0.6, -0.6, 0.6});
  const auto r = trace_evolute(s, GridSpec::over_patch(s.patch(), 7));
  std::size_t bad = 0;
  for (const auto& sample : r.samples) {
    const bool convex = 1 - 12 * sample.chart(0) * sample.chart(0) > 0;
    if (!convex) {
      EXPECT_EQ(sample.status, SampleStatus::NonConvexPoint);
      ++bad;
    } else {
      EXPECT_NE(sample.status, SampleStatus::NonConvexPoint);
    }
  }
  EXPECT_GT(bad, 0u);
  EXPECT_GT(r.succeeded(), 0u);
}

TEST(Trace, WorkerCountDoesNotChangeTheResult) {
  Rng rng(1);
  const auto s = random_graph(rng, Patch{-0.3, 0.3, -0.3, 0.3});
  const auto grid = GridSpec::over_patch(s.patch(), 6);
  TraceOptions one, three;
  one.workers = 1;
  three.workers = 3;
  const auto a = trace_evolute(s, grid, one), b = trace_evolute(s, grid, three);
  ASSERT_EQ(a.branches.size(), b.branches.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    ASSERT_EQ(a.samples[k].roots.size(), b.samples[k].roots.size());
    for (std::size_t r = 0; r < a.samples[k].roots.size(); ++r) {
      EXPECT_EQ(a.samples[k].roots[r].branch, b.samples[k].roots[r].branch);
      EXPECT_EQ(a.samples[k].roots[r].root.theta, b.samples[k].roots[r].root.theta);
    }
  }
}

TEST(Trace, BranchesRespectTheMatchingThreshold) {
  Rng rng(2);
  const auto s = random_graph(rng, Patch{-0.3, 0.3, -0.3, 0.3});
  const auto r = trace_evolute(s, GridSpec::over_patch(s.patch(), 9));
  for (const auto& b : r.branches) {
    std::set<std::size_t> seen;
    for (const auto& [k, root] : b.members) EXPECT_TRUE(seen.insert(k).second) << "two roots of one sample";
    for (const auto& [x, y] : b.links) {
      const double d = std::abs(r.samples[x.first].roots[x.second].chart_angle -
                                r.samples[y.first].roots[y.second].chart_angle);
      EXPECT_LT(std::min(d, kPi - d), 0.2);
      const int di = r.samples[y.first].i - r.samples[x.first].i, dj = r.samples[y.first].j - r.samples[x.first].j;
      EXPECT_EQ(std::abs(di) + std::abs(dj), 1);
    }
    EXPECT_LT(b.max_angle_jump, 0.2);
  }
}

TEST(Trace, AffineCovariance) {
  Rng rng(3);
  const auto s = random_graph(rng, Patch{-0.3, 0.3, -0.3, 0.3});
  const auto grid = GridSpec::over_patch(s.patch(), 9, 1e-6);
  const auto base = trace_evolute(s, grid);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_chart_map(rng);
    const auto moved = trace_evolute(s.transformed(a),
                                     grid.mapped(a.linear().topLeftCorner<2, 2>(), a.translation().head<2>()));
    for (std::size_t k = 0; k < base.samples.size(); ++k) {
      const auto& p = base.samples[k];
      const auto& q = moved.samples[k];
      ASSERT_EQ(p.status, q.status);
      ASSERT_EQ(p.roots.size(), q.roots.size());
      for (const auto& root : p.roots) {
        if (!root.solution) continue;
        const Eigen::Vector3d expect = a.apply(root.solution->center_world);
        double best = 1e300;
        for (const auto& other : q.roots)
          if (other.solution) best = std::min(best, testkit::rel_err(other.solution->center_world, expect));
        EXPECT_LT(best, 1e-8);
      }
    }
  }
}

TEST(Trace, VelocityAlongTheBranchDirectionFollowsTheSuLine) {
  const auto s = graph({{{3, 0}, 1.0}, {{1, 2}, -3.0}, {{2, 2}, 1.0}, {{5, 0}, 1.0}}, Patch{-0.2, 0.2, -0.2, 0.2});
  const auto frame = normalize_at(s, Eigen::Vector2d(0, 0));
  const TangentDirection<double> t(1.0, 0.0);
  ASSERT_NE(mu_gamma_prime(frame, t), 0.0);
  const double h = 1e-4;
  const auto xp = nearest_root(evolute_sample(s, Eigen::Vector2d(h, 0)), 0.0).solution->center_world;
  const auto xm = nearest_root(evolute_sample(s, Eigen::Vector2d(-h, 0)), 0.0).solution->center_world;
  const Eigen::Vector3d velocity = (xp - xm) / (2 * h);
  const Eigen::Vector3d su = pull_back_vector(frame, su_cone_direction(frame, t));
  ASSERT_GT(velocity.norm(), 1e-6);
  const double angle = std::atan2(velocity.cross(su).norm(), std::abs(velocity.dot(su)));
  EXPECT_LT(angle, 1e-3);
}

TEST(Trace, WorldVelocityStaysInTheTransonPlane) {
  // The evolute is the envelope of mid-planes, so its tangent planes are Transon planes.
  Rng rng(4);
  const auto s = random_graph(rng, Patch{-0.3, 0.3, -0.3, 0.3});
  const Eigen::Vector2d p0(0.05, -0.03);
  const auto frame = normalize_at(s, p0);
  for (const auto& root : evolute_sample(s, p0).roots) {
    const auto g = transon_form(frame, std::cos(root.root.theta), std::sin(root.root.theta));
    for (double phi : {0.0, 1.0, 2.0}) {
      const Eigen::Vector2d w(std::cos(phi), std::sin(phi));
      const double h = 1e-5;
      const auto xp = nearest_root(evolute_sample(s, Eigen::Vector2d(p0 + h * w)), root.chart_angle).solution->center_world;
      const auto xm = nearest_root(evolute_sample(s, Eigen::Vector2d(p0 - h * w)), root.chart_angle).solution->center_world;
      const Eigen::Vector3d v = push_forward_vector(frame, Eigen::Vector3d((xp - xm) / (2 * h)));
      EXPECT_LT(std::abs(g.coeffs.dot(v)), 1e-6 * std::max(1.0, v.norm()));
    }
  }
}

TEST(Trace, MovingFrameVelocityAndPickDerivative) {
  // In coordinates of the moving frame whose first axis kills the cubic form:
  // G . X' + b' (eta^3 - 3 eta xi^2) z = 0.
  const auto s = graph({{{3, 0}, 1.0}, {{1, 2}, -3.0}, {{2, 2}, 1.0}, {{1, 3}, 0.5}, {{5, 0}, 1.0}},
                       Patch{-0.2, 0.2, -0.2, 0.2});
  const Eigen::Vector2d p0(0, 0);
  const auto frame0 = normalize_at(s, p0);
  double phi0 = 0;
  cubic_killing_b(frame0, std::nullopt, &phi0);
  const auto root = nearest_root(evolute_sample(s, p0), 0.0);
  ASSERT_TRUE(root.solution);
  const auto killing_frame = [&](const Eigen::Vector2d& p) {
    const auto f = normalize_at(s, p);
    double phi = 0;
    cubic_killing_b(f, phi0, &phi);
    return rotate_frame(f, phi);
  };
  const auto local_center = [&](const Eigen::Vector2d& p) {
    const auto x = nearest_root(evolute_sample(s, p), root.chart_angle).solution->center_world;
    return push_forward_point(killing_frame(p), x);
  };
  const auto k0 = killing_frame(p0);
  const double xi = std::cos(root.root.theta - phi0), eta = std::sin(root.root.theta - phi0);
  const double cubic = eta * eta * eta - 3 * eta * xi * xi;
  ASSERT_GT(std::abs(cubic), 0.1);
  const Eigen::Vector3d g(xi / 2, eta / 2, k0.b * cubic);
  const double z = local_center(p0)(2);
  double largest = 0;
  for (const Eigen::Vector2d w : {Eigen::Vector2d(0, 1), Eigen::Vector2d(0.6, 0.8), Eigen::Vector2d(1, 0)}) {
    const auto identity_gap = [&](double h) {
      const Eigen::Vector3d v = (local_center(p0 + h * w) - local_center(p0 - h * w)) / (2 * h);
      return g.dot(v) + pick_derivative(s, p0, w, h) * cubic * z;
    };
    const double bz = std::abs(pick_derivative(s, p0, w) * cubic * z);
    EXPECT_LT(std::abs(identity_gap(1e-4)), 1e-5 * std::max(1.0, bz));
    largest = std::max(largest, bz);
  }
  EXPECT_GT(largest, 1e-2);
}
