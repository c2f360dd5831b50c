#include "aek/jet.hpp"
#include "aek/surface.hpp"
#include "support/random.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace aek;
using aek::testkit::Rng;

namespace {

using Q = Rational;

Jet2<Q> X(int order = 5) { return Jet2<Q>::variable(0, order); }
Jet2<Q> Y(int order = 5) { return Jet2<Q>::variable(1, order); }

Jet2<Q> mono(int i, int j, Q v, int order = 5) { return Jet2<Q>::monomial({i, j}, v, order); }

// a(x^3 - 3xy^2) + b(y^3 - 3yx^2)
Jet2<Q> cubic(const Q& a, const Q& b) {
  return a * (mono(3, 0, 1) - mono(1, 2, 3)) + b * (mono(0, 3, 1) - mono(2, 1, 3));
}

}  // namespace

TEST(JetArithmetic, AddIsCoefficientwise) {
  const auto s = X() + Y();
  EXPECT_EQ(s.coeff({1, 0}), Q(1));
  EXPECT_EQ(s.coeff({0, 1}), Q(1));
  EXPECT_EQ(s.max_abs_coeff(), Q(1));
  const auto p = mono(2, 1, Q(3, 7)) + mono(0, 4, Q(-2));
  EXPECT_EQ(p + Jet2<Q>(5), p);
}

TEST(JetArithmetic, CubicReadsOffItsCoefficients) {
  const auto f = cubic(1, 0);
  EXPECT_EQ(f, mono(3, 0, 1) - mono(1, 2, 3));
}

TEST(JetArithmetic, MultiplyTruncates) {
  EXPECT_EQ((X() + Y()) * (X() - Y()), mono(2, 0, 1) - mono(0, 2, 1));
  const auto x2 = mono(2, 0, 1, 2);
  EXPECT_TRUE((x2 * x2).is_zero());
  const auto half = Q(1, 2) * (mono(2, 0, 1) + mono(0, 2, 1));
  EXPECT_EQ(half * half, mono(4, 0, Q(1, 4)) + mono(2, 2, Q(1, 2)) + mono(0, 4, Q(1, 4)));
}

TEST(JetArithmetic, OrderMismatchIsRejected) {
  EXPECT_THROW(X(4) + X(5), std::invalid_argument);
  EXPECT_THROW(X(4) * X(5), std::invalid_argument);
  EXPECT_THROW(mono(2, 0, 1, 2).set_coeff({3, 0}, Q(1)), std::out_of_range);
  EXPECT_EQ(mono(2, 0, 1, 2).coeff({3, 0}), Q(0));
}

TEST(JetCompose, LinearSubstitution) {
  const auto p = mono(2, 0, 1);
  EXPECT_EQ((compose<Q, 2, 2>(p, {X() + Y(), Y()})), mono(2, 0, 1) + mono(1, 1, 2) + mono(0, 2, 1));
}

TEST(JetCompose, RejectsConstantTerm) {
  const auto p = mono(2, 0, 1);
  EXPECT_THROW((compose<Q, 2, 2>(p, {X() + Jet2<Q>::constant(1, 5), Y()})), std::invalid_argument);
}

TEST(JetCompose, UnitSphereGraphMatchesBinomialSeries) {
  // 1 - sqrt(1 - t), t = x^2 + y^2: t/2 + t^2/8 + t^3/16 + ...
  const auto surface = SurfaceModel<Q>::sphere_cap(Q(1), Patch{-0.5, 0.5, -0.5, 0.5});
  const auto j = surface.jet_at(Vector2<Q>(0, 0), 4);
  const auto t = Jet2<Q>::monomial({2, 0}, 1, 4) + Jet2<Q>::monomial({0, 2}, 1, 4);
  EXPECT_EQ(j, Q(1, 2) * t + Q(1, 8) * (t * t));
  EXPECT_EQ(j.coeff({4, 0}), Q(1, 8));
  EXPECT_EQ(j.coeff({2, 2}), Q(1, 4));
  EXPECT_EQ(j.coeff({0, 4}), Q(1, 8));
}

TEST(JetCompose, QuarterTurnSubstitution) {
  // x -> y, y -> -x applied to x^3 - 3xy^2 gives y^3 - 3yx^2, i.e. (a, b) = (0, 1).
  const auto f = cubic(1, 0);
  const auto g = compose<Q, 2, 2>(f, {Y(), -X()});
  EXPECT_EQ(g, cubic(0, 1));
  // The opposite quarter turn x -> -y, y -> x gives (0, -1).
  EXPECT_EQ((compose<Q, 2, 2>(f, {-Y(), X()})), cubic(0, -1));
}

TEST(JetCompose, AssociatesForLinearSubstitutions) {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = testkit::random_jet<Q, 2>(rng, 5);
    Matrix2<Q> a, b;
    for (int i = 0; i < 4; ++i) {
      a.data()[i] = testkit::random_rational(rng);
      b.data()[i] = testkit::random_rational(rng);
    }
    auto lin = [](const Matrix2<Q>& m, const Jet2<Q>& u, const Jet2<Q>& v) {
      return std::array<Jet2<Q>, 2>{m(0, 0) * u + m(0, 1) * v, m(1, 0) * u + m(1, 1) * v};
    };
    const auto pa = compose<Q, 2, 2>(p, lin(a, X(), Y()));
    const auto pab = compose<Q, 2, 2>(pa, lin(b, X(), Y()));
    const Matrix2<Q> ab = a * b;
    EXPECT_EQ(pab, (compose<Q, 2, 2>(p, lin(ab, X(), Y()))));
  }
}

TEST(JetPartial, Examples) {
  const auto f = cubic(1, 0);
  EXPECT_EQ(partial(f, 0), mono(2, 0, 3) - mono(0, 2, 3));
  EXPECT_EQ(partial(f, 1), mono(1, 1, -6));
  const auto normal = Q(1, 2) * (mono(2, 0, 1) + mono(0, 2, 1)) + f + mono(4, 0, Q(1, 8));
  EXPECT_EQ(partial(normal, 0).constant_term(), Q(0));
  EXPECT_THROW(partial(f, 2), std::out_of_range);
}

TEST(JetPartial, MixedPartialsCommute) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = testkit::random_jet<Q, 2>(rng, 5);
    EXPECT_EQ(partial(partial(p, 0), 1), partial(partial(p, 1), 0));
  }
  const auto q = testkit::random_jet<Q, 4>(rng, 4);
  EXPECT_EQ(partial(partial(q, 0), 3), partial(partial(q, 3), 0));
}

TEST(JetShift, Examples) {
  const auto x2 = mono(2, 0, 1);
  const auto s = taylor_shift(x2, Vector2<Q>(1, 0));
  EXPECT_EQ(s, Jet2<Q>::constant(1, 5) + mono(1, 0, 2) + mono(2, 0, 1));
  Rng rng(3);
  const auto p = testkit::random_jet<Q, 2>(rng, 5);
  EXPECT_EQ(taylor_shift(p, Vector2<Q>(0, 0)), p);
}

TEST(JetShift, SphereHessianAtOffsetPoint) {
  // Height r - sqrt(r^2 - u^2 - v^2) has Hessian (r^2 - v^2, uv; uv, r^2 - u^2) / w^(3/2), w = r^2 - u^2 - v^2.
  const auto surface = SurfaceModel<double>::sphere_cap(1.0, Patch{-0.5, 0.5, -0.5, 0.5});
  const double u = 0.1;
  const double w = 1.0 - u * u;
  const Eigen::Matrix2d h = surface.hessian(Eigen::Vector2d(u, 0));
  EXPECT_NEAR(h(0, 0), 1.0 / std::pow(w, 1.5), 1e-14);
  EXPECT_NEAR(h(1, 1), (1.0 - u * u) / std::pow(w, 1.5), 1e-14);
  EXPECT_NEAR(h(0, 1), 0.0, 1e-15);
  EXPECT_GT(h.determinant(), 0.0);
}

TEST(JetShift, ShiftThenEvaluateAgrees) {
  Rng rng(5);
  const auto p = testkit::random_jet<Q, 2>(rng, 5);
  const Vector2<Q> c(Q(1, 3), Q(-2, 5));
  const Vector2<Q> d(Q(3, 7), Q(1, 2));
  EXPECT_EQ(evaluate(taylor_shift(p, c), d), evaluate(p, Vector2<Q>(c + d)));
}

TEST(JetRing, AxiomsHoldExactly) {
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = testkit::random_jet<Q, 2>(rng, 5);
    const auto q = testkit::random_jet<Q, 2>(rng, 5);
    const auto r = testkit::random_jet<Q, 2>(rng, 5);
    EXPECT_EQ((p * q) * r, p * (q * r));
    EXPECT_EQ(p * (q + r), p * q + p * r);
    EXPECT_EQ(p * q, q * p);
    EXPECT_EQ(p + q, q + p);
  }
  const auto a = testkit::random_jet<Q, 4>(rng, 4);
  const auto b = testkit::random_jet<Q, 4>(rng, 4);
  const auto c = testkit::random_jet<Q, 4>(rng, 4);
  EXPECT_EQ((a * b) * c, a * (b * c));
}

TEST(JetRing, FloatTracksRational) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    Jet2<double> pd(5), qd(5);
    for (std::size_t i = 0; i < pd.size(); ++i) {
      pd[i] = testkit::random_double(rng);
      qd[i] = testkit::random_double(rng);
    }
    const Jet2<Q> pq = pd.cast<Q>();
    const Jet2<Q> qq = qd.cast<Q>();
    const auto exact = (pq * qq + pq).cast<double>();
    const auto approx = pd * qd + pd;
    const auto comp_exact = compose<Q, 2, 2>(pq, {(qq - Jet2<Q>::constant(qq.constant_term(), 5)), X()}).cast<double>();
    const auto comp_approx = compose<double, 2, 2>(pd, {qd - Jet2<double>::constant(qd.constant_term(), 5),
                                                        Jet2<double>::variable(0, 5)});
    for (std::size_t i = 0; i < exact.size(); ++i) {
      EXPECT_LE(std::abs(exact[i] - approx[i]), 1e-12 * std::max(1.0, std::abs(exact[i])));
      EXPECT_LE(std::abs(comp_exact[i] - comp_approx[i]), 1e-12 * std::max(1.0, std::abs(comp_exact[i])));
    }
  }
}

TEST(JetSeries, GeometricSeries) {
  // 1/(1 - h) with h = x
  std::vector<Q> ones(6, Q(1));
  const auto s = series_compose<Q, 2>(ones, X());
  for (int k = 0; k <= 5; ++k) EXPECT_EQ(s.coeff({k, 0}), Q(1));
  Jet1<Q> t = Jet1<Q>::variable(0, 8);
  const auto e = series_compose<Q, 1>(ones, t * t);
  EXPECT_EQ(e.coeff({8}), Q(1));
  EXPECT_EQ(e.coeff({7}), Q(0));
}

TEST(LinearForm, IsClosedUnderJetScaling) {
  Rng rng(2);
  LinearFormJet<Q> f(testkit::random_jet<Q, 4>(rng, 4), testkit::random_jet<Q, 4>(rng, 4),
                     testkit::random_jet<Q, 4>(rng, 4), testkit::random_jet<Q, 4>(rng, 4));
  const auto g = Q(2) * f - f;
  EXPECT_EQ(g, f);
  EXPECT_TRUE((f - f).is_zero());
  EXPECT_EQ(f.homogeneous_part(2).cx, f.cx.homogeneous_part(2));
}

TEST(ScalarText, ParsesLiteralsExactly) {
  EXPECT_EQ(parse_rational("3/4"), Rational(3, 4));
  EXPECT_EQ(parse_rational("-6/8"), Rational(-3, 4));
  EXPECT_EQ(parse_rational("0.125"), Rational(1, 8));
  EXPECT_EQ(parse_rational("-0.0625"), Rational(-1, 16));
  EXPECT_EQ(parse_rational("0.08"), Rational(2, 25));
  EXPECT_EQ(parse_rational("010"), Rational(10));
  EXPECT_EQ(parse_rational("1.5e-3"), Rational(3, 2000));
  EXPECT_EQ(parse_rational("000"), Rational(0));
  EXPECT_EQ(rational_from_decimal(0.1), Rational(1, 10));
  for (const char* bad : {"", "1/0", "abc", "1.2.3", "2x"}) EXPECT_THROW(parse_rational(bad), std::invalid_argument) << bad;
}

TEST(ScalarText, FormatsRoundTrip) {
  EXPECT_EQ(format_rational(Rational(-3, 4)), "-3/4");
  EXPECT_EQ(format_rational(Rational(5)), "5");
  for (double v : {0.1, -2.5e-7, 1.0 / 3.0, 6.02e23}) EXPECT_EQ(std::stod(format_double(v)), v);
}
