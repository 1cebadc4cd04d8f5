#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "faultline/curvefit.hpp"

using namespace faultline;

TEST(Spline, CollinearInputStaysOnLine) {
  const std::vector<Point2> pts{{0, 0}, {0.1, 0.2}, {0.35, 0.7}, {0.4, 0.8}, {1, 2}};
  const auto s = fit_spline(pts);
  for (const Point2 p : sample_curve(s, 200)) EXPECT_NEAR(p.y, 2.0 * p.x, 1e-12);
}

TEST(Spline, InterpolatesKnots) {
  const std::vector<Point2> pts{{0, 0}, {0.3, 0.5}, {0.2, 1.1}, {0.9, 1.4}, {1.2, 0.7}, {2, 1}};
  const auto s = fit_spline(pts);
  ASSERT_EQ(s.knots().size(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point2 q = s(s.knots()[i]);
    EXPECT_NEAR(q.x, pts[i].x, 1e-12);
    EXPECT_NEAR(q.y, pts[i].y, 1e-12);
  }
}

TEST(Spline, ChordLengthKnots) {
  const std::vector<Point2> pts{{0, 0}, {3, 4}, {3, 5}, {0, 5}};
  const auto s = fit_spline(pts);
  EXPECT_DOUBLE_EQ(s.knots()[0], 0.0);
  EXPECT_DOUBLE_EQ(s.knots()[1], 5.0);
  EXPECT_DOUBLE_EQ(s.knots()[2], 6.0);
  EXPECT_DOUBLE_EQ(s.knots()[3], 9.0);
}

TEST(Spline, TwiceContinuousWithNaturalEnds) {
  std::vector<Point2> pts;
  for (int i = 0; i < 12; ++i) pts.push_back({0.1 * i + 0.02 * (i % 3), std::sin(0.7 * i)});
  const auto s = fit_spline(pts);
  const auto k = s.knots();
  for (std::size_t i = 1; i + 1 < k.size(); ++i) {
    const Point2 l = s.second_derivative(k[i], true);
    const Point2 r = s.second_derivative(k[i], false);
    EXPECT_NEAR(l.x, r.x, 1e-9);
    EXPECT_NEAR(l.y, r.y, 1e-9);
    const double e = 1e-9;
    const Point2 dl = s.derivative(k[i] - e), dr = s.derivative(k[i] + e);
    EXPECT_NEAR(dl.x, dr.x, 1e-6);
    EXPECT_NEAR(dl.y, dr.y, 1e-6);
  }
  EXPECT_NEAR(norm(s.second_derivative(s.t_begin())), 0.0, 1e-9);
  EXPECT_NEAR(norm(s.second_derivative(s.t_end(), true)), 0.0, 1e-9);
}

TEST(Spline, CircleArcIsAccurate) {
  std::vector<Point2> pts;
  for (int i = 0; i <= 20; ++i) {
    const double a = 0.5 * std::numbers::pi * i / 20.0;
    pts.push_back({0.4 * std::cos(a), 0.4 * std::sin(a)});
  }
  for (const Point2 p : sample_curve(fit_spline(pts), 500)) {
    EXPECT_NEAR(norm(p), 0.4, 1e-3);
  }
}

TEST(Spline, SampleEndpointsAndCount) {
  const std::vector<Point2> pts{{0, 0}, {1, 0.5}, {2, 0}, {3, 0.5}};
  const auto s = fit_spline(pts);
  const auto two = sample_curve(s, 2);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two.front(), pts.front());
  EXPECT_NEAR(two.back().x, 3.0, 1e-12);
  EXPECT_NEAR(two.back().y, 0.5, 1e-12);
  EXPECT_EQ(sample_curve(s, 500).size(), 500u);
  EXPECT_THROW(sample_curve(s, 1), InvalidInput);
}

TEST(Spline, EquivariantUnderRigidMotion) {
  const std::vector<Point2> pts{{0, 0}, {0.3, 0.5}, {0.2, 1.1}, {0.9, 1.4}, {1.2, 0.7}};
  const double c = std::cos(0.8), sn = std::sin(0.8);
  auto move = [&](Point2 p) { return Point2{c * p.x - sn * p.y + 2.0, sn * p.x + c * p.y - 1.0}; };
  std::vector<Point2> moved;
  for (const Point2 p : pts) moved.push_back(move(p));
  const auto a = sample_curve(fit_spline(pts), 100);
  const auto b = sample_curve(fit_spline(moved), 100);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(distance(move(a[i]), b[i]), 0.0, 1e-12);
  }
}

TEST(Spline, RejectsDegenerateInput) {
  EXPECT_THROW(fit_spline(std::vector<Point2>{{0, 0}, {1, 1}, {2, 2}}), TooFewPoints);
  EXPECT_THROW(fit_spline(std::vector<Point2>{{0, 0}, {1, 1}, {1, 1}, {2, 2}}), InvalidInput);
}
