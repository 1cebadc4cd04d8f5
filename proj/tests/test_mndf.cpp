#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "faultline/mndf.hpp"
#include "support.hpp"

using namespace faultline;
using faultline::testing::cross_stencil;
using faultline::testing::random_stencil;

namespace {

// Minimiser of sum_j w_j^2 d_j^(2 mu) subject to exactness on every monomial
// (x - z)^alpha with |alpha| < q, centre weight included as an unknown with
// zero cost. Solved as one dense KKT system in unscaled coordinates.
Eigen::VectorXd kkt_weights(const Stencil& s, const OperatorSpec& op, int q, double mu) {
  std::vector<MultiIndex> alphas{{0, 0}};
  for (int d = 1; d < q; ++d) {
    for (int a = d; a >= 0; --a) alphas.push_back({a, d - a});
  }
  const int n = static_cast<int>(s.size()) + 1;  // index 0 is the centre
  const int m = static_cast<int>(alphas.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + m, n + m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + m);
  for (int j = 1; j < n; ++j) k(j, j) = 2.0 * std::pow(s.distances[j - 1], 2.0 * mu);
  for (int r = 0; r < m; ++r) {
    const auto a = alphas[r];
    k(n + r, 0) = k(0, n + r) = (a.dx == 0 && a.dy == 0) ? 1.0 : 0.0;
    for (int j = 1; j < n; ++j) {
      const Point2 o = s.offsets[j - 1];
      k(n + r, j) = k(j, n + r) = std::pow(o.x, a.dx) * std::pow(o.y, a.dy);
    }
    const auto it = op.targets.find(a);
    if (it != op.targets.end()) {
      rhs(n + r) = it->second * std::tgamma(a.dx + 1.0) * std::tgamma(a.dy + 1.0);
    }
  }
  return k.fullPivLu().solve(rhs).head(n);
}

double objective(const Stencil& s, const std::vector<double>& w, double mu) {
  double sum = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) sum += w[j] * w[j] * std::pow(s.distances[j], 2 * mu);
  return sum;
}

}  // namespace

TEST(Mndf, CrossStencilCentralDifference) {
  const auto s = cross_stencil({0.3, -0.2}, 0.1);
  const auto g = solve_gradient(s);
  EXPECT_NEAR(g.dx.weights[0], 5.0, 1e-12);
  EXPECT_NEAR(g.dx.weights[1], -5.0, 1e-12);
  EXPECT_NEAR(g.dx.weights[2], 0.0, 1e-12);
  EXPECT_NEAR(g.dx.weights[3], 0.0, 1e-12);
  EXPECT_NEAR(g.dx.center_weight, 0.0, 1e-12);
  EXPECT_NEAR(g.dy.weights[2], 5.0, 1e-12);
  EXPECT_NEAR(g.dy.weights[3], -5.0, 1e-12);
  EXPECT_NEAR(g.dy.weights[0], 0.0, 1e-12);
}

TEST(Mndf, MatchesKktOracle) {
  std::mt19937_64 rng(101);
  for (const double mu : {0.5, 1.0, 2.0}) {
    for (int q : {2, 3}) {
      for (int t = 0; t < 50; ++t) {
        const auto s = random_stencil(rng, q == 2 ? 6 : 10);
        const MndfConfig cfg{q, mu};
        for (const auto& op : {OperatorSpec::partial_x(), OperatorSpec::partial_y()}) {
          const auto w = solve_mndf(s, op, cfg);
          const auto oracle = kkt_weights(s, op, q, mu);
          const double scale = oracle.cwiseAbs().maxCoeff();
          EXPECT_NEAR(w.center_weight, oracle(0), 1e-9 * scale);
          for (std::size_t j = 0; j < s.size(); ++j) {
            EXPECT_NEAR(w.weights[j], oracle(static_cast<int>(j) + 1), 1e-9 * scale);
          }
        }
      }
    }
  }
}

TEST(Mndf, SecondOrderOperatorMatchesOracle) {
  std::mt19937_64 rng(5);
  const OperatorSpec lap{2, {{MultiIndex{2, 0}, 1.0}, {MultiIndex{0, 2}, 1.0}}};
  for (int t = 0; t < 20; ++t) {
    const auto s = random_stencil(rng, 12);
    const auto w = solve_mndf(s, lap, {3, 2.0});
    const auto oracle = kkt_weights(s, lap, 3, 2.0);
    const double scale = oracle.cwiseAbs().maxCoeff();
    for (std::size_t j = 0; j < s.size(); ++j) {
      EXPECT_NEAR(w.weights[j], oracle(static_cast<int>(j) + 1), 1e-9 * scale);
    }
    for (const double r : exactness_residuals(s, lap, 3, w)) EXPECT_LE(r, 1e-8 * scale);
  }
}

TEST(Mndf, ExactOnLinearPolynomials) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const auto s = random_stencil(rng);
    const auto g = solve_gradient(s);
    for (const double r : exactness_residuals(s, OperatorSpec::partial_x(), 2, g.dx)) {
      EXPECT_LE(r, 1e-10);
    }
    for (const double r : exactness_residuals(s, OperatorSpec::partial_y(), 2, g.dy)) {
      EXPECT_LE(r, 1e-10);
    }
  }
}

TEST(Mndf, ConstantsAreAnnihilated) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    const auto g = solve_gradient(random_stencil(rng));
    double sum = g.dx.center_weight;
    for (const double w : g.dx.weights) sum += w;
    EXPECT_NEAR(sum, 0.0, 1e-10);
  }
}

TEST(Mndf, MinimalAgainstFeasiblePerturbations) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 50; ++t) {
    const auto s = random_stencil(rng, 8);
    const auto w = solve_mndf(s, OperatorSpec::partial_x());
    // Null space of the neighbour constraint rows.
    Eigen::MatrixXd p(2, static_cast<int>(s.size()));
    for (std::size_t j = 0; j < s.size(); ++j) {
      p(0, static_cast<int>(j)) = s.offsets[j].x;
      p(1, static_cast<int>(j)) = s.offsets[j].y;
    }
    const Eigen::MatrixXd kernel = p.fullPivLu().kernel();
    const double base = objective(s, w.weights, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd c(kernel.cols());
      for (int i = 0; i < c.size(); ++i) c(i) = nd(rng);
      const Eigen::VectorXd v = kernel * c;
      auto moved = w.weights;
      for (std::size_t j = 0; j < moved.size(); ++j) moved[j] += 1e-3 * v(static_cast<int>(j));
      EXPECT_GT(objective(s, moved, 1.0), base);
    }
  }
}

TEST(Mndf, ScalesAsInverseH) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int t = 0; t < 50; ++t) {
    const auto s = random_stencil(rng);
    const auto g1 = solve_gradient(s);
    double wmax = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      wmax = std::max({wmax, std::abs(g1.dx.weights[j]), std::abs(g1.dy.weights[j])});
    }
    for (const double h : {3.0, 0.25, 1e-3}) {
      const auto g = solve_gradient(scale_stencil(s, h, {u(rng), u(rng)}));
      for (std::size_t j = 0; j < s.size(); ++j) {
        EXPECT_NEAR(g.dx.weights[j] * h, g1.dx.weights[j], 1e-10 * wmax);
        EXPECT_NEAR(g.dy.weights[j] * h, g1.dy.weights[j], 1e-10 * wmax);
      }
    }
  }
}

TEST(Mndf, GrowthFactorOfCrossIsOne) {
  const auto s = cross_stencil({0, 0}, 0.1);
  const auto g = solve_gradient(s);
  EXPECT_NEAR(growth_factor(s, g.dx, 1.0), 1.0, 1e-12);
}

TEST(Mndf, GrowthFactorDirectSumAndScaleInvariance) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 30; ++t) {
    const auto s = random_stencil(rng);
    const auto w = solve_mndf(s, OperatorSpec::partial_x());
    double direct = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      direct += std::abs(w.weights[j]) * std::pow(s.distances[j], 1.5);
    }
    direct *= std::pow(s.radius, 1.0 - 1.5);
    EXPECT_NEAR(growth_factor(s, w, 1.5), direct, 1e-12 * direct);
    const auto small = scale_stencil(s, 0.01, {0.5, 0.5});
    const auto ws = solve_mndf(small, OperatorSpec::partial_x());
    EXPECT_NEAR(growth_factor(small, ws, 1.5), direct, 1e-9 * direct);
  }
}

TEST(Mndf, GradientConvergesLinearly) {
  // Fixed asymmetric shape shrunk towards a point; each halving of h must at
  // least roughly halve the error.
  const Point2 z{0.3, 0.2};
  const std::vector<Point2> shape{{1, 0.1}, {-0.4, 0.8}, {-0.9, -0.3}, {0.2, -1}, {0.7, 0.6},
                                  {-0.5, 0.1}};
  auto f = [](Point2 p) { return std::sin(p.x) * std::cos(p.y); };
  auto err_at = [&](double h) {
    std::vector<Point2> pts;
    std::vector<SiteId> ids;
    for (std::size_t j = 0; j < shape.size(); ++j) {
      pts.push_back(z + h * shape[j]);
      ids.push_back(j + 1);
    }
    const auto s = make_stencil(0, z, ids, pts);
    const auto g = solve_gradient(s);
    double gx = g.dx.center_weight * f(z), gy = g.dy.center_weight * f(z);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      gx += g.dx.weights[j] * f(pts[j]);
      gy += g.dy.weights[j] * f(pts[j]);
    }
    return std::hypot(gx - std::cos(z.x) * std::cos(z.y), gy + std::sin(z.x) * std::sin(z.y));
  };
  double prev = err_at(0.2);
  for (const double h : {0.1, 0.05, 0.025, 0.0125}) {
    const double e = err_at(h);
    EXPECT_GT(prev / e, 1.8);
    prev = e;
  }
}

TEST(Mndf, CollinearStencilIsSingular) {
  const auto s =
      make_stencil(0, {0, 0}, {1, 2, 3, 4, 5, 6},
                   {{0.1, 0.1}, {0.2, 0.2}, {-0.1, -0.1}, {0.3, 0.3}, {-0.2, -0.2}, {0.05, 0.05}});
  EXPECT_THROW(solve_gradient(s), SingularConstraints);
}

TEST(Mndf, TooFewNeighbours) {
  const auto s = make_stencil(0, {0, 0}, {1}, {{0.1, 0}});
  EXPECT_THROW(solve_gradient(s), SingularConstraints);
  EXPECT_EQ(min_stencil_size(2), 2u);
  EXPECT_EQ(min_stencil_size(3), 5u);
}

TEST(Mndf, RejectsInvalidConfig) {
  const auto s = cross_stencil();
  EXPECT_THROW(solve_mndf(s, OperatorSpec::partial_x(), {1, 1.0}), InvalidInput);
  EXPECT_THROW(solve_mndf(s, OperatorSpec::partial_x(), {2, 0.0}), InvalidInput);
}
