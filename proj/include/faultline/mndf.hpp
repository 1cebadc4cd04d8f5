#pragma once

// l2-minimal numerical differentiation formulas on scattered stencils.
//
// For a linear differential operator D of order k and a stencil around z,
// the weights minimise sum_j w_j^2 |x_j - z|^(2 mu) subject to exactness on
// every monomial (x - z)^alpha with 1 <= |alpha| <= q - 1. The constant
// monomial is handled by an implicit centre weight w_c = D[1](z) - sum_j w_j,
// which keeps the zero-distance centre out of the objective.
//
// The equality-constrained least-norm problem is solved through its Schur
// complement: with M = diag(d_j^(2 mu)) and P the constraint matrix,
//   (P M^-1 P^T) lambda = b,   w = M^-1 P^T lambda.
// Offsets are scaled by the stencil radius first, which leaves the
// minimiser unchanged and keeps the Gram matrix well conditioned.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "faultline/errors.hpp"
#include "faultline/geometry.hpp"

namespace faultline {

struct MultiIndex {
  int dx = 0;
  int dy = 0;

  int order() const { return dx + dy; }
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// D = sum_alpha c_alpha d^alpha, constant coefficients.
struct OperatorSpec {
  int order_k = 1;
  std::map<MultiIndex, double> targets;

  static OperatorSpec partial_x() { return {1, {{MultiIndex{1, 0}, 1.0}}}; }
  static OperatorSpec partial_y() { return {1, {{MultiIndex{0, 1}, 1.0}}}; }

  void validate() const {
    if (order_k < 1) throw InvalidInput("operator: order must be >= 1");
    bool top = false;
    for (const auto& [alpha, c] : targets) {
      if (alpha.dx < 0 || alpha.dy < 0 || alpha.order() > order_k) {
        throw InvalidInput("operator: multi-index outside order");
      }
      if (alpha.order() == order_k && c != 0.0) top = true;
    }
    if (!top) throw InvalidInput("operator: no nonzero coefficient of top order");
  }

  // D applied to the constant 1.
  double constant_action() const {
    const auto it = targets.find(MultiIndex{0, 0});
    return it == targets.end() ? 0.0 : it->second;
  }
};

struct MndfConfig {
  int exactness_q = 2;       // exact on polynomials of total degree <= q - 1
  double exponent_mu = 1.0;  // exponent r + gamma of the minimised seminorm

  void validate(int order_k) const {
    if (exactness_q <= order_k) {
      throw InvalidInput("mndf: exactness order q=" + std::to_string(exactness_q) +
                         " must exceed operator order " + std::to_string(order_k));
    }
    if (!(exponent_mu > 0.0) || !std::isfinite(exponent_mu)) {
      throw InvalidInput("mndf: exponent must be positive");
    }
  }
};

struct ScalarWeights {
  std::vector<double> weights;  // one per stencil neighbour
  double center_weight = 0.0;
  double seminorm_value = 0.0;
};

struct GradientWeights {
  ScalarWeights dx;
  ScalarWeights dy;
};

namespace detail {

inline double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Monomials of total degree 1..q-1, degree-major, x-power descending.
inline std::vector<MultiIndex> constraint_monomials(int q) {
  std::vector<MultiIndex> out;
  for (int d = 1; d < q; ++d) {
    for (int a = d; a >= 0; --a) out.push_back({a, d - a});
  }
  return out;
}

inline double monomial(MultiIndex alpha, Point2 offset) {
  return ipow(offset.x, alpha.dx) * ipow(offset.y, alpha.dy);
}

// Dense LU with partial pivoting, row-major n x n. Returns nullopt when a
// pivot falls below rel_tol times the largest pivot magnitude encountered
// (or the largest entry of the matrix, whichever is bigger).
inline std::optional<std::vector<double>> lu_solve(std::vector<double> a, std::vector<double> b,
                                                   double rel_tol) {
  const std::size_t n = b.size();
  double scale = 0.0;
  for (const double v : a) scale = std::max(scale, std::abs(v));
  if (!(scale > 0.0)) return std::nullopt;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    }
    const double p = a[piv * n + k];
    if (std::abs(p) <= rel_tol * scale) return std::nullopt;
    scale = std::max(scale, std::abs(p));
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / p;
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a[k * n + j] * x[j];
    x[k] = s / a[k * n + k];
  }
  return x;
}

inline constexpr double kPivotTolerance = 1e-12;

}  // namespace detail

/// Number of neighbours needed for the constraint count at order q.
inline std::size_t min_stencil_size(int q) {
  return static_cast<std::size_t>(q * (q + 1) / 2 - 1);
}

/// Weights of the l2-minimal formula for op on the stencil. Throws
/// SingularConstraints when the stencil is not unisolvent for degree q-1.
inline ScalarWeights solve_mndf(const Stencil& stencil, const OperatorSpec& op,
                                const MndfConfig& cfg = {}) {
  op.validate();
  cfg.validate(op.order_k);
  const auto alphas = detail::constraint_monomials(cfg.exactness_q);
  const std::size_t m = alphas.size();
  const std::size_t n = stencil.size();
  if (n < m) {
    throw SingularConstraints("mndf: " + std::to_string(n) + " neighbours cannot satisfy " +
                              std::to_string(m) + " exactness constraints");
  }
  const double h = stencil.radius;

  // Scaled constraint matrix P (m x n) and inverse objective weights.
  std::vector<double> p(m * n);
  std::vector<double> inv_metric(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Point2 u = (1.0 / h) * stencil.offsets[j];
    for (std::size_t r = 0; r < m; ++r) p[r * n + j] = detail::monomial(alphas[r], u);
    inv_metric[j] = 1.0 / std::pow(stencil.distances[j] / h, 2.0 * cfg.exponent_mu);
  }
  std::vector<double> rhs(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const auto it = op.targets.find(alphas[r]);
    if (it == op.targets.end()) continue;
    rhs[r] = detail::factorial(alphas[r].dx) * detail::factorial(alphas[r].dy) * it->second /
             detail::ipow(h, alphas[r].order());
  }

  std::vector<double> gram(m * m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = r; c < m; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += p[r * n + j] * inv_metric[j] * p[c * n + j];
      gram[r * m + c] = s;
      gram[c * m + r] = s;
    }
  }
  const auto lambda = detail::lu_solve(std::move(gram), std::move(rhs), detail::kPivotTolerance);
  if (!lambda) {
    throw SingularConstraints("mndf: stencil at site " + std::to_string(stencil.center_index) +
                              " is not unisolvent");
  }

  ScalarWeights out;
  out.weights.resize(n);
  double sum = 0.0;
  double semi = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < m; ++r) s += p[r * n + j] * (*lambda)[r];
    const double w = inv_metric[j] * s;
    out.weights[j] = w;
    sum += w;
    semi += w * w * std::pow(stencil.distances[j], 2.0 * cfg.exponent_mu);
  }
  out.center_weight = op.constant_action() - sum;
  out.seminorm_value = std::sqrt(semi);
  return out;
}

inline GradientWeights solve_gradient(const Stencil& stencil, const MndfConfig& cfg = {}) {
  return {solve_mndf(stencil, OperatorSpec::partial_x(), cfg),
          solve_mndf(stencil, OperatorSpec::partial_y(), cfg)};
}

/// |sum_j w_j p(x_j) + w_c p(z) - Dp(z)| for every monomial p = (x - z)^alpha
/// with |alpha| <= q - 1 (the constant first).
inline std::vector<double> exactness_residuals(const Stencil& stencil, const OperatorSpec& op,
                                               int q, const ScalarWeights& w) {
  std::vector<MultiIndex> alphas{{0, 0}};
  for (const auto a : detail::constraint_monomials(q)) alphas.push_back(a);
  std::vector<double> out;
  for (const auto alpha : alphas) {
    double s = alpha.order() == 0 ? w.center_weight : 0.0;
    for (std::size_t j = 0; j < stencil.size(); ++j) {
      s += w.weights[j] * detail::monomial(alpha, stencil.offsets[j]);
    }
    const auto it = op.targets.find(alpha);
    const double target = it == op.targets.end()
                              ? 0.0
                              : it->second * detail::factorial(alpha.dx) *
                                    detail::factorial(alpha.dy);
    out.push_back(std::abs(s - target));
  }
  return out;
}

/// The local sample z + v + h (x_j - z). Ids are kept.
inline Stencil scale_stencil(const Stencil& stencil, double h, Point2 translation) {
  if (!(h > 0.0)) throw InvalidInput("scale_stencil: h must be positive");
  const Point2 c = stencil.center + translation;
  std::vector<Point2> pts;
  pts.reserve(stencil.size());
  for (const Point2 x : stencil.neighbors) pts.push_back(c + h * (x - stencil.center));
  return make_stencil(stencil.center_index, c, stencil.neighbor_indices, std::move(pts));
}

/// h^(k - e) sum_j |w_j| |x_j - z|^e, the scale-free constant of the error
/// bound |D^f - Df| <= sigma h^(e - k) |f|.
inline double growth_factor(const Stencil& stencil, const ScalarWeights& w, double exponent,
                            int order_k = 1) {
  double s = 0.0;
  for (std::size_t j = 0; j < stencil.size(); ++j) {
    s += std::abs(w.weights[j]) * std::pow(stencil.distances[j], exponent);
  }
  return std::pow(stencil.radius, order_k - exponent) * s;
}

}  // namespace faultline
