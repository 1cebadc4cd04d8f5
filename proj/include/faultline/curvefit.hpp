#pragma once

// Interpolating C^2 parametric cubic splines with chord-length knots and
// natural end conditions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "faultline/errors.hpp"
#include "faultline/geometry.hpp"

namespace faultline {

class SplineCurve {
 public:
  // Per segment i, coordinate c(t) = a + b s + c s^2 + d s^3 with s = t - t_i.
  struct Cubic {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
    double operator()(double s) const { return a + s * (b + s * (c + s * d)); }
    double first(double s) const { return b + s * (2.0 * c + 3.0 * s * d); }
    double second(double s) const { return 2.0 * c + 6.0 * s * d; }
  };

  SplineCurve() = default;
  SplineCurve(std::vector<double> knots, std::vector<Cubic> xs, std::vector<Cubic> ys)
      : knots_(std::move(knots)), xs_(std::move(xs)), ys_(std::move(ys)) {}

  std::span<const double> knots() const { return knots_; }
  std::size_t segments() const { return xs_.size(); }
  double t_begin() const { return knots_.front(); }
  double t_end() const { return knots_.back(); }

  Point2 operator()(double t) const {
    const auto [i, s] = locate(t);
    return {xs_[i](s), ys_[i](s)};
  }
  Point2 derivative(double t) const {
    const auto [i, s] = locate(t);
    return {xs_[i].first(s), ys_[i].first(s)};
  }
  // Second derivative from the left (segment - 1) or right side of a knot.
  Point2 second_derivative(double t, bool from_left = false) const {
    auto [i, s] = locate(t);
    if (from_left && i > 0 && s == 0.0) {
      --i;
      s = knots_[i + 1] - knots_[i];
    }
    return {xs_[i].second(s), ys_[i].second(s)};
  }

 private:
  std::pair<std::size_t, double> locate(double t) const {
    t = std::clamp(t, knots_.front(), knots_.back());
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    std::size_t i = static_cast<std::size_t>(std::distance(knots_.begin(), it));
    i = i == 0 ? 0 : std::min(i - 1, xs_.size() - 1);
    return {i, t - knots_[i]};
  }

  std::vector<double> knots_;
  std::vector<Cubic> xs_;
  std::vector<Cubic> ys_;
};

namespace detail {

// Natural cubic spline through (t_i, v_i): solve the tridiagonal system for
// the second derivatives M_i with M_0 = M_n = 0 (Thomas algorithm).
inline std::vector<SplineCurve::Cubic> natural_cubic(std::span<const double> t,
                                                     std::span<const double> v) {
  const std::size_t n = t.size() - 1;
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = t[i + 1] - t[i];
  std::vector<double> m(n + 1, 0.0);
  if (n >= 2) {
    const std::size_t k = n - 1;  // interior unknowns M_1..M_{n-1}
    std::vector<double> diag(k), upper(k), rhs(k);
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t i = r + 1;
      diag[r] = 2.0 * (h[i - 1] + h[i]);
      upper[r] = h[i];
      rhs[r] = 6.0 * ((v[i + 1] - v[i]) / h[i] - (v[i] - v[i - 1]) / h[i - 1]);
    }
    for (std::size_t r = 1; r < k; ++r) {
      const double f = h[r] / diag[r - 1];  // lower[r] = h[r]
      diag[r] -= f * upper[r - 1];
      rhs[r] -= f * rhs[r - 1];
    }
    m[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t r = k - 1; r-- > 0;) m[r + 1] = (rhs[r] - upper[r] * m[r + 2]) / diag[r];
  }
  std::vector<SplineCurve::Cubic> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].a = v[i];
    out[i].b = (v[i + 1] - v[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
    out[i].c = 0.5 * m[i];
    out[i].d = (m[i + 1] - m[i]) / (6.0 * h[i]);
  }
  return out;
}

}  // namespace detail

/// Chord-length natural cubic spline through the points, in order.
inline SplineCurve fit_spline(std::span<const Point2> pts) {
  if (pts.size() < 4) {
    throw TooFewPoints("fit_spline: need at least 4 points, got " + std::to_string(pts.size()));
  }
  std::vector<double> t(pts.size(), 0.0), xs(pts.size()), ys(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    xs[i] = pts[i].x;
    ys[i] = pts[i].y;
    if (i > 0) {
      const double chord = distance(pts[i], pts[i - 1]);
      if (!(chord > 0.0)) throw InvalidInput("fit_spline: consecutive points coincide");
      t[i] = t[i - 1] + chord;
    }
  }
  auto cx = detail::natural_cubic(t, xs);
  auto cy = detail::natural_cubic(t, ys);
  return SplineCurve(std::move(t), std::move(cx), std::move(cy));
}

/// m points at uniformly spaced parameters, both ends included.
inline std::vector<Point2> sample_curve(const SplineCurve& spline, std::size_t m = 500) {
  if (m < 2) throw InvalidInput("sample_curve: need m >= 2");
  std::vector<Point2> out;
  out.reserve(m);
  const double t0 = spline.t_begin();
  const double span = spline.t_end() - t0;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = i + 1 == m ? spline.t_end()
                                : t0 + span * static_cast<double>(i) / static_cast<double>(m - 1);
    out.push_back(spline(t));
  }
  return out;
}

}  // namespace faultline
