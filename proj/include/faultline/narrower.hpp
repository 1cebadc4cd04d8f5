#pragma once

// Turns the detected cloud into ordered per-fault point sequences.
//
// narrow():  each point is projected onto a least-squares quadratic fitted
//            to its k nearest neighbours in a local frame aligned with the
//            neighbourhood's principal direction. Repeated a few times, the
//            band of detected sites contracts onto a thin curve.
// cluster(): connected components of the link-radius graph.
// order_along_curve(): greedy walk from an endpoint following the local
//            tangent.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "faultline/detail/parallel.hpp"
#include "faultline/errors.hpp"
#include "faultline/geometry.hpp"

namespace faultline {

struct NarrowedPoint {
  Point2 position;
  Point2 tangent{1.0, 0.0};
  SiteId source_index = 0;
  bool degenerate = false;  // neighbourhood had no spread; passed through
};

struct FaultPolyline {
  std::vector<NarrowedPoint> points;
  bool closed = false;
};

inline std::vector<Point2> positions(std::span<const NarrowedPoint> pts) {
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(p.position);
  return out;
}

struct NarrowConfig {
  std::size_t knn = 10;
  std::size_t iterations = 3;
  bool quadratic = true;  // false: regression line only
  std::size_t threads = 0;
};

namespace detail {

// Unit principal direction of a symmetric 2x2 second-moment matrix.
inline Point2 principal_direction(double sxx, double sxy, double syy) {
  const double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  return {std::cos(angle), std::sin(angle)};
}

inline Point2 normalized(Point2 p) {
  const double n = norm(p);
  return n > 0.0 ? (1.0 / n) * p : Point2{1.0, 0.0};
}

// Sign convention for undirected tangents: positive x, or positive y on
// the vertical.
inline Point2 canonical_tangent(Point2 t) {
  if (t.x < 0.0 || (t.x == 0.0 && t.y < 0.0)) return {-t.x, -t.y};
  return t;
}

struct LocalFit {
  Point2 position;
  Point2 tangent;
  bool degenerate = false;
};

inline LocalFit fit_local(Point2 p, std::span<const Point2> nbhd, bool quadratic) {
  const std::size_t n = nbhd.size();
  Point2 centroid{};
  double radius = 0.0;
  for (const Point2 q : nbhd) {
    centroid = centroid + q;
    radius = std::max(radius, distance(p, q));
  }
  centroid = (1.0 / static_cast<double>(n)) * centroid;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const Point2 q : nbhd) {
    const Point2 d = q - centroid;
    sxx += d.x * d.x;
    sxy += d.x * d.y;
    syy += d.y * d.y;
  }
  if (!(sxx + syy > 0.0) || !(radius > 0.0)) return {p, {1.0, 0.0}, true};

  const Point2 t = principal_direction(sxx, sxy, syy);
  const Point2 nrm{-t.y, t.x};

  // Local coordinates scaled by the neighbourhood radius.
  const int cols = quadratic && n >= 3 ? 3 : 2;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), cols);
  Eigen::VectorXd s(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const Point2 d = (1.0 / radius) * (nbhd[j] - p);
    const double tau = dot(d, t);
    const auto row = static_cast<Eigen::Index>(j);
    a(row, 0) = 1.0;
    a(row, 1) = tau;
    if (cols == 3) a(row, 2) = tau * tau;
    s(row) = dot(d, nrm);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  double c = 0.0;
  double b = 0.0;
  if (qr.rank() == cols) {
    const Eigen::VectorXd coef = qr.solve(s);
    c = coef(0) * radius;
    b = coef(1);
  }
  // Fall back to the principal line through the centroid when the fit is
  // rank deficient or lands outside the neighbourhood.
  if (qr.rank() < cols || !std::isfinite(c) || std::abs(c) > radius) {
    c = dot(centroid - p, nrm);
    b = 0.0;
  }
  return {p + c * nrm, canonical_tangent(normalized(t + b * nrm)), false};
}

}  // namespace detail

/// Iteratively projects points onto local least-squares curves. Each
/// iteration reads the previous iterate only.
inline std::vector<NarrowedPoint> narrow(std::span<const Point2> points,
                                         std::span<const SiteId> source_ids,
                                         const NarrowConfig& cfg = {}) {
  if (cfg.knn < 2) throw InvalidInput("narrow: knn must be >= 2");
  if (points.size() <= cfg.knn) {
    throw InvalidInput("narrow: need more than " + std::to_string(cfg.knn) + " points, got " +
                       std::to_string(points.size()));
  }
  if (!source_ids.empty() && source_ids.size() != points.size()) {
    throw InvalidInput("narrow: source id count does not match points");
  }
  std::vector<NarrowedPoint> cur(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    cur[i].position = points[i];
    cur[i].source_index = source_ids.empty() ? i : source_ids[i];
  }
  std::vector<NarrowedPoint> next = cur;
  std::vector<Point2> pos(points.begin(), points.end());
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const KdTree tree(pos);
    detail::parallel_for(cur.size(), cfg.threads, [&](std::size_t i) {
      const auto hits = tree.knn(pos[i], cfg.knn);
      std::vector<Point2> nbhd;
      nbhd.reserve(hits.size());
      for (const auto& h : hits) nbhd.push_back(pos[h.index]);
      const auto fit = detail::fit_local(pos[i], nbhd, cfg.quadratic);
      next[i].position = fit.position;
      next[i].tangent = fit.degenerate ? cur[i].tangent : fit.tangent;
      next[i].degenerate = fit.degenerate;
    });
    std::swap(cur, next);
    for (std::size_t i = 0; i < cur.size(); ++i) pos[i] = cur[i].position;
  }
  return cur;
}

inline std::vector<NarrowedPoint> narrow(std::span<const Point2> points,
                                         const NarrowConfig& cfg = {}) {
  return narrow(points, {}, cfg);
}

struct ClusterConfig {
  double link_radius = 0.0;
  std::size_t min_size = 5;
};

struct Clustering {
  std::vector<std::vector<std::size_t>> clusters;  // indices into the input, ascending
  std::vector<std::size_t> discarded;              // members of undersized components
};

/// Connected components of the graph joining points within link_radius.
/// Components are ordered by their smallest member.
inline Clustering cluster(std::span<const NarrowedPoint> pts, const ClusterConfig& cfg) {
  if (!(cfg.link_radius > 0.0)) throw InvalidInput("cluster: link_radius must be positive");
  std::vector<Point2> pos;
  pos.reserve(pts.size());
  for (const auto& p : pts) pos.push_back(p.position);
  const KdTree tree(pos);

  std::vector<std::size_t> parent(pts.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < pos.size(); ++i) {
    for (const auto& h : tree.within(pos[i], cfg.link_radius)) {
      const std::size_t a = find(i), b = find(h.index);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<std::vector<std::size_t>> comps;
  std::vector<std::size_t> slot(pts.size(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::size_t r = find(i);
    if (slot[r] == pts.size()) {
      slot[r] = comps.size();
      comps.emplace_back();
    }
    comps[slot[r]].push_back(i);
  }
  Clustering out;
  for (auto& c : comps) {
    if (c.size() < cfg.min_size) {
      out.discarded.insert(out.discarded.end(), c.begin(), c.end());
    } else {
      out.clusters.push_back(std::move(c));
    }
  }
  std::sort(out.discarded.begin(), out.discarded.end());
  return out;
}

struct OrderConfig {
  double spacing = 0.0;          // 0: median nearest-neighbour spacing of the cluster
  double radius_factor = 3.0;    // search radius in spacings
  double min_step_factor = 0.5;  // closer points are absorbed, not emitted
  double bridge_radius = 0.0;    // fallback search radius across gaps; 0 disables
  std::size_t tangent_window = 5;
  double min_coverage = 0.9;
};

struct OrderResult {
  FaultPolyline polyline;
  std::size_t emitted = 0;
  std::size_t absorbed = 0;  // visited but not emitted (behind the walk or too close)
  double coverage = 0.0;     // (emitted + absorbed) / cluster size
  bool failed = false;       // coverage below min_coverage
};

namespace detail {

// Principal direction of the last `window` points, oriented along travel.
inline Point2 trailing_tangent(std::span<const NarrowedPoint> pts, std::size_t window,
                               Point2 fallback) {
  const std::size_t n = std::min(window, pts.size());
  if (n < 2) return fallback;
  const auto tail = pts.subspan(pts.size() - n);
  Point2 c{};
  for (const auto& p : tail) c = c + p.position;
  c = (1.0 / static_cast<double>(n)) * c;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : tail) {
    const Point2 d = p.position - c;
    sxx += d.x * d.x;
    sxy += d.x * d.y;
    syy += d.y * d.y;
  }
  Point2 t = principal_direction(sxx, sxy, syy);
  const Point2 travel = tail.back().position - tail.front().position;
  if (dot(t, travel) < 0.0) t = {-t.x, -t.y};
  return t;
}

}  // namespace detail

/// Orders a cluster along its curve. Starts at the point whose neighbours
/// lie most one-sidedly along its tangent, then repeatedly steps to the
/// nearest unvisited point ahead of the current direction. Points within the
/// search radius that fall behind the walk, or closer than the minimum step,
/// are absorbed. When nothing lies ahead within the search radius the walk
/// may jump a gap of up to bridge_radius.
inline OrderResult order_along_curve(std::span<const NarrowedPoint> pts,
                                     const OrderConfig& cfg = {}) {
  if (pts.size() < 5) throw TooFewPoints("order_along_curve: need at least 5 points");
  std::vector<Point2> pos = positions(pts);
  const KdTree tree(pos);
  double spacing = cfg.spacing;
  if (!(spacing > 0.0)) spacing = median_nn_spacing(tree);
  if (!(spacing > 0.0)) throw InvalidInput("order_along_curve: cluster has zero spacing");
  const double radius = cfg.radius_factor * spacing;
  const double min_step = cfg.min_step_factor * spacing;
  const double reach = std::max(radius, cfg.bridge_radius);

  // Endpoint: one-sidedness |sum proj| / sum |proj| over the neighbourhood.
  std::size_t start = 0;
  double best = -1.0;
  Point2 start_dir{1.0, 0.0};
  for (std::size_t i = 0; i < pos.size(); ++i) {
    auto hits = tree.within(pos[i], reach);
    if (hits.size() < 3) hits = tree.knn(pos[i], 10);
    double sum = 0.0, abs_sum = 0.0;
    for (const auto& h : hits) {
      const double pr = dot(pos[h.index] - pos[i], pts[i].tangent);
      sum += pr;
      abs_sum += std::abs(pr);
    }
    const double score = abs_sum > 0.0 ? std::abs(sum) / abs_sum : 0.0;
    if (score > best) {
      best = score;
      start = i;
      start_dir = sum >= 0.0 ? pts[i].tangent : Point2{-pts[i].tangent.x, -pts[i].tangent.y};
    }
  }

  OrderResult out;
  std::vector<bool> visited(pts.size(), false);
  std::size_t cur = start;
  Point2 dir = start_dir;
  visited[cur] = true;
  out.polyline.points.push_back(pts[cur]);
  ++out.emitted;

  // Nearest candidate ahead, preferring a 60-degree cone around dir.
  auto pick_ahead = [&](const std::vector<Neighbor>& hits, bool absorb) {
    std::optional<std::size_t> cone_pick, any_pick;
    double cone_d = 0.0, any_d = 0.0;
    for (const auto& h : hits) {
      if (visited[h.index]) continue;
      const double pr = dot(pos[h.index] - pos[cur], dir);
      if (h.distance < min_step || pr <= 0.0) {
        if (absorb) {
          visited[h.index] = true;
          ++out.absorbed;
        }
        continue;
      }
      if (pr >= 0.5 * h.distance && (!cone_pick || h.distance < cone_d)) {
        cone_pick = h.index;
        cone_d = h.distance;
      }
      if (!any_pick || h.distance < any_d) {
        any_pick = h.index;
        any_d = h.distance;
      }
    }
    return cone_pick ? cone_pick : any_pick;
  };

  for (;;) {
    auto pick = pick_ahead(tree.within(pos[cur], radius), true);
    if (!pick && reach > radius) pick = pick_ahead(tree.within(pos[cur], reach), false);
    if (!pick) break;
    cur = *pick;
    visited[cur] = true;
    out.polyline.points.push_back(pts[cur]);
    ++out.emitted;
    dir = detail::trailing_tangent(out.polyline.points, cfg.tangent_window, dir);
  }
  out.coverage = static_cast<double>(out.emitted + out.absorbed) / static_cast<double>(pts.size());
  out.failed = out.coverage < cfg.min_coverage;
  return out;
}

/// Proper or touching intersection of segments [a,b] and [c,d].
inline bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  auto orient = [](Point2 p, Point2 q, Point2 r) {
    const double v = cross(q - p, r - p);
    return (v > 0.0) - (v < 0.0);
  };
  auto on_segment = [](Point2 p, Point2 q, Point2 r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
           r.y <= std::max(p.y, q.y);
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  return (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) ||
         (o3 == 0 && on_segment(c, d, a)) || (o4 == 0 && on_segment(c, d, b));
}

/// True if two non-adjacent segments of the polyline meet.
inline bool has_self_intersection(std::span<const Point2> line) {
  const std::size_t n = line.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 2; j + 1 < n; ++j) {
      if (segments_intersect(line[i], line[i + 1], line[j], line[j + 1])) return true;
    }
  }
  return false;
}

}  // namespace faultline
