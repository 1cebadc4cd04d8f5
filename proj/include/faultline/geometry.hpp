#pragma once

// Point-cloud storage, a 2-D kd-tree for nearest-neighbour queries, and
// stencil assembly. Every query orders hits by (distance, site index), so
// results are deterministic and identical to an exhaustive scan.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "faultline/errors.hpp"

namespace faultline {

using SiteId = std::size_t;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double squared_distance(Point2 a, Point2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}
inline double distance(Point2 a, Point2 b) { return std::sqrt(squared_distance(a, b)); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

struct Rect {
  Point2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Point2 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

  void expand(Point2 p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  bool contains(Point2 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
  // Squared distance from p to the rectangle (0 inside).
  double squared_distance_to(Point2 p) const {
    const double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
    const double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
    return dx * dx + dy * dy;
  }
};

/// Scattered sites with attached function values.
///
/// Construction validates the data: sizes must agree, all coordinates and
/// values must be finite, and no two sites may coincide. Violations throw
/// InvalidInput naming the offending rows (0-based record numbers).
class PointCloud {
 public:
  PointCloud() = default;

  PointCloud(std::vector<Point2> sites, std::vector<double> values)
      : sites_(std::move(sites)), values_(std::move(values)) {
    if (sites_.size() != values_.size()) {
      throw InvalidInput("point cloud: " + std::to_string(sites_.size()) + " sites but " +
                         std::to_string(values_.size()) + " values");
    }
    if (sites_.empty()) throw InvalidInput("point cloud: no sites");
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      if (!is_finite(sites_[i]) || !std::isfinite(values_[i])) {
        throw InvalidInput("point cloud: non-finite entry in row " + std::to_string(i));
      }
      bounds_.expand(sites_[i]);
    }
    check_duplicates();
  }

  std::size_t size() const { return sites_.size(); }
  std::span<const Point2> sites() const { return sites_; }
  std::span<const double> values() const { return values_; }
  Point2 site(SiteId i) const { return sites_[i]; }
  double value(SiteId i) const { return values_[i]; }
  const Rect& bounds() const { return bounds_; }

 private:
  void check_duplicates() const {
    std::vector<std::size_t> order(sites_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const Point2 pa = sites_[a];
      const Point2 pb = sites_[b];
      return std::tie(pa.x, pa.y, a) < std::tie(pb.x, pb.y, b);
    });
    std::ostringstream msg;
    bool found = false;
    for (std::size_t k = 1; k < order.size(); ++k) {
      if (sites_[order[k]] == sites_[order[k - 1]]) {
        msg << (found ? "; " : "point cloud: duplicate sites in rows ") << order[k - 1] << " and "
            << order[k];
        found = true;
      }
    }
    if (found) throw InvalidInput(msg.str());
  }

  std::vector<Point2> sites_;
  std::vector<double> values_;
  Rect bounds_;
};

struct Neighbor {
  SiteId index = 0;
  double distance = 0.0;
};

/// Immutable kd-tree over a set of 2-D points. Safe for concurrent queries.
class KdTree {
 public:
  KdTree() = default;

  explicit KdTree(std::span<const Point2> points) : points_(points.begin(), points.end()) {
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), SiteId{0});
    if (!points_.empty()) {
      nodes_.reserve(2 * points_.size() / kLeafSize + 2);
      build(0, points_.size());
    }
  }

  std::size_t size() const { return points_.size(); }
  Point2 point(SiteId i) const { return points_[i]; }
  std::span<const Point2> points() const { return points_; }

  /// The k nearest points to q, sorted by nondecreasing distance (ties by
  /// index). An excluded index is skipped. Returns fewer than k hits only
  /// when the tree holds fewer eligible points.
  std::vector<Neighbor> knn(Point2 q, std::size_t k,
                            std::optional<SiteId> exclude = std::nullopt) const {
    std::vector<Key> heap;
    heap.reserve(k + 1);
    if (k > 0 && !nodes_.empty()) knn_recurse(0, q, k, exclude, heap);
    std::sort_heap(heap.begin(), heap.end());
    std::vector<Neighbor> out;
    out.reserve(heap.size());
    for (const auto& [d2, idx] : heap) out.push_back({idx, std::sqrt(d2)});
    return out;
  }

  /// All points within distance r of q (inclusive), sorted like knn().
  std::vector<Neighbor> within(Point2 q, double r) const {
    std::vector<Key> hits;
    if (!nodes_.empty() && r >= 0.0) radius_recurse(0, q, r * r, hits);
    std::sort(hits.begin(), hits.end());
    std::vector<Neighbor> out;
    out.reserve(hits.size());
    for (const auto& [d2, idx] : hits) out.push_back({idx, std::sqrt(d2)});
    return out;
  }

 private:
  static constexpr std::size_t kLeafSize = 8;
  using Key = std::pair<double, SiteId>;  // (squared distance, index)

  struct Node {
    Rect box;
    std::size_t begin = 0, end = 0;  // range in order_
    std::size_t left = 0, right = 0;  // child node ids; 0 means leaf
  };

  std::size_t build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back({});
    Rect box;
    for (std::size_t i = begin; i < end; ++i) box.expand(points_[order_[i]]);
    nodes_[id].box = box;
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    if (end - begin <= kLeafSize) return id;

    const bool split_x = (box.hi.x - box.lo.x) >= (box.hi.y - box.lo.y);
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](SiteId a, SiteId b) {
                       return split_x ? points_[a].x < points_[b].x : points_[a].y < points_[b].y;
                     });
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void knn_recurse(std::size_t id, Point2 q, std::size_t k, std::optional<SiteId> exclude,
                   std::vector<Key>& heap) const {
    const Node& node = nodes_[id];
    if (heap.size() == k && node.box.squared_distance_to(q) > heap.front().first) return;
    if (node.left == 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const SiteId idx = order_[i];
        if (exclude && *exclude == idx) continue;
        const Key key{squared_distance(q, points_[idx]), idx};
        if (heap.size() < k) {
          heap.push_back(key);
          std::push_heap(heap.begin(), heap.end());
        } else if (key < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = key;
          std::push_heap(heap.begin(), heap.end());
        }
      }
      return;
    }
    std::size_t near = node.left, far = node.right;
    if (nodes_[far].box.squared_distance_to(q) < nodes_[near].box.squared_distance_to(q)) {
      std::swap(near, far);
    }
    knn_recurse(near, q, k, exclude, heap);
    knn_recurse(far, q, k, exclude, heap);
  }

  void radius_recurse(std::size_t id, Point2 q, double r2, std::vector<Key>& hits) const {
    const Node& node = nodes_[id];
    if (node.box.squared_distance_to(q) > r2) return;
    if (node.left == 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const SiteId idx = order_[i];
        const double d2 = squared_distance(q, points_[idx]);
        if (d2 <= r2) hits.emplace_back(d2, idx);
      }
      return;
    }
    radius_recurse(node.left, q, r2, hits);
    radius_recurse(node.right, q, r2, hits);
  }

  std::vector<Point2> points_;
  std::vector<SiteId> order_;
  std::vector<Node> nodes_;
};

inline KdTree build_index(const PointCloud& cloud) { return KdTree(cloud.sites()); }

/// A centre site plus its local sample. Neighbour positions are stored
/// absolutely; offsets are taken relative to the centre.
struct Stencil {
  SiteId center_index = 0;
  Point2 center;
  std::vector<SiteId> neighbor_indices;
  std::vector<Point2> neighbors;
  std::vector<Point2> offsets;
  std::vector<double> distances;
  double radius = 0.0;

  std::size_t size() const { return neighbors.size(); }
};

/// Assembles a stencil from explicit neighbour positions (ids are carried
/// through unchanged). Throws InvalidInput if a neighbour coincides with the
/// centre.
inline Stencil make_stencil(SiteId center_index, Point2 center,
                            std::vector<SiteId> neighbor_indices, std::vector<Point2> neighbors) {
  Stencil s;
  s.center_index = center_index;
  s.center = center;
  s.neighbor_indices = std::move(neighbor_indices);
  s.neighbors = std::move(neighbors);
  if (s.neighbor_indices.size() != s.neighbors.size()) {
    throw InvalidInput("stencil: neighbour ids and positions differ in length");
  }
  s.offsets.reserve(s.neighbors.size());
  s.distances.reserve(s.neighbors.size());
  for (const Point2 p : s.neighbors) {
    const Point2 off = p - center;
    const double d = norm(off);
    if (!(d > 0.0)) throw InvalidInput("stencil: neighbour coincides with centre");
    s.offsets.push_back(off);
    s.distances.push_back(d);
    s.radius = std::max(s.radius, d);
  }
  return s;
}

/// The n_neighbors sites nearest to the centre, excluding the centre itself.
inline Stencil build_stencil(const PointCloud& cloud, const KdTree& index, SiteId center_index,
                             std::size_t n_neighbors) {
  if (center_index >= cloud.size()) throw InvalidInput("stencil: centre index out of range");
  if (n_neighbors == 0 || n_neighbors >= cloud.size()) {
    throw InvalidInput("stencil: need 0 < n_neighbors < " + std::to_string(cloud.size()) +
                       ", got " + std::to_string(n_neighbors));
  }
  const Point2 c = cloud.site(center_index);
  const auto hits = index.knn(c, n_neighbors, center_index);
  std::vector<SiteId> ids;
  std::vector<Point2> pts;
  ids.reserve(hits.size());
  pts.reserve(hits.size());
  for (const auto& h : hits) {
    ids.push_back(h.index);
    pts.push_back(cloud.site(h.index));
  }
  return make_stencil(center_index, c, std::move(ids), std::move(pts));
}

/// Median distance from each point to its nearest other point.
inline double median_nn_spacing(const KdTree& index) {
  const std::size_t n = index.size();
  if (n < 2) return 0.0;
  std::vector<double> d(n);
  for (SiteId i = 0; i < n; ++i) d[i] = index.knn(index.point(i), 1, i).front().distance;
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid;
}

}  // namespace faultline
