#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "faultline/errors.hpp"
#include "faultline/geometry.hpp"

namespace faultline {

/// max over p in P of min over b in B of |p - b|. Brute force.
inline double max_min_distance(std::span<const Point2> p, std::span<const Point2> b) {
  if (p.empty() || b.empty()) throw InvalidInput("max_min_distance: empty point set");
  double worst = 0.0;
  for (const Point2 x : p) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point2 y : b) best = std::min(best, squared_distance(x, y));
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

/// Two-sided discrete Hausdorff distance.
inline double hausdorff(std::span<const Point2> a, std::span<const Point2> b) {
  return std::max(max_min_distance(a, b), max_min_distance(b, a));
}

struct FaultMatch {
  std::size_t reconstructed = 0;
  std::size_t exact = 0;
  double d_hausdorff = 0.0;
};

struct Assignment {
  std::vector<FaultMatch> matches;  // ordered by reconstructed id
  std::vector<std::size_t> unmatched_reconstructed;
  std::vector<std::size_t> unmatched_exact;
};

/// One-to-one greedy matching on the Hausdorff matrix: repeatedly take the
/// smallest remaining entry. Ties go to the lower exact id, then the lower
/// reconstructed id.
inline Assignment match_faults(std::span<const std::vector<Point2>> reconstructed,
                               std::span<const std::vector<Point2>> exact) {
  const std::size_t nr = reconstructed.size(), ne = exact.size();
  std::vector<double> dist(nr * ne);
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t e = 0; e < ne; ++e) dist[r * ne + e] = hausdorff(reconstructed[r], exact[e]);
  }
  std::vector<bool> used_r(nr, false), used_e(ne, false);
  Assignment out;
  for (std::size_t step = 0; step < std::min(nr, ne); ++step) {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (std::size_t e = 0; e < ne; ++e) {
      if (used_e[e]) continue;
      for (std::size_t r = 0; r < nr; ++r) {
        if (used_r[r]) continue;
        if (!best || dist[r * ne + e] < dist[best->first * ne + best->second]) best = {{r, e}};
      }
    }
    const auto [r, e] = *best;
    used_r[r] = used_e[e] = true;
    out.matches.push_back({r, e, dist[r * ne + e]});
  }
  std::sort(out.matches.begin(), out.matches.end(),
            [](const FaultMatch& a, const FaultMatch& b) { return a.reconstructed < b.reconstructed; });
  for (std::size_t r = 0; r < nr; ++r) {
    if (!used_r[r]) out.unmatched_reconstructed.push_back(r);
  }
  for (std::size_t e = 0; e < ne; ++e) {
    if (!used_e[e]) out.unmatched_exact.push_back(e);
  }
  return out;
}

struct FaultMetrics {
  std::size_t fault_id = 0;  // reconstructed fault
  std::size_t matched_exact_fault = 0;
  double d_hausdorff = 0.0;
  double d_points = 0.0;
};

struct MetricsReport {
  std::vector<FaultMetrics> faults;
  std::vector<std::size_t> unmatched_reconstructed;
  std::vector<std::size_t> unmatched_exact;
};

/// Scores reconstructed curves (sampled) and their narrowed point sets
/// against discretised exact faults.
inline MetricsReport score(std::span<const std::vector<Point2>> sampled_curves,
                           std::span<const std::vector<Point2>> narrowed_sets,
                           std::span<const std::vector<Point2>> exact) {
  if (sampled_curves.size() != narrowed_sets.size()) {
    throw InvalidInput("score: curve and narrowed-set counts differ");
  }
  const auto assignment = match_faults(sampled_curves, exact);
  MetricsReport out;
  for (const auto& m : assignment.matches) {
    out.faults.push_back({m.reconstructed, m.exact, m.d_hausdorff,
                          max_min_distance(narrowed_sets[m.reconstructed], exact[m.exact])});
  }
  out.unmatched_reconstructed = assignment.unmatched_reconstructed;
  out.unmatched_exact = assignment.unmatched_exact;
  return out;
}

}  // namespace faultline
