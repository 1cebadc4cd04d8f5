#pragma once

// Fault indicator and detection of fault-adjacent sites.
//
// The indicator at site i is the norm of the MNDF gradient estimate divided
// by the norm of (sum_j |w_j1| d_j, sum_j |w_j2| d_j). In smooth regions it
// is bounded by the local Lipschitz constant of f; across a jump it grows
// like 1/h.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "faultline/detail/parallel.hpp"
#include "faultline/errors.hpp"
#include "faultline/geometry.hpp"
#include "faultline/mndf.hpp"

namespace faultline {

struct DetectorConfig {
  std::size_t stencil_size = 6;  // q(q+1) for q = 2
  double theta = 0.8;
  MndfConfig mndf{};
  std::size_t threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (stencil_size < min_stencil_size(mndf.exactness_q)) {
      throw ConfigError("detector: stencil_size " + std::to_string(stencil_size) +
                        " is below the constraint count");
    }
    if (std::isnan(theta) || theta < 0.0) throw ConfigError("detector: theta must be >= 0");
    mndf.validate(1);
  }
};

/// Indicator value per site. Sites whose stencil stayed singular after
/// enlargement hold NaN and are listed in failed_sites.
struct IndicatorField {
  std::vector<double> values;
  std::size_t stencil_size = 0;
  double theta = 0.0;
  MndfConfig mndf{};
  std::vector<SiteId> failed_sites;
};

struct FaultCandidateSet {
  std::vector<SiteId> indices;  // ascending
  double theta = 0.0;
};

struct DetectionResult {
  IndicatorField field;
  FaultCandidateSet candidates;
};

/// Indicator from explicit values at the neighbours and at the centre.
inline double indicator_from_values(const Stencil& stencil, const GradientWeights& gw,
                                    std::span<const double> neighbor_values,
                                    double center_value) {
  if (neighbor_values.size() != stencil.size()) {
    throw InvalidInput("indicator: value count does not match stencil");
  }
  double gx = gw.dx.center_weight * center_value;
  double gy = gw.dy.center_weight * center_value;
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t j = 0; j < stencil.size(); ++j) {
    gx += gw.dx.weights[j] * neighbor_values[j];
    gy += gw.dy.weights[j] * neighbor_values[j];
    sx += std::abs(gw.dx.weights[j]) * stencil.distances[j];
    sy += std::abs(gw.dy.weights[j]) * stencil.distances[j];
  }
  const double denom = std::hypot(sx, sy);
  if (!(denom > 0.0)) throw DegenerateDenominator("indicator: all weights vanish");
  return std::hypot(gx, gy) / denom;
}

inline double indicator_at(const PointCloud& cloud, const Stencil& stencil,
                           const GradientWeights& gw) {
  std::vector<double> vals;
  vals.reserve(stencil.size());
  for (const SiteId j : stencil.neighbor_indices) vals.push_back(cloud.value(j));
  return indicator_from_values(stencil, gw, vals, cloud.value(stencil.center_index));
}

/// Sites with indicator strictly above theta.
inline FaultCandidateSet threshold(const IndicatorField& field, double theta) {
  FaultCandidateSet out;
  out.theta = theta;
  for (SiteId i = 0; i < field.values.size(); ++i) {
    if (field.values[i] > theta) out.indices.push_back(i);
  }
  return out;
}

inline DetectionResult detect(const PointCloud& cloud, const KdTree& index,
                              const DetectorConfig& cfg = {}) {
  cfg.validate();
  if (cloud.size() <= cfg.stencil_size) {
    throw InvalidInput("detect: cloud of " + std::to_string(cloud.size()) +
                       " sites is too small for stencil size " + std::to_string(cfg.stencil_size));
  }
  const std::size_t enlarged = std::min(2 * cfg.stencil_size, cloud.size() - 1);

  DetectionResult out;
  auto& field = out.field;
  field.stencil_size = cfg.stencil_size;
  field.theta = cfg.theta;
  field.mndf = cfg.mndf;
  field.values.assign(cloud.size(), std::numeric_limits<double>::quiet_NaN());

  detail::parallel_for(cloud.size(), cfg.threads, [&](std::size_t i) {
    for (const std::size_t n : {cfg.stencil_size, enlarged}) {
      const Stencil st = build_stencil(cloud, index, i, n);
      try {
        field.values[i] = indicator_at(cloud, st, solve_gradient(st, cfg.mndf));
        return;
      } catch (const SingularConstraints&) {
        if (n == enlarged) return;
      }
    }
  });
  for (SiteId i = 0; i < cloud.size(); ++i) {
    if (std::isnan(field.values[i])) field.failed_sites.push_back(i);
  }
  out.candidates = threshold(field, cfg.theta);
  return out;
}

}  // namespace faultline
