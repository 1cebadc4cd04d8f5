#pragma once

// Synthetic benchmark: a piecewise function on [0,1]^2 with two faults (a
// quarter circle of radius 0.4 about the origin and the sinusoid
// x = 0.7 + 0.1 sin(2 pi y)), plus seeded uniform and variable-density
// samplers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "faultline/errors.hpp"
#include "faultline/geometry.hpp"

namespace faultline {

/// A fault curve given by a map from [0,1] onto the curve, plus the
/// residual of its implicit equation (zero on the curve).
struct ExactFault {
  std::string name;
  std::function<Point2(double)> param;
  std::function<double(Point2)> residual;
};

/// A piecewise function with known faults on a rectangular domain.
struct TestSurface {
  std::string name;
  Rect domain;
  std::function<double(Point2)> evaluate;
  std::vector<ExactFault> faults;
};

namespace two_fault {

inline constexpr double kRadiusSq = 0.16;

inline double sinusoid_x(double y) { return 0.7 + 0.1 * std::sin(2.0 * std::numbers::pi * y); }

inline double cap_branch(Point2 p) {
  return std::sqrt(4.0 - p.x * p.x - p.y * p.y) - 2.0 * std::sqrt(0.99) + 0.1;
}
inline double ramp_branch(Point2 p) {
  return p.x - 0.4 - 0.1 * std::sin(2.0 * std::numbers::pi * p.y);
}
inline double lowered_branch(Point2 p) { return ramp_branch(p) - 0.2; }

inline bool in_cap(Point2 p) { return p.x * p.x + p.y * p.y <= kRadiusSq; }
inline bool in_ramp(Point2 p) { return !in_cap(p) && p.x <= sinusoid_x(p.y); }
inline bool in_lowered(Point2 p) { return !in_cap(p) && p.x > sinusoid_x(p.y); }

enum FaultId : std::size_t { kSinusoid = 0, kQuarterCircle = 1 };

}  // namespace two_fault

/// Evaluates the two-fault surface. Throws InvalidInput outside [0,1]^2.
inline double eval_surface(Point2 p) {
  if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
    throw InvalidInput("eval_surface: point outside [0,1]^2");
  }
  if (two_fault::in_cap(p)) return two_fault::cap_branch(p);
  if (two_fault::in_ramp(p)) return two_fault::ramp_branch(p);
  return two_fault::lowered_branch(p);
}

/// Fault 0 is the sinusoid, fault 1 the quarter circle.
inline TestSurface two_fault_surface() {
  TestSurface s;
  s.name = "two_fault";
  s.domain = Rect{{0.0, 0.0}, {1.0, 1.0}};
  s.evaluate = eval_surface;
  s.faults.push_back({"sinusoid",
                      [](double t) { return Point2{two_fault::sinusoid_x(t), t}; },
                      [](Point2 p) { return p.x - two_fault::sinusoid_x(p.y); }});
  s.faults.push_back({"quarter_circle",
                      [](double t) {
                        const double a = 0.5 * std::numbers::pi * t;
                        return Point2{0.4 * std::cos(a), 0.4 * std::sin(a)};
                      },
                      [](Point2 p) { return p.x * p.x + p.y * p.y - two_fault::kRadiusSq; }});
  return s;
}

/// m points uniformly spaced in the curve parameter, endpoints included.
inline std::vector<Point2> discretize_fault(const ExactFault& fault, std::size_t m = 500) {
  if (m < 2) throw InvalidInput("discretize_fault: need m >= 2");
  std::vector<Point2> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.push_back(fault.param(static_cast<double>(i) / static_cast<double>(m - 1)));
  }
  return out;
}

inline std::vector<Point2> discretize_exact_fault(std::size_t fault_id, std::size_t m = 500) {
  const auto surface = two_fault_surface();
  if (fault_id >= surface.faults.size()) throw InvalidInput("discretize_exact_fault: bad id");
  return discretize_fault(surface.faults[fault_id], m);
}

enum class SamplerKind { uniform, variable_density };

/// Variable density is proportional to base + slope * (x - x0) / (x1 - x0)
/// over the domain, sampled by rejection.
struct SamplerSpec {
  SamplerKind kind = SamplerKind::uniform;
  std::size_t count = 10000;
  std::uint64_t seed = 1;
  double density_base = 0.25;
  double density_slope = 0.75;
};

inline constexpr const char* kPrngName = "mt19937_64";

namespace detail {

// 53 high bits of the engine output mapped to [0, 1). Portable across
// standard libraries, unlike std::uniform_real_distribution.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Draws count distinct sites in the surface domain and attaches values.
inline PointCloud sample(const SamplerSpec& spec, const TestSurface& surface) {
  if (spec.count < 1) throw InvalidInput("sample: count must be >= 1");
  if (spec.kind == SamplerKind::variable_density &&
      !(spec.density_base > 0.0 && spec.density_base + spec.density_slope > 0.0)) {
    throw InvalidInput("sample: density profile must be positive on the domain");
  }
  std::mt19937_64 rng(spec.seed);
  const Rect& dom = surface.domain;
  const double w = dom.hi.x - dom.lo.x;
  const double hgt = dom.hi.y - dom.lo.y;
  const double peak = std::max(spec.density_base, spec.density_base + spec.density_slope);

  std::set<std::pair<double, double>> seen;
  std::vector<Point2> sites;
  std::vector<double> values;
  sites.reserve(spec.count);
  values.reserve(spec.count);
  while (sites.size() < spec.count) {
    const double u = detail::unit_uniform(rng);
    const double v = detail::unit_uniform(rng);
    if (spec.kind == SamplerKind::variable_density) {
      const double accept = (spec.density_base + spec.density_slope * u) / peak;
      if (detail::unit_uniform(rng) >= accept) continue;
    }
    const Point2 p{dom.lo.x + w * u, dom.lo.y + hgt * v};
    if (!seen.emplace(p.x, p.y).second) continue;
    sites.push_back(p);
    values.push_back(surface.evaluate(p));
  }
  return PointCloud(std::move(sites), std::move(values));
}

inline PointCloud sample(const SamplerSpec& spec) { return sample(spec, two_fault_surface()); }

}  // namespace faultline
