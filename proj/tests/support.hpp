#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "faultline/geometry.hpp"

namespace faultline::testing {

inline Point2 random_in_disk(std::mt19937_64& rng, double radius = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::sqrt(u(rng));
  const double a = 2.0 * std::numbers::pi * u(rng);
  return {r * std::cos(a), r * std::sin(a)};
}

// n neighbours in the unit disk around a centre also in the disk. Retries
// until the offsets are far from collinear and no neighbour is near the
// centre.
inline Stencil random_stencil(std::mt19937_64& rng, std::size_t n = 6) {
  for (;;) {
    const Point2 c = random_in_disk(rng);
    std::vector<Point2> pts;
    std::vector<SiteId> ids;
    bool ok = true;
    for (std::size_t j = 0; j < n; ++j) {
      pts.push_back(random_in_disk(rng));
      ids.push_back(j + 1);
      if (distance(pts.back(), c) < 1e-3) ok = false;
    }
    if (!ok) continue;
    double spread = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        spread = std::max(spread, std::abs(cross(pts[a] - c, pts[b] - c)));
      }
    }
    if (spread < 1e-2) continue;
    return make_stencil(0, c, ids, pts);
  }
}

// The five-point cross with arm length h.
inline Stencil cross_stencil(Point2 c = {0, 0}, double h = 0.1) {
  return make_stencil(0, c, {1, 2, 3, 4},
                      {c + Point2{h, 0}, c + Point2{-h, 0}, c + Point2{0, h}, c + Point2{0, -h}});
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("faultline_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace faultline::testing
