#pragma once

// Writes every stage artifact of a pipeline run into one directory.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "faultline/io/csv.hpp"
#include "faultline/io/plot.hpp"
#include "faultline/io/report.hpp"
#include "faultline/pipeline.hpp"

namespace faultline::io {

inline constexpr const char* kDetectedFile = "detected.csv";
inline constexpr const char* kIndicatorFile = "indicator.csv";
inline constexpr const char* kNarrowedFile = "narrowed.csv";
inline constexpr const char* kPolylinesFile = "polylines.csv";
inline constexpr const char* kSplinesFile = "splines.csv";
inline constexpr const char* kExactFile = "exact_faults.csv";
inline constexpr const char* kMetricsFile = "metrics.json";
inline constexpr const char* kReportFile = "report.json";

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

inline std::string join(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

inline PolylineSet exact_fault_set(const std::vector<std::vector<Point2>>& exact) {
  PolylineSet out;
  for (std::size_t i = 0; i < exact.size(); ++i) out[static_cast<long long>(i)] = exact[i];
  return out;
}

/// The four stage plots. Returns the paths written.
inline std::vector<std::string> emit_plots(const PipelineResult& r, const std::string& dir) {
  ensure_dir(dir);
  Rect dom = r.cloud.bounds();
  auto data_layer = [&](const char* color) {
    PlotLayer l{PlotLayer::Kind::points, "data", color, 0.8, false, {}};
    l.points.assign(r.cloud.sites().begin(), r.cloud.sites().end());
    return l;
  };
  auto exact_layers = [&](SvgPlot& plot, bool dashed) {
    for (const auto& f : r.exact_faults) {
      plot.add({PlotLayer::Kind::polyline, "exact", "#000000", 1.2, dashed, f});
    }
  };
  std::vector<std::string> paths;

  SvgPlot data("data and exact faults", dom);
  data.add(data_layer("#4c72b0"));
  exact_layers(data, false);
  paths.push_back(join(dir, "1_data.svg"));
  data.save(paths.back());

  SvgPlot detected("detected set", dom);
  detected.add(data_layer("#c8c8c8"));
  if (!r.candidates.indices.empty()) {
    PlotLayer l{PlotLayer::Kind::points, "detected", "#d62728", 1.6, false, {}};
    for (const SiteId i : r.candidates.indices) l.points.push_back(r.cloud.site(i));
    detected.add(std::move(l));
  }
  paths.push_back(join(dir, "2_detected.svg"));
  detected.save(paths.back());

  SvgPlot narrowed("narrowed set", dom);
  std::map<long long, std::vector<Point2>> by_cluster;
  for (std::size_t k = 0; k < r.narrowed.size(); ++k) {
    by_cluster[r.narrowed_cluster.empty() ? -1 : r.narrowed_cluster[k]].push_back(
        r.narrowed[k].position);
  }
  for (auto& [c, pts] : by_cluster) {
    const char* color = c < 0 ? "#7f7f7f" : kPalette[static_cast<std::size_t>(c) % kPalette.size()];
    narrowed.add({PlotLayer::Kind::points, "narrowed", color, 1.6, false, std::move(pts)});
  }
  paths.push_back(join(dir, "3_narrowed.svg"));
  narrowed.save(paths.back());

  SvgPlot rec("reconstructed faults", dom);
  exact_layers(rec, true);
  for (const auto& f : r.faults) {
    if (f.samples.empty()) continue;
    rec.add({PlotLayer::Kind::polyline, "reconstructed", kPalette[f.fault_id % kPalette.size()],
             2.0, false, f.samples});
  }
  paths.push_back(join(dir, "4_reconstructed.svg"));
  rec.save(paths.back());
  return paths;
}

/// Stage CSVs, metrics, report and plots.
inline void write_artifacts(const PipelineResult& r, const std::string& dir) {
  ensure_dir(dir);
  std::vector<Point2> dsites;
  std::vector<double> dvals;
  for (const SiteId i : r.candidates.indices) {
    dsites.push_back(r.cloud.site(i));
    dvals.push_back(r.cloud.value(i));
  }
  write_cloud_csv(join(dir, kDetectedFile), dsites, dvals);
  write_indicator_csv(join(dir, kIndicatorFile), r.cloud, r.field.values);

  PolylineSet narrowed;
  for (std::size_t k = 0; k < r.narrowed.size(); ++k) {
    narrowed[r.narrowed_cluster.empty() ? -1 : r.narrowed_cluster[k]].push_back(
        r.narrowed[k].position);
  }
  write_polylines_csv(join(dir, kNarrowedFile), narrowed);

  PolylineSet polylines, splines;
  for (const auto& f : r.faults) {
    const auto id = static_cast<long long>(f.fault_id);
    polylines[id] = positions(f.polyline.points);
    if (!f.samples.empty()) splines[id] = f.samples;
  }
  write_polylines_csv(join(dir, kPolylinesFile), polylines);
  write_polylines_csv(join(dir, kSplinesFile), splines);

  if (!r.exact_faults.empty()) {
    write_polylines_csv(join(dir, kExactFile), exact_fault_set(r.exact_faults));
  }
  if (r.report.metrics) write_json(join(dir, kMetricsFile), to_json(*r.report.metrics));
  write_json(join(dir, kReportFile), to_json(r.report));
  emit_plots(r, dir);
}

}  // namespace faultline::io
