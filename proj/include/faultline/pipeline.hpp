#pragma once

// detect -> narrow -> cluster -> order -> fit -> score.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "faultline/curvefit.hpp"
#include "faultline/detector.hpp"
#include "faultline/geometry.hpp"
#include "faultline/metrics.hpp"
#include "faultline/narrower.hpp"
#include "faultline/synthdata.hpp"

namespace faultline {

struct RunConfig {
  // Input: either a CSV path or a synthetic sample.
  std::string input;
  std::optional<SamplerSpec> synth;

  std::size_t stencil_size = 6;
  double theta = 0.8;
  double exponent_mu = 1.0;
  std::size_t narrow_knn = 10;
  std::size_t narrow_iterations = 3;
  bool narrow_quadratic = true;
  double link_radius = 0.0;  // 0: link_factor x median nearest-neighbour spacing of the input
  double link_factor = 20.0;
  std::size_t min_cluster_size = 5;
  std::size_t samples = 500;  // spline discretisation m
  std::string output_dir = "faultline_out";
  std::size_t threads = 0;
  bool record_timings = false;

  void validate() const {
    if (stencil_size < min_stencil_size(2)) throw ConfigError("stencil_size too small");
    if (std::isnan(theta) || theta < 0.0) throw ConfigError("theta must be >= 0");
    if (!(exponent_mu > 0.0)) throw ConfigError("exponent_mu must be positive");
    if (narrow_knn < 3) throw ConfigError("narrow_knn must be >= 3");
    if (link_radius < 0.0) throw ConfigError("link_radius must be >= 0");
    if (!(link_factor > 0.0)) throw ConfigError("link_factor must be positive");
    if (min_cluster_size < 5) throw ConfigError("min_cluster_size must be >= 5");
    if (samples < 2) throw ConfigError("samples must be >= 2");
    if (synth && synth->count < 1) throw ConfigError("synth count must be >= 1");
    if (!synth && input.empty()) throw ConfigError("no input file or sampler settings given");
  }

  DetectorConfig detector() const {
    return {stencil_size, theta, MndfConfig{2, exponent_mu}, threads};
  }
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct FaultDiagnostics {
  std::size_t fault_id = 0;
  std::size_t cluster_size = 0;
  std::size_t emitted = 0;
  std::size_t absorbed = 0;
  double coverage = 0.0;
  bool ordering_failed = false;
  bool fitted = false;
};

struct RunReport {
  RunConfig config;
  std::size_t sites = 0;
  double median_spacing = 0.0;
  double link_radius = 0.0;
  std::size_t detected = 0;
  std::vector<SiteId> failed_stencils;
  std::size_t discarded_points = 0;
  std::vector<FaultDiagnostics> faults;
  std::optional<MetricsReport> metrics;
  std::vector<StageTiming> timings;
  std::vector<std::string> warnings;
};

struct Reconstruction {
  std::size_t fault_id = 0;
  std::vector<NarrowedPoint> narrowed;  // the whole cluster
  FaultPolyline polyline;
  std::optional<SplineCurve> spline;
  std::vector<Point2> samples;
};

struct PipelineResult {
  PointCloud cloud;
  std::vector<std::vector<Point2>> exact_faults;  // empty when unknown
  IndicatorField field;
  FaultCandidateSet candidates;
  std::vector<NarrowedPoint> narrowed;
  std::vector<long long> narrowed_cluster;  // cluster id per narrowed point, -1 discarded
  std::vector<Reconstruction> faults;
  RunReport report;
};

namespace detail {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}
  void mark(std::string stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_.push_back({std::move(stage), std::chrono::duration<double>(now - last_).count()});
    last_ = now;
  }

 private:
  std::vector<StageTiming>& sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace detail

/// Runs every stage on an in-memory cloud. exact_faults may be empty, in
/// which case no metrics are computed.
inline PipelineResult run_pipeline(const RunConfig& cfg, PointCloud cloud,
                                   std::vector<std::vector<Point2>> exact_faults = {}) {
  cfg.validate();
  PipelineResult res;
  res.cloud = std::move(cloud);
  res.exact_faults = std::move(exact_faults);
  RunReport& rep = res.report;
  rep.config = cfg;
  rep.sites = res.cloud.size();
  detail::StageClock clock(rep.timings);

  const KdTree index = build_index(res.cloud);
  rep.median_spacing = median_nn_spacing(index);
  rep.link_radius = cfg.link_radius > 0.0 ? cfg.link_radius : cfg.link_factor * rep.median_spacing;
  clock.mark("index");

  auto det = detect(res.cloud, index, cfg.detector());
  res.field = std::move(det.field);
  res.candidates = std::move(det.candidates);
  rep.detected = res.candidates.indices.size();
  rep.failed_stencils = res.field.failed_sites;
  if (!rep.failed_stencils.empty()) {
    rep.warnings.push_back(std::to_string(rep.failed_stencils.size()) +
                           " sites had singular stencils");
  }
  clock.mark("detect");

  if (res.candidates.indices.size() <= cfg.narrow_knn) {
    if (!res.candidates.indices.empty()) {
      rep.warnings.push_back("too few detected sites to narrow; no faults reconstructed");
    }
  } else {
    std::vector<Point2> fpts;
    fpts.reserve(res.candidates.indices.size());
    for (const SiteId i : res.candidates.indices) fpts.push_back(res.cloud.site(i));
    res.narrowed = narrow(fpts, res.candidates.indices,
                          {cfg.narrow_knn, cfg.narrow_iterations, cfg.narrow_quadratic, cfg.threads});
    std::size_t degenerate = 0;
    for (const auto& p : res.narrowed) degenerate += p.degenerate ? 1 : 0;
    if (degenerate > 0) {
      rep.warnings.push_back(std::to_string(degenerate) + " narrowing neighbourhoods degenerate");
    }
    clock.mark("narrow");

    const auto clusters = cluster(res.narrowed, {rep.link_radius, cfg.min_cluster_size});
    rep.discarded_points = clusters.discarded.size();
    res.narrowed_cluster.assign(res.narrowed.size(), -1);
    for (std::size_t c = 0; c < clusters.clusters.size(); ++c) {
      Reconstruction rec;
      rec.fault_id = c;
      for (const std::size_t i : clusters.clusters[c]) {
        res.narrowed_cluster[i] = static_cast<long long>(c);
        rec.narrowed.push_back(res.narrowed[i]);
      }
      OrderConfig ocfg;
      ocfg.spacing = rep.median_spacing;
      ocfg.bridge_radius = rep.link_radius;
      const auto ordered = order_along_curve(rec.narrowed, ocfg);
      rec.polyline = ordered.polyline;
      FaultDiagnostics diag{c, rec.narrowed.size(), ordered.emitted, ordered.absorbed,
                            ordered.coverage, ordered.failed, false};
      if (ordered.failed) {
        rep.warnings.push_back("fault " + std::to_string(c) + ": ordering covered only " +
                               std::to_string(ordered.coverage));
      }
      if (rec.polyline.points.size() >= 4) {
        rec.spline = fit_spline(positions(rec.polyline.points));
        rec.samples = sample_curve(*rec.spline, cfg.samples);
        diag.fitted = true;
      } else {
        rep.warnings.push_back("fault " + std::to_string(c) + ": too few ordered points to fit");
      }
      rep.faults.push_back(diag);
      res.faults.push_back(std::move(rec));
    }
    clock.mark("reconstruct");
  }

  if (!res.exact_faults.empty()) {
    std::vector<std::vector<Point2>> curves, sets;
    std::vector<std::size_t> ids;
    for (const auto& f : res.faults) {
      if (f.samples.empty()) continue;
      curves.push_back(f.samples);
      sets.push_back(positions(f.narrowed));
      ids.push_back(f.fault_id);
    }
    MetricsReport m = score(curves, sets, res.exact_faults);
    for (auto& fm : m.faults) fm.fault_id = ids[fm.fault_id];
    for (auto& u : m.unmatched_reconstructed) u = ids[u];
    rep.metrics = std::move(m);
    clock.mark("score");
  }
  if (!cfg.record_timings) rep.timings.clear();
  return res;
}

/// Loads or synthesises the input named by cfg and runs the pipeline. The
/// synthetic path also supplies the exact faults for scoring.
inline PipelineResult run_synthetic(const RunConfig& cfg) {
  if (!cfg.synth) throw ConfigError("run_synthetic: no sampler settings");
  const auto surface = two_fault_surface();
  std::vector<std::vector<Point2>> exact;
  for (const auto& f : surface.faults) exact.push_back(discretize_fault(f, cfg.samples));
  return run_pipeline(cfg, sample(*cfg.synth, surface), std::move(exact));
}

}  // namespace faultline
