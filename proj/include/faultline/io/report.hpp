#pragma once

// JSON serialisation of run configuration, metrics and run reports. Keys
// keep insertion order, so the documents are stable byte-for-byte.

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "faultline/errors.hpp"
#include "faultline/pipeline.hpp"

namespace faultline::io {

using Json = nlohmann::ordered_json;

namespace detail {

// JSON has no inf/nan; those are written as strings.
inline Json real(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double real(const Json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw InvalidInput("report: bad real '" + s + "'");
}

inline const char* kind_name(SamplerKind k) {
  return k == SamplerKind::uniform ? "uniform" : "variable-density";
}

inline SamplerKind kind_from(const std::string& s) {
  if (s == "uniform") return SamplerKind::uniform;
  if (s == "variable-density") return SamplerKind::variable_density;
  throw InvalidInput("report: unknown sampler kind '" + s + "'");
}

}  // namespace detail

inline Json to_json(const SamplerSpec& s) {
  Json j;
  j["kind"] = detail::kind_name(s.kind);
  j["count"] = s.count;
  j["seed"] = s.seed;
  j["prng"] = kPrngName;
  j["density_base"] = detail::real(s.density_base);
  j["density_slope"] = detail::real(s.density_slope);
  return j;
}

inline SamplerSpec sampler_from_json(const Json& j) {
  SamplerSpec s;
  s.kind = detail::kind_from(j.at("kind").get<std::string>());
  s.count = j.at("count").get<std::size_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.density_base = detail::real(j.at("density_base"));
  s.density_slope = detail::real(j.at("density_slope"));
  return s;
}

inline Json to_json(const RunConfig& c) {
  Json j;
  j["input"] = c.input;
  j["synth"] = c.synth ? to_json(*c.synth) : Json(nullptr);
  j["stencil_size"] = c.stencil_size;
  j["theta"] = detail::real(c.theta);
  j["exponent_mu"] = detail::real(c.exponent_mu);
  j["narrow_knn"] = c.narrow_knn;
  j["narrow_iterations"] = c.narrow_iterations;
  j["narrow_quadratic"] = c.narrow_quadratic;
  j["link_radius"] = detail::real(c.link_radius);
  j["link_factor"] = detail::real(c.link_factor);
  j["min_cluster_size"] = c.min_cluster_size;
  j["samples"] = c.samples;
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  j["record_timings"] = c.record_timings;
  return j;
}

inline RunConfig run_config_from_json(const Json& j) {
  RunConfig c;
  c.input = j.at("input").get<std::string>();
  if (!j.at("synth").is_null()) c.synth = sampler_from_json(j.at("synth"));
  c.stencil_size = j.at("stencil_size").get<std::size_t>();
  c.theta = detail::real(j.at("theta"));
  c.exponent_mu = detail::real(j.at("exponent_mu"));
  c.narrow_knn = j.at("narrow_knn").get<std::size_t>();
  c.narrow_iterations = j.at("narrow_iterations").get<std::size_t>();
  c.narrow_quadratic = j.at("narrow_quadratic").get<bool>();
  c.link_radius = detail::real(j.at("link_radius"));
  c.link_factor = detail::real(j.at("link_factor"));
  c.min_cluster_size = j.at("min_cluster_size").get<std::size_t>();
  c.samples = j.at("samples").get<std::size_t>();
  c.output_dir = j.at("output_dir").get<std::string>();
  c.threads = j.at("threads").get<std::size_t>();
  c.record_timings = j.at("record_timings").get<bool>();
  return c;
}

inline Json to_json(const MetricsReport& m) {
  Json j;
  j["faults"] = Json::array();
  for (const auto& f : m.faults) {
    Json e;
    e["fault_id"] = f.fault_id;
    e["matched_exact_fault"] = f.matched_exact_fault;
    e["d_H"] = detail::real(f.d_hausdorff);
    e["d_P"] = detail::real(f.d_points);
    j["faults"].push_back(e);
  }
  j["unmatched_reconstructed"] = m.unmatched_reconstructed;
  j["unmatched_exact"] = m.unmatched_exact;
  return j;
}

inline MetricsReport metrics_from_json(const Json& j) {
  MetricsReport m;
  for (const auto& e : j.at("faults")) {
    m.faults.push_back({e.at("fault_id").get<std::size_t>(),
                        e.at("matched_exact_fault").get<std::size_t>(), detail::real(e.at("d_H")),
                        detail::real(e.at("d_P"))});
  }
  m.unmatched_reconstructed = j.at("unmatched_reconstructed").get<std::vector<std::size_t>>();
  m.unmatched_exact = j.at("unmatched_exact").get<std::vector<std::size_t>>();
  return m;
}

inline Json to_json(const RunReport& r) {
  Json j;
  j["config"] = to_json(r.config);
  j["sites"] = r.sites;
  j["median_spacing"] = detail::real(r.median_spacing);
  j["link_radius"] = detail::real(r.link_radius);
  j["detected"] = r.detected;
  j["failed_stencils"] = r.failed_stencils;
  j["discarded_points"] = r.discarded_points;
  j["faults"] = Json::array();
  for (const auto& f : r.faults) {
    Json e;
    e["fault_id"] = f.fault_id;
    e["cluster_size"] = f.cluster_size;
    e["emitted"] = f.emitted;
    e["absorbed"] = f.absorbed;
    e["coverage"] = detail::real(f.coverage);
    e["ordering_failed"] = f.ordering_failed;
    e["fitted"] = f.fitted;
    j["faults"].push_back(e);
  }
  j["metrics"] = r.metrics ? to_json(*r.metrics) : Json(nullptr);
  j["timings"] = Json::array();
  for (const auto& t : r.timings) {
    j["timings"].push_back(Json{{"stage", t.stage}, {"seconds", detail::real(t.seconds)}});
  }
  j["warnings"] = r.warnings;
  return j;
}

inline RunReport run_report_from_json(const Json& j) {
  RunReport r;
  r.config = run_config_from_json(j.at("config"));
  r.sites = j.at("sites").get<std::size_t>();
  r.median_spacing = detail::real(j.at("median_spacing"));
  r.link_radius = detail::real(j.at("link_radius"));
  r.detected = j.at("detected").get<std::size_t>();
  r.failed_stencils = j.at("failed_stencils").get<std::vector<SiteId>>();
  r.discarded_points = j.at("discarded_points").get<std::size_t>();
  for (const auto& e : j.at("faults")) {
    r.faults.push_back({e.at("fault_id").get<std::size_t>(), e.at("cluster_size").get<std::size_t>(),
                        e.at("emitted").get<std::size_t>(), e.at("absorbed").get<std::size_t>(),
                        detail::real(e.at("coverage")), e.at("ordering_failed").get<bool>(),
                        e.at("fitted").get<bool>()});
  }
  if (!j.at("metrics").is_null()) r.metrics = metrics_from_json(j.at("metrics"));
  for (const auto& t : j.at("timings")) {
    r.timings.push_back({t.at("stage").get<std::string>(), detail::real(t.at("seconds"))});
  }
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

inline void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("write error on " + path);
}

inline Json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

}  // namespace faultline::io
