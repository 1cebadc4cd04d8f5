// faultline: detect and reconstruct discontinuity curves from scattered data.
//
// Exit codes: 0 success (warnings allowed), 2 configuration error,
// 3 I/O or input-format error, 4 internal invariant violation.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "faultline/io/artifacts.hpp"
#include "faultline/io/csv.hpp"
#include "faultline/io/report.hpp"
#include "faultline/pipeline.hpp"

namespace {

using namespace faultline;

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

constexpr const char* kOutputEnv = "FAULTLINE_OUTPUT_DIR";

// Input-file problems are reported as I/O errors; everything else thrown by
// the library after validation is an internal failure.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

PointCloud load_cloud(const std::string& path) {
  try {
    return io::ingest_csv(path);
  } catch (const InvalidInput& e) {
    throw InputError(e.what());
  }
}

io::PolylineSet load_polylines(const std::string& path) {
  try {
    return io::read_polylines_csv(path);
  } catch (const InvalidInput& e) {
    throw InputError(e.what());
  }
}

std::vector<std::vector<Point2>> as_curves(const io::PolylineSet& set) {
  std::vector<std::vector<Point2>> out;
  for (const auto& [id, pts] : set) out.push_back(pts);
  return out;
}

SamplerKind parse_kind(const std::string& s) {
  if (s == "uniform") return SamplerKind::uniform;
  if (s == "variable-density") return SamplerKind::variable_density;
  throw ConfigError("unknown sampler kind '" + s + "'");
}

struct SynthOptions {
  std::string kind = "uniform";
  std::size_t count = 10000;
  std::uint64_t seed = 1;
  double density_base = 0.25;
  double density_slope = 0.75;

  void add_to(CLI::App& app, bool prefixed) {
    const std::string p = prefixed ? "--synth-" : "--";
    app.add_option(p + "kind", kind, "Sampler: uniform | variable-density")
        ->check(CLI::IsMember({"uniform", "variable-density"}));
    app.add_option(p + "count", count, "Number of sites");
    app.add_option(p + "seed", seed, "PRNG seed (mt19937_64)");
    app.add_option(p + "density-base", density_base, "Variable density at the left edge");
    app.add_option(p + "density-slope", density_slope, "Density increase across the domain");
  }

  SamplerSpec spec() const {
    return {parse_kind(kind), count, seed, density_base, density_slope};
  }
};

void add_detector_options(CLI::App& app, RunConfig& cfg) {
  app.add_option("--stencil-size", cfg.stencil_size, "Neighbours per stencil")
      ->capture_default_str();
  app.add_option("--theta", cfg.theta, "Indicator threshold")->capture_default_str();
  app.add_option("--exponent-mu", cfg.exponent_mu, "Exponent of the minimised seminorm")
      ->capture_default_str();
  app.add_option("--threads", cfg.threads, "Worker threads (0: all cores)");
}

std::string default_output_dir() {
  if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
  return "faultline_out";
}

void print_summary(const RunReport& rep) {
  std::cout << "sites " << rep.sites << ", detected " << rep.detected << ", faults "
            << rep.faults.size() << "\n";
  if (rep.metrics) {
    for (const auto& f : rep.metrics->faults) {
      std::cout << "  fault " << f.fault_id << " -> exact " << f.matched_exact_fault
                << "  d_H " << f.d_hausdorff << "  d_P " << f.d_points << "\n";
    }
  }
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& t : rep.timings) std::cerr << "  " << t.stage << ": " << t.seconds << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault (discontinuity curve) detection and reconstruction from scattered data"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file whose keys mirror the long flags");

  std::string out_dir = default_output_dir();
  auto add_out = [&](CLI::App& sub) {
    sub.add_option("--out-dir", out_dir, std::string("Output directory (default $") + kOutputEnv +
                                             " or faultline_out)");
  };

  // synth
  auto* synth = app.add_subcommand("synth", "Sample the two-fault test surface");
  SynthOptions synth_opts;
  std::size_t synth_m = 500;
  synth_opts.add_to(*synth, false);
  synth->add_option("--samples", synth_m, "Points per exact fault discretisation");
  add_out(*synth);

  // detect
  auto* detect_cmd = app.add_subcommand("detect", "Compute the fault indicator and detected set");
  RunConfig detect_cfg;
  detect_cmd->add_option("--input", detect_cfg.input, "Point cloud CSV (x,y,f)")->required();
  add_detector_options(*detect_cmd, detect_cfg);
  add_out(*detect_cmd);

  // reconstruct
  auto* rec_cmd = app.add_subcommand("reconstruct", "Run the full pipeline");
  RunConfig rec_cfg;
  SynthOptions rec_synth;
  bool use_synth = false;
  std::string exact_path;
  auto* input_opt = rec_cmd->add_option("--input", rec_cfg.input, "Point cloud CSV (x,y,f)");
  auto* synth_flag =
      rec_cmd->add_flag("--synth", use_synth, "Sample the test surface instead of reading input");
  input_opt->excludes(synth_flag);
  rec_synth.add_to(*rec_cmd, true);
  rec_cmd->add_option("--exact", exact_path, "Exact faults (fault_id,seq,x,y) for scoring");
  add_detector_options(*rec_cmd, rec_cfg);
  rec_cmd->add_option("--narrow-knn", rec_cfg.narrow_knn, "Neighbours in narrowing fits");
  rec_cmd->add_option("--narrow-iterations", rec_cfg.narrow_iterations, "Narrowing passes");
  rec_cmd->add_option("--narrow-quadratic", rec_cfg.narrow_quadratic,
                      "Quadratic local model (false: regression line)");
  rec_cmd->add_option("--link-radius", rec_cfg.link_radius,
                      "Cluster link radius (0: link-factor x median spacing)");
  rec_cmd->add_option("--link-factor", rec_cfg.link_factor, "Link radius in median spacings");
  rec_cmd->add_option("--min-cluster-size", rec_cfg.min_cluster_size,
                      "Smaller clusters are discarded");
  rec_cmd->add_option("--samples", rec_cfg.samples, "Spline discretisation size m");
  rec_cmd->add_flag("--timings", rec_cfg.record_timings, "Record stage timings in report.json");
  add_out(*rec_cmd);

  // score
  auto* score_cmd = app.add_subcommand("score", "Score reconstructed curves against exact faults");
  std::string curves_path, score_exact, narrowed_path, score_out;
  score_cmd->add_option("--curves", curves_path, "Sampled curves (fault_id,seq,x,y)")->required();
  score_cmd->add_option("--exact", score_exact, "Exact faults (fault_id,seq,x,y)")->required();
  score_cmd->add_option("--narrowed", narrowed_path,
                        "Narrowed points per fault (fault_id,seq,x,y); default: the curves");
  score_cmd->add_option("--output", score_out, "Write metrics JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (synth->parsed()) {
      const auto spec = synth_opts.spec();
      if (spec.count < 1) throw ConfigError("count must be >= 1");
      if (synth_m < 2) throw ConfigError("samples must be >= 2");
      const auto surface = two_fault_surface();
      const auto cloud = sample(spec, surface);
      std::vector<std::vector<Point2>> exact;
      for (const auto& f : surface.faults) exact.push_back(discretize_fault(f, synth_m));
      io::ensure_dir(out_dir);
      io::write_cloud_csv(io::join(out_dir, "sites.csv"), cloud);
      io::write_polylines_csv(io::join(out_dir, io::kExactFile), io::exact_fault_set(exact));
      std::cout << "wrote " << cloud.size() << " sites to " << io::join(out_dir, "sites.csv")
                << "\n";
      return 0;
    }

    if (detect_cmd->parsed()) {
      const auto dcfg = detect_cfg.detector();
      dcfg.validate();
      const auto cloud = load_cloud(detect_cfg.input);
      if (cloud.size() <= dcfg.stencil_size) {
        throw InputError("input has too few sites for stencil size " +
                         std::to_string(dcfg.stencil_size));
      }
      const auto index = build_index(cloud);
      const auto det = detect(cloud, index, dcfg);
      io::ensure_dir(out_dir);
      io::write_indicator_csv(io::join(out_dir, io::kIndicatorFile), cloud, det.field.values);
      std::vector<Point2> sites;
      std::vector<double> vals;
      for (const SiteId i : det.candidates.indices) {
        sites.push_back(cloud.site(i));
        vals.push_back(cloud.value(i));
      }
      io::write_cloud_csv(io::join(out_dir, io::kDetectedFile), sites, vals);
      std::cout << "sites " << cloud.size() << ", detected " << sites.size() << ", failed "
                << det.field.failed_sites.size() << "\n";
      return 0;
    }

    if (rec_cmd->parsed()) {
      rec_cfg.output_dir = out_dir;
      if (use_synth) {
        rec_cfg.input.clear();
        rec_cfg.synth = rec_synth.spec();
      }
      rec_cfg.validate();
      PipelineResult result;
      if (rec_cfg.synth) {
        result = run_synthetic(rec_cfg);
      } else {
        auto cloud = load_cloud(rec_cfg.input);
        if (cloud.size() <= rec_cfg.stencil_size) {
          throw InputError("input has too few sites for stencil size " +
                           std::to_string(rec_cfg.stencil_size));
        }
        std::vector<std::vector<Point2>> exact;
        if (!exact_path.empty()) exact = as_curves(load_polylines(exact_path));
        result = run_pipeline(rec_cfg, std::move(cloud), std::move(exact));
      }
      io::write_artifacts(result, out_dir);
      print_summary(result.report);
      return 0;
    }

    if (score_cmd->parsed()) {
      const auto curves = as_curves(load_polylines(curves_path));
      const auto exact = as_curves(load_polylines(score_exact));
      const auto sets = narrowed_path.empty() ? curves : [&] {
        auto all = load_polylines(narrowed_path);
        all.erase(-1);
        return as_curves(all);
      }();
      if (curves.empty() || exact.empty()) throw InputError("score: no curves to compare");
      const auto report = score(curves, sets, exact);
      const auto j = io::to_json(report);
      if (score_out.empty()) {
        std::cout << j.dump(2) << "\n";
      } else {
        io::write_json(score_out, j);
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitIo;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
