#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "faultline/io/csv.hpp"
#include "faultline/io/plot.hpp"
#include "faultline/io/report.hpp"
#include "support.hpp"

using namespace faultline;
using faultline::testing::scratch_dir;
using faultline::testing::slurp;

namespace {

std::string write_file(const std::filesystem::path& dir, const std::string& name,
                       const std::string& body) {
  const auto p = (dir / name).string();
  std::ofstream(p, std::ios::binary) << body;
  return p;
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Csv, ReadsCloud) {
  const auto dir = scratch_dir("csv_read");
  const auto p = write_file(dir, "a.csv", "x,y,f\n0,0,1\n 0.5 , 0.25 ,-2e-3\n\n1,1,0\n");
  const auto cloud = io::ingest_csv(p);
  ASSERT_EQ(cloud.size(), 3u);
  EXPECT_EQ(cloud.site(1), (Point2{0.5, 0.25}));
  EXPECT_EQ(cloud.value(1), -2e-3);
}

TEST(Csv, NanRowIsReportedByLine) {
  const auto dir = scratch_dir("csv_nan");
  const auto p = write_file(dir, "a.csv", "x,y,f\n0,0,1\n0.5,0.5,nan\n");
  const auto msg = error_of([&] { io::ingest_csv(p); });
  EXPECT_NE(msg.find("a.csv:3"), std::string::npos) << msg;
  EXPECT_THROW(io::ingest_csv(p), InvalidInput);
}

TEST(Csv, DuplicateSitesNameBothLines) {
  const auto dir = scratch_dir("csv_dup");
  const auto p = write_file(dir, "a.csv", "x,y,f\n0,0,1\n0.5,0.5,2\n0,0,3\n");
  const auto msg = error_of([&] { io::ingest_csv(p); });
  EXPECT_NE(msg.find("duplicate sites on lines 2 and 4"), std::string::npos) << msg;
}

TEST(Csv, BadHeaderAndFieldCount) {
  const auto dir = scratch_dir("csv_bad");
  EXPECT_THROW(io::ingest_csv(write_file(dir, "h.csv", "a,b,c\n0,0,0\n")), InvalidInput);
  EXPECT_THROW(io::ingest_csv(write_file(dir, "n.csv", "x,y,f\n0,0\n")), InvalidInput);
  EXPECT_THROW(io::ingest_csv(write_file(dir, "t.csv", "x,y,f\n0,0,zz\n")), InvalidInput);
  EXPECT_THROW(io::ingest_csv(write_file(dir, "e.csv", "x,y,f\n")), InvalidInput);
  EXPECT_THROW(io::ingest_csv((dir / "missing.csv").string()), IoError);
}

TEST(Csv, CloudRoundTripIsExact) {
  const auto dir = scratch_dir("csv_round");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<Point2> sites;
  std::vector<double> vals;
  for (int i = 0; i < 500; ++i) {
    sites.push_back({u(rng) * 1e-7, u(rng)});
    vals.push_back(u(rng) * 1e10);
  }
  const PointCloud cloud(sites, vals);
  const auto p = (dir / "c.csv").string();
  io::write_cloud_csv(p, cloud);
  const auto back = io::ingest_csv(p);
  ASSERT_EQ(back.size(), cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    EXPECT_EQ(back.site(i), cloud.site(i));
    EXPECT_EQ(back.value(i), cloud.value(i));
  }
}

TEST(Csv, IndicatorKeepsNan) {
  const auto dir = scratch_dir("csv_ind");
  const PointCloud cloud({{0, 0}, {1, 0}}, {1, 2});
  const auto p = (dir / "i.csv").string();
  io::write_indicator_csv(p, cloud, std::vector<double>{0.25, NAN});
  const auto back = io::read_indicator_csv(p);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].indicator, 0.25);
  EXPECT_TRUE(std::isnan(back[1].indicator));
}

TEST(Csv, PolylineRoundTripAndGapCheck) {
  const auto dir = scratch_dir("csv_poly");
  io::PolylineSet set{{-1, {{0.1, 0.2}}}, {0, {{0, 0}, {1, 1}, {2, 0.5}}}, {3, {{0.3, 1e-9}}}};
  const auto p = (dir / "p.csv").string();
  io::write_polylines_csv(p, set);
  const auto back = io::read_polylines_csv(p);
  ASSERT_EQ(back.size(), set.size());
  for (const auto& [id, pts] : set) EXPECT_EQ(back.at(id), pts);
  const auto gap = write_file(dir, "g.csv", "fault_id,seq,x,y\n0,0,0,0\n0,2,1,1\n");
  EXPECT_THROW(io::read_polylines_csv(gap), InvalidInput);
  // Rows may arrive out of order.
  const auto shuffled = write_file(dir, "s.csv", "fault_id,seq,x,y\n0,1,1,1\n0,0,0,0\n");
  EXPECT_EQ(io::read_polylines_csv(shuffled).at(0), (std::vector<Point2>{{0, 0}, {1, 1}}));
}

TEST(Report, RunReportRoundTrip) {
  RunReport r;
  r.config.synth = SamplerSpec{SamplerKind::variable_density, 9684, 7, 0.25, 0.75};
  r.config.theta = std::numeric_limits<double>::infinity();
  r.sites = 9684;
  r.median_spacing = 0.0047;
  r.link_radius = 0.094;
  r.detected = 900;
  r.failed_stencils = {3, 17};
  r.discarded_points = 4;
  r.faults.push_back({0, 400, 380, 15, 0.9875, false, true});
  r.faults.push_back({1, 300, 200, 10, 0.7, true, true});
  r.metrics = MetricsReport{{{0, 1, 0.012, 0.009}, {1, 0, NAN, 0.01}}, {}, {}};
  r.warnings = {"fault 1: ordering covered only 0.7"};
  const auto j = io::to_json(r);
  const auto back = io::run_report_from_json(io::Json::parse(j.dump()));
  EXPECT_EQ(io::to_json(back).dump(), j.dump());
  EXPECT_EQ(j["config"]["theta"], "inf");
  EXPECT_EQ(j["config"]["synth"]["prng"], "mt19937_64");
  EXPECT_EQ(j["metrics"]["faults"][1]["d_H"], "nan");
}

TEST(Report, MetricsKeys) {
  const MetricsReport m{{{0, 1, 0.5, 0.25}}, {2}, {}};
  const auto j = io::to_json(m);
  EXPECT_EQ(j["faults"][0]["d_H"], 0.5);
  EXPECT_EQ(j["faults"][0]["d_P"], 0.25);
  EXPECT_EQ(j["unmatched_reconstructed"][0], 2);
}

TEST(Plot, LayersAndCoordinates) {
  io::SvgPlot plot("t", Rect{{0, 0}, {1, 1}}, 100);
  plot.add({io::PlotLayer::Kind::points, "data", "#000000", 1.0, false, {{0, 0}, {1, 1}}});
  plot.add({io::PlotLayer::Kind::polyline, "reconstructed", "#ff0000", 2.0, true, {{0, 1}, {1, 0}}});
  const auto svg = plot.render();
  EXPECT_NE(svg.find("<g class=\"layer-data\">"), std::string::npos);
  EXPECT_NE(svg.find("cx=\"20.00\" cy=\"120.00\""), std::string::npos);
  EXPECT_NE(svg.find("cx=\"120.00\" cy=\"20.00\""), std::string::npos);
  EXPECT_NE(svg.find("class=\"reconstructed\""), std::string::npos);
  EXPECT_NE(svg.find("points=\"20.00,20.00 120.00,120.00\""), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
}
