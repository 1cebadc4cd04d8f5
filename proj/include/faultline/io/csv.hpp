#pragma once

// CSV formats (UTF-8, LF line endings, '.' decimal point):
//   point cloud     x,y,f
//   indicator       x,y,f,indicator     (nan for failed stencils)
//   polyline sets   fault_id,seq,x,y
// Doubles are written in shortest round-trip form, so re-reading is lossless.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "faultline/errors.hpp"
#include "faultline/geometry.hpp"

namespace faultline::io {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view field, const std::string& where) {
  field = trim(field);
  if (field.starts_with('+')) field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw InvalidInput(where + ": cannot parse number '" + std::string(field) + "'");
  }
  return v;
}

inline std::size_t parse_index(std::string_view field, const std::string& where) {
  field = trim(field);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw InvalidInput(where + ": cannot parse index '" + std::string(field) + "'");
  }
  return v;
}

// Reads all lines, checks the header, and hands (line number, fields) of
// each non-empty record to the callback.
template <class RowFn>
void read_records(const std::string& path, std::string_view header, RowFn&& row) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput(path + ": empty file");
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  if (trim(line) != header) {
    throw InvalidInput(path + ": expected header '" + std::string(header) + "', got '" +
                       std::string(trim(line)) + "'");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    row(lineno, split(trim(line)));
  }
  if (in.bad()) throw IoError("read error on " + path);
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

inline void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write error on " + path);
}

}  // namespace detail

/// Reads an x,y,f file. Errors name the 1-based line of the file; duplicate
/// sites list both lines.
inline PointCloud ingest_csv(const std::string& path) {
  std::vector<Point2> sites;
  std::vector<double> values;
  std::vector<std::size_t> lines;
  detail::read_records(path, "x,y,f", [&](std::size_t lineno, const auto& fields) {
    const std::string where = path + ":" + std::to_string(lineno);
    if (fields.size() != 3) {
      throw InvalidInput(where + ": expected 3 fields, got " + std::to_string(fields.size()));
    }
    const Point2 p{detail::parse_double(fields[0], where), detail::parse_double(fields[1], where)};
    const double f = detail::parse_double(fields[2], where);
    if (!is_finite(p) || !std::isfinite(f)) throw InvalidInput(where + ": non-finite value");
    sites.push_back(p);
    values.push_back(f);
    lines.push_back(lineno);
  });
  if (sites.empty()) throw InvalidInput(path + ": no records");

  std::map<std::pair<double, double>, std::size_t> first_seen;
  std::ostringstream dup;
  bool found = false;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto [it, inserted] = first_seen.emplace(std::pair{sites[i].x, sites[i].y}, i);
    if (!inserted) {
      dup << (found ? "; " : (path + ": duplicate sites on lines ")) << lines[it->second]
          << " and " << lines[i];
      found = true;
    }
  }
  if (found) throw InvalidInput(dup.str());
  return PointCloud(std::move(sites), std::move(values));
}

inline void write_cloud_csv(const std::string& path, std::span<const Point2> sites,
                            std::span<const double> values) {
  auto out = detail::open_out(path);
  out << "x,y,f\n";
  for (std::size_t i = 0; i < sites.size(); ++i) {
    out << format_double(sites[i].x) << ',' << format_double(sites[i].y) << ','
        << format_double(values[i]) << '\n';
  }
  detail::finish(out, path);
}

inline void write_cloud_csv(const std::string& path, const PointCloud& cloud) {
  write_cloud_csv(path, cloud.sites(), cloud.values());
}

struct IndicatorRecord {
  Point2 site;
  double value = 0.0;
  double indicator = 0.0;
};

inline void write_indicator_csv(const std::string& path, const PointCloud& cloud,
                                std::span<const double> indicator) {
  auto out = detail::open_out(path);
  out << "x,y,f,indicator\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out << format_double(cloud.site(i).x) << ',' << format_double(cloud.site(i).y) << ','
        << format_double(cloud.value(i)) << ',' << format_double(indicator[i]) << '\n';
  }
  detail::finish(out, path);
}

inline std::vector<IndicatorRecord> read_indicator_csv(const std::string& path) {
  std::vector<IndicatorRecord> out;
  detail::read_records(path, "x,y,f,indicator", [&](std::size_t lineno, const auto& fields) {
    const std::string where = path + ":" + std::to_string(lineno);
    if (fields.size() != 4) throw InvalidInput(where + ": expected 4 fields");
    out.push_back({{detail::parse_double(fields[0], where), detail::parse_double(fields[1], where)},
                   detail::parse_double(fields[2], where),
                   detail::parse_double(fields[3], where)});
  });
  return out;
}

/// Point sequences keyed by fault id. Written in ascending id order.
using PolylineSet = std::map<long long, std::vector<Point2>>;

inline void write_polylines_csv(const std::string& path, const PolylineSet& lines) {
  auto out = detail::open_out(path);
  out << "fault_id,seq,x,y\n";
  for (const auto& [id, pts] : lines) {
    for (std::size_t k = 0; k < pts.size(); ++k) {
      out << id << ',' << k << ',' << format_double(pts[k].x) << ',' << format_double(pts[k].y)
          << '\n';
    }
  }
  detail::finish(out, path);
}

/// Reads a fault_id,seq,x,y file; each fault's points are returned in seq
/// order, which must be 0..n-1 without gaps.
inline PolylineSet read_polylines_csv(const std::string& path) {
  std::map<long long, std::map<std::size_t, Point2>> raw;
  detail::read_records(path, "fault_id,seq,x,y", [&](std::size_t lineno, const auto& fields) {
    const std::string where = path + ":" + std::to_string(lineno);
    if (fields.size() != 4) throw InvalidInput(where + ": expected 4 fields");
    long long id = 0;
    const auto f0 = detail::trim(fields[0]);
    const auto [ptr, ec] = std::from_chars(f0.data(), f0.data() + f0.size(), id);
    if (ec != std::errc{} || ptr != f0.data() + f0.size()) {
      throw InvalidInput(where + ": cannot parse fault id");
    }
    const std::size_t seq = detail::parse_index(fields[1], where);
    const Point2 p{detail::parse_double(fields[2], where), detail::parse_double(fields[3], where)};
    if (!is_finite(p)) throw InvalidInput(where + ": non-finite coordinate");
    if (!raw[id].emplace(seq, p).second) throw InvalidInput(where + ": repeated seq");
  });
  PolylineSet out;
  for (auto& [id, seqs] : raw) {
    auto& pts = out[id];
    for (const auto& [seq, p] : seqs) {
      if (seq != pts.size()) {
        throw InvalidInput(path + ": fault " + std::to_string(id) + " has a gap in seq");
      }
      pts.push_back(p);
    }
  }
  return out;
}

}  // namespace faultline::io
