#pragma once

// Minimal SVG scatter/line plots, one file per pipeline stage:
//   1_data.svg           sites and exact faults
//   2_detected.svg       sites plus the detected set
//   3_narrowed.svg       narrowed points coloured by fault
//   4_reconstructed.svg  reconstructed curves (and exact faults, dashed)

#include <array>
#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "faultline/errors.hpp"
#include "faultline/geometry.hpp"

namespace faultline::io {

struct PlotLayer {
  enum class Kind { points, polyline };
  Kind kind = Kind::points;
  std::string css_class;  // data, detected, narrowed, reconstructed, exact
  std::string color = "#000000";
  double size = 1.0;  // point radius or stroke width, in pixels
  bool dashed = false;
  std::vector<Point2> points;
};

inline const std::array<const char*, 8> kPalette{"#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

class SvgPlot {
 public:
  SvgPlot(std::string title, Rect domain, int size_px = 600)
      : title_(std::move(title)), domain_(domain), size_(size_px) {
    if (!(domain_.hi.x > domain_.lo.x)) domain_.hi.x = domain_.lo.x + 1.0;
    if (!(domain_.hi.y > domain_.lo.y)) domain_.hi.y = domain_.lo.y + 1.0;
  }

  void add(PlotLayer layer) { layers_.push_back(std::move(layer)); }

  std::string render() const {
    std::string s;
    const int total = size_ + 2 * kMargin;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(total) +
         "\" height=\"" + std::to_string(total) + "\" viewBox=\"0 0 " + std::to_string(total) +
         " " + std::to_string(total) + "\">\n";
    s += "<title>" + title_ + "</title>\n";
    s += "<rect x=\"" + std::to_string(kMargin) + "\" y=\"" + std::to_string(kMargin) +
         "\" width=\"" + std::to_string(size_) + "\" height=\"" + std::to_string(size_) +
         "\" fill=\"white\" stroke=\"black\"/>\n";
    for (const auto& layer : layers_) {
      s += "<g class=\"layer-" + layer.css_class + "\">\n";
      if (layer.kind == PlotLayer::Kind::points) {
        for (const Point2 p : layer.points) {
          const auto [x, y] = map(p);
          s += "<circle cx=\"" + fmt(x) + "\" cy=\"" + fmt(y) + "\" r=\"" + fmt(layer.size) +
               "\" fill=\"" + layer.color + "\"/>\n";
        }
      } else if (!layer.points.empty()) {
        s += "<polyline class=\"" + layer.css_class + "\" fill=\"none\" stroke=\"" + layer.color +
             "\" stroke-width=\"" + fmt(layer.size) + "\"" +
             (layer.dashed ? " stroke-dasharray=\"4 3\"" : "") + " points=\"";
        for (std::size_t i = 0; i < layer.points.size(); ++i) {
          const auto [x, y] = map(layer.points[i]);
          if (i > 0) s += ' ';
          s += fmt(x) + "," + fmt(y);
        }
        s += "\"/>\n";
      }
      s += "</g>\n";
    }
    s += "</svg>\n";
    return s;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << render();
    out.flush();
    if (!out) throw IoError("write error on " + path);
  }

 private:
  static constexpr int kMargin = 20;

  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
  }

  std::pair<double, double> map(Point2 p) const {
    const double sx = (p.x - domain_.lo.x) / (domain_.hi.x - domain_.lo.x);
    const double sy = (p.y - domain_.lo.y) / (domain_.hi.y - domain_.lo.y);
    return {kMargin + sx * size_, kMargin + (1.0 - sy) * size_};
  }

  std::string title_;
  Rect domain_;
  int size_;
  std::vector<PlotLayer> layers_;
};

}  // namespace faultline::io
