#include "greenrect/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "greenrect/error.hpp"

namespace greenrect {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::ConfigError, fmt::format("cannot write {}", path.string()));
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ConfigError, fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string polyline_csv(const Polyline& line) {
  std::string out = "re,im,potential,angle\n";
  for (const auto& p : line) {
    out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", p.z.real(), p.z.imag(), p.potential,
                       p.angle);
  }
  return out;
}

namespace {

constexpr double kCanvas = 800.0;

std::string svg_open(double w, double h, const std::string& title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n<title>{2}</title>\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      w, h, title);
}

}  // namespace

std::string plane_svg(const std::vector<SvgLayer>& layers, const std::string& title) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& layer : layers) {
    for (const auto& line : layer.lines) {
      for (const auto& p : line) {
        x0 = std::min(x0, p.z.real());
        x1 = std::max(x1, p.z.real());
        y0 = std::min(y0, p.z.imag());
        y1 = std::max(y1, p.z.imag());
      }
    }
  }
  if (!std::isfinite(x0)) x0 = y0 = -1.0, x1 = y1 = 1.0;
  const double span = std::max({x1 - x0, y1 - y0, 1e-9}) * 1.05;
  const double cx = (x0 + x1) / 2.0, cy = (y0 + y1) / 2.0;
  auto px = [&](Complex z) {
    return fmt::format("{:.3f},{:.3f}", (z.real() - cx) / span * kCanvas + kCanvas / 2,
                       kCanvas / 2 - (z.imag() - cy) / span * kCanvas);
  };
  std::string out = svg_open(kCanvas, kCanvas, title);
  for (const auto& layer : layers) {
    for (const auto& line : layer.lines) {
      if (line.empty()) continue;
      out += fmt::format("<{} fill=\"none\" stroke=\"{}\" stroke-width=\"1\" points=\"",
                         layer.closed ? "polygon" : "polyline", layer.stroke);
      for (std::size_t i = 0; i < line.size(); ++i) out += (i ? " " : "") + px(line[i].z);
      out += "\"/>\n";
    }
  }
  return out + "</svg>\n";
}

std::string cylinder_svg(const AnalyticTree& tree, const std::string& title) {
  const double height = 600.0;
  double g_top = 0.0, g_bottom = std::numeric_limits<double>::infinity();
  for (const auto& n : tree.nodes()) {
    g_top = std::max(g_top, n.is_root() ? 2.0 * n.g_minus : n.g_plus);
    if (n.g_minus > 0.0) g_bottom = std::min(g_bottom, n.g_minus);
  }
  if (!std::isfinite(g_bottom) || !(g_top > g_bottom)) g_bottom = g_top / 2.0;
  const double l_top = std::log2(g_top), l_bottom = std::log2(g_bottom);
  auto y_of = [&](double g) {
    double l = g > 0.0 ? std::log2(g) : l_bottom;
    return (l_top - l) / (l_top - l_bottom) * height;
  };
  std::string out = svg_open(kCanvas, height, title);
  for (const auto& n : tree.nodes()) {
    const double ya = y_of(n.is_root() ? g_top : n.g_plus);
    const double yb = y_of(n.g_minus);
    const std::string fill = n.depth % 2 ? "#dbe9f6" : "#f6e7db";
    for (const Arc& a : n.windows) {
      for (double shift : {0.0, -1.0}) {
        double lo = std::max(0.0, a.lo + shift), hi = std::min(1.0, a.hi + shift);
        if (hi <= lo) continue;
        out += fmt::format(
            "<rect x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" fill=\"{}\" "
            "stroke=\"#444\" stroke-width=\"0.5\"><title>node {}</title></rect>\n",
            lo * kCanvas, ya, (hi - lo) * kCanvas, yb - ya, fill, n.id);
      }
    }
    for (double a : n.inner_accesses) {
      out += fmt::format(
          "<line x1=\"{0:.3f}\" y1=\"{1:.3f}\" x2=\"{0:.3f}\" y2=\"{2:.3f}\" stroke=\"#b22\" "
          "stroke-width=\"0.8\"/>\n",
          wrap01(a) * kCanvas, yb, height);
    }
  }
  return out + "</svg>\n";
}

}  // namespace greenrect
