#pragma once
// CSV and SVG artifact writers.
#include <filesystem>
#include <string>
#include <vector>

#include "greenrect/quadratic.hpp"
#include "greenrect/tree.hpp"

namespace greenrect {

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Columns re, im, potential, angle.
std::string polyline_csv(const Polyline& line);

struct SvgLayer {
  std::vector<Polyline> lines;
  std::string stroke = "#1f4e79";
  bool closed = false;
};

/// Plane view scaled to the bounding box of all layers.
std::string plane_svg(const std::vector<SvgLayer>& layers, const std::string& title);

/// Cylinder view: angle across, log2 of potential upwards, one band per node.
std::string cylinder_svg(const AnalyticTree& tree, const std::string& title);

}  // namespace greenrect
