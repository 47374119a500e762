#pragma once
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "greenrect/quadratic.hpp"
#include "greenrect/virtual_structure.hpp"

namespace greenrect::cli {

struct RunConfig {
  QuadraticParams params;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";
};

/// key=value lines; '#' starts a comment. Throws ConfigError.
RunConfig load_config(const std::filesystem::path& path);

/// Collects artifacts and writes manifest.json with their SHA-256 digests.
class ArtifactSink {
 public:
  explicit ArtifactSink(std::filesystem::path dir);
  void write(const std::string& name, const std::string& content);
  void finish();

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> digests_;
};

struct GreenArgs { double z_re = 2.0, z_im = 0.0; };
struct RayArgs { double angle = 0.0, g_lo = 1e-3, g_hi = 1.0; int samples = 64; };
struct EquipotArgs { double g = 0.5; int samples = 256; };
struct SkeletonArgs { int depth = 3; };
struct TreeArgs { int depth = 3; double m0 = 0.0; };
struct CollapseArgs { std::string tree, structure; double m0 = 0.0; };
struct RectifyArgs {
  double source_c = -3.0, target_c = -3.0;
  std::string structure, d = "id", k = "id", emit = "csv,json,svg";
  int samples = 100;
};
struct ConvergeArgs {
  double source_c = -3.0, target_c = -3.0;
  std::string structure, d = "id", k = "id";
  std::vector<int> n_list{1, 2, 4, 8, 16, 32, 64};
  int samples = 200;
};
struct ProbeArgs {
  std::string k = "linear:2";
  double z0_re = 1.0, z0_im = 0.0;
  std::vector<double> radii{1e-1, 1e-2, 1e-3, 1e-4};
};

void run_green(const RunConfig& cfg, const GreenArgs& a);
void run_ray(const RunConfig& cfg, const RayArgs& a);
void run_equipot(const RunConfig& cfg, const EquipotArgs& a);
void run_skeleton(const RunConfig& cfg, const SkeletonArgs& a);
void run_tree(const RunConfig& cfg, const TreeArgs& a);
void run_collapse(const RunConfig& cfg, const CollapseArgs& a);
void run_rectify(const RunConfig& cfg, const RectifyArgs& a);
void run_converge(const RunConfig& cfg, const ConvergeArgs& a);
void run_probe(const RunConfig& cfg, const ProbeArgs& a);

}  // namespace greenrect::cli
