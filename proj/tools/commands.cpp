#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "greenrect/error.hpp"
#include "greenrect/output.hpp"
#include "greenrect/rectifier.hpp"
#include "greenrect/tree.hpp"

namespace greenrect::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(ErrorCode::ConfigError, fmt::format("config key '{}': cannot parse '{}'", key, text));
  }
  return value;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::ConfigError, "SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()() { return static_cast<double>(rng_() >> 11) * 0x1p-53; }

 private:
  std::mt19937_64 rng_;
};

GreenSystem system_for(const RunConfig& cfg, double c_re, double c_im = 0.0) {
  QuadraticParams p = cfg.params;
  p.c = {c_re, c_im};
  p.escape_radius = cfg.params.escape_radius;
  return GreenSystem(p);
}

bool is_json_path(const std::string& spec) {
  return spec.size() > 5 && spec.substr(spec.size() - 5) == ".json";
}

CircleCDF parse_d(const std::string& spec) {
  if (spec == "id") return CircleCDF::identity();
  if (is_json_path(spec)) return deserialize_cdf(read_text(spec));
  fail(ErrorCode::ConfigError, fmt::format("--d must be 'id' or a CDF JSON file, got '{}'", spec));
}

PotentialHomeo parse_k(const std::string& spec) {
  if (spec == "id") return PotentialHomeo::identity();
  if (spec.rfind("linear:", 0) == 0) {
    return PotentialHomeo::linear(parse_value<double>("k", spec.substr(7)));
  }
  if (is_json_path(spec)) return deserialize_homeo(read_text(spec));
  fail(ErrorCode::ConfigError,
       fmt::format("--k must be 'id', 'linear:<slope>', 'pair' or a JSON file, got '{}'", spec));
}

TransportMap make_transport(const RunConfig& cfg, double source_c, double target_c,
                            const std::string& structure, const std::string& d,
                            const std::string& k) {
  if (!structure.empty()) {
    return TransportMap(system_for(cfg, source_c), system_for(cfg, target_c),
                        deserialize_structure(read_text(structure)));
  }
  if (k == "pair") {
    TransportMap pair = build_quadratic_pair(source_c, target_c, 6, cfg.params.tol);
    return TransportMap(pair.source(), pair.target(), {parse_d(d), pair.structure().k});
  }
  return TransportMap(system_for(cfg, source_c), system_for(cfg, target_c), {parse_d(d), parse_k(k)});
}

// Exterior samples: uniform angle, potential log-uniform over [0.01, 2] * scale.
std::vector<Complex> exterior_samples(const GreenSystem& sys, int count, std::uint64_t seed) {
  const double scale = sys.is_cantor() ? sys.critical_potential() : 1.0;
  Uniform u(seed);
  std::vector<Complex> out;
  for (int i = 0; i < count; ++i) {
    double theta = u();
    double g = scale * std::exp(std::log(0.01) + u() * std::log(200.0));
    try {
      out.push_back(sys.invert_green_coords({theta, g}));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RayCrash) throw;
    }
  }
  return out;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

}  // namespace

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, fmt::format("cannot open config {}", path.string()));
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::ConfigError, fmt::format("{}:{}: expected key=value", path.string(), lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "c_re") {
      cfg.params.c.real(parse_value<double>(key, value));
    } else if (key == "c_im") {
      cfg.params.c.imag(parse_value<double>(key, value));
    } else if (key == "escape_radius") {
      cfg.params.escape_radius = parse_value<double>(key, value);
    } else if (key == "max_iter") {
      cfg.params.max_iter = parse_value<int>(key, value);
    } else if (key == "tol") {
      cfg.params.tol = parse_value<double>(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_value<std::uint64_t>(key, value);
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else {
      fail(ErrorCode::ConfigError, fmt::format("{}:{}: unknown key '{}'", path.string(), lineno, key));
    }
  }
  return cfg;
}

ArtifactSink::ArtifactSink(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) fail(ErrorCode::ConfigError, fmt::format("cannot create {}: {}", dir_.string(), ec.message()));
}

void ArtifactSink::write(const std::string& name, const std::string& content) {
  write_text(dir_ / name, content);
  digests_[name] = sha256_hex(content);
}

void ArtifactSink::finish() {
  json files = json::array();
  for (const auto& [name, digest] : digests_) files.push_back({{"name", name}, {"sha256", digest}});
  write_text(dir_ / "manifest.json", json{{"files", files}}.dump(2) + "\n");
}

void run_green(const RunConfig& cfg, const GreenArgs& a) {
  GreenSystem sys(cfg.params);
  const Complex z{a.z_re, a.z_im};
  const GreenValue gv = sys.escape_green(z);
  json j;
  j["c"] = complex_json(sys.params().c);
  j["z"] = complex_json(z);
  j["potential"] = gv.potential;
  j["err_bound"] = gv.err_bound;
  j["connectivity"] = sys.is_cantor() ? "cantor" : "connected";
  j["critical_potential"] = sys.is_cantor() ? json(sys.critical_potential()) : json(nullptr);
  j["robin_constant"] = sys.robin_constant();
  j["angle"] = nullptr;
  if (sys.angles_supported() && gv.potential > 0.0) {
    try {
      j["angle"] = sys.log_bottcher(z).angle;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OnSkeleton) throw;
    }
  }
  ArtifactSink sink(cfg.output_dir);
  sink.write("green.json", j.dump(2) + "\n");
  sink.finish();
}

void run_ray(const RunConfig& cfg, const RayArgs& a) {
  GreenSystem sys(cfg.params);
  Polyline ray = sys.trace_ray(a.angle, a.g_lo, a.g_hi, a.samples);
  ArtifactSink sink(cfg.output_dir);
  sink.write("ray.csv", polyline_csv(ray));
  sink.write("ray.svg", plane_svg({{{ray}}}, fmt::format("ray {}", a.angle)));
  sink.finish();
}

void run_equipot(const RunConfig& cfg, const EquipotArgs& a) {
  GreenSystem sys(cfg.params);
  auto curves = sys.trace_equipotential(a.g, a.samples);
  ArtifactSink sink(cfg.output_dir);
  for (std::size_t i = 0; i < curves.size(); ++i) {
    sink.write(fmt::format("equipot_{:03d}.csv", i), polyline_csv(curves[i]));
  }
  SvgLayer layer{curves, "#1f4e79", true};
  sink.write("equipot.svg", plane_svg({layer}, fmt::format("equipotential {}", a.g)));
  sink.finish();
}

void run_skeleton(const RunConfig& cfg, const SkeletonArgs& a) {
  GreenSystem sys(cfg.params);
  auto arcs = sys.skeleton(a.depth);
  ArtifactSink sink(cfg.output_dir);
  SvgLayer layer{{}, "#b22222", false};
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    sink.write(fmt::format("skeleton_{:03d}.csv", i), polyline_csv(arcs[i].polyline));
    layer.lines.push_back(arcs[i].polyline);
  }
  sink.write("skeleton.svg", plane_svg({layer}, fmt::format("skeleton depth {}", a.depth)));
  sink.finish();
}

namespace {

json thinness_json(const ThinnessReport& r) {
  json minima = json::array();
  for (double m : r.per_depth_min_modulus) minima.push_back(std::isinf(m) ? json(nullptr) : json(m));
  return {{"verdict", verdict_name(r.verdict, "thin_certified")},
          {"threshold", r.threshold},
          {"per_depth_min_modulus", minima},
          {"min_modulus", r.min_modulus},
          {"min_branch_sum", r.min_branch_sum},
          {"binary", r.binary},
          {"ends", r.ends},
          {"early_leaves", r.early_leaves},
          {"reasons", r.reasons}};
}

}  // namespace

void run_tree(const RunConfig& cfg, const TreeArgs& a) {
  GreenSystem sys(cfg.params);
  AnalyticTree tree = build_quadratic_tree(sys, a.depth);
  const double m0 = a.m0 > 0.0 ? a.m0 : sys.critical_potential() / (4.0 * std::numbers::pi);
  ArtifactSink sink(cfg.output_dir);
  sink.write("tree.json", serialize_tree(tree));
  sink.write("tree.svg", cylinder_svg(tree, fmt::format("analytic tree depth {}", a.depth)));
  sink.write("thinness.json", thinness_json(thinness_report(tree, m0)).dump(2) + "\n");
  sink.finish();
}

void run_collapse(const RunConfig& cfg, const CollapseArgs& a) {
  if (a.tree.empty() || a.structure.empty()) {
    fail(ErrorCode::ConfigError, "collapse needs --tree and --structure");
  }
  AnalyticTree tree = deserialize_tree(read_text(a.tree));
  VirtualStructure vs = deserialize_structure(read_text(a.structure));
  double m0 = a.m0;
  if (!(m0 > 0.0)) m0 = thinness_report(tree, 0.0).min_modulus / 2.0;
  AdmissibilityReport rep = admissible(tree, vs, m0);
  AnalyticTree out = collapse(tree, vs);
  json mods = json::array();
  for (double m : rep.mod_xi) mods.push_back(std::isinf(m) ? json(nullptr) : json(m));
  json adm{{"verdict", verdict_name(rep.verdict, "admissible_certified")},
           {"threshold", m0},
           {"mod_xi", mods},
           {"offending_nodes", rep.offending_nodes},
           {"deleted_roots", rep.deleted_roots},
           {"all_infinite_depths", rep.all_infinite_depths},
           {"reasons", rep.reasons}};
  ArtifactSink sink(cfg.output_dir);
  sink.write("collapsed.json", serialize_tree(out));
  sink.write("admissibility.json", adm.dump(2) + "\n");
  sink.write("collapse_before.svg", cylinder_svg(tree, "before collapse"));
  sink.write("collapse_after.svg", cylinder_svg(out, "after collapse"));
  sink.finish();
}

void run_rectify(const RunConfig& cfg, const RectifyArgs& a) {
  if (a.samples < 1) fail(ErrorCode::ConfigError, "--samples must be positive");
  TransportMap tm = make_transport(cfg, a.source_c, a.target_c, a.structure, a.d, a.k);
  const double tol = cfg.params.tol;
  std::string csv =
      "index,z_re,z_im,angle,potential,w_re,w_im,potential_residual,angle_residual,max_residual\n";
  double worst_g = 0.0, worst_a = 0.0;
  int dropped = 0, used = 0;
  auto samples = exterior_samples(tm.source(), a.samples, cfg.seed);
  dropped += a.samples - static_cast<int>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    TransportResult r;
    try {
      r = tm.evaluate(samples[i]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OnSkeleton) throw;
      ++dropped;
      continue;
    }
    ++used;
    worst_g = std::max(worst_g, r.potential_residual);
    if (!std::isnan(r.angle_residual)) worst_a = std::max(worst_a, r.angle_residual);
    csv += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.6e},{:.6e},{:.6e}\n", i,
                       samples[i].real(), samples[i].imag(), r.source.angle, r.source.potential,
                       r.w.real(), r.w.imag(), r.potential_residual, r.angle_residual,
                       std::max(r.potential_residual, r.angle_residual));
  }
  json summary{{"source_c", a.source_c},
               {"target_c", a.target_c},
               {"samples", a.samples},
               {"evaluated", used},
               {"dropped_samples", dropped},
               {"max_potential_residual", worst_g},
               {"max_angle_residual", worst_a},
               {"tol", tol},
               {"within_20_tol", std::max(worst_g, worst_a) <= 20.0 * tol},
               {"structure", json::parse(serialize_structure(tm.structure()))}};
  ArtifactSink sink(cfg.output_dir);
  const bool emit_csv = a.emit.find("csv") != std::string::npos;
  const bool emit_json = a.emit.find("json") != std::string::npos;
  const bool emit_svg = a.emit.find("svg") != std::string::npos;
  if (emit_csv) sink.write("residuals.csv", csv);
  if (emit_json) sink.write("summary.json", summary.dump(2) + "\n");
  if (emit_svg) {
    SvgLayer before{{}, "#1f4e79", false}, after{{}, "#b22222", false};
    const GreenSystem& src = tm.source();
    const double scale = src.is_cantor() ? src.critical_potential() : 1.0;
    for (int j = 0; j < 16; ++j) {
      const double theta = (j + 1.0 / 3.0) / 16.0;
      Polyline ray = src.trace_ray(theta, 0.01 * scale, 2.0 * scale, 48);
      Polyline image;
      for (const auto& p : ray) {
        image.push_back({tm.from_coordinates({p.angle, p.potential}), p.potential, p.angle});
      }
      before.lines.push_back(std::move(ray));
      after.lines.push_back(std::move(image));
    }
    sink.write("rectify.svg", plane_svg({before, after}, "source rays and their images"));
  }
  sink.finish();
}

void run_converge(const RunConfig& cfg, const ConvergeArgs& a) {
  TransportMap tm = make_transport(cfg, a.source_c, a.target_c, a.structure, a.d, a.k);
  auto samples = exterior_samples(tm.source(), a.samples, cfg.seed);
  auto table = convergence_study(tm, a.n_list, samples);
  std::string csv = "n,sup_distance,dropped_samples\n";
  for (const auto& row : table) {
    csv += fmt::format("{},{:.6e},{}\n", row.n, row.sup_distance, row.dropped_samples);
  }
  ArtifactSink sink(cfg.output_dir);
  sink.write("convergence.csv", csv);
  sink.finish();
}

void run_probe(const RunConfig& cfg, const ProbeArgs& a) {
  ContinuumMap cm(GreenSystem(cfg.params), parse_k(a.k));
  auto rows = boundary_derivative_probe(cm, {a.z0_re, a.z0_im}, a.radii);
  std::string csv = "radius,direction,q_re,q_im,abs_q_minus_1\n";
  for (const auto& r : rows) {
    csv += fmt::format("{:.6e},{:.17g},{:.17g},{:.17g},{:.6e}\n", r.radius, r.direction,
                       r.quotient.real(), r.quotient.imag(), std::abs(r.quotient - 1.0));
  }
  ArtifactSink sink(cfg.output_dir);
  sink.write("probe.csv", csv);
  sink.finish();
}

}  // namespace greenrect::cli
