#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "greenrect/error.hpp"

using namespace greenrect;
using namespace greenrect::cli;

int main(int argc, char** argv) {
  CLI::App app{"Green-coordinate tools for quadratic Julia sets"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<double> c_re, c_im, tol, escape_radius;
  std::optional<int> max_iter;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  app.add_option("--config", config_path, "key=value configuration file");
  app.add_option("--c,--c-re", c_re, "real part of c");
  app.add_option("--c-im", c_im, "imaginary part of c");
  app.add_option("--tol", tol, "numerical tolerance");
  app.add_option("--escape-radius", escape_radius, "escape radius (0 = 4 + |c|)");
  app.add_option("--max-iter", max_iter, "iteration cap");
  app.add_option("--seed", seed, "seed for sampled inputs");
  app.add_option("-o,--output-dir", output_dir, "artifact directory");

  GreenArgs green;
  auto* green_cmd = app.add_subcommand("green", "Green function at a point");
  green_cmd->add_option("--z-re", green.z_re);
  green_cmd->add_option("--z-im", green.z_im);

  RayArgs ray;
  auto* ray_cmd = app.add_subcommand("ray", "trace an external ray");
  ray_cmd->add_option("--angle", ray.angle)->required();
  ray_cmd->add_option("--g-lo", ray.g_lo);
  ray_cmd->add_option("--g-hi", ray.g_hi);
  ray_cmd->add_option("--samples", ray.samples);

  EquipotArgs eq;
  auto* eq_cmd = app.add_subcommand("equipot", "trace an equipotential");
  eq_cmd->add_option("--g", eq.g)->required();
  eq_cmd->add_option("--samples", eq.samples);

  SkeletonArgs sk;
  auto* sk_cmd = app.add_subcommand("skeleton", "trace the skeleton");
  sk_cmd->add_option("--depth", sk.depth);

  TreeArgs tree;
  auto* tree_cmd = app.add_subcommand("tree", "analytic tree and thinness report");
  tree_cmd->add_option("--depth", tree.depth);
  tree_cmd->add_option("--m0", tree.m0, "thinness threshold (default G(0)/4pi)");

  CollapseArgs col;
  auto* col_cmd = app.add_subcommand("collapse", "collapse a tree under a virtual structure");
  col_cmd->add_option("--tree", col.tree)->required();
  col_cmd->add_option("--structure", col.structure)->required();
  col_cmd->add_option("--m0", col.m0, "admissibility threshold (default half the min modulus)");

  RectifyArgs rect;
  auto* rect_cmd = app.add_subcommand("rectify", "transport exterior samples");
  rect_cmd->add_option("--source-c", rect.source_c);
  rect_cmd->add_option("--target-c", rect.target_c);
  rect_cmd->add_option("--structure", rect.structure, "virtual structure JSON");
  rect_cmd->add_option("--d", rect.d, "id or CDF JSON file");
  rect_cmd->add_option("--k", rect.k, "id, linear:<slope>, pair or JSON file");
  rect_cmd->add_option("--samples", rect.samples);
  rect_cmd->add_option("--emit", rect.emit, "comma list of csv, json, svg");

  ConvergeArgs conv;
  auto* conv_cmd = app.add_subcommand("converge", "Lipschitz approximation study");
  conv_cmd->add_option("--source-c", conv.source_c);
  conv_cmd->add_option("--target-c", conv.target_c);
  conv_cmd->add_option("--structure", conv.structure);
  conv_cmd->add_option("--d", conv.d);
  conv_cmd->add_option("--k", conv.k);
  conv_cmd->add_option("--n", conv.n_list)->delimiter(',');
  conv_cmd->add_option("--samples", conv.samples);

  ProbeArgs probe;
  auto* probe_cmd = app.add_subcommand("probe", "boundary difference quotients of l");
  probe_cmd->add_option("--k", probe.k);
  probe_cmd->add_option("--z0-re", probe.z0_re);
  probe_cmd->add_option("--z0-im", probe.z0_im);
  probe_cmd->add_option("--radii", probe.radii)->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (c_re) cfg.params.c.real(*c_re);
    if (c_im) cfg.params.c.imag(*c_im);
    if (tol) cfg.params.tol = *tol;
    if (escape_radius) cfg.params.escape_radius = *escape_radius;
    if (max_iter) cfg.params.max_iter = *max_iter;
    if (seed) cfg.seed = *seed;
    if (output_dir) cfg.output_dir = *output_dir;
    (void)cfg.params.validated();

    if (green_cmd->parsed()) run_green(cfg, green);
    if (ray_cmd->parsed()) run_ray(cfg, ray);
    if (eq_cmd->parsed()) run_equipot(cfg, eq);
    if (sk_cmd->parsed()) run_skeleton(cfg, sk);
    if (tree_cmd->parsed()) run_tree(cfg, tree);
    if (col_cmd->parsed()) run_collapse(cfg, col);
    if (rect_cmd->parsed()) run_rectify(cfg, rect);
    if (conv_cmd->parsed()) run_converge(cfg, conv);
    if (probe_cmd->parsed()) run_probe(cfg, probe);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
