#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "greenrect/output.hpp"
#include "greenrect/tree.hpp"
#include "greenrect/virtual_structure.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("greenrect_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const fs::path& err_file = {}) {
  std::string cmd = std::string(GREENRECT_CLI) + " " + args;
  cmd += err_file.empty() ? " 2>/dev/null" : " 2>" + err_file.string();
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) { return greenrect::read_text(p); }

}  // namespace

TEST_CASE("cli tree emits 15 nodes and a manifest") {
  auto dir = scratch("tree");
  REQUIRE(run("tree --c=-3 --depth=3 -o " + dir.string()) == 0);
  auto tree = greenrect::deserialize_tree(slurp(dir / "tree.json"));
  CHECK(tree.nodes().size() == 15);
  auto thin = nlohmann::json::parse(slurp(dir / "thinness.json"));
  CHECK(thin["verdict"] == "thin_certified");
  auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["files"].size() == 3);
}

TEST_CASE("cli runs are deterministic") {
  auto a = scratch("det_a"), b = scratch("det_b");
  const std::string args = "rectify --c=-3 --source-c=-3 --target-c=-5 --k=pair --samples=40 --seed=9 -o ";
  REQUIRE(run(args + a.string()) == 0);
  REQUIRE(run(args + b.string()) == 0);
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
}

TEST_CASE("cli identity rectify residuals") {
  auto dir = scratch("rect");
  REQUIRE(run("rectify --source-c=-3 --target-c=-3 --k=id --d=id --samples=100 -o " + dir.string()) == 0);
  auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  const double tol = summary["tol"];
  CHECK(summary["max_potential_residual"].get<double>() <= 10 * tol);
  CHECK(summary["max_angle_residual"].get<double>() <= 10 * tol);
  std::istringstream csv(slurp(dir / "residuals.csv"));
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    double max_residual = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(max_residual <= 10 * tol);
    ++rows;
  }
  CHECK(rows > 90);
}

TEST_CASE("cli collapse with the identity structure") {
  auto dir = scratch("collapse");
  REQUIRE(run("tree --c=-3 --depth=3 -o " + dir.string()) == 0);
  greenrect::write_text(dir / "id.json", greenrect::serialize_structure({}));
  REQUIRE(run("collapse --tree " + (dir / "tree.json").string() + " --structure " +
              (dir / "id.json").string() + " -o " + (dir / "out").string()) == 0);
  auto before = greenrect::deserialize_tree(slurp(dir / "tree.json"));
  auto after = greenrect::deserialize_tree(slurp(dir / "out" / "collapsed.json"));
  REQUIRE(before.nodes().size() == after.nodes().size());
  for (std::size_t i = 0; i < before.nodes().size(); ++i) {
    CHECK(before.nodes()[i].modulus == after.nodes()[i].modulus);
    CHECK(before.nodes()[i].windows == after.nodes()[i].windows);
  }
}

TEST_CASE("cli other subcommands write their artifacts") {
  auto dir = scratch("misc");
  CHECK(run("green --c=-3 --z-re=2 -o " + dir.string()) == 0);
  CHECK(fs::exists(dir / "green.json"));
  CHECK(run("ray --c=-3 --angle=0.1 -o " + dir.string()) == 0);
  CHECK(fs::exists(dir / "ray.csv"));
  CHECK(run("equipot --c=-3 --g=0.1 -o " + dir.string()) == 0);
  CHECK(fs::exists(dir / "equipot_003.csv"));
  CHECK(run("skeleton --c=-3 --depth=2 -o " + dir.string()) == 0);
  CHECK(fs::exists(dir / "skeleton_006.csv"));
  CHECK(run("converge --source-c=-3 --target-c=-5 --k=pair --n=1,2,4 --samples=20 -o " + dir.string()) == 0);
  auto conv = slurp(dir / "convergence.csv");
  CHECK(conv.rfind("n,sup_distance,dropped_samples\n", 0) == 0);
  CHECK(run("probe --c=0 --k=linear:1.5 -o " + dir.string()) == 0);
  CHECK(fs::exists(dir / "probe.csv"));
}

TEST_CASE("cli errors name the module error") {
  auto dir = scratch("err");
  auto err = dir / "stderr.txt";
  CHECK(run("tree --c=-1 --depth=3 -o " + dir.string(), err) != 0);
  CHECK(slurp(err).rfind("error: Connected:", 0) == 0);
  std::ofstream(dir / "bad.cfg") << "c_re=-3\nbogus=1\n";
  CHECK(run("--config " + (dir / "bad.cfg").string() + " tree -o " + dir.string(), err) != 0);
  CHECK(slurp(err).rfind("error: ConfigError:", 0) == 0);
  std::ofstream(dir / "good.cfg") << "# sample\nc_re = -3\ntol = 1e-10\nseed = 4\noutput_dir = " +
                                         (dir / "cfg_out").string() + "\n";
  CHECK(run("--config " + (dir / "good.cfg").string() + " tree --depth=2") == 0);
  CHECK(fs::exists(dir / "cfg_out" / "tree.json"));
}
