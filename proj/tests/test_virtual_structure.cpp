#include <doctest.h>

#include <cmath>
#include <numbers>

#include "greenrect/error.hpp"
#include "greenrect/virtual_structure.hpp"

using namespace greenrect;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InternalInvariant;
}

CircleCDF staircase() {
  return CircleCDF({{0.0, 0.0}, {0.1, 0.2}, {0.3, 0.2}, {0.45, 0.5}, {0.6, 0.5}, {0.8, 0.7},
                    {0.9, 0.7}, {1.0, 1.0}});
}

// Riemann sum of the density (finite differences of d on a fine grid).
double riemann_measure(const CircleCDF& d, double a, double b, int n) {
  double h = (b - a) / n, sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = a + (i + 0.5) * h;
    sum += (d(x + 1e-9) - d(x - 1e-9)) / 2e-9 * h;
  }
  return sum;
}

AnalyticTree quad_tree(int depth) { return build_quadratic_tree(make_system({-3.0, 0.0}), depth); }

}  // namespace

TEST_CASE("circle CDF construction and lift") {
  CHECK(code_of([] { CircleCDF({{0.0, 0.0}, {1.0, 0.0}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { CircleCDF({{0.0, 0.0}, {0.5, 0.6}, {0.4, 0.7}, {1.0, 1.0}}); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { CircleCDF({{0.0, 0.0}, {0.5, 0.6}, {0.7, 0.5}, {1.0, 1.0}}); }) ==
        ErrorCode::InvalidArgument);
  auto d = staircase();
  CHECK(d(1.2) == doctest::Approx(1.2));
  CHECK(d(-0.7) == doctest::Approx(-0.8));
}

TEST_CASE("measure_of examples") {
  CHECK(measure_of(CircleCDF::identity(), {{0.0, 0.25}}) == 0.25);
  CircleCDF half_flat({{0.0, 0.0}, {0.5, 0.0}, {1.0, 1.0}});
  CHECK(measure_of(half_flat, {{0.0, 0.5}}) == 0.0);
  auto d = CircleCDF({{0.0, 0.0}, {0.2, 0.5}, {0.4, 0.5}, {0.7, 0.6}, {1.0, 1.0}});
  CHECK(measure_of(d, {{0.125, 0.375}}) ==
        doctest::Approx(riemann_measure(d, 0.125, 0.375, 1000000)).epsilon(1e-6));
  CHECK(measure_of(d, {{0.9, 1.1}}) == doctest::Approx(d(1.1) - d(0.9)));
  CHECK(code_of([&] { measure_of(d, {{0.1, 0.3}, {0.2, 0.4}}); }) == ErrorCode::OverlappingWindows);
}

TEST_CASE("CDF continuity on a refinement grid") {
  auto d = staircase();
  const double step = 1e-4;
  for (int i = 1; i < 10000; ++i) {
    double x = i * step;
    CHECK(std::abs(d(x) - d(x - 1e-12)) <= d.max_slope() * 1e-12 + 1e-15);
  }
}

TEST_CASE("mod_xi identity, scaling and flat windows") {
  auto tree = quad_tree(3);
  const VirtualStructure id;
  const VirtualStructure scaled{CircleCDF::identity(), PotentialHomeo::linear(2.5)};
  for (const auto& n : tree.nodes()) {
    if (n.is_root()) {
      CHECK(code_of([&] { mod_xi(n, id); }) == ErrorCode::RootNode);
      continue;
    }
    CHECK(mod_xi(n, id) == n.modulus);
    CHECK(mod_xi(n, scaled) == doctest::Approx(2.5 * n.modulus).epsilon(1e-14));
  }
  VirtualStructure flat{CircleCDF({{0.0, 0.0}, {0.25, 0.5}, {0.75, 0.5}, {1.0, 1.0}}), {}};
  CHECK(std::isinf(mod_xi(tree.node(1), flat)));
  CHECK(std::isfinite(mod_xi(tree.node(2), flat)));
}

TEST_CASE("admissibility") {
  auto sys = make_system({-3.0, 0.0});
  auto tree = build_quadratic_tree(sys, 4);
  const double m0 = sys.critical_potential() / (4 * std::numbers::pi);
  auto rep = admissible(tree, {}, m0);
  CHECK(rep.verdict == Verdict::certified);
  CHECK(rep.deleted_roots.empty());

  VirtualStructure flat{CircleCDF({{0.0, 0.0}, {0.25, 0.5}, {0.75, 0.5}, {1.0, 1.0}}), {}};
  auto rep2 = admissible(tree, flat, m0);
  CHECK(rep2.verdict == Verdict::certified);
  CHECK(rep2.deleted_roots == std::vector<int>{1});
}

TEST_CASE("collapse with the identity structure is the identity") {
  auto tree = quad_tree(4);
  auto out = collapse(tree, {});
  REQUIRE(out.nodes().size() == tree.nodes().size());
  for (std::size_t i = 0; i < out.nodes().size(); ++i) {
    const auto& a = tree.nodes()[i];
    const auto& b = out.nodes()[i];
    CHECK(a.windows == b.windows);
    CHECK(a.g_minus == b.g_minus);
    CHECK(a.g_plus == b.g_plus);
    CHECK(a.modulus == b.modulus);
    CHECK(a.angular_invariant == b.angular_invariant);
    CHECK(a.children == b.children);
    CHECK(a.inner_accesses == b.inner_accesses);
  }
}

TEST_CASE("collapse of one flat depth-2 window matches the chain-sum oracle") {
  auto tree = quad_tree(4);
  // Node 4 is the depth-2 cell (3/8, 5/8).
  REQUIRE(tree.node(4).windows == ArcSet{{0.375, 0.625}});
  VirtualStructure vs{CircleCDF({{0.0, 0.0}, {0.375, 0.5}, {0.625, 0.5}, {1.0, 1.0}}), {}};
  auto out = collapse(tree, vs);
  // Node 4 and its 2 + 4 descendants disappear; node 1 merges with node 3.
  CHECK(out.nodes().size() == tree.nodes().size() - 7 - 1);

  // Oracle: walk the original tree from node 1 while exactly one child has
  // finite mod_xi, summing mod_xi by the explicit formula.
  auto mu_d = [&](const TreeNode& n) {
    double mu = 0.0;
    for (const Arc& a : n.windows) mu += vs.d(a.hi) - vs.d(a.lo);
    return mu;
  };
  double chain = 0.0;
  int cur = 1;
  for (;;) {
    const TreeNode& n = tree.node(cur);
    chain += n.harmonic_measure / mu_d(n) * n.modulus;
    std::vector<int> alive;
    for (int c : n.children) {
      if (mu_d(tree.node(c)) > 0.0) alive.push_back(c);
    }
    if (alive.size() != 1) break;
    cur = alive.front();
  }
  const auto& merged = out.node(1);
  CHECK(std::abs(merged.modulus - chain) <= 1e-12);
  CHECK(merged.g_minus == tree.node(3).g_minus);
  CHECK(merged.children.size() == 2);
}

TEST_CASE("collapse scaling and non-admissible input") {
  auto tree = quad_tree(3);
  VirtualStructure scaled{CircleCDF::identity(), PotentialHomeo::linear(3.0)};
  auto out = collapse(tree, scaled);
  REQUIRE(out.nodes().size() == tree.nodes().size());
  for (std::size_t i = 1; i < out.nodes().size(); ++i) {
    CHECK(out.nodes()[i].modulus == doctest::Approx(3.0 * tree.nodes()[i].modulus).epsilon(1e-14));
  }
}

TEST_CASE("Lipschitz approximations") {
  CHECK(lipschitz_approx_d(CircleCDF::identity(), 5).is_identity());
  PotentialHomeo steep({{0.0, 0.0}, {1.0, 1.0}, {1.5, 6.0}, {3.0, 7.5}});
  auto k3 = lipschitz_approx_k(steep, 3);
  for (double s : k3.slopes()) CHECK(s <= 3.0);
  CHECK(k3(1.0) == 1.0);
  CHECK(k3(1.5) == doctest::Approx(2.5));
  CHECK(lipschitz_approx_k(steep, 10).breakpoints().size() == steep.breakpoints().size());
  CHECK(lipschitz_approx_k(steep, 10)(1.5) == 6.0);

  auto d = staircase();
  double prev = INFINITY;
  for (int n : {1, 2, 4, 8, 16, 32, 64}) {
    auto dn = lipschitz_approx_d(d, n);
    CHECK(dn.min_slope() > 0.0);
    double sup = 0.0;
    for (int i = 0; i <= 10000; ++i) sup = std::max(sup, std::abs(dn(i * 1e-4) - d(i * 1e-4)));
    CHECK(sup <= prev + 1e-3);
    prev = sup;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("structure JSON round trips") {
  auto d = staircase();
  CHECK(serialize_cdf(deserialize_cdf(serialize_cdf(d))) == serialize_cdf(d));
  PotentialHomeo k({{0.0, 0.0}, {0.3, 0.7}, {2.0, 2.5}});
  CHECK(serialize_homeo(deserialize_homeo(serialize_homeo(k))) == serialize_homeo(k));
  VirtualStructure vs{d, k};
  CHECK(serialize_structure(deserialize_structure(serialize_structure(vs))) == serialize_structure(vs));
  CHECK(code_of([] {
          deserialize_cdf(R"({"format":"circle-cdf/1","breakpoints":[[0,0],[1,0.5]]})");
        }) == ErrorCode::SchemaError);
  CHECK(code_of([] {
          deserialize_homeo(R"({"format":"potential-homeo/1","breakpoints":[[0,0],[1,1],[2,0.5]]})");
        }) == ErrorCode::SchemaError);
  CHECK(code_of([] { deserialize_cdf("[]"); }) == ErrorCode::SchemaError);
}
