#include "greenrect/tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "greenrect/error.hpp"
#include "greenrect/json_util.hpp"

namespace greenrect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRelTol = 1e-12;

bool close(double a, double b, double tol = kRelTol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

[[noreturn]] void bad_node(const TreeNode& n, const std::string& msg) {
  fail(ErrorCode::SchemaError, fmt::format("node {}: {}", n.id, msg));
}

}  // namespace

bool TreeNode::is_root() const { return std::isinf(g_plus); }

double modulus_formula(double g_minus, double g_plus, double harmonic_measure) {
  return (g_plus - g_minus) / (kTwoPi * harmonic_measure);
}

double node_modulus(const TreeNode& node) {
  if (node.is_root()) fail(ErrorCode::RootHasInfiniteModulus, "the root annulus has infinite modulus");
  if (node.g_plus == node.g_minus) return 0.0;
  return modulus_formula(node.g_minus, node.g_plus, node.harmonic_measure);
}

double opening_access(const ArcSet& windows, const std::vector<double>& outer_accesses) {
  for (double a : outer_accesses) {
    for (const Arc& arc : windows) {
      if (circle_distance(arc.lo, a) < 1e-15) return a;
    }
  }
  if (outer_accesses.empty()) fail(ErrorCode::InvalidArgument, "node has no outer access");
  return outer_accesses.front();
}

std::array<double, 2> angular_invariant(const ArcSet& windows, double outer_access,
                                        const std::array<double, 2>& inner_accesses,
                                        const IntervalMeasure& measure) {
  double mu = 0.0;
  for (const Arc& a : windows) mu += measure(a.lo, a.hi);
  std::array<double, 2> offset{};
  for (int j = 0; j < 2; ++j) {
    offset[j] = ccw_measure(windows, outer_access, inner_accesses[j], measure) / mu;
  }
  std::sort(offset.begin(), offset.end());
  return {wrap01(-offset[0]), wrap01(-offset[1])};
}

AnalyticTree AnalyticTree::from_nodes(std::vector<TreeNode> nodes, int root_id, TreeSource source,
                                      std::optional<double> c,
                                      std::optional<double> critical_potential) {
  const int count = static_cast<int>(nodes.size());
  if (count == 0) fail(ErrorCode::SchemaError, "tree has no nodes");
  if (root_id < 0 || root_id >= count) fail(ErrorCode::SchemaError, "root_id out of range");

  std::vector<int> parents(nodes.size(), -2);
  parents[static_cast<std::size_t>(root_id)] = -1;
  for (int i = 0; i < count; ++i) {
    const TreeNode& n = nodes[static_cast<std::size_t>(i)];
    if (n.id != i) bad_node(n, fmt::format("id must equal its position {}", i));
    const bool root = i == root_id;
    if (root != n.is_root()) bad_node(n, "only the root has g_plus = +inf");
    if (root && n.depth != 0) bad_node(n, "root depth must be 0");
    if (!(n.g_minus >= 0.0) || !std::isfinite(n.g_minus)) bad_node(n, "g_minus must be finite and >= 0");
    if (!(n.g_minus < n.g_plus)) bad_node(n, "g_minus must be < g_plus");
    if (n.windows.empty()) bad_node(n, "empty angle window");
    if (!(n.harmonic_measure > 0.0)) bad_node(n, "harmonic_measure must be positive");
    const ArcSet merged = canonical(n.windows);
    if (!close(total_length(merged), total_length(n.windows))) bad_node(n, "windows overlap");
    if (!close(n.harmonic_measure, total_length(n.windows))) {
      bad_node(n, "harmonic_measure differs from the window length");
    }
    if (root) {
      if (!std::isinf(n.modulus)) bad_node(n, "root modulus must be +inf");
    } else if (!close(n.modulus, modulus_formula(n.g_minus, n.g_plus, n.harmonic_measure))) {
      bad_node(n, fmt::format("modulus {} disagrees with the formula value {}", n.modulus,
                              modulus_formula(n.g_minus, n.g_plus, n.harmonic_measure)));
    }
    for (double t : n.angular_invariant) {
      if (!(t >= 0.0 && t < 1.0)) bad_node(n, "angular invariant outside [0, 1)");
    }
    if (n.end) {
      if (!n.children.empty()) bad_node(n, "an end has no children");
      if (n.angular_invariant != std::array<double, 2>{0.0, 0.0}) {
        bad_node(n, "an end has angular invariant {0, 0}");
      }
    } else if (root && circle_distance(n.angular_invariant[0], 1.0 - n.angular_invariant[1]) > kRelTol) {
      bad_node(n, "root invariants must satisfy theta1 = 1 - theta2");
    }
    if (n.children.size() != 0 && n.children.size() != 2) {
      bad_node(n, fmt::format("has {} children; 0 or 2 expected", n.children.size()));
    }
    double child_mu = 0.0;
    for (int cid : n.children) {
      if (cid < 0 || cid >= count) bad_node(n, fmt::format("child {} out of range", cid));
      if (parents[static_cast<std::size_t>(cid)] != -2) {
        bad_node(n, fmt::format("child {} already has a parent", cid));
      }
      parents[static_cast<std::size_t>(cid)] = i;
      const TreeNode& ch = nodes[static_cast<std::size_t>(cid)];
      if (ch.depth != n.depth + 1) bad_node(ch, "depth must be parent depth + 1");
      if (!close(ch.g_plus, n.g_minus)) bad_node(ch, "g_plus must equal the parent's g_minus");
      if (!close(total_length(intersect(ch.windows, n.windows)), total_length(ch.windows))) {
        bad_node(ch, "window leaves the parent window");
      }
      child_mu += ch.harmonic_measure;
    }
    if (n.children.size() == 2) {
      const auto& a = nodes[static_cast<std::size_t>(n.children[0])].windows;
      const auto& b = nodes[static_cast<std::size_t>(n.children[1])].windows;
      if (total_length(intersect(a, b)) > kRelTol) bad_node(n, "children windows overlap");
      if (!close(child_mu, n.harmonic_measure)) {
        bad_node(n, "children harmonic measures do not sum to the parent's");
      }
    }
  }
  for (int i = 0; i < count; ++i) {
    if (parents[static_cast<std::size_t>(i)] == -2) {
      bad_node(nodes[static_cast<std::size_t>(i)], "unreachable from the root");
    }
  }

  AnalyticTree t;
  t.nodes_ = std::move(nodes);
  t.parents_ = std::move(parents);
  t.root_id_ = root_id;
  t.source_ = source;
  t.c_ = c;
  t.critical_potential_ = critical_potential;
  if (source == TreeSource::quadratic) {
    for (int d = 0; d <= t.max_depth(); ++d) {
      if (t.layer(d).size() != (std::size_t{1} << d)) {
        fail(ErrorCode::SchemaError, fmt::format("quadratic tree layer {} is not full", d));
      }
    }
  }
  return t;
}

int AnalyticTree::max_depth() const {
  int d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.depth);
  return d;
}

std::vector<int> AnalyticTree::layer(int depth) const {
  std::vector<int> ids;
  for (const auto& n : nodes_) {
    if (n.depth == depth) ids.push_back(n.id);
  }
  return ids;
}

int AnalyticTree::parent_of(int id) const { return parents_.at(static_cast<std::size_t>(id)); }

std::vector<int> AnalyticTree::path_to(int id) const {
  std::vector<int> path;
  for (int cur = id; cur >= 0; cur = parent_of(cur)) path.push_back(cur);
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

// Complete binary tree over the doubling cells; g_level(n) is g_minus at depth n.
std::vector<TreeNode> cell_tree(int depth, const std::vector<double>& g_level) {
  struct Pending {
    std::vector<Side> itinerary;
    int parent;
  };
  std::vector<TreeNode> nodes;
  std::deque<Pending> queue{{{}, -1}};
  while (!queue.empty()) {
    Pending p = std::move(queue.front());
    queue.pop_front();
    const int n = static_cast<int>(p.itinerary.size());
    TreeNode node;
    node.id = static_cast<int>(nodes.size());
    node.depth = n;
    node.g_minus = g_level[static_cast<std::size_t>(n)];
    node.g_plus = n == 0 ? kInf : g_level[static_cast<std::size_t>(n - 1)];
    node.windows = cell_window(p.itinerary);
    node.harmonic_measure = total_length(node.windows);
    auto inner = access_angles(p.itinerary);
    node.inner_accesses.assign(inner.begin(), inner.end());
    if (n == 0) {
      node.modulus = kInf;
      double t1 = wrap01(inner[0] - inner[1]);
      node.angular_invariant = {t1, wrap01(1.0 - t1)};
    } else {
      const TreeNode& parent = nodes[static_cast<std::size_t>(p.parent)];
      node.outer_accesses = parent.inner_accesses;
      node.modulus = modulus_formula(node.g_minus, node.g_plus, node.harmonic_measure);
      node.angular_invariant =
          angular_invariant(node.windows, opening_access(node.windows, node.outer_accesses), inner);
      nodes[static_cast<std::size_t>(p.parent)].children.push_back(node.id);
    }
    if (n < depth) {
      std::vector<std::pair<double, std::vector<Side>>> kids;
      for (Side s : {Side::Left, Side::Right}) {
        auto itin = p.itinerary;
        itin.push_back(s);
        kids.emplace_back(cell_window(itin).front().lo, std::move(itin));
      }
      std::sort(kids.begin(), kids.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (auto& k : kids) queue.push_back({std::move(k.second), node.id});
    }
    nodes.push_back(std::move(node));
  }
  return nodes;
}

}  // namespace

AnalyticTree build_quadratic_tree(const GreenSystem& sys, int depth) {
  const double g0 = sys.critical_potential();
  if (!sys.angles_supported()) fail(ErrorCode::Unsupported, "tree needs a real parameter");
  if (depth < 1 || depth > 20) fail(ErrorCode::InvalidArgument, "depth must be in [1, 20]");
  std::vector<double> g_level;
  for (int n = 0; n <= depth; ++n) g_level.push_back(std::ldexp(g0, -n));
  return AnalyticTree::from_nodes(cell_tree(depth, g_level), 0, TreeSource::quadratic,
                                  sys.params().c.real(), g0);
}

AnalyticTree uniform_abstract_tree(int depth, const std::vector<double>& level_modulus,
                                   double floor) {
  if (depth < 1 || depth > 20) fail(ErrorCode::InvalidArgument, "depth must be in [1, 20]");
  if (static_cast<int>(level_modulus.size()) < depth + 1) {
    fail(ErrorCode::InvalidArgument, "need a modulus for every depth 1..depth");
  }
  if (!(floor >= 0.0)) fail(ErrorCode::InvalidArgument, "floor must be >= 0");
  std::vector<double> g_level(static_cast<std::size_t>(depth) + 1);
  g_level[static_cast<std::size_t>(depth)] = floor;
  for (int n = depth; n >= 1; --n) {
    double m = level_modulus[static_cast<std::size_t>(n)];
    if (!(m > 0.0)) fail(ErrorCode::InvalidArgument, "moduli must be positive");
    g_level[static_cast<std::size_t>(n - 1)] =
        g_level[static_cast<std::size_t>(n)] + kTwoPi * m * std::ldexp(1.0, -n);
  }
  return AnalyticTree::from_nodes(cell_tree(depth, g_level), 0, TreeSource::abstract);
}

std::string verdict_name(Verdict v, const char* certified_name) {
  return v == Verdict::certified ? certified_name : "inconclusive";
}

ThinnessReport thinness_report(const AnalyticTree& tree, double m0) {
  ThinnessReport r;
  r.threshold = m0;
  const int depth = tree.max_depth();
  r.per_depth_min_modulus.assign(static_cast<std::size_t>(depth) + 1, kInf);
  r.min_modulus = kInf;
  r.min_branch_sum = kInf;
  for (const auto& n : tree.nodes()) {
    if (!n.is_root()) {
      auto& slot = r.per_depth_min_modulus[static_cast<std::size_t>(n.depth)];
      slot = std::min(slot, n.modulus);
      r.min_modulus = std::min(r.min_modulus, n.modulus);
    }
    if (n.children.empty()) {
      if (n.end) {
        r.ends.push_back(n.id);
      } else if (n.depth < depth) {
        r.early_leaves.push_back(n.id);
      }
      double sum = 0.0;
      for (int id : tree.path_to(n.id)) {
        if (!tree.node(id).is_root()) sum += tree.node(id).modulus;
      }
      r.min_branch_sum = std::min(r.min_branch_sum, sum);
    }
  }
  r.binary = r.ends.empty() && r.early_leaves.empty();
  if (depth < 2) r.reasons.push_back("fewer than two annulus levels");
  if (!(r.min_modulus >= m0)) {
    r.reasons.push_back(fmt::format("minimum modulus {} is below m0 = {}", r.min_modulus, m0));
  }
  if (!r.ends.empty()) r.reasons.push_back(fmt::format("{} declared ends", r.ends.size()));
  if (!r.early_leaves.empty()) {
    r.reasons.push_back(fmt::format("{} childless nodes above the truncation depth",
                                    r.early_leaves.size()));
  }
  r.verdict = r.reasons.empty() ? Verdict::certified : Verdict::inconclusive;
  return r;
}

namespace {

json accesses_to_json(const std::vector<double>& v) {
  json out = json::array();
  for (double a : v) out.push_back(number_to_json(a));
  return out;
}

std::vector<double> accesses_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) fail(ErrorCode::SchemaError, where + ": expected a list");
  std::vector<double> out;
  for (const json& a : j) out.push_back(number_from_json(a, where));
  return out;
}

double real_field(const json& obj, const char* key, const std::string& where) {
  const json& v = require_field(obj, key, where);
  if (!v.is_number()) fail(ErrorCode::SchemaError, fmt::format("{}: '{}' must be a number", where, key));
  return v.get<double>();
}

}  // namespace

std::string serialize_tree(const AnalyticTree& tree) {
  json j;
  j["format"] = "analytic-tree/1";
  if (tree.source() == TreeSource::quadratic) {
    j["source"] = {{"kind", "quadratic"}, {"c", tree.parameter().value_or(0.0)}};
  } else {
    j["source"] = {{"kind", "abstract"}};
  }
  j["critical_potential"] =
      tree.critical_potential() ? json(*tree.critical_potential()) : json(nullptr);
  j["root_id"] = tree.root_id();
  json nodes = json::array();
  for (const auto& n : tree.nodes()) {
    json o;
    o["id"] = n.id;
    o["depth"] = n.depth;
    o["g_minus"] = n.g_minus;
    o["g_plus"] = n.is_root() ? json(nullptr) : json(n.g_plus);
    o["windows"] = arcs_to_json(n.windows);
    o["harmonic_measure"] = n.harmonic_measure;
    o["modulus"] = n.is_root() ? json(nullptr) : json(n.modulus);
    o["angular_invariant"] = {number_to_json(n.angular_invariant[0]),
                              number_to_json(n.angular_invariant[1])};
    o["outer_accesses"] = accesses_to_json(n.outer_accesses);
    o["inner_accesses"] = accesses_to_json(n.inner_accesses);
    o["end"] = n.end;
    o["children"] = n.children;
    nodes.push_back(std::move(o));
  }
  j["nodes"] = std::move(nodes);
  return dump_canonical(j);
}

AnalyticTree deserialize_tree(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaError, fmt::format("tree JSON does not parse: {}", e.what()));
  }
  try {
    if (require_field(j, "format", "tree") != "analytic-tree/1") {
      fail(ErrorCode::SchemaError, "tree: unknown format");
    }
    const json& src = require_field(j, "source", "tree");
    const std::string kind = require_field(src, "kind", "tree.source").get<std::string>();
    TreeSource source;
    std::optional<double> c;
    if (kind == "quadratic") {
      source = TreeSource::quadratic;
      c = real_field(src, "c", "tree.source");
    } else if (kind == "abstract") {
      source = TreeSource::abstract;
    } else {
      fail(ErrorCode::SchemaError, "tree.source.kind must be quadratic or abstract");
    }
    std::optional<double> g0;
    if (const json& cp = require_field(j, "critical_potential", "tree"); !cp.is_null()) {
      g0 = cp.get<double>();
    }
    const int root_id = require_field(j, "root_id", "tree").get<int>();
    std::vector<TreeNode> nodes;
    for (const json& o : require_field(j, "nodes", "tree")) {
      const std::string where = fmt::format("tree.nodes[{}]", nodes.size());
      TreeNode n;
      n.id = require_field(o, "id", where).get<int>();
      n.depth = require_field(o, "depth", where).get<int>();
      n.g_minus = real_field(o, "g_minus", where);
      n.g_plus = extended_from_json(require_field(o, "g_plus", where), where);
      n.windows = arcs_from_json(require_field(o, "windows", where), where);
      n.harmonic_measure = real_field(o, "harmonic_measure", where);
      n.modulus = extended_from_json(require_field(o, "modulus", where), where);
      const json& ai = require_field(o, "angular_invariant", where);
      if (!ai.is_array() || ai.size() != 2) {
        fail(ErrorCode::SchemaError, where + ": angular_invariant must be a pair");
      }
      n.angular_invariant = {number_from_json(ai[0], where), number_from_json(ai[1], where)};
      n.outer_accesses = accesses_from_json(require_field(o, "outer_accesses", where), where);
      n.inner_accesses = accesses_from_json(require_field(o, "inner_accesses", where), where);
      n.end = require_field(o, "end", where).get<bool>();
      n.children = require_field(o, "children", where).get<std::vector<int>>();
      nodes.push_back(std::move(n));
    }
    return AnalyticTree::from_nodes(std::move(nodes), root_id, source, c, g0);
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaError, fmt::format("tree JSON has a wrong field type: {}", e.what()));
  }
}

}  // namespace greenrect
