#pragma once
// Analytic trees: annuli between critical equipotentials, with their
// moduli and angular invariants in the cylindrical (angle x potential) model.
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "greenrect/arcs.hpp"
#include "greenrect/quadratic.hpp"

namespace greenrect {

struct TreeNode {
  int id = 0;
  int depth = 0;
  double g_minus = 0.0;
  double g_plus = 0.0;  // +inf for the root
  ArcSet windows;
  double harmonic_measure = 0.0;
  double modulus = 0.0;  // +inf for the root
  std::array<double, 2> angular_invariant{};
  std::vector<double> outer_accesses;
  std::vector<double> inner_accesses;
  /// A declared end. Leaves at the truncation depth are not ends.
  bool end = false;
  std::vector<int> children;

  bool is_root() const;
};

enum class TreeSource { quadratic, abstract };

class AnalyticTree {
 public:
  /// Validates every invariant; throws SchemaError with the first violation.
  static AnalyticTree from_nodes(std::vector<TreeNode> nodes, int root_id, TreeSource source,
                                 std::optional<double> c = std::nullopt,
                                 std::optional<double> critical_potential = std::nullopt);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const TreeNode& root() const { return node(root_id_); }
  int root_id() const { return root_id_; }
  TreeSource source() const { return source_; }
  std::optional<double> parameter() const { return c_; }
  std::optional<double> critical_potential() const { return critical_potential_; }
  int max_depth() const;
  std::vector<int> layer(int depth) const;
  /// Node ids from the root down to `id`.
  std::vector<int> path_to(int id) const;
  int parent_of(int id) const;  // -1 for the root

 private:
  std::vector<TreeNode> nodes_;
  std::vector<int> parents_;
  int root_id_ = 0;
  TreeSource source_ = TreeSource::abstract;
  std::optional<double> c_;
  std::optional<double> critical_potential_;
};

AnalyticTree build_quadratic_tree(const GreenSystem& sys, int depth);

/// Complete binary tree whose depth-n annuli all have modulus level_modulus(n).
/// Windows follow the quadratic cell combinatorics; leaf g_minus is `floor`.
AnalyticTree uniform_abstract_tree(int depth, const std::vector<double>& level_modulus,
                                   double floor = 1.0);

double node_modulus(const TreeNode& node);
double modulus_formula(double g_minus, double g_plus, double harmonic_measure);

/// Angular invariant from the outer access that opens a window arc to the
/// inner accesses, as normalized measure offsets.
std::array<double, 2> angular_invariant(const ArcSet& windows, double outer_access,
                                        const std::array<double, 2>& inner_accesses,
                                        const IntervalMeasure& measure = lebesgue);
/// The outer access equal to the start of one of the window arcs.
double opening_access(const ArcSet& windows, const std::vector<double>& outer_accesses);

enum class Verdict { certified, inconclusive };
std::string verdict_name(Verdict v, const char* certified_name);

struct ThinnessReport {
  std::vector<double> per_depth_min_modulus;  // index = depth, entry 0 is +inf
  double min_modulus = 0.0;
  double min_branch_sum = 0.0;
  double threshold = 0.0;
  bool binary = true;
  std::vector<int> ends;
  std::vector<int> early_leaves;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> reasons;
};

ThinnessReport thinness_report(const AnalyticTree& tree, double m0);

std::string serialize_tree(const AnalyticTree& tree);
AnalyticTree deserialize_tree(const std::string& text);

}  // namespace greenrect
