#pragma once
// Potential and virtual conformal structures (d, k) on the log-Böttcher
// cylinder, the transformed moduli mod_xi, and combinatorial collapsing.
#include <string>
#include <vector>

#include "greenrect/arcs.hpp"
#include "greenrect/tree.hpp"

namespace greenrect {

/// Continuous non-decreasing piecewise-linear map of [0,1] onto itself with
/// d(0) = 0 and d(1) = 1, lifted to R by D(x + n) = D(x) + n.
class CircleCDF {
 public:
  struct Point {
    double x = 0.0;
    double y = 0.0;
  };

  /// Throws InvalidArgument unless x strictly increases from 0 to 1 and y
  /// is non-decreasing from 0 to 1.
  CircleCDF() : CircleCDF(std::vector<Point>{{0.0, 0.0}, {1.0, 1.0}}) {}
  explicit CircleCDF(std::vector<Point> breakpoints);
  static CircleCDF identity();

  double operator()(double x) const;
  /// D(b) - D(a) for a lifted interval.
  double measure(double a, double b) const { return (*this)(b) - (*this)(a); }
  IntervalMeasure as_measure() const;
  const std::vector<Point>& breakpoints() const { return points_; }
  bool is_identity() const;
  double max_slope() const;
  double min_slope() const;
  /// Image of the arcs, with collapsed (zero-length) images dropped.
  ArcSet image(const ArcSet& arcs) const;

 private:
  std::vector<Point> points_;
};

/// Increasing piecewise-linear homeomorphism of [0, inf) with k(0) = 0,
/// extended with its last slope.
class PotentialHomeo {
 public:
  struct Point {
    double y = 0.0;
    double k = 0.0;
  };

  PotentialHomeo() : PotentialHomeo(std::vector<Point>{{0.0, 0.0}, {1.0, 1.0}}) {}
  explicit PotentialHomeo(std::vector<Point> breakpoints);
  static PotentialHomeo identity();
  static PotentialHomeo linear(double lambda);

  double operator()(double y) const;
  const std::vector<Point>& breakpoints() const { return points_; }
  std::vector<double> slopes() const;
  double bilipschitz_constant() const;
  bool is_identity() const;

 private:
  std::vector<Point> points_;
};

struct VirtualStructure {
  CircleCDF d = CircleCDF::identity();
  PotentialHomeo k = PotentialHomeo::identity();
};

/// Sum of d-increments over disjoint arcs; throws OverlappingWindows.
double measure_of(const CircleCDF& d, const ArcSet& windows);

/// (|J0| / mu_d(J0)) * (|k(J1)| / |J1|) * mod A; +inf iff mu_d(J0) = 0.
double mod_xi(const TreeNode& node, const VirtualStructure& vs);

struct AdmissibilityReport {
  Verdict verdict = Verdict::inconclusive;
  double threshold = 0.0;
  std::vector<double> mod_xi;        // by node id, +inf for the root
  std::vector<int> offending_nodes;  // surviving nodes below the threshold
  std::vector<int> deleted_roots;    // first infinite node on each branch
  std::vector<int> all_infinite_depths;
  std::vector<std::string> reasons;
};

AdmissibilityReport admissible(const AnalyticTree& tree, const VirtualStructure& vs, double m0);

/// Deletes branches at infinite-mod_xi vertices and merges single-child
/// chains. Throws NotAdmissible if some depth is entirely infinite.
AnalyticTree collapse(const AnalyticTree& tree, const VirtualStructure& vs);

/// (1 - 1/n^2) d + (1/n^2) id.
CircleCDF lipschitz_approx_d(const CircleCDF& d, int n);
/// Integral of min(n, k').
PotentialHomeo lipschitz_approx_k(const PotentialHomeo& k, int n);

std::string serialize_cdf(const CircleCDF& d);
CircleCDF deserialize_cdf(const std::string& text);
std::string serialize_homeo(const PotentialHomeo& k);
PotentialHomeo deserialize_homeo(const std::string& text);
std::string serialize_structure(const VirtualStructure& vs);
VirtualStructure deserialize_structure(const std::string& text);

}  // namespace greenrect
