#pragma once
// Green-coordinate transport between quadratic systems, the continuum-case
// map l, and numerical probes of its displacement and boundary behaviour.
#include <vector>

#include "greenrect/quadratic.hpp"
#include "greenrect/virtual_structure.hpp"

namespace greenrect {

struct TransportResult {
  Complex w;
  GreenCoordinate source;
  GreenCoordinate target;  // (d(theta), k(g)) as requested
  double potential_residual = 0.0;
  double angle_residual = 0.0;
  bool perturbed = false;  // target angle nudged off a crash point
};

class TransportMap {
 public:
  TransportMap(GreenSystem source, GreenSystem target, VirtualStructure vs);

  const GreenSystem& source() const { return source_; }
  const GreenSystem& target() const { return target_; }
  const VirtualStructure& structure() const { return vs_; }

  Complex operator()(Complex z) const;
  /// Transport of a point given in source Green coordinates.
  Complex from_coordinates(const GreenCoordinate& gc, bool* perturbed = nullptr) const;
  /// Transport plus the defining-equation residuals measured on the target.
  TransportResult evaluate(Complex z) const;

 private:
  GreenSystem source_;
  GreenSystem target_;
  VirtualStructure vs_;
};

/// d = id and k sending G_c(0)/2^n to G_c'(0)/2^n. Checks that the trees
/// of both parameters share their angular invariants to `depth`.
TransportMap build_quadratic_pair(double c, double c_prime, int depth = 6, double tol = 1e-10);

class ContinuumMap {
 public:
  ContinuumMap(GreenSystem system, PotentialHomeo k);
  const GreenSystem& system() const { return system_; }
  const PotentialHomeo& k() const { return k_; }
  Complex operator()(Complex z) const;

 private:
  GreenSystem system_;
  PotentialHomeo k_;
};

/// Nearest-neighbour distance to a fixed cloud of Julia samples.
class JuliaSamples {
 public:
  explicit JuliaSamples(std::vector<Complex> points);
  static JuliaSamples of(const GreenSystem& sys, int depth = 14);
  double distance(Complex z) const;
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<Complex> points_;
  double x0_ = 0.0, y0_ = 0.0, cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

struct DisplacementEstimate {
  double qh_length = 0.0;  // integral of |dz| / delta along the ray segment
  double estimate = 0.0;   // 2 * qh_length, an upper estimate of 2 d_P
  double log_c = 0.0;
  bool within_bound = false;  // qh_length <= log C + slack
};

DisplacementEstimate quasihyperbolic_displacement(const ContinuumMap& cm, Complex z,
                                                  const JuliaSamples& samples,
                                                  int steps = 512, double slack = 0.1);

struct ProbeSample {
  double radius = 0.0;
  double direction = 0.0;  // radians
  Complex quotient;
};

std::vector<ProbeSample> boundary_derivative_probe(const ContinuumMap& cm, Complex z0,
                                                   const std::vector<double>& radii);

double chordal_distance(Complex a, Complex b);

struct ConvergenceRow {
  int n = 0;
  double sup_distance = 0.0;
  int dropped_samples = 0;
};

std::vector<ConvergenceRow> convergence_study(const TransportMap& tm, const std::vector<int>& n_list,
                                              const std::vector<Complex>& samples);

/// Non-increasing from the position of the table maximum onward.
bool eventually_decreasing(const std::vector<ConvergenceRow>& table);

}  // namespace greenrect
