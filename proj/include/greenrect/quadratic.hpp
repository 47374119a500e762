#pragma once

// Green function, log-Böttcher coordinates, rays, equipotentials and the
// skeleton for f_c(z) = z^2 + c.
//
// Angle convention: the external angle is arg(phi_K(z)) / 2pi measured
// counterclockwise, so the ray of angle 1/4 leaves to +i infinity.
// Angle-dependent operations need a real parameter c <= 1/4; there the two
// critical rays 1/4 and 3/4 lie on the imaginary axis and split the plane
// into the halves Side::Left and Side::Right.

#include <complex>
#include <optional>
#include <vector>

#include "greenrect/arcs.hpp"

namespace greenrect {

using Complex = std::complex<double>;

struct QuadraticParams {
  Complex c{0.0, 0.0};
  double escape_radius = 0.0;  // 0 selects 4 + |c|
  int max_iter = 5000;
  double tol = 1e-10;

  /// Fills defaults and checks the invariants; throws InvalidArgument.
  QuadraticParams validated() const;
};

enum class Connectivity { cantor, connected };

struct GreenCoordinate {
  double angle = 0.0;      // [0, 1)
  double potential = 0.0;  // >= 0
};

struct GreenValue {
  double potential = 0.0;
  double err_bound = 0.0;
};

/// A sampled point carrying its Green coordinates.
struct PlanePoint {
  Complex z;
  double potential = 0.0;
  double angle = 0.0;
};
using Polyline = std::vector<PlanePoint>;

struct PrecriticalPoint {
  Complex point;
  double potential = 0.0;
  int level = 0;
  /// Sides of point, f(point), ..., f^{level-1}(point).
  std::vector<Side> itinerary;
};

struct SkeletonArc {
  Complex precritical_point;
  double point_potential = 0.0;
  int level = 0;
  std::array<double, 2> access_angles{};
  /// Sub-critical arc: one branch, the point, then the other branch.
  Polyline polyline;
};

class GreenSystem {
 public:
  explicit GreenSystem(const QuadraticParams& params);

  const QuadraticParams& params() const { return params_; }
  Connectivity connectivity() const { return connectivity_; }
  bool is_cantor() const { return connectivity_ == Connectivity::cantor; }
  /// 1/2 for real c < -2; empty otherwise.
  std::optional<double> critical_value_angle() const { return critical_value_angle_; }
  /// lim G(z) - log|z|, measured numerically at |z| = 1e6.
  double robin_constant() const { return robin_constant_; }
  bool angles_supported() const { return angles_supported_; }

  Complex step(Complex z) const { return z * z + params_.c; }

  GreenValue escape_green(Complex z) const;
  GreenCoordinate log_bottcher(Complex z) const;
  Complex invert_green_coords(const GreenCoordinate& gc) const;
  Polyline trace_ray(double angle, double g_lo, double g_hi, int n_samples) const;
  std::vector<Polyline> trace_equipotential(double g, int n_samples) const;
  double critical_potential() const;
  std::vector<PrecriticalPoint> precritical_points(int depth) const;
  std::vector<SkeletonArc> skeleton(int depth) const;

  /// Flat cylinder distance from (angle, potential) to the skeleton.
  double skeleton_distance(const GreenCoordinate& gc) const;
  /// Potential of the first crash of the ray, or nullopt for a regular ray.
  std::optional<double> crash_potential(double angle) const;
  /// Repelling fixed point beta, the landing point of the 0-ray.
  Complex beta() const;
  /// The 2^depth preimages of beta under f^depth.
  std::vector<Complex> julia_samples(int depth) const;

 private:
  void require_angles() const;
  Complex choose_root(Complex s, double theta) const;

  QuadraticParams params_;
  Connectivity connectivity_ = Connectivity::connected;
  std::optional<double> critical_value_angle_;
  double g0_ = 0.0;
  double robin_constant_ = 0.0;
  bool angles_supported_ = false;
};

GreenSystem make_system(Complex c, double tol = 1e-10);

}  // namespace greenrect
