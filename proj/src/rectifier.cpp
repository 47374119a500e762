#include "greenrect/rectifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "greenrect/error.hpp"
#include "greenrect/tree.hpp"

namespace greenrect {

TransportMap::TransportMap(GreenSystem source, GreenSystem target, VirtualStructure vs)
    : source_(std::move(source)), target_(std::move(target)), vs_(std::move(vs)) {}

Complex TransportMap::from_coordinates(const GreenCoordinate& gc, bool* perturbed) const {
  const GreenCoordinate want{wrap01(vs_.d(gc.angle)), vs_.k(gc.potential)};
  if (perturbed) *perturbed = false;
  try {
    return target_.invert_green_coords(want);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RayCrash) throw;
  }
  for (double nudge : {0x1p-52, -0x1p-52}) {
    try {
      Complex w = target_.invert_green_coords({wrap01(want.angle + nudge), want.potential});
      if (perturbed) *perturbed = true;
      return w;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RayCrash) throw;
    }
  }
  fail(ErrorCode::TargetRayCrash,
       fmt::format("target point (angle {}, potential {}) sits on a crash point", want.angle,
                   want.potential));
}

Complex TransportMap::operator()(Complex z) const {
  return from_coordinates(source_.log_bottcher(z));
}

TransportResult TransportMap::evaluate(Complex z) const {
  TransportResult r;
  r.source = source_.log_bottcher(z);
  r.target = {wrap01(vs_.d(r.source.angle)), vs_.k(r.source.potential)};
  r.w = from_coordinates(r.source, &r.perturbed);
  r.potential_residual = std::abs(target_.escape_green(r.w).potential - r.target.potential);
  try {
    r.angle_residual = circle_distance(target_.log_bottcher(r.w).angle, r.target.angle);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::OnSkeleton) throw;
    r.angle_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

TransportMap build_quadratic_pair(double c, double c_prime, int depth, double tol) {
  if (!(c < -2.0) || !(c_prime < -2.0)) {
    fail(ErrorCode::InvalidArgument, "quadratic pairs need real parameters below -2");
  }
  GreenSystem src = make_system({c, 0.0}, tol);
  GreenSystem dst = make_system({c_prime, 0.0}, tol);
  const AnalyticTree a = build_quadratic_tree(src, depth);
  const AnalyticTree b = build_quadratic_tree(dst, depth);
  for (std::size_t i = 0; i < a.nodes().size(); ++i) {
    const auto& x = a.nodes()[i].angular_invariant;
    const auto& y = b.nodes()[i].angular_invariant;
    if (circle_distance(x[0], y[0]) > tol || circle_distance(x[1], y[1]) > tol) {
      fail(ErrorCode::CombinatoricsMismatch,
           fmt::format("node {}: angular invariants {{{}, {}}} vs {{{}, {}}}", i, x[0], x[1], y[0],
                       y[1]));
    }
  }
  const double g = src.critical_potential();
  const double gp = dst.critical_potential();
  std::vector<PotentialHomeo::Point> pts{{0.0, 0.0}};
  for (int n = depth; n >= 0; --n) pts.push_back({std::ldexp(g, -n), std::ldexp(gp, -n)});
  return TransportMap(std::move(src), std::move(dst),
                      VirtualStructure{CircleCDF::identity(), PotentialHomeo(std::move(pts))});
}

ContinuumMap::ContinuumMap(GreenSystem system, PotentialHomeo k)
    : system_(std::move(system)), k_(std::move(k)) {
  if (system_.is_cantor()) fail(ErrorCode::InvalidArgument, "continuum maps need a connected Julia set");
}

Complex ContinuumMap::operator()(Complex z) const {
  GreenCoordinate gc = system_.log_bottcher(z);
  return system_.invert_green_coords({gc.angle, k_(gc.potential)});
}

JuliaSamples::JuliaSamples(std::vector<Complex> points) : points_(std::move(points)) {
  if (points_.empty()) fail(ErrorCode::InvalidArgument, "no Julia samples");
  double x1 = points_[0].real(), y1 = points_[0].imag();
  x0_ = x1;
  y0_ = y1;
  for (Complex p : points_) {
    x0_ = std::min(x0_, p.real());
    y0_ = std::min(y0_, p.imag());
    x1 = std::max(x1, p.real());
    y1 = std::max(y1, p.imag());
  }
  const double side = std::max({x1 - x0_, y1 - y0_, 1e-12});
  const int per_side = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(points_.size()))));
  cell_ = side / per_side;
  nx_ = static_cast<int>((x1 - x0_) / cell_) + 1;
  ny_ = static_cast<int>((y1 - y0_) / cell_) + 1;
  buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (int i = 0; i < static_cast<int>(points_.size()); ++i) {
    int ix = std::clamp(static_cast<int>((points_[i].real() - x0_) / cell_), 0, nx_ - 1);
    int iy = std::clamp(static_cast<int>((points_[i].imag() - y0_) / cell_), 0, ny_ - 1);
    buckets_[static_cast<std::size_t>(iy) * nx_ + ix].push_back(i);
  }
}

JuliaSamples JuliaSamples::of(const GreenSystem& sys, int depth) {
  return JuliaSamples(sys.julia_samples(depth));
}

double JuliaSamples::distance(Complex z) const {
  const int cx = static_cast<int>(std::floor((z.real() - x0_) / cell_));
  const int cy = static_cast<int>(std::floor((z.imag() - y0_) / cell_));
  // Rings needed before the grid is reached at all.
  const int outside = std::max({0, -cx, cx - (nx_ - 1), -cy, cy - (ny_ - 1)});
  const int max_ring = std::max(nx_, ny_) + outside + 1;
  double best = std::numeric_limits<double>::infinity();
  for (int ring = 0; ring <= max_ring; ++ring) {
    if (best <= (ring - 1) * cell_) break;
    for (int iy = cy - ring; iy <= cy + ring; ++iy) {
      if (iy < 0 || iy >= ny_) continue;
      const bool edge_row = iy == cy - ring || iy == cy + ring;
      for (int ix = cx - ring; ix <= cx + ring; ix += edge_row ? 1 : 2 * std::max(ring, 1)) {
        if (ix >= 0 && ix < nx_) {
          for (int i : buckets_[static_cast<std::size_t>(iy) * nx_ + ix]) {
            best = std::min(best, std::abs(points_[static_cast<std::size_t>(i)] - z));
          }
        }
        if (ring == 0) break;
      }
    }
  }
  return best;
}

DisplacementEstimate quasihyperbolic_displacement(const ContinuumMap& cm, Complex z,
                                                  const JuliaSamples& samples, int steps,
                                                  double slack) {
  if (steps < 1) fail(ErrorCode::InvalidArgument, "steps must be positive");
  const GreenSystem& sys = cm.system();
  DisplacementEstimate out;
  out.log_c = std::log(cm.k().bilipschitz_constant());
  const GreenCoordinate gc = sys.log_bottcher(z);
  const double g0 = gc.potential;
  const double g1 = cm.k()(g0);
  if (g1 != g0) {
    const double ratio = std::log(g1 / g0);
    Complex prev = z;
    for (int i = 1; i <= steps; ++i) {
      const double g_mid = g0 * std::exp(ratio * (i - 0.5) / steps);
      const double g_next = i == steps ? g1 : g0 * std::exp(ratio * i / steps);
      const Complex mid = sys.invert_green_coords({gc.angle, g_mid});
      const Complex next = sys.invert_green_coords({gc.angle, g_next});
      out.qh_length += (std::abs(mid - prev) + std::abs(next - mid)) / samples.distance(mid);
      prev = next;
    }
  }
  out.estimate = 2.0 * out.qh_length;
  out.within_bound = out.qh_length <= out.log_c + slack;
  return out;
}

std::vector<ProbeSample> boundary_derivative_probe(const ContinuumMap& cm, Complex z0,
                                                   const std::vector<double>& radii) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] < radii[i - 1]))) {
      fail(ErrorCode::InvalidArgument, "radii must be positive and decreasing");
    }
  }
  std::vector<ProbeSample> out;
  for (double r : radii) {
    for (int j = 0; j < 8; ++j) {
      const double phi = j * std::numbers::pi / 4.0;
      const Complex h = std::polar(r, phi);
      const Complex z = z0 + h;
      if (cm.system().escape_green(z).potential == 0.0) continue;
      out.push_back({r, phi, (cm(z) - z0) / h});
    }
  }
  return out;
}

double chordal_distance(Complex a, Complex b) {
  return 2.0 * std::abs(a - b) / std::sqrt((1.0 + std::norm(a)) * (1.0 + std::norm(b)));
}

std::vector<ConvergenceRow> convergence_study(const TransportMap& tm, const std::vector<int>& n_list,
                                              const std::vector<Complex>& samples) {
  struct Base {
    GreenCoordinate gc;
    Complex w;
  };
  std::vector<Base> base;
  int dropped_base = 0;
  for (Complex z : samples) {
    try {
      GreenCoordinate gc = tm.source().log_bottcher(z);
      base.push_back({gc, tm.from_coordinates(gc)});
    } catch (const Error&) {
      ++dropped_base;
    }
  }
  std::vector<ConvergenceRow> table;
  for (int n : n_list) {
    const VirtualStructure vs{lipschitz_approx_d(tm.structure().d, n),
                              lipschitz_approx_k(tm.structure().k, n)};
    const TransportMap approx(tm.source(), tm.target(), vs);
    ConvergenceRow row{n, 0.0, dropped_base};
    for (const Base& b : base) {
      try {
        row.sup_distance = std::max(row.sup_distance, chordal_distance(approx.from_coordinates(b.gc), b.w));
      } catch (const Error&) {
        ++row.dropped_samples;
      }
    }
    table.push_back(row);
  }
  return table;
}

bool eventually_decreasing(const std::vector<ConvergenceRow>& table) {
  if (table.empty()) return false;
  auto peak = std::max_element(table.begin(), table.end(), [](const auto& a, const auto& b) {
    return a.sup_distance < b.sup_distance;
  });
  for (auto it = peak; it + 1 != table.end(); ++it) {
    if ((it + 1)->sup_distance > it->sup_distance) return false;
  }
  return true;
}

}  // namespace greenrect
