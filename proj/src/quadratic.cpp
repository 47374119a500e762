#include "greenrect/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "greenrect/error.hpp"

namespace greenrect {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Beyond this modulus phi(z) = z + c/(2z) to double precision.
constexpr double kBottcherRadius = 1e6;
constexpr double kBottcherPotential = 14.0;  // log(1.2e6)
// Relative distance to the imaginary axis treated as "on the divider".
constexpr double kDividerSlack = 1e-9;
constexpr int kMaxDoublings = 1100;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

QuadraticParams QuadraticParams::validated() const {
  QuadraticParams p = *this;
  if (!finite(p.c)) fail(ErrorCode::InvalidArgument, "parameter c is not finite");
  double min_radius = 2.0 + std::abs(p.c);
  if (p.escape_radius == 0.0) p.escape_radius = 4.0 + std::abs(p.c);
  if (!(p.escape_radius >= min_radius) || !std::isfinite(p.escape_radius)) {
    fail(ErrorCode::InvalidArgument,
         fmt::format("escape_radius {} must be >= 2 + |c| = {}", p.escape_radius, min_radius));
  }
  if (p.max_iter < 1) fail(ErrorCode::InvalidArgument, "max_iter must be >= 1");
  if (!(p.tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be positive");
  return p;
}

GreenSystem::GreenSystem(const QuadraticParams& params) : params_(params.validated()) {
  g0_ = escape_green(Complex{0.0, 0.0}).potential;
  connectivity_ = g0_ > 0.0 ? Connectivity::cantor : Connectivity::connected;
  const Complex c = params_.c;
  angles_supported_ = c.imag() == 0.0 && c.real() <= 0.25;
  if (is_cantor() && angles_supported_) critical_value_angle_ = 0.5;
  robin_constant_ = escape_green(Complex{kBottcherRadius, 0.0}).potential -
                    std::log(kBottcherRadius);
}

GreenSystem make_system(Complex c, double tol) {
  QuadraticParams p;
  p.c = c;
  p.tol = tol;
  return GreenSystem(p);
}

GreenValue GreenSystem::escape_green(Complex z) const {
  if (!finite(z)) fail(ErrorCode::NonFinite, "input point is not finite");
  const double r = params_.escape_radius;
  const double abs_c = std::abs(params_.c);
  int n = 0;
  while (std::abs(z) <= r) {
    if (n >= params_.max_iter) return {0.0, params_.tol};
    z = step(z);
    ++n;
    if (!finite(z)) fail(ErrorCode::NonFinite, "orbit overflowed before escaping");
  }
  // Past the escape radius |log|z^2 + c| - 2 log|z|| <= -log(1 - |c|/|z|^2),
  // and the tail sum of these terms is bounded by its first one.
  double scale = std::ldexp(1.0, -n);
  double bound = 0.0;
  for (;;) {
    double a = std::abs(z);
    bound = scale * -std::log1p(-abs_c / (a * a));
    if (bound <= params_.tol * 1e-6 || a > 1e100) break;
    z = step(z);
    scale *= 0.5;
    if (!finite(z)) fail(ErrorCode::NonFinite, "orbit overflowed before certification");
  }
  double g = scale * std::log(std::abs(z));
  double err = bound + 8.0 * std::numeric_limits<double>::epsilon() * g;
  return {g, err};
}

double GreenSystem::critical_potential() const {
  if (!is_cantor()) fail(ErrorCode::Connected, "the critical point does not escape");
  return g0_;
}

void GreenSystem::require_angles() const {
  if (!angles_supported_) {
    fail(ErrorCode::Unsupported,
         fmt::format("external angles need a real parameter c <= 1/4 (c = {}{:+}i)",
                     params_.c.real(), params_.c.imag()));
  }
}

double GreenSystem::skeleton_distance(const GreenCoordinate& gc) const {
  if (!is_cantor()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  double theta = wrap01(gc.angle);
  for (int k = 0; k < kMaxDoublings; ++k) {
    theta = wrap01(2.0 * theta);
    double g = std::ldexp(gc.potential, k + 1);
    double dg = std::max(0.0, g - 2.0 * g0_);
    double d = std::ldexp(std::hypot(kTwoPi * circle_distance(theta, 0.5), dg), -(k + 1));
    best = std::min(best, d);
    if (g > 8.0 * g0_) break;
  }
  return best;
}

std::optional<double> GreenSystem::crash_potential(double angle) const {
  if (!is_cantor() || !critical_value_angle_) return std::nullopt;
  double theta = wrap01(angle);
  for (int m = 0; m < 1080; ++m) {
    theta = wrap01(2.0 * theta);
    if (theta == 0.5) return std::ldexp(g0_, -m);
    if (theta == 0.0) break;
  }
  return std::nullopt;
}

GreenCoordinate GreenSystem::log_bottcher(Complex z) const {
  require_angles();
  GreenValue gv = escape_green(z);
  if (gv.potential <= 0.0) fail(ErrorCode::InsideK, "orbit stays bounded");

  std::vector<Complex> orbit{z};
  while (std::abs(orbit.back()) < kBottcherRadius) {
    if (static_cast<int>(orbit.size()) > params_.max_iter + 64) {
      fail(ErrorCode::InsideK, "orbit too slow to reach the Böttcher region");
    }
    orbit.push_back(step(orbit.back()));
    if (!finite(orbit.back())) fail(ErrorCode::NonFinite, "orbit overflowed");
  }
  const int n = static_cast<int>(orbit.size()) - 1;
  const Complex c = params_.c;
  const Complex zn = orbit.back();
  double theta = wrap01(std::arg(zn + c / (2.0 * zn)) / kTwoPi);

  const double guard = 10.0 * params_.tol;
  for (int k = n - 1; k >= 0; --k) {
    if (is_cantor()) {
      double g_next = std::ldexp(gv.potential, k + 1);
      double dg = std::max(0.0, g_next - 2.0 * g0_);
      double d = std::ldexp(std::hypot(kTwoPi * circle_distance(theta, 0.5), dg), -(k + 1));
      if (d < guard) {
        fail(ErrorCode::OnSkeleton,
             fmt::format("point within {:.3g} of the skeleton (iterate {})", d, k));
      }
    }
    const double a = theta / 2.0;
    const double b = a + 0.5;
    const Complex zk = orbit[static_cast<std::size_t>(k)];
    if (std::abs(zk.real()) <= kDividerSlack * std::abs(zk)) {
      bool a_nearer_quarter = circle_distance(a, 0.25) < circle_distance(b, 0.25);
      theta = (zk.imag() > 0.0) == a_nearer_quarter ? a : b;
    } else {
      bool want_left = zk.real() < 0.0;
      theta = (side_of_angle(a) == Side::Left) == want_left ? a : b;
    }
  }
  return {wrap01(theta), gv.potential};
}

Complex GreenSystem::choose_root(Complex s, double theta) const {
  if (s == Complex{0.0, 0.0}) fail(ErrorCode::RayCrash, "ray passes through a precritical point");
  if (std::abs(s.real()) <= kDividerSlack * std::abs(s)) {
    bool near_quarter = circle_distance(theta, 0.25) < circle_distance(theta, 0.75);
    return (s.imag() > 0.0) == near_quarter ? s : -s;
  }
  bool want_left = side_of_angle(theta) == Side::Left;
  return (s.real() < 0.0) == want_left ? s : -s;
}

Complex GreenSystem::invert_green_coords(const GreenCoordinate& gc) const {
  require_angles();
  const double g = gc.potential;
  if (!(g > 0.0) || !std::isfinite(g)) {
    fail(ErrorCode::InvalidArgument, "inversion needs a positive finite potential");
  }
  const double theta0 = wrap01(gc.angle);
  if (auto crash = crash_potential(theta0); crash && std::abs(g - *crash) < params_.tol) {
    fail(ErrorCode::RayCrash,
         fmt::format("angle {} crashes at potential {}", theta0, *crash));
  }
  int n = 0;
  while (std::ldexp(g, n) < kBottcherPotential) {
    if (++n > kMaxDoublings) fail(ErrorCode::InvalidArgument, "potential too small to invert");
  }
  std::vector<double> thetas(static_cast<std::size_t>(n) + 1);
  thetas[0] = theta0;
  for (int k = 1; k <= n; ++k) thetas[k] = wrap01(2.0 * thetas[k - 1]);

  const Complex c = params_.c;
  const Complex w = std::polar(std::exp(std::ldexp(g, n)), kTwoPi * thetas[n]);
  Complex z = w - c / (2.0 * w);
  for (int k = n - 1; k >= 0; --k) {
    z = choose_root(std::sqrt(z - c), thetas[k]);
  }
  return z;
}

Polyline GreenSystem::trace_ray(double angle, double g_lo, double g_hi, int n_samples) const {
  require_angles();
  if (!(g_lo > 0.0) || !(g_hi > g_lo) || n_samples < 2) {
    fail(ErrorCode::InvalidArgument, "trace_ray needs 0 < g_lo < g_hi and n_samples >= 2");
  }
  const double theta = wrap01(angle);
  if (auto crash = crash_potential(theta); crash && g_lo <= *crash + params_.tol) {
    fail(ErrorCode::RayCrash,
         fmt::format("ray {} crashes at potential {} above g_lo = {}", theta, *crash, g_lo));
  }
  Polyline out;
  out.reserve(static_cast<std::size_t>(n_samples));
  const double ratio = std::log(g_lo / g_hi);
  for (int i = 0; i < n_samples; ++i) {
    double g = i == 0 ? g_hi
             : i == n_samples - 1 ? g_lo
             : g_hi * std::exp(ratio * i / (n_samples - 1));
    out.push_back({invert_green_coords({theta, g}), g, theta});
  }
  return out;
}

namespace {

std::vector<std::vector<Side>> all_itineraries(int length) {
  std::vector<std::vector<Side>> out{{}};
  for (int i = 0; i < length; ++i) {
    std::vector<std::vector<Side>> next;
    next.reserve(out.size() * 2);
    for (const auto& it : out) {
      for (Side s : {Side::Left, Side::Right}) {
        auto ext = it;
        ext.push_back(s);
        next.push_back(std::move(ext));
      }
    }
    out = std::move(next);
  }
  return out;
}

double angle_at_offset(const ArcSet& window, double offset) {
  for (const Arc& a : window) {
    if (offset <= a.length()) return wrap01(a.lo + offset);
    offset -= a.length();
  }
  return wrap01(window.back().hi);
}

}  // namespace

std::vector<Polyline> GreenSystem::trace_equipotential(double g, int n_samples) const {
  require_angles();
  if (!(g > 0.0) || n_samples < 3) {
    fail(ErrorCode::InvalidArgument, "trace_equipotential needs g > 0 and n_samples >= 3");
  }
  int level = 0;
  if (is_cantor()) {
    for (int m = 0; m < kMaxDoublings; ++m) {
      double crit = std::ldexp(g0_, -m);
      if (std::abs(g - crit) < params_.tol) {
        fail(ErrorCode::CriticalLevel, fmt::format("level {} is critical (n = {})", g, m));
      }
      if (crit > g) level = m + 1;
      if (crit < g / 2.0) break;
    }
  }
  if (level > 20) fail(ErrorCode::InvalidArgument, "equipotential has too many components");

  std::vector<ArcSet> windows;
  for (const auto& itin : all_itineraries(level)) windows.push_back(cell_window(itin));
  std::sort(windows.begin(), windows.end(),
            [](const ArcSet& a, const ArcSet& b) { return a.front().lo < b.front().lo; });

  std::vector<Polyline> curves;
  for (const ArcSet& w : windows) {
    const double len = total_length(w);
    Polyline curve;
    curve.reserve(static_cast<std::size_t>(n_samples));
    for (int j = 0; j < n_samples; ++j) {
      double theta = angle_at_offset(w, (j + 0.5) * len / n_samples);
      curve.push_back({invert_green_coords({theta, g}), g, theta});
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<PrecriticalPoint> GreenSystem::precritical_points(int depth) const {
  if (!is_cantor()) fail(ErrorCode::Connected, "no precritical points outside K");
  require_angles();
  if (depth < 0 || depth > 20) fail(ErrorCode::InvalidArgument, "depth must be in [0, 20]");
  std::vector<PrecriticalPoint> out;
  std::vector<PrecriticalPoint> layer{{Complex{0.0, 0.0}, g0_, 0, {}}};
  for (int n = 0;; ++n) {
    std::sort(layer.begin(), layer.end(), [](const auto& a, const auto& b) {
      return cell_window(a.itinerary).front().lo < cell_window(b.itinerary).front().lo;
    });
    out.insert(out.end(), layer.begin(), layer.end());
    if (n == depth) break;
    std::vector<PrecriticalPoint> next;
    for (const auto& p : layer) {
      Complex r = std::sqrt(p.point - params_.c);
      for (Complex root : {r, -r}) {
        PrecriticalPoint q;
        q.point = root;
        q.level = n + 1;
        q.potential = escape_green(root).potential;
        q.itinerary.push_back(root.real() < 0.0 ? Side::Left : Side::Right);
        q.itinerary.insert(q.itinerary.end(), p.itinerary.begin(), p.itinerary.end());
        next.push_back(std::move(q));
      }
    }
    layer = std::move(next);
  }
  return out;
}

std::vector<SkeletonArc> GreenSystem::skeleton(int depth) const {
  if (!is_cantor()) return {};
  constexpr int kBranchSamples = 48;
  std::vector<SkeletonArc> out;
  for (const auto& p : precritical_points(depth)) {
    SkeletonArc arc;
    arc.precritical_point = p.point;
    arc.point_potential = p.potential;
    arc.level = p.level;
    arc.access_angles = access_angles(p.itinerary);
    const double crit = std::ldexp(g0_, -p.level);
    const double g_hi = crit - std::max(100.0 * params_.tol, 1e-6 * crit);
    const double g_lo = crit * 1e-4;
    // Access rays continue below the crash on their one-sided limit, so
    // trace_ray's crash check does not apply here.
    auto branch = [&](double angle) {
      Polyline line;
      for (int i = 0; i < kBranchSamples; ++i) {
        double g = g_hi * std::pow(g_lo / g_hi, static_cast<double>(i) / (kBranchSamples - 1));
        line.push_back({invert_green_coords({angle, g}), g, angle});
      }
      return line;
    };
    Polyline first = branch(arc.access_angles[0]);
    Polyline second = branch(arc.access_angles[1]);
    arc.polyline.assign(first.rbegin(), first.rend());
    arc.polyline.push_back({p.point, p.potential, arc.access_angles[0]});
    arc.polyline.insert(arc.polyline.end(), second.begin(), second.end());
    out.push_back(std::move(arc));
  }
  return out;
}

Complex GreenSystem::beta() const {
  return (1.0 + std::sqrt(1.0 - 4.0 * params_.c)) / 2.0;
}

std::vector<Complex> GreenSystem::julia_samples(int depth) const {
  if (depth < 0 || depth > 22) fail(ErrorCode::InvalidArgument, "depth must be in [0, 22]");
  std::vector<Complex> pts{beta()};
  for (int i = 0; i < depth; ++i) {
    std::vector<Complex> next;
    next.reserve(pts.size() * 2);
    for (Complex w : pts) {
      Complex r = std::sqrt(w - params_.c);
      next.push_back(r);
      next.push_back(-r);
    }
    pts = std::move(next);
  }
  return pts;
}

}  // namespace greenrect
