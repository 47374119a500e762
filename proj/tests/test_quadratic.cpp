#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "greenrect/error.hpp"
#include "greenrect/quadratic.hpp"

using namespace greenrect;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InternalInvariant;
}

// Real-axis inversion by bisection on G, independent of the Böttcher chart.
double real_point_with_potential(const GreenSystem& sys, double g, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (sys.escape_green({mid, 0.0}).potential < g ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("escape_green on the unit disk case") {
  auto sys = make_system({0.0, 0.0});
  CHECK(sys.escape_green({2.0, 0.0}).potential == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(sys.escape_green({0.5, 0.0}).potential == 0.0);
  CHECK(sys.escape_green({0.0, 0.0}).potential == 0.0);
  CHECK(code_of([&] { sys.escape_green({NAN, 0.0}); }) == ErrorCode::NonFinite);
}

TEST_CASE("Cantor classification and critical potential") {
  auto sys = make_system({-3.0, 0.0});
  CHECK(sys.is_cantor());
  CHECK(sys.critical_value_angle() == 0.5);
  const double g0 = sys.critical_potential();
  // G(0) = G(c) / 2 = G(-3) / 2.
  CHECK(g0 == doctest::Approx(sys.escape_green({-3.0, 0.0}).potential / 2).epsilon(1e-13));
  CHECK(code_of([] { make_system({-1.0, 0.0}).critical_potential(); }) == ErrorCode::Connected);
}

TEST_CASE("log_bottcher examples") {
  auto s0 = make_system({0.0, 0.0});
  auto gc = s0.log_bottcher({0.0, 2.0});
  CHECK(gc.angle == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(gc.potential == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(code_of([&] { s0.log_bottcher({0.5, 0.0}); }) == ErrorCode::InsideK);
  auto s3 = make_system({-3.0, 0.0});
  CHECK(code_of([&] { s3.log_bottcher({0.0, 0.0}); }) == ErrorCode::OnSkeleton);
  CHECK(code_of([] { make_system({0.3, 0.1}).log_bottcher({3.0, 0.0}); }) == ErrorCode::Unsupported);
}

TEST_CASE("invert matches the exact disk chart") {
  auto s0 = make_system({0.0, 0.0});
  for (double theta : {0.0, 0.125, 0.4, 0.9}) {
    for (double g : {0.01, 0.5, 3.0}) {
      Complex z = s0.invert_green_coords({theta, g});
      Complex exact = std::polar(std::exp(g), 2 * kPi * theta);
      CHECK(std::abs(z - exact) <= 1e-12 * std::abs(exact));
    }
  }
}

TEST_CASE("invert agrees with real-axis bisection for c = -3") {
  auto sys = make_system({-3.0, 0.0});
  // Ray 0 lands at beta and covers the real axis beyond it.
  const double beta = sys.beta().real();
  for (double g : {0.05, 0.3, 1.2}) {
    double x = real_point_with_potential(sys, g, beta, 50.0);
    Complex z = sys.invert_green_coords({0.0, g});
    CHECK(std::abs(z - Complex{x, 0.0}) < 1e-9);
  }
}

TEST_CASE("log_bottcher and invert are mutually inverse off the skeleton") {
  auto sys = make_system({-3.0, 0.0});
  std::mt19937_64 rng(11);
  auto u = [&] { return static_cast<double>(rng() >> 11) * 0x1p-53; };
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    GreenCoordinate gc{u(), std::exp(std::log(1e-3) + u() * std::log(2e3))};
    Complex z = sys.invert_green_coords(gc);
    if (sys.skeleton_distance(gc) < 1e-6) continue;
    GreenCoordinate back = sys.log_bottcher(z);
    CHECK(circle_distance(back.angle, gc.angle) < 1e-9);
    CHECK(std::abs(back.potential - gc.potential) < 1e-9);
    CHECK(std::abs(sys.escape_green(z).potential - gc.potential) < 1e-10);
    ++checked;
  }
  CHECK(checked > 250);
}

TEST_CASE("rays: crash detection and potentials") {
  auto s0 = make_system({0.0, 0.0});
  auto ray = s0.trace_ray(0.0, 0.1, 1.0, 5);
  REQUIRE(ray.size() == 5);
  CHECK(ray.front().z.real() == doctest::Approx(std::exp(1.0)));
  CHECK(ray.back().z.real() == doctest::Approx(std::exp(0.1)));
  auto s3 = make_system({-3.0, 0.0});
  const double g0 = s3.critical_potential();
  CHECK(code_of([&] { s3.trace_ray(0.25, 0.1 * g0, 2 * g0, 8); }) == ErrorCode::RayCrash);
  CHECK(code_of([&] { s3.invert_green_coords({0.25, g0}); }) == ErrorCode::RayCrash);
  CHECK(s3.crash_potential(0.375) == doctest::Approx(g0 / 2));
  // Every binary64 angle is dyadic; 0.1 only crashes at a negligible potential.
  CHECK(*s3.crash_potential(0.1) < 1e-15);
  CHECK_FALSE(make_system({-1.0, 0.0}).crash_potential(0.25));
  auto ok = s3.trace_ray(0.1, 1e-3, 1.0, 20);
  for (const auto& p : ok) {
    CHECK(std::abs(s3.escape_green(p.z).potential - p.potential) < 1e-10);
  }
}

TEST_CASE("equipotentials") {
  auto s0 = make_system({0.0, 0.0});
  auto curves = s0.trace_equipotential(std::log(2.0), 64);
  REQUIRE(curves.size() == 1);
  for (const auto& p : curves[0]) CHECK(std::abs(p.z) == doctest::Approx(2.0).epsilon(1e-13));

  auto s3 = make_system({-3.0, 0.0});
  const double g0 = s3.critical_potential();
  CHECK(s3.trace_equipotential(1.5 * g0, 16).size() == 1);
  CHECK(s3.trace_equipotential(0.75 * g0, 16).size() == 2);
  CHECK(s3.trace_equipotential(0.3 * g0, 16).size() == 4);
  CHECK(code_of([&] { s3.trace_equipotential(g0 / 2, 16); }) == ErrorCode::CriticalLevel);
  for (const auto& curve : s3.trace_equipotential(0.3 * g0, 32)) {
    for (const auto& p : curve) CHECK(std::abs(s3.escape_green(p.z).potential - 0.3 * g0) < 1e-10);
  }
}

TEST_CASE("precritical points and skeleton") {
  auto s3 = make_system({-3.0, 0.0});
  auto pts = s3.precritical_points(3);
  CHECK(pts.size() == 1 + 2 + 4 + 8);
  const double g0 = s3.critical_potential();
  for (const auto& p : pts) {
    Complex z = p.point;
    for (int i = 0; i < p.level; ++i) z = s3.step(z);
    CHECK(std::abs(z) < 1e-9);
    CHECK(p.potential == doctest::Approx(std::ldexp(g0, -p.level)).epsilon(1e-10));
  }
  auto sk = s3.skeleton(2);
  CHECK(sk.size() == 7);
  for (const auto& arc : sk) {
    for (const auto& q : arc.polyline) {
      CHECK(std::abs(s3.escape_green(q.z).potential - q.potential) < 1e-10);
    }
  }
  CHECK(make_system({-1.0, 0.0}).skeleton(3).empty());
}

TEST_CASE("Julia samples are backward invariant") {
  auto s = make_system({-1.0, 0.0});
  auto pts = s.julia_samples(10);
  CHECK(pts.size() == 1024);
  for (int i = 0; i < 1024; i += 97) {
    Complex z = pts[static_cast<std::size_t>(i)];
    for (int k = 0; k < 10; ++k) z = s.step(z);
    CHECK(std::abs(z - s.beta()) < 1e-6);
  }
}

TEST_CASE("parameter validation") {
  QuadraticParams p;
  p.escape_radius = 1.0;
  CHECK(code_of([&] { GreenSystem s(p); }) == ErrorCode::InvalidArgument);
  p.escape_radius = 0.0;
  p.tol = 0.0;
  CHECK(code_of([&] { GreenSystem s(p); }) == ErrorCode::InvalidArgument);
}
