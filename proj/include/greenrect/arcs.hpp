#pragma once

// Angles on the circle R/Z, finite unions of arcs, and the binary
// combinatorics of angle doubling for real quadratic parameters.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace greenrect {

double wrap01(double x);
double circle_distance(double a, double b);

/// A closed arc [lo, hi] of R/Z with lo in [0,1) and lo < hi <= lo + 1.
/// hi may exceed 1 for an arc that wraps through angle 0.
struct Arc {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Disjoint arcs sorted by lo. Touching arcs are merged, including across 0.
using ArcSet = std::vector<Arc>;

ArcSet canonical(ArcSet arcs);
ArcSet full_circle();
double total_length(const ArcSet& arcs);
ArcSet intersect(const ArcSet& a, const ArcSet& b);
bool arcs_overlap(const ArcSet& a, const ArcSet& b);
ArcSet doubling_preimage(const ArcSet& arcs);

/// Measure of the lifted interval [a, b], a <= b.
using IntervalMeasure = std::function<double(double, double)>;
double lebesgue(double a, double b);

/// Measure of W intersected with the counterclockwise arc from `from` to `to`.
double ccw_measure(const ArcSet& w, double from, double to,
                   const IntervalMeasure& measure = lebesgue);

/// Which half of the circle an angle lies in, relative to the critical
/// rays 1/4 and 3/4. Left is [1/4, 3/4), the side of Re z < 0.
enum class Side : std::uint8_t { Left, Right };

Side side_of_angle(double theta);
ArcSet half_circle(Side side);

/// The preimage of theta_next under doubling that lies on `side`.
double pull_back_angle(double theta_next, Side side);

/// Angles whose doubling orbit visits the given sides, in order.
ArcSet cell_window(std::span<const Side> itinerary);

/// External angles landing at the precritical point with this itinerary,
/// sorted ascending. The empty itinerary gives the accesses {1/4, 3/4} of 0.
std::array<double, 2> access_angles(std::span<const Side> itinerary);

/// Exact num/den form of a binary64 value when den <= 2^62.
struct DyadicFraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
};
std::optional<DyadicFraction> as_dyadic(double x);

}  // namespace greenrect
