#include "greenrect/arcs.hpp"

#include <algorithm>
#include <cmath>

namespace greenrect {

double wrap01(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

double circle_distance(double a, double b) {
  double d = wrap01(a - b);
  return std::min(d, 1.0 - d);
}

namespace {

// Split arcs into non-wrapping pieces inside [0, 1].
std::vector<Arc> unwrap(const ArcSet& arcs) {
  std::vector<Arc> out;
  for (const Arc& a : arcs) {
    if (a.hi - a.lo >= 1.0) {
      out.push_back({0.0, 1.0});
      continue;
    }
    double lo = wrap01(a.lo);
    double hi = lo + (a.hi - a.lo);
    if (hi <= 1.0) {
      out.push_back({lo, hi});
    } else {
      out.push_back({lo, 1.0});
      out.push_back({0.0, hi - 1.0});
    }
  }
  return out;
}

}  // namespace

ArcSet canonical(ArcSet arcs) {
  std::vector<Arc> pieces = unwrap(arcs);
  std::erase_if(pieces, [](const Arc& a) { return !(a.hi > a.lo); });
  std::sort(pieces.begin(), pieces.end(),
            [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
  ArcSet merged;
  for (const Arc& p : pieces) {
    if (!merged.empty() && p.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, p.hi);
    } else {
      merged.push_back(p);
    }
  }
  if (merged.size() == 1 && merged[0].lo == 0.0 && merged[0].hi == 1.0) {
    return merged;
  }
  if (merged.size() > 1 && merged.front().lo == 0.0 && merged.back().hi == 1.0) {
    Arc wrapped{merged.back().lo, 1.0 + merged.front().hi};
    merged.pop_back();
    merged.erase(merged.begin());
    merged.push_back(wrapped);
    std::sort(merged.begin(), merged.end(),
              [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
  }
  return merged;
}

ArcSet full_circle() { return {Arc{0.0, 1.0}}; }

double total_length(const ArcSet& arcs) {
  double s = 0.0;
  for (const Arc& a : arcs) s += a.length();
  return s;
}

ArcSet intersect(const ArcSet& a, const ArcSet& b) {
  std::vector<Arc> pa = unwrap(a);
  std::vector<Arc> pb = unwrap(b);
  ArcSet out;
  for (const Arc& x : pa) {
    for (const Arc& y : pb) {
      double lo = std::max(x.lo, y.lo);
      double hi = std::min(x.hi, y.hi);
      if (hi > lo) out.push_back({lo, hi});
    }
  }
  return canonical(std::move(out));
}

bool arcs_overlap(const ArcSet& a, const ArcSet& b) {
  return total_length(intersect(a, b)) > 0.0;
}

ArcSet doubling_preimage(const ArcSet& arcs) {
  ArcSet out;
  for (const Arc& p : unwrap(arcs)) {
    out.push_back({p.lo / 2.0, p.hi / 2.0});
    out.push_back({p.lo / 2.0 + 0.5, p.hi / 2.0 + 0.5});
  }
  return canonical(std::move(out));
}

double lebesgue(double a, double b) { return b - a; }

double ccw_measure(const ArcSet& w, double from, double to,
                   const IntervalMeasure& measure) {
  double start = wrap01(from);
  double stop = start + wrap01(to - from);
  double sum = 0.0;
  for (const Arc& p : unwrap(w)) {
    for (double shift : {0.0, 1.0}) {
      double lo = std::max(start, p.lo + shift);
      double hi = std::min(stop, p.hi + shift);
      if (hi > lo) sum += measure(lo, hi);
    }
  }
  return sum;
}

Side side_of_angle(double theta) {
  double t = wrap01(theta);
  return (t >= 0.25 && t < 0.75) ? Side::Left : Side::Right;
}

ArcSet half_circle(Side side) {
  return side == Side::Left ? ArcSet{{0.25, 0.75}} : ArcSet{{0.75, 1.25}};
}

double pull_back_angle(double theta_next, Side side) {
  double a = wrap01(theta_next) / 2.0;
  return side_of_angle(a) == side ? a : a + 0.5;
}

ArcSet cell_window(std::span<const Side> itinerary) {
  ArcSet w = full_circle();
  for (auto it = itinerary.rbegin(); it != itinerary.rend(); ++it) {
    w = intersect(doubling_preimage(w), half_circle(*it));
  }
  return w;
}

std::array<double, 2> access_angles(std::span<const Side> itinerary) {
  std::array<double, 2> acc{0.25, 0.75};
  for (double& a : acc) {
    for (auto it = itinerary.rbegin(); it != itinerary.rend(); ++it) {
      a = pull_back_angle(a, *it);
    }
  }
  std::sort(acc.begin(), acc.end());
  return acc;
}

std::optional<DyadicFraction> as_dyadic(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) return std::nullopt;
  for (int e = 0; e <= 62; ++e) {
    double scaled = std::ldexp(x, e);
    if (scaled >= 9.2e18) return std::nullopt;
    if (scaled == std::floor(scaled)) {
      return DyadicFraction{static_cast<std::uint64_t>(scaled),
                            std::uint64_t{1} << e};
    }
  }
  return std::nullopt;
}

}  // namespace greenrect
