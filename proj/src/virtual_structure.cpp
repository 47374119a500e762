#include "greenrect/virtual_structure.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <fmt/format.h>

#include "greenrect/error.hpp"
#include "greenrect/json_util.hpp"

namespace greenrect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

CircleCDF::CircleCDF(std::vector<Point> breakpoints) : points_(std::move(breakpoints)) {
  if (points_.size() < 2) fail(ErrorCode::InvalidArgument, "a circle CDF needs >= 2 breakpoints");
  for (const Point& p : points_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      fail(ErrorCode::InvalidArgument, "breakpoints must be finite");
    }
  }
  if (points_.front().x != 0.0 || points_.front().y != 0.0) {
    fail(ErrorCode::InvalidArgument, "circle CDF must start at (0, 0)");
  }
  if (points_.back().x != 1.0) fail(ErrorCode::InvalidArgument, "last breakpoint must have x = 1");
  if (points_.back().y != 1.0) {
    fail(ErrorCode::InvalidArgument,
         fmt::format("total increase is {}, not 1", points_.back().y - points_.front().y));
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i].x > points_[i - 1].x)) {
      fail(ErrorCode::InvalidArgument, "breakpoint x must strictly increase");
    }
    if (!(points_[i].y >= points_[i - 1].y)) {
      fail(ErrorCode::InvalidArgument, "circle CDF must be non-decreasing");
    }
  }
}

CircleCDF CircleCDF::identity() { return CircleCDF({{0.0, 0.0}, {1.0, 1.0}}); }

double CircleCDF::operator()(double x) const {
  const double n = std::floor(x);
  const double f = x - n;
  auto it = std::upper_bound(points_.begin(), points_.end(), f,
                             [](double v, const Point& p) { return v < p.x; });
  if (it == points_.end()) return n + 1.0;
  const Point& b = *it;
  const Point& a = *(it - 1);
  if (f == a.x) return n + a.y;
  return n + a.y + (b.y - a.y) * ((f - a.x) / (b.x - a.x));
}

IntervalMeasure CircleCDF::as_measure() const {
  return [self = *this](double a, double b) { return self.measure(a, b); };
}

bool CircleCDF::is_identity() const {
  return std::all_of(points_.begin(), points_.end(), [](const Point& p) { return p.x == p.y; });
}

double CircleCDF::max_slope() const {
  double s = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    s = std::max(s, (points_[i].y - points_[i - 1].y) / (points_[i].x - points_[i - 1].x));
  }
  return s;
}

double CircleCDF::min_slope() const {
  double s = kInf;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    s = std::min(s, (points_[i].y - points_[i - 1].y) / (points_[i].x - points_[i - 1].x));
  }
  return s;
}

ArcSet CircleCDF::image(const ArcSet& arcs) const {
  ArcSet out;
  for (const Arc& a : arcs) {
    double lo = (*this)(a.lo);
    double hi = (*this)(a.hi);
    if (hi > lo) {
      double start = wrap01(lo);
      out.push_back({start, start + (hi - lo)});
    }
  }
  return canonical(std::move(out));
}

PotentialHomeo::PotentialHomeo(std::vector<Point> breakpoints) : points_(std::move(breakpoints)) {
  if (points_.size() < 2) fail(ErrorCode::InvalidArgument, "k needs >= 2 breakpoints");
  if (points_.front().y != 0.0 || points_.front().k != 0.0) {
    fail(ErrorCode::InvalidArgument, "k must satisfy k(0) = 0");
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].y) || !std::isfinite(points_[i].k)) {
      fail(ErrorCode::InvalidArgument, "breakpoints must be finite");
    }
    if (!(points_[i].y > points_[i - 1].y) || !(points_[i].k > points_[i - 1].k)) {
      fail(ErrorCode::InvalidArgument, "k must be strictly increasing");
    }
  }
}

PotentialHomeo PotentialHomeo::identity() { return PotentialHomeo({{0.0, 0.0}, {1.0, 1.0}}); }

PotentialHomeo PotentialHomeo::linear(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    fail(ErrorCode::InvalidArgument, "linear k needs a positive finite slope");
  }
  return PotentialHomeo({{0.0, 0.0}, {1.0, lambda}});
}

double PotentialHomeo::operator()(double y) const {
  if (!(y >= 0.0)) fail(ErrorCode::InvalidArgument, "k is defined on potentials >= 0");
  if (std::isinf(y)) return kInf;
  auto it = std::upper_bound(points_.begin(), points_.end(), y,
                             [](double v, const Point& p) { return v < p.y; });
  if (it == points_.end()) it = points_.end() - 1;
  const Point& b = *it;
  const Point& a = *(it - 1);
  if (y == a.y) return a.k;
  if (y == b.y) return b.k;
  return a.k + (b.k - a.k) * ((y - a.y) / (b.y - a.y));
}

std::vector<double> PotentialHomeo::slopes() const {
  std::vector<double> s;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    s.push_back((points_[i].k - points_[i - 1].k) / (points_[i].y - points_[i - 1].y));
  }
  return s;
}

double PotentialHomeo::bilipschitz_constant() const {
  auto s = slopes();
  auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  return std::max(*hi, 1.0 / *lo);
}

bool PotentialHomeo::is_identity() const {
  return std::all_of(points_.begin(), points_.end(), [](const Point& p) { return p.y == p.k; });
}

double measure_of(const CircleCDF& d, const ArcSet& windows) {
  double sum = 0.0;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const Arc& a = windows[i];
    if (!(a.hi >= a.lo) || a.hi - a.lo > 1.0) {
      fail(ErrorCode::OverlappingWindows, fmt::format("arc [{}, {}] wraps onto itself", a.lo, a.hi));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (arcs_overlap({a}, {windows[j]})) {
        fail(ErrorCode::OverlappingWindows,
             fmt::format("arcs [{}, {}] and [{}, {}] overlap", a.lo, a.hi, windows[j].lo,
                         windows[j].hi));
      }
    }
    sum += d.measure(a.lo, a.hi);
  }
  return sum;
}

double mod_xi(const TreeNode& node, const VirtualStructure& vs) {
  if (node.is_root()) fail(ErrorCode::RootNode, "mod_xi is undefined for the root");
  const double mu_d = measure_of(vs.d, node.windows);
  if (mu_d == 0.0) return kInf;
  if (node.g_plus == node.g_minus) return 0.0;
  const double stretch = (vs.k(node.g_plus) - vs.k(node.g_minus)) / (node.g_plus - node.g_minus);
  return (node.harmonic_measure / mu_d) * stretch * node.modulus;
}

namespace {

std::vector<double> all_mod_xi(const AnalyticTree& tree, const VirtualStructure& vs) {
  std::vector<double> m;
  for (const auto& n : tree.nodes()) m.push_back(n.is_root() ? kInf : mod_xi(n, vs));
  return m;
}

// A node survives when neither it nor an ancestor has infinite mod_xi.
std::vector<bool> survivors(const AnalyticTree& tree, const std::vector<double>& m) {
  std::vector<bool> alive(tree.nodes().size(), false);
  std::deque<int> queue{tree.root_id()};
  alive[static_cast<std::size_t>(tree.root_id())] = true;
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    for (int c : tree.node(id).children) {
      if (!std::isinf(m[static_cast<std::size_t>(c)])) {
        alive[static_cast<std::size_t>(c)] = true;
        queue.push_back(c);
      }
    }
  }
  return alive;
}

std::vector<int> infinite_depths(const AnalyticTree& tree, const std::vector<double>& m) {
  std::vector<int> out;
  for (int d = 1; d <= tree.max_depth(); ++d) {
    auto ids = tree.layer(d);
    if (std::all_of(ids.begin(), ids.end(),
                    [&](int id) { return std::isinf(m[static_cast<std::size_t>(id)]); })) {
      out.push_back(d);
    }
  }
  return out;
}

}  // namespace

AdmissibilityReport admissible(const AnalyticTree& tree, const VirtualStructure& vs, double m0) {
  AdmissibilityReport r;
  r.threshold = m0;
  r.mod_xi = all_mod_xi(tree, vs);
  const auto alive = survivors(tree, r.mod_xi);
  r.all_infinite_depths = infinite_depths(tree, r.mod_xi);
  for (const auto& n : tree.nodes()) {
    const auto i = static_cast<std::size_t>(n.id);
    if (n.is_root()) continue;
    const bool parent_alive = alive[static_cast<std::size_t>(tree.parent_of(n.id))];
    if (!alive[i]) {
      if (parent_alive) r.deleted_roots.push_back(n.id);
      continue;
    }
    // Relative slack absorbs rounding when mod_xi sits exactly at m0.
    if (!(r.mod_xi[i] >= m0 * (1.0 - 1e-12))) r.offending_nodes.push_back(n.id);
  }
  if (!r.all_infinite_depths.empty()) {
    r.reasons.push_back(fmt::format("every node at depth {} has infinite mod_xi",
                                    r.all_infinite_depths.front()));
  }
  if (!r.offending_nodes.empty()) {
    r.reasons.push_back(fmt::format("{} surviving nodes have mod_xi below m0 = {}",
                                    r.offending_nodes.size(), m0));
  }
  ThinnessReport thin = thinness_report(tree, 0.0);
  if (!thin.binary || tree.max_depth() < 2) {
    r.reasons.push_back("tree is not binary-complete at its truncation depth");
  }
  r.verdict = r.reasons.empty() ? Verdict::certified : Verdict::inconclusive;
  return r;
}

namespace {

std::vector<double> image_angles(const CircleCDF& d, const std::vector<double>& angles) {
  std::vector<double> out;
  for (double a : angles) out.push_back(wrap01(d(a)));
  return out;
}

bool same_pair_mod1(std::array<double, 2> a, std::array<double, 2> b, double tol) {
  auto d = [](double x, double y) { return circle_distance(x, y); };
  return (d(a[0], b[0]) <= tol && d(a[1], b[1]) <= tol) ||
         (d(a[0], b[1]) <= tol && d(a[1], b[0]) <= tol);
}

std::array<double, 2> inner_pair(const TreeNode& n) {
  if (n.inner_accesses.size() != 2) {
    fail(ErrorCode::InternalInvariant, fmt::format("node {} lacks two inner accesses", n.id));
  }
  return {n.inner_accesses[0], n.inner_accesses[1]};
}

// Offsets summed link by link along the chain, normalized by mu_d(W(A_1)).
std::array<double, 2> chain_sum_invariant(const AnalyticTree& tree, const std::vector<int>& chain,
                                          const CircleCDF& d) {
  const IntervalMeasure mu = d.as_measure();
  const TreeNode& head = tree.node(chain.front());
  const double total = measure_of(d, head.windows);
  double prefix = 0.0;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    const TreeNode& a = tree.node(chain[i]);
    const TreeNode& b = tree.node(chain[i + 1]);
    prefix += ccw_measure(a.windows, opening_access(a.windows, a.outer_accesses),
                          opening_access(b.windows, b.outer_accesses), mu);
  }
  const TreeNode& last = tree.node(chain.back());
  const double start = opening_access(last.windows, last.outer_accesses);
  const auto inner = inner_pair(last);
  std::array<double, 2> offset{};
  for (int j = 0; j < 2; ++j) {
    offset[j] = (prefix + ccw_measure(last.windows, start, inner[j], mu)) / total;
  }
  std::sort(offset.begin(), offset.end());
  return {wrap01(-offset[0]), wrap01(-offset[1])};
}

}  // namespace

AnalyticTree collapse(const AnalyticTree& tree, const VirtualStructure& vs) {
  const auto m = all_mod_xi(tree, vs);
  if (auto bad = infinite_depths(tree, m); !bad.empty()) {
    fail(ErrorCode::NotAdmissible,
         fmt::format("every node at depth {} has infinite mod_xi", bad.front()));
  }
  const auto alive = survivors(tree, m);
  auto surviving_children = [&](int id) {
    std::vector<int> out;
    for (int c : tree.node(id).children) {
      if (alive[static_cast<std::size_t>(c)]) out.push_back(c);
    }
    return out;
  };

  struct Pending {
    int head;
    int new_parent;
  };
  std::vector<TreeNode> out;
  std::deque<Pending> queue{{tree.root_id(), -1}};
  while (!queue.empty()) {
    const Pending p = queue.front();
    queue.pop_front();
    std::vector<int> chain{p.head};
    for (auto kids = surviving_children(p.head); kids.size() == 1;
         kids = surviving_children(chain.back())) {
      chain.push_back(kids.front());
    }
    const TreeNode& first = tree.node(chain.front());
    const TreeNode& last = tree.node(chain.back());

    TreeNode node;
    node.id = static_cast<int>(out.size());
    node.depth = p.new_parent < 0 ? 0 : out[static_cast<std::size_t>(p.new_parent)].depth + 1;
    node.g_plus = first.is_root() ? kInf : vs.k(first.g_plus);
    node.g_minus = vs.k(last.g_minus);
    node.windows = first.is_root() ? full_circle() : vs.d.image(first.windows);
    node.harmonic_measure = total_length(node.windows);
    node.outer_accesses = image_angles(vs.d, first.outer_accesses);
    node.inner_accesses = image_angles(vs.d, last.inner_accesses);
    node.end = last.end;
    if (first.is_root()) {
      node.modulus = kInf;
    } else {
      node.modulus = 0.0;
      for (int id : chain) node.modulus += m[static_cast<std::size_t>(id)];
    }

    if (last.end) {
      node.angular_invariant = {0.0, 0.0};
    } else if (first.is_root()) {
      const auto inner = image_angles(vs.d, last.inner_accesses);
      const double t1 = wrap01(inner[0] - inner[1]);
      node.angular_invariant = {t1, wrap01(1.0 - t1)};
    } else {
      const auto telescoped =
          angular_invariant(first.windows, opening_access(first.windows, first.outer_accesses),
                            inner_pair(last), vs.d.as_measure());
      const auto summed = chain_sum_invariant(tree, chain, vs.d);
      if (!same_pair_mod1(telescoped, summed, 1e-12)) {
        fail(ErrorCode::InternalInvariant,
             fmt::format("chain at node {}: telescoped invariant {{{}, {}}} differs from the "
                         "summed form {{{}, {}}}",
                         first.id, telescoped[0], telescoped[1], summed[0], summed[1]));
      }
      node.angular_invariant = telescoped;
    }

    if (p.new_parent >= 0) out[static_cast<std::size_t>(p.new_parent)].children.push_back(node.id);
    for (int c : surviving_children(chain.back())) queue.push_back({c, node.id});
    out.push_back(std::move(node));
  }

  std::optional<double> g0;
  if (tree.critical_potential()) g0 = vs.k(*tree.critical_potential());
  return AnalyticTree::from_nodes(std::move(out), 0, TreeSource::abstract, std::nullopt, g0);
}

CircleCDF lipschitz_approx_d(const CircleCDF& d, int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "approximation index must be >= 1");
  if (d.is_identity()) return d;
  const double eps = 1.0 / (static_cast<double>(n) * n);
  std::vector<CircleCDF::Point> pts;
  for (const auto& p : d.breakpoints()) pts.push_back({p.x, (1.0 - eps) * p.y + eps * p.x});
  pts.front() = {0.0, 0.0};
  pts.back() = {1.0, 1.0};
  return CircleCDF(std::move(pts));
}

PotentialHomeo lipschitz_approx_k(const PotentialHomeo& k, int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "approximation index must be >= 1");
  const auto& src = k.breakpoints();
  const auto slopes = k.slopes();
  if (std::all_of(slopes.begin(), slopes.end(), [n](double s) { return s <= n; })) return k;
  std::vector<PotentialHomeo::Point> pts{{0.0, 0.0}};
  for (std::size_t i = 1; i < src.size(); ++i) {
    double s = std::min(static_cast<double>(n), slopes[i - 1]);
    pts.push_back({src[i].y, pts.back().k + s * (src[i].y - src[i - 1].y)});
  }
  return PotentialHomeo(std::move(pts));
}

namespace {

json parse_or_schema(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaError, fmt::format("{} JSON does not parse: {}", what, e.what()));
  }
}

void check_format(const json& j, const char* expected, const char* what) {
  const json& f = require_field(j, "format", what);
  if (!f.is_string() || f.get<std::string>() != expected) {
    fail(ErrorCode::SchemaError, fmt::format("{}: format must be '{}'", what, expected));
  }
}

const json& pair_list(const json& j, const char* what) {
  const json& b = require_field(j, "breakpoints", what);
  if (!b.is_array()) fail(ErrorCode::SchemaError, fmt::format("{}: breakpoints must be a list", what));
  for (const json& p : b) {
    if (!p.is_array() || p.size() != 2) {
      fail(ErrorCode::SchemaError, fmt::format("{}: each breakpoint is a pair", what));
    }
  }
  return b;
}

template <typename Build>
auto rethrow_as_schema(const char* what, Build build) {
  try {
    return build();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaError) throw;
    fail(ErrorCode::SchemaError, fmt::format("{}: {}", what, e.what()));
  }
}

json cdf_json(const CircleCDF& d) {
  json pts = json::array();
  for (const auto& p : d.breakpoints()) pts.push_back({number_to_json(p.x), number_to_json(p.y)});
  return {{"format", "circle-cdf/1"}, {"breakpoints", pts}};
}

CircleCDF cdf_from(const json& j) {
  check_format(j, "circle-cdf/1", "circle-cdf");
  std::vector<CircleCDF::Point> pts;
  for (const json& p : pair_list(j, "circle-cdf")) {
    pts.push_back({number_from_json(p[0], "circle-cdf"), number_from_json(p[1], "circle-cdf")});
  }
  return rethrow_as_schema("circle-cdf", [&] { return CircleCDF(std::move(pts)); });
}

json homeo_json(const PotentialHomeo& k) {
  json pts = json::array();
  for (const auto& p : k.breakpoints()) pts.push_back({p.y, p.k});
  return {{"format", "potential-homeo/1"}, {"breakpoints", pts}};
}

PotentialHomeo homeo_from(const json& j) {
  check_format(j, "potential-homeo/1", "potential-homeo");
  std::vector<PotentialHomeo::Point> pts;
  for (const json& p : pair_list(j, "potential-homeo")) {
    if (!p[0].is_number() || !p[1].is_number()) {
      fail(ErrorCode::SchemaError, "potential-homeo: breakpoints are numbers");
    }
    pts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return rethrow_as_schema("potential-homeo", [&] { return PotentialHomeo(std::move(pts)); });
}

}  // namespace

std::string serialize_cdf(const CircleCDF& d) { return dump_canonical(cdf_json(d)); }

CircleCDF deserialize_cdf(const std::string& text) {
  return cdf_from(parse_or_schema(text, "circle-cdf"));
}

std::string serialize_homeo(const PotentialHomeo& k) { return dump_canonical(homeo_json(k)); }

PotentialHomeo deserialize_homeo(const std::string& text) {
  return homeo_from(parse_or_schema(text, "potential-homeo"));
}

std::string serialize_structure(const VirtualStructure& vs) {
  return dump_canonical(
      {{"format", "virtual-structure/1"}, {"d", cdf_json(vs.d)}, {"k", homeo_json(vs.k)}});
}

VirtualStructure deserialize_structure(const std::string& text) {
  const json j = parse_or_schema(text, "virtual-structure");
  check_format(j, "virtual-structure/1", "virtual-structure");
  return {cdf_from(require_field(j, "d", "virtual-structure")),
          homeo_from(require_field(j, "k", "virtual-structure"))};
}

}  // namespace greenrect
