#include "greenrect/json_util.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "greenrect/error.hpp"

namespace greenrect {

json number_to_json(double x) {
  if (auto d = as_dyadic(x)) return json::array({d->num, d->den});
  return x;
}

double number_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number_integer() &&
      j[1].is_number_unsigned() && j[1].get<std::uint64_t>() > 0) {
    return static_cast<double>(j[0].get<std::int64_t>()) /
           static_cast<double>(j[1].get<std::uint64_t>());
  }
  fail(ErrorCode::SchemaError, fmt::format("{}: expected a number or [num, den]", what));
}

json extended_to_json(double x) {
  if (std::isinf(x) && x > 0) return nullptr;
  return number_to_json(x);
}

double extended_from_json(const json& j, const std::string& what) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return number_from_json(j, what);
}

json arcs_to_json(const ArcSet& arcs) {
  json out = json::array();
  for (const Arc& a : arcs) out.push_back({number_to_json(a.lo), number_to_json(a.hi)});
  return out;
}

ArcSet arcs_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) fail(ErrorCode::SchemaError, what + ": expected a list of arcs");
  ArcSet out;
  for (const json& a : j) {
    if (!a.is_array() || a.size() != 2) {
      fail(ErrorCode::SchemaError, what + ": an arc is a pair [lo, hi]");
    }
    Arc arc{number_from_json(a[0], what), number_from_json(a[1], what)};
    if (!(arc.lo >= 0.0 && arc.lo < 1.0 && arc.hi > arc.lo && arc.hi <= arc.lo + 1.0)) {
      fail(ErrorCode::SchemaError, fmt::format("{}: malformed arc [{}, {}]", what, arc.lo, arc.hi));
    }
    out.push_back(arc);
  }
  return out;
}

const json& require_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    fail(ErrorCode::SchemaError, fmt::format("{}: missing field '{}'", where, key));
  }
  return obj.at(key);
}

std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

}  // namespace greenrect
