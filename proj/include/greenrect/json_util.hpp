#pragma once
// JSON helpers shared by the tree and structure schemas.
#include <string>

#include <json.hpp>

#include "greenrect/arcs.hpp"

namespace greenrect {

using json = nlohmann::json;

/// [num, den] when x is a dyadic with den <= 2^62, a plain number otherwise.
json number_to_json(double x);
/// Accepts a number or a [num, den] pair; throws SchemaError.
double number_from_json(const json& j, const std::string& what);

/// null encodes +infinity.
json extended_to_json(double x);
double extended_from_json(const json& j, const std::string& what);

json arcs_to_json(const ArcSet& arcs);
ArcSet arcs_from_json(const json& j, const std::string& what);

const json& require_field(const json& obj, const char* key, const std::string& where);

/// Canonical text: two-space indent, trailing newline.
std::string dump_canonical(const json& j);

}  // namespace greenrect
