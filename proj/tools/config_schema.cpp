/* Copyright 2026 The Kerrblock Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "config_schema.hpp"

#include <fstream>

#include "kerrblock/errors.hpp"

namespace kerrblock::cli {

namespace {

using nlohmann::json;

bool has_type(const json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer") return v.is_number_integer() || (v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<long long>(v.get<double>())));
  throw ConfigError("schema: unsupported type '" + type + "'");
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

}  // namespace

SchemaValidator::SchemaValidator(json schema) : root_(std::move(schema)) {
  if (!root_.is_object()) throw ConfigError("schema must be a JSON object");
}

SchemaValidator SchemaValidator::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schema " + path);
  try {
    return SchemaValidator(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("schema: ") + e.what());
  }
}

const json& SchemaValidator::resolve(const json& schema) const {
  if (!schema.contains("$ref")) return schema;
  const std::string ref = schema.at("$ref").get<std::string>();
  const std::string prefix = "#/$defs/";
  if (ref.rfind(prefix, 0) != 0) throw ConfigError("schema: unsupported $ref " + ref);
  const json& defs = root_.at("$defs");
  const std::string name = ref.substr(prefix.size());
  if (!defs.contains(name)) throw ConfigError("schema: dangling $ref " + ref);
  return defs.at(name);
}

void SchemaValidator::check(const json& schema_in, const json& v, const std::string& path,
                            std::vector<std::string>& errors, int depth) const {
  if (depth > 64) throw ConfigError("schema: $ref nesting too deep");
  const json& s = resolve(schema_in);
  if (&s != &schema_in) return check(s, v, path, errors, depth + 1);
  const std::string where = path.empty() ? "(root)" : path;

  if (s.contains("type")) {
    const json& t = s["type"];
    bool ok = false;
    if (t.is_array()) {
      for (const auto& x : t) ok = ok || has_type(v, x.get<std::string>());
    } else {
      ok = has_type(v, t.get<std::string>());
    }
    if (!ok) {
      errors.push_back(where + ": expected type " + t.dump());
      return;
    }
  }
  if (s.contains("enum")) {
    bool ok = false;
    for (const auto& x : s["enum"]) ok = ok || x == v;
    if (!ok) errors.push_back(where + ": value " + v.dump() + " not in " + s["enum"].dump());
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (s.contains("minimum") && x < s["minimum"].get<double>()) errors.push_back(where + ": below minimum");
    if (s.contains("maximum") && x > s["maximum"].get<double>()) errors.push_back(where + ": above maximum");
    if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>()) {
      errors.push_back(where + ": must exceed " + s["exclusiveMinimum"].dump());
    }
    if (s.contains("exclusiveMaximum") && x >= s["exclusiveMaximum"].get<double>()) {
      errors.push_back(where + ": must be below " + s["exclusiveMaximum"].dump());
    }
  }
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) errors.push_back(where + ": too few items");
    if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>()) errors.push_back(where + ": too many items");
    if (s.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        check(s["items"], v[i], path + "[" + std::to_string(i) + "]", errors, depth + 1);
      }
    }
  }
  if (v.is_object()) {
    const json empty = json::object();
    const json& props = s.contains("properties") ? s["properties"] : empty;
    if (s.contains("required")) {
      for (const auto& key : s["required"]) {
        if (!v.contains(key.get<std::string>())) errors.push_back(where + ": missing required key '" + key.get<std::string>() + "'");
      }
    }
    const bool closed = s.contains("additionalProperties") && s["additionalProperties"] == false;
    for (const auto& [key, item] : v.items()) {
      if (props.contains(key)) {
        check(props[key], item, join(path, key), errors, depth + 1);
      } else if (closed) {
        errors.push_back(where + ": unknown key '" + key + "'");
      }
    }
  }
}

std::vector<std::string> SchemaValidator::validate(const json& document) const {
  std::vector<std::string> errors;
  check(root_, document, "", errors, 0);
  return errors;
}

std::string default_schema_path() { return KERRBLOCK_SCHEMA_PATH; }

}  // namespace kerrblock::cli
