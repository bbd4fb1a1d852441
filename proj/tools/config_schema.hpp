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
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace kerrblock::cli {

/// Validator for the JSON-schema subset used by the shipped run-config
/// schema: type, enum, properties, required, additionalProperties (boolean),
/// items, minItems, maxItems, minimum, maximum, exclusiveMinimum,
/// exclusiveMaximum and local "$ref": "#/$defs/...".
class SchemaValidator {
 public:
  explicit SchemaValidator(nlohmann::json schema);
  static SchemaValidator from_file(const std::string& path);

  /// Violations as "path: message"; empty when the document conforms.
  std::vector<std::string> validate(const nlohmann::json& document) const;

 private:
  void check(const nlohmann::json& schema, const nlohmann::json& value, const std::string& path,
             std::vector<std::string>& errors, int depth) const;
  const nlohmann::json& resolve(const nlohmann::json& schema) const;

  nlohmann::json root_;
};

/// Path of the bundled run-config schema.
std::string default_schema_path();

}  // namespace kerrblock::cli
