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

#include <iosfwd>
#include <string>
#include <vector>

namespace kerrblock::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,      // unexpected runtime failure
  kExitConfig = 2,       // bad arguments, schema rejection, invalid inputs
  kExitConvergence = 3,  // step doubling or the optimizer missed its target
  kExitInfeasible = 4,   // feasibility verdict negative for every platform
};

/// Full command line including the program name. Summary lines go to `out`,
/// diagnostics to `err`. Every successful dispatch creates one run directory
/// under --out, named <UTC timestamp>-seed<seed>, with manifest.json written
/// before any other output.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kerrblock::cli
