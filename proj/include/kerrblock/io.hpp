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

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "kerrblock/budget.hpp"
#include "kerrblock/fock.hpp"
#include "kerrblock/frames.hpp"
#include "kerrblock/modulation_analysis.hpp"
#include "kerrblock/optimizer.hpp"

namespace kerrblock {

using json = nlohmann::ordered_json;

/// Scientific notation with 17 significant digits; round-trips a double.
std::string format_number(double x);

/// Rows of numbers under a header, every field through format_number.
void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Columns t, re_lambda1, im_lambda1, re_lambda2, im_lambda2, theta.
void write_drive_program_csv(std::ostream& out, const DriveProgram& program);
json drive_program_json(const DriveProgram& program);

/// Complex numbers serialize as [re, im].
json complex_json(cplx z);
cplx complex_from_json(const json& value);
std::vector<cplx> complex_vector_from_json(const json& value);
/// Row-major [[re, im], ...] rows.
json operator_json(const Operator& m);
Operator operator_from_json(const json& value);

json config_json(const BlockadeConfig& config);
json report_json(const OptimizationReport& report);
json report_json(const ErrorBudget& budget);
json report_json(const FeasibilityReport& report);
json report_json(const SchirmerReport& report);
json report_json(const Fock1Result& result);
json report_json(const TrotterScan& scan);
void write_trotter_scan_csv(std::ostream& out, const TrotterScan& scan);

/// Aligned plain-text table of feasibility reports.
void write_feasibility_table(std::ostream& out, const std::vector<FeasibilityReport>& reports);

}  // namespace kerrblock
