// Copyright 2026 The MVPS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MVPS_CHECK_REPORT_HPP_
#define MVPS_CHECK_REPORT_HPP_

#include <map>
#include <vector>
#include <optional>
#include <string>

#include "json.hpp"
#include "mvps/error.hpp"

namespace mvps {

// Outcome of a verification. passed == (max_residual <= tolerance).
// `witness` describes the worst violating configuration seen; `details`
// carries named scalar residuals and constants (e.g. the scale c = nu(f));
// `data` carries structured extras such as blocks and tables.
struct CheckReport {
  std::string name;
  bool passed = true;
  double max_residual = 0.0;
  double tolerance = kTol;
  std::optional<nlohmann::json> witness;
  std::map<std::string, double> details;
  nlohmann::json data = nlohmann::json::object();

  CheckReport() = default;
  CheckReport(std::string check_name, double tol)
      : name(std::move(check_name)), tolerance(tol) {}

  // Records a residual; the witness is replaced when it is the worst so far.
  void observe(double residual, const nlohmann::json& where);
  // Records a residual without witness bookkeeping.
  void observe(double residual);
  void finalize() { passed = max_residual <= tolerance; }

  nlohmann::json to_json() const;
  static CheckReport from_json(const nlohmann::json& j);
};

// Conjunction of several reports: passes iff all pass. Parts may use
// different tolerances, so `passed` is the conjunction rather than a
// residual comparison.
CheckReport combine(std::string name, const std::vector<CheckReport>& parts);

}  // namespace mvps

#endif  // MVPS_CHECK_REPORT_HPP_
