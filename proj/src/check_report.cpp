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

#include "mvps/check_report.hpp"

#include <cmath>
#include <limits>

namespace mvps {
namespace {

// JSON has no infinity; saturate so reports stay serializable.
double Finite(double v) {
  if (std::isnan(v)) return std::numeric_limits<double>::max();
  if (std::isinf(v)) return std::numeric_limits<double>::max();
  return v;
}

}  // namespace

void CheckReport::observe(double residual, const nlohmann::json& where) {
  residual = Finite(residual);
  if (!witness || residual > max_residual) {
    witness = where;
    witness->operator[]("residual") = residual;
  }
  observe(residual);
}

void CheckReport::observe(double residual) {
  residual = Finite(residual);
  if (residual > max_residual) max_residual = residual;
}

nlohmann::json CheckReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["passed"] = passed;
  j["max_residual"] = max_residual;
  j["tolerance"] = tolerance;
  j["witness"] = witness ? *witness : nlohmann::json(nullptr);
  j["details"] = details;
  j["data"] = data;
  return j;
}

CheckReport CheckReport::from_json(const nlohmann::json& j) {
  CheckReport r;
  r.name = j.at("name").get<std::string>();
  r.passed = j.at("passed").get<bool>();
  r.max_residual = j.at("max_residual").get<double>();
  r.tolerance = j.at("tolerance").get<double>();
  if (!j.at("witness").is_null()) r.witness = j.at("witness");
  r.details = j.at("details").get<std::map<std::string, double>>();
  r.data = j.at("data");
  return r;
}

CheckReport combine(std::string name, const std::vector<CheckReport>& parts) {
  CheckReport out(std::move(name), 0.0);
  out.passed = true;
  nlohmann::json children = nlohmann::json::array();
  for (const CheckReport& p : parts) {
    out.passed = out.passed && p.passed;
    if (!p.passed && !out.witness) {
      out.witness = nlohmann::json{{"failed_check", p.name}};
      if (p.witness) (*out.witness)["witness"] = *p.witness;
    }
    out.max_residual = std::max(out.max_residual, p.max_residual);
    out.tolerance = std::max(out.tolerance, p.tolerance);
    children.push_back(p.to_json());
  }
  out.data["checks"] = std::move(children);
  return out;
}

}  // namespace mvps
