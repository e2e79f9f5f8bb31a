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

#include "mvps/general_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mvps/error.hpp"
#include "mvps/rng.hpp"

namespace mvps {

using nlohmann::json;

Point BaseMeasure::sample(std::uint64_t seed) const {
  Rng rng(seed);
  if (kind == Kind::kNormal) return rng.normal(a, b);
  return a + (b - a) * rng.uniform();
}

std::string BaseMeasure::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << (kind == Kind::kNormal ? "normal(" : "uniform(") << a << "," << b
     << ")";
  return os.str();
}

namespace builtin {

GeneralKernel Delta(BaseMeasure base) {
  GeneralKernel k;
  k.name = "delta/" + base.describe();
  k.base_sampler = [base](std::uint64_t s) { return base.sample(s); };
  k.mass_fn = [](Point) { return 1.0; };
  k.conditional_sampler = [](Point x, std::uint64_t) { return x; };
  k.atom_map = [](Point x) { return x; };
  return k;
}

GeneralKernel Symmetrized(BaseMeasure base, double center) {
  GeneralKernel k;
  k.name = "symmetrized/" + base.describe();
  k.base_sampler = [base](std::uint64_t s) { return base.sample(s); };
  k.mass_fn = [](Point) { return 1.0; };
  k.conditional_sampler = [center](Point x, std::uint64_t s) {
    Rng rng(s);
    return rng.bernoulli(0.5) ? x : 2.0 * center - x;
  };
  k.atom_map = [center](Point x) { return std::abs(x - center); };
  return k;
}

GeneralKernel Histogram(BaseMeasure base, std::vector<double> edges) {
  if (edges.empty() || !std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "histogram edges must be strictly increasing");
  }
  auto bin_of = [edges](Point x) {
    return static_cast<double>(
        std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
  };
  GeneralKernel k;
  k.name = "histogram/" + base.describe();
  k.base_sampler = [base](std::uint64_t s) { return base.sample(s); };
  k.mass_fn = [](Point) { return 1.0; };
  k.conditional_sampler = [base, edges, bin_of](Point x, std::uint64_t s) {
    const auto bin = static_cast<std::size_t>(bin_of(x));
    const double lo = bin == 0 ? -std::numeric_limits<double>::infinity()
                               : edges[bin - 1];
    const double hi = bin == edges.size()
                          ? std::numeric_limits<double>::infinity()
                          : edges[bin];
    Rng rng(s);
    if (base.kind == BaseMeasure::Kind::kUniform) {
      const double a = std::max(lo, base.a), b = std::min(hi, base.b);
      if (!(b > a)) {
        throw Error(ErrorCode::kSamplerFailure, "histogram bin has no mass");
      }
      return a + (b - a) * rng.uniform();
    }
    // Rejection from the base restricted to the bin.
    for (int attempt = 0; attempt < 10'000'000; ++attempt) {
      const double y = rng.normal(base.a, base.b);
      if (y >= lo && y < hi) return y;
    }
    throw Error(ErrorCode::kSamplerFailure,
                "histogram bin too unlikely for rejection sampling");
  };
  k.atom_map = bin_of;
  return k;
}

GeneralKernel Shifted(BaseMeasure base, double shift) {
  GeneralKernel k;
  k.name = "shifted/" + base.describe();
  k.base_sampler = [base](std::uint64_t s) { return base.sample(s); };
  k.mass_fn = [](Point) { return 1.0; };
  k.conditional_sampler = [base, shift](Point, std::uint64_t s) {
    return base.sample(s) + shift;
  };
  return k;
}

}  // namespace builtin

TestSet HalfLine(double t) {
  std::ostringstream os;
  os.precision(17);
  os << "(-inf," << t << "]";
  return {os.str(), [t](Point x) { return x <= t; }};
}

McEstimate Summarize(const std::vector<double>& values) {
  McEstimate e;
  e.n = values.size();
  if (values.empty()) return e;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  e.mean = mean;
  if (values.size() > 1) {
    const double var = ss / static_cast<double>(values.size() - 1);
    e.standard_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return e;
}

double StandardizedResidual(const McEstimate& e, double target) {
  const double dev = std::abs(e.mean - target);
  if (e.standard_error > 0.0) return dev / e.standard_error;
  return dev <= kTol ? 0.0 : std::numeric_limits<double>::infinity();
}

namespace {

double CheckedMass(const GeneralKernel& kernel, Point x) {
  const double f = kernel.mass_fn(x);
  if (!std::isfinite(f) || f < 0.0) {
    throw Error(ErrorCode::kSamplerFailure,
                "mass_fn returned a negative or non-finite value");
  }
  return f;
}

}  // namespace

CheckReport mc_kernel_check(const GeneralKernel& kernel,
                            const std::vector<TestSet>& test_sets,
                            std::size_t samples, std::uint64_t seed) {
  if (samples < 100) {
    throw Error(ErrorCode::kInvalidArgument, "mc_kernel_check needs N >= 100");
  }
  if (test_sets.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "at least one test set required");
  }
  if (!kernel.base_sampler || !kernel.mass_fn || !kernel.conditional_sampler) {
    throw Error(ErrorCode::kInvalidArgument, "general kernel is incomplete");
  }
  const std::size_t m = test_sets.size();
  std::vector<std::vector<double>> stat(m), self(m), self_mean(m);
  for (auto* v : {&stat, &self, &self_mean}) {
    for (auto& s : *v) s.reserve(samples);
  }
  for (std::size_t i = 0; i < samples; ++i) {
    // Stationarity draws.
    const Point x = kernel.base_sampler(derive_seed(seed, i, 1));
    const Point y = kernel.conditional_sampler(x, derive_seed(seed, i, 2));
    const Point xp = kernel.base_sampler(derive_seed(seed, i, 3));
    const double fx = CheckedMass(kernel, x);
    const double fxp = CheckedMass(kernel, xp);
    // Self-averaging draws: two independent inner replicates given x0.
    const Point x0 = kernel.base_sampler(derive_seed(seed, i, 4));
    Point ys[2], zs[2], yps[2], xps[2];
    double fy[2], fxps[2];
    for (int r = 0; r < 2; ++r) {
      const std::uint64_t off = 5 + 4 * static_cast<std::uint64_t>(r);
      ys[r] = kernel.conditional_sampler(x0, derive_seed(seed, i, off));
      zs[r] = kernel.conditional_sampler(ys[r], derive_seed(seed, i, off + 1));
      yps[r] = kernel.conditional_sampler(x0, derive_seed(seed, i, off + 2));
      xps[r] = kernel.base_sampler(derive_seed(seed, i, off + 3));
      fy[r] = CheckedMass(kernel, ys[r]);
      fxps[r] = CheckedMass(kernel, xps[r]);
    }
    for (std::size_t a = 0; a < m; ++a) {
      const auto& in = test_sets[a].contains;
      stat[a].push_back(fx * (in(y) ? 1.0 : 0.0) - fxp * (in(x) ? 1.0 : 0.0));
      double e[2];
      for (int r = 0; r < 2; ++r) {
        e[r] = fy[r] * (in(zs[r]) ? 1.0 : 0.0) -
               fxps[r] * (in(yps[r]) ? 1.0 : 0.0);
      }
      self[a].push_back(e[0] * e[1]);
      self_mean[a].push_back(0.5 * (e[0] + e[1]));
    }
  }
  CheckReport report("mc-kernel", kStandardErrors);
  json sets = json::array();
  for (std::size_t a = 0; a < m; ++a) {
    const McEstimate st = Summarize(stat[a]);
    const McEstimate sa = Summarize(self[a]);
    const McEstimate sm = Summarize(self_mean[a]);
    const double z_st = StandardizedResidual(st, 0.0);
    const double z_sa = StandardizedResidual(sa, 0.0);
    const double z_sm = StandardizedResidual(sm, 0.0);
    report.observe(z_st, json{{"test_set", test_sets[a].name},
                              {"condition", "stationarity"},
                              {"estimate", st.mean},
                              {"standard_error", st.standard_error}});
    report.observe(z_sa, json{{"test_set", test_sets[a].name},
                              {"condition", "self-averaging"},
                              {"estimate", sa.mean},
                              {"standard_error", sa.standard_error}});
    report.observe(z_sm, json{{"test_set", test_sets[a].name},
                              {"condition", "self-averaging-mean"},
                              {"estimate", sm.mean},
                              {"standard_error", sm.standard_error}});
    sets.push_back(json{{"name", test_sets[a].name},
                        {"stationarity", {{"estimate", st.mean},
                                          {"standard_error", st.standard_error},
                                          {"z", std::min(z_st, 1e300)}}},
                        {"self_averaging", {{"estimate", sa.mean},
                                            {"standard_error", sa.standard_error},
                                            {"z", std::min(z_sa, 1e300)}}},
                        {"self_averaging_mean",
                         {{"estimate", sm.mean},
                          {"standard_error", sm.standard_error},
                          {"z", std::min(z_sm, 1e300)}}}});
  }
  report.data["test_sets"] = std::move(sets);
  report.details["samples"] = static_cast<double>(samples);
  report.finalize();
  return report;
}

}  // namespace mvps
