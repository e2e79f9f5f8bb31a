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

#include "mvps/urn.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "mvps/error.hpp"
#include "mvps/rng.hpp"

namespace mvps {

UrnSpec::UrnSpec(double theta_in, ProbabilityVector nu_in,
                 FiniteKernel kernel_in)
    : theta(theta_in), nu(std::move(nu_in)), kernel(std::move(kernel_in)) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw Error(ErrorCode::kInvalidArgument, "theta must be positive");
  }
  RequireSameSpace(nu.space(), kernel.space());
}

namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t Fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string spec_hash(const UrnSpec& spec) {
  std::string text = "theta=" + Num(spec.theta) + ";labels=";
  for (const auto& l : spec.space().labels()) text += l + ",";
  text += ";nu=";
  for (double w : spec.nu.weights()) text += Num(w) + ",";
  text += ";kernel=";
  for (double w : spec.kernel.entries()) text += Num(w) + ",";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, Fnv1a(text));
  return buf;
}

UrnState::UrnState(std::shared_ptr<const UrnSpec> spec)
    : spec_(std::move(spec)), accumulated_(spec_->space().size(), 0.0) {}

UrnState UrnState::Initial(const UrnSpec& spec) {
  return UrnState(std::make_shared<const UrnSpec>(spec));
}

void UrnState::advance(std::size_t x) {
  const FiniteKernel& k = spec_->kernel;
  if (x >= k.size()) throw Error(ErrorCode::kInvalidArgument, "state out of range");
  ++n_;
  if (k.is_null(x)) return;
  const auto r = k.row(x);
  for (std::size_t y = 0; y < r.size(); ++y) accumulated_[y] += r[y];
  total_added_ += k.mass(x);
}

double UrnState::predictive_at(std::size_t y) const {
  const double theta = spec_->theta;
  return (theta * spec_->nu[y] + accumulated_[y]) / (theta + total_added_);
}

ProbabilityVector predictive(const UrnState& state) {
  const std::size_t k = state.spec().space().size();
  std::vector<double> w(k);
  for (std::size_t y = 0; y < k; ++y) w[y] = state.predictive_at(y);
  return ProbabilityVector(state.spec().space(), std::move(w));
}

UrnState step(const UrnState& state, std::size_t x) {
  UrnState next = state;
  next.advance(x);
  return next;
}

UrnState replay(const UrnSpec& spec, std::span<const std::size_t> history) {
  UrnState s = UrnState::Initial(spec);
  for (std::size_t x : history) s.advance(x);
  return s;
}

Trajectory simulate(const UrnSpec& spec, std::size_t n, std::uint64_t seed,
                    std::uint64_t replicate, bool record_snapshots) {
  Trajectory traj;
  traj.spec = std::make_shared<const UrnSpec>(spec);
  traj.seed = seed;
  traj.replicate = replicate;
  traj.draws.reserve(n);
  UrnState state(traj.spec);
  Rng rng(derive_seed(seed, replicate, 0));
  const std::size_t k = spec.space().size();
  std::vector<double> p(k);
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t y = 0; y < k; ++y) p[y] = state.predictive_at(y);
    if (record_snapshots) traj.snapshots.push_back(p);
    if (i == n) break;
    const std::size_t x = rng.categorical(p);
    traj.draws.push_back(x);
    state.advance(x);
  }
  return traj;
}

GeneralTrajectory general_simulate(const GeneralUrnSpec& spec, std::size_t n,
                                   std::uint64_t seed,
                                   std::uint64_t replicate) {
  if (!(spec.theta > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "theta must be positive");
  }
  const GeneralKernel& kernel = spec.kernel;
  if (!kernel.base_sampler || !kernel.mass_fn || !kernel.conditional_sampler) {
    throw Error(ErrorCode::kInvalidArgument, "general kernel is incomplete");
  }
  GeneralTrajectory traj;
  traj.seed = seed;
  traj.replicate = replicate;
  std::vector<double> cumulative;  // prefix sums of particle masses
  Rng rng(derive_seed(seed, replicate, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t step_seed = derive_seed(seed, replicate, i + 1);
    const double added = cumulative.empty() ? 0.0 : cumulative.back();
    const double u = rng.uniform() * (spec.theta + added);
    Point x;
    long parent = -1;
    if (u < spec.theta || added <= 0.0) {
      x = kernel.base_sampler(step_seed);
    } else {
      const double target = u - spec.theta;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
      if (it == cumulative.end()) --it;
      // Skip zero-mass particles that rounding may land on.
      while (it != cumulative.begin() && *it == *(it - 1)) --it;
      parent = static_cast<long>(it - cumulative.begin());
      x = kernel.conditional_sampler(traj.points[parent], step_seed);
    }
    const double f = kernel.mass_fn(x);
    if (!std::isfinite(f) || f < 0.0) {
      throw Error(ErrorCode::kSamplerFailure,
                  "mass_fn returned a negative or non-finite value");
    }
    traj.points.push_back(x);
    traj.parents.push_back(parent);
    traj.masses.push_back(f);
    cumulative.push_back(added + f);
  }
  return traj;
}

QSequence BalancedQ(double theta) {
  return [theta](std::size_t n, std::span<const std::size_t>) {
    const double dn = static_cast<double>(n);
    return (theta + dn - 1.0) / (theta + dn);
  };
}

QSequence ConstantQ(double q) {
  return [q](std::size_t, std::span<const std::size_t>) { return q; };
}

std::vector<std::vector<double>> cid_recursion_predictives(
    const ProbabilityVector& nu0, const FiniteKernel& kernel,
    const QSequence& q, std::span<const std::size_t> path) {
  RequireSameSpace(nu0.space(), kernel.space());
  for (std::size_t x = 0; x < kernel.size(); ++x) {
    if (std::abs(kernel.mass(x) - 1.0) > kTol) {
      throw Error(ErrorCode::kInvalidArgument,
                  "q_n recursion needs a probability kernel (unit-mass rows)");
    }
  }
  std::vector<std::vector<double>> out;
  out.reserve(path.size() + 1);
  out.emplace_back(nu0.weights().begin(), nu0.weights().end());
  for (std::size_t i = 1; i <= path.size(); ++i) {
    const std::size_t x = path[i - 1];
    if (x >= kernel.size()) {
      throw Error(ErrorCode::kInvalidArgument, "state out of range");
    }
    const double qn = q(i, path.first(i));
    if (!(qn >= 0.0 && qn <= 1.0)) {
      throw Error(ErrorCode::kBadQ, "q_n must lie in [0, 1]");
    }
    std::vector<double> next(kernel.size());
    const auto& prev = out.back();
    const auto r = kernel.row(x);
    for (std::size_t y = 0; y < next.size(); ++y) {
      next[y] = qn * prev[y] + (1.0 - qn) * r[y];
    }
    out.push_back(std::move(next));
  }
  return out;
}

Trajectory cid_recursion_simulate(const ProbabilityVector& nu0,
                                  const FiniteKernel& kernel,
                                  const QSequence& q, std::size_t n,
                                  std::uint64_t seed,
                                  std::uint64_t replicate) {
  Trajectory traj;
  traj.seed = seed;
  traj.replicate = replicate;
  Rng rng(derive_seed(seed, replicate, 0));
  // Validate the kernel once through the deterministic recursion.
  traj.snapshots = cid_recursion_predictives(nu0, kernel, q, {});
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t x = rng.categorical(traj.snapshots.back());
    traj.draws.push_back(x);
    const double qn = q(i, std::span<const std::size_t>(traj.draws));
    if (!(qn >= 0.0 && qn <= 1.0)) {
      throw Error(ErrorCode::kBadQ, "q_n must lie in [0, 1]");
    }
    const auto& prev = traj.snapshots.back();
    std::vector<double> next(kernel.size());
    const auto r = kernel.row(x);
    for (std::size_t y = 0; y < next.size(); ++y) {
      next[y] = qn * prev[y] + (1.0 - qn) * r[y];
    }
    traj.snapshots.push_back(std::move(next));
  }
  return traj;
}

void write_trajectory(std::ostream& os, const Trajectory& traj,
                      const FiniteSpace& space) {
  os << "# mvps-trajectory 1\n";
  os << "# spec_hash " << (traj.spec ? spec_hash(*traj.spec) : "none") << "\n";
  os << "# seed " << traj.seed << "\n";
  os << "# replicate " << traj.replicate << "\n";
  os << "# n " << traj.draws.size() << "\n";
  for (std::size_t x : traj.draws) os << space.label(x) << "\n";
}

TrajectoryFile read_trajectory(std::istream& is, const FiniteSpace& space) {
  TrajectoryFile out;
  std::string line;
  std::size_t declared = 0;
  bool have_n = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto sp = line.find(' ', 2);
      const std::string key = line.substr(2, sp == std::string::npos ? sp : sp - 2);
      const std::string value = sp == std::string::npos ? "" : line.substr(sp + 1);
      if (key == "spec_hash") out.spec_hash = value;
      if (key == "seed") out.seed = std::stoull(value);
      if (key == "replicate") out.replicate = std::stoull(value);
      if (key == "n") {
        declared = std::stoull(value);
        have_n = true;
      }
      continue;
    }
    out.draws.push_back(space.index_of(line));
  }
  if (have_n && declared != out.draws.size()) {
    throw Error(ErrorCode::kIo, "trajectory length does not match its header");
  }
  return out;
}

std::string spec_hash(const GeneralUrnSpec& spec) {
  const std::string text =
      "general;theta=" + Num(spec.theta) + ";kernel=" + spec.kernel.name;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, Fnv1a(text));
  return buf;
}

void write_general_trajectory(std::ostream& os, const GeneralTrajectory& traj,
                              const GeneralUrnSpec& spec) {
  os << "# mvps-trajectory 1\n";
  os << "# spec_hash " << spec_hash(spec) << "\n";
  os << "# seed " << traj.seed << "\n";
  os << "# replicate " << traj.replicate << "\n";
  os << "# n " << traj.points.size() << "\n";
  for (Point x : traj.points) os << Num(x) << "\n";
}

}  // namespace mvps
