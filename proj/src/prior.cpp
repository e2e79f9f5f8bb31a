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

#include "mvps/prior.hpp"

#include <cmath>
#include <utility>

#include "mvps/error.hpp"
#include "mvps/rng.hpp"

namespace mvps {
namespace {

void RequireTheta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw Error(ErrorCode::kInvalidArgument, "theta must be positive and finite");
  }
}

void RequireLevels(std::size_t levels) {
  if (levels == 0) {
    throw Error(ErrorCode::kInvalidArgument, "truncation level must be >= 1");
  }
}

// (theta / (theta + 1))^J. Dividing the two powers keeps the rounding error
// near one ulp; the ratio form compounds J roundings.
double ResidualAt(double theta, std::size_t levels) {
  const double j = static_cast<double>(levels);
  const double num = std::pow(theta, j);
  const double den = std::pow(theta + 1.0, j);
  if (std::isfinite(num) && std::isfinite(den) && num > 0.0 &&
      std::isnormal(den)) {
    return num / den;
  }
  return std::pow(theta / (theta + 1.0), j);
}

template <class Atom, class DrawAtom>
StickBreakingDraw<Atom> Break(double theta, std::size_t levels, Rng& rng,
                              DrawAtom&& draw_atom) {
  RequireTheta(theta);
  RequireLevels(levels);
  StickBreakingDraw<Atom> out;
  out.theta = theta;
  out.sticks.reserve(levels);
  out.weights.reserve(levels);
  out.atoms.reserve(levels);
  double remaining = 1.0;
  for (std::size_t j = 0; j < levels; ++j) {
    const double w = rng.beta_one(theta);
    out.sticks.push_back(w);
    out.weights.push_back(w * remaining);
    remaining *= 1.0 - w;
    out.atoms.push_back(draw_atom(j));
  }
  out.residual = remaining;
  return out;
}

// nu(. | members) restricted to the members, in member order.
std::vector<double> Within(const ProbabilityVector& nu,
                           std::span<const std::size_t> members) {
  std::vector<double> w;
  w.reserve(members.size());
  double total = 0.0;
  for (std::size_t x : members) {
    w.push_back(nu[x]);
    total += nu[x];
  }
  if (total > 0.0) {
    for (double& v : w) v /= total;
  }
  return w;
}

RandomMeasureDraw KernelMixture(const FiniteStickBreaking& sticks,
                                const ProbabilityVector& nu,
                                const FiniteKernel& kernel,
                                ResidualMode mode) {
  const std::size_t k = nu.size();
  std::vector<double> w(k, 0.0);
  for (std::size_t j = 0; j < sticks.atoms.size(); ++j) {
    const auto row = kernel.row(sticks.atoms[j]);
    const double v = sticks.weights[j];
    for (std::size_t y = 0; y < k; ++y) w[y] += v * row[y];
  }
  const bool reassign = mode == ResidualMode::kReassignToBase;
  if (reassign) {
    for (std::size_t y = 0; y < k; ++y) w[y] += sticks.residual * nu[y];
  }
  return RandomMeasureDraw{FiniteMeasure(nu.space(), std::move(w)),
                           sticks.residual, reassign, sticks};
}

}  // namespace

Truncation truncation_level(double theta, double epsilon) {
  RequireTheta(theta);
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must lie in (0, 1)");
  }
  const double r = theta / (theta + 1.0);
  double guess = 1.0;
  if (r > 0.0 && r < 1.0) {
    guess = std::ceil(std::log(epsilon) / std::log(r));
  }
  if (!std::isfinite(guess) || guess > 1e15) {
    throw Error(ErrorCode::kTooLarge, "truncation level overflows");
  }
  std::size_t j = guess < 1.0 ? 1 : static_cast<std::size_t>(guess);
  while (ResidualAt(theta, j) > epsilon) ++j;
  while (j > 1 && ResidualAt(theta, j - 1) <= epsilon) --j;
  return Truncation{j, ResidualAt(theta, j)};
}

FiniteStickBreaking sample_dp(double theta, const ProbabilityVector& nu,
                              std::size_t levels, std::uint64_t seed,
                              std::uint64_t replicate) {
  Rng rng(derive_seed(seed, replicate, 0));
  const auto weights = nu.weights();
  return Break<std::size_t>(theta, levels, rng, [&](std::size_t) {
    return rng.categorical(weights, 1.0);
  });
}

GeneralStickBreaking sample_dp(double theta,
                               const std::function<Point(std::uint64_t)>& base,
                               std::size_t levels, std::uint64_t seed,
                               std::uint64_t replicate) {
  if (!base) {
    throw Error(ErrorCode::kInvalidArgument, "base sampler is empty");
  }
  Rng rng(derive_seed(seed, replicate, 0));
  return Break<Point>(theta, levels, rng, [&](std::size_t j) {
    const Point p = base(derive_seed(seed, replicate, j + 1));
    if (!std::isfinite(p)) {
      throw Error(ErrorCode::kSamplerFailure, "base sampler returned non-finite");
    }
    return p;
  });
}

RandomMeasureDraw realize_dp(const FiniteStickBreaking& draw,
                             const ProbabilityVector& nu, ResidualMode mode) {
  std::vector<double> w(nu.size(), 0.0);
  for (std::size_t j = 0; j < draw.atoms.size(); ++j) {
    w.at(draw.atoms[j]) += draw.weights[j];
  }
  const bool reassign = mode == ResidualMode::kReassignToBase;
  if (reassign) {
    for (std::size_t y = 0; y < w.size(); ++y) w[y] += draw.residual * nu[y];
  }
  return RandomMeasureDraw{FiniteMeasure(nu.space(), std::move(w)),
                           draw.residual, reassign, draw};
}

RandomMeasureDraw sample_kernel_sb(double theta, const ProbabilityVector& nu,
                                   const FiniteKernel& kernel,
                                   std::size_t levels, std::uint64_t seed,
                                   std::uint64_t replicate, ResidualMode mode) {
  RequireSameSpace(nu.space(), kernel.space());
  if (!kernel.is_canonical()) {
    throw Error(ErrorCode::kInvalidArgument,
                "kernel stick-breaking needs a canonical kernel");
  }
  const auto z = kernel.null_set();
  if (nu.mass_of(z) > kTol) {
    throw Error(ErrorCode::kHypothesisViolated,
                "base measure charges the null set");
  }
  return KernelMixture(sample_dp(theta, nu, levels, seed, replicate), nu,
                       kernel, mode);
}

KernelParticleDraw sample_kernel_sb(double theta, const GeneralKernel& kernel,
                                    std::size_t levels, std::uint64_t seed,
                                    std::uint64_t replicate) {
  KernelParticleDraw out;
  out.kernel_name = kernel.name;
  out.sticks = sample_dp(theta, kernel.base_sampler, levels, seed, replicate);
  return out;
}

ProbabilityVector posterior_base(double theta, const ProbabilityVector& nu,
                                 const FiniteKernel& kernel,
                                 std::span<const std::size_t> data) {
  RequireTheta(theta);
  RequireSameSpace(nu.space(), kernel.space());
  if (data.empty()) return nu;
  const std::size_t k = nu.size();
  std::vector<double> w(k);
  for (std::size_t y = 0; y < k; ++y) w[y] = theta * nu[y];
  for (std::size_t x : data) {
    if (x >= k) throw Error(ErrorCode::kInvalidArgument, "data state out of range");
    if (kernel.is_null(x)) {
      throw Error(ErrorCode::kHypothesisViolated,
                  "observation '" + nu.space().label(x) + "' lies in the null set");
    }
    const auto row = kernel.row(x);
    for (std::size_t y = 0; y < k; ++y) w[y] += row[y];
  }
  return normalize(FiniteMeasure(nu.space(), std::move(w)));
}

RandomMeasureDraw sample_posterior(double theta, const ProbabilityVector& nu,
                                   const FiniteKernel& kernel,
                                   std::span<const std::size_t> data,
                                   std::size_t levels, std::uint64_t seed,
                                   std::uint64_t replicate, ResidualMode mode) {
  const ProbabilityVector base = posterior_base(theta, nu, kernel, data);
  // Canonical kernels add mass 1 per observation.
  const double theta_n = theta + static_cast<double>(data.size());
  return sample_kernel_sb(theta_n, base, kernel, levels, seed, replicate, mode);
}

HierarchicalSampler::HierarchicalSampler(double theta, ProbabilityVector nu,
                                         Partition partition)
    : theta_(theta),
      nu_(std::move(nu)),
      partition_(std::move(partition)),
      nu_pi_(partition_.push_forward(nu_)) {
  RequireTheta(theta_);
  within_.reserve(partition_.num_blocks());
  for (std::size_t j = 0; j < partition_.num_blocks(); ++j) {
    if (nu_pi_[j] <= 0.0) {
      throw Error(ErrorCode::kBadPartition,
                  "block '" + partition_.block_label(j) + "' has zero base mass");
    }
    within_.push_back(Within(nu_, partition_.block(j)));
  }
}

HierarchicalSample HierarchicalSampler::draw(std::size_t n, std::size_t levels,
                                             std::uint64_t seed,
                                             std::uint64_t replicate) const {
  HierarchicalSample out;
  out.q_sticks = sample_dp(theta_, nu_pi_, levels, seed, replicate);
  const auto q = realize_dp(out.q_sticks, nu_pi_, ResidualMode::kReassignToBase);
  out.q.assign(q.measure.weights().begin(), q.measure.weights().end());
  // The stick stream used step 0; labels and samples use step 1.
  Rng rng(derive_seed(seed, replicate, 1));
  const double q_total = q.measure.total();
  out.labels.reserve(n);
  out.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t p = rng.categorical(out.q, q_total);
    const auto members = partition_.block(p);
    out.labels.push_back(p);
    out.samples.push_back(members[rng.categorical(within_[p], 1.0)]);
  }
  return out;
}

HierarchicalSample sample_hierarchical(double theta,
                                       const ProbabilityVector& nu,
                                       const Partition& partition,
                                       std::size_t n, std::size_t levels,
                                       std::uint64_t seed,
                                       std::uint64_t replicate) {
  RequireSameSpace(nu.space(), partition.space());
  return HierarchicalSampler(theta, nu, partition)
      .draw(n, levels, seed, replicate);
}

NullMixtureSampler::NullMixtureSampler(double theta, ProbabilityVector nu,
                                       Partition partition,
                                       std::vector<std::size_t> null_set)
    : theta_(theta),
      nu_(std::move(nu)),
      partition_(std::move(partition)),
      null_set_(std::move(null_set)) {
  RequireTheta(theta_);
  RequireSameSpace(nu_.space(), partition_.space());
  const std::size_t k = nu_.size();
  std::vector<bool> in_null(k, false);
  for (std::size_t z : null_set_) {
    if (z >= k || in_null[z]) {
      throw Error(ErrorCode::kBadNullSet, "null set has a bad or repeated state");
    }
    in_null[z] = true;
  }
  const double null_mass = nu_.mass_of(null_set_);
  live_mass_ = 1.0 - null_mass;
  if (!(null_mass > kTol) || !(live_mass_ > kTol)) {
    throw Error(ErrorCode::kBadNullSet,
                "null mixture needs 0 < nu(Z) < 1");
  }
  double live_total = 0.0;
  for (std::size_t j = 0; j < partition_.num_blocks(); ++j) {
    const auto members = partition_.block(j);
    std::size_t inside = 0;
    for (std::size_t x : members) inside += in_null[x] ? 1 : 0;
    if (inside == members.size()) continue;
    if (inside != 0) {
      throw Error(ErrorCode::kBadPartition,
                  "block '" + partition_.block_label(j) + "' straddles the null set");
    }
    const double m = nu_.mass_of(members);
    if (m <= 0.0) {
      throw Error(ErrorCode::kBadPartition,
                  "block '" + partition_.block_label(j) + "' has zero base mass");
    }
    live_blocks_.push_back(j);
    live_block_mass_.push_back(m);
    within_.push_back(Within(nu_, members));
    live_total += m;
  }
  for (double& m : live_block_mass_) m /= live_total;
  within_null_ = Within(nu_, null_set_);
}

NullMixtureSample NullMixtureSampler::draw(std::size_t n, std::size_t levels,
                                           std::uint64_t seed,
                                           std::uint64_t replicate) const {
  NullMixtureSample out;
  out.live_blocks = live_blocks_;
  const FiniteSpace live_space = FiniteSpace::Numbered(live_blocks_.size());
  const ProbabilityVector base =
      normalize(FiniteMeasure(live_space, live_block_mass_));
  out.q_sticks = sample_dp(theta_, base, levels, seed, replicate);
  const auto q = realize_dp(out.q_sticks, base, ResidualMode::kReassignToBase);
  out.q.assign(q.measure.weights().begin(), q.measure.weights().end());
  Rng rng(derive_seed(seed, replicate, 1));
  const double q_total = q.measure.total();
  out.labels.reserve(n);
  out.xi.reserve(n);
  out.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool xi = rng.bernoulli(live_mass_);
    out.xi.push_back(xi);
    if (xi) {
      const std::size_t p = rng.categorical(out.q, q_total);
      const std::size_t block = live_blocks_[p];
      out.labels.push_back(block);
      out.samples.push_back(
          partition_.block(block)[rng.categorical(within_[p], 1.0)]);
    } else {
      out.labels.push_back(kNoBlock);
      out.samples.push_back(null_set_[rng.categorical(within_null_, 1.0)]);
    }
  }
  return out;
}

NullMixtureSample sample_null_mixture(double theta,
                                      const ProbabilityVector& nu,
                                      const Partition& partition,
                                      std::span<const std::size_t> null_set,
                                      std::size_t n, std::uint64_t seed,
                                      std::uint64_t replicate) {
  const std::size_t levels =
      truncation_level(theta, kDefaultTruncationEpsilon).levels;
  return NullMixtureSampler(theta, nu, partition,
                            {null_set.begin(), null_set.end()})
      .draw(n, levels, seed, replicate);
}

nlohmann::json to_json(const FiniteStickBreaking& draw,
                       const FiniteSpace& atom_space) {
  nlohmann::json atoms = nlohmann::json::array();
  for (std::size_t a : draw.atoms) atoms.push_back(atom_space.label(a));
  return {{"theta", draw.theta},
          {"levels", draw.sticks.size()},
          {"sticks", draw.sticks},
          {"weights", draw.weights},
          {"atoms", atoms},
          {"residual", draw.residual}};
}

nlohmann::json to_json(const GeneralStickBreaking& draw) {
  return {{"theta", draw.theta},
          {"levels", draw.sticks.size()},
          {"sticks", draw.sticks},
          {"weights", draw.weights},
          {"atoms", draw.atoms},
          {"residual", draw.residual}};
}

}  // namespace mvps
