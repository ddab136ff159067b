// Copyright 2026 The socialgen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SOCIALGEN_ES_GUIDANCE_HPP_
#define SOCIALGEN_ES_GUIDANCE_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "socialgen/diffusion.hpp"
#include "socialgen/social_reward.hpp"

namespace socialgen {

/// How the population is seeded before the first denoising pass.
///  - kPriorNoised: forward-noise draws from the denoiser's clean-sample
///    distribution to t = T, so members start on the forward marginal.
///  - kPureNoise: standard-normal values (conditioned entries clamped).
enum class InitMode { kPriorNoised, kPureNoise };

struct GuidanceConfig {
  int population = 32;           // M
  int search_steps = 4;          // K outer renoising rounds
  double tau_low = 1.0;
  double tau_high = 50.0;
  double renoise_fraction = 0.7;  // outer rounds restart at ceil(f * T)
  std::uint64_t seed = 0;
  bool terminal_only = false;  // rank/resample only on fully denoised samples
  int threads = 1;             // 0 = hardware concurrency
  InitMode init = InitMode::kPriorNoised;
};

void validate_guidance_config(const GuidanceConfig& config);

/// M tensors at a common noise level with their latest rewards.
struct Population {
  std::vector<TrajectoryTensor> members;
  Eigen::VectorXd rewards;
  int t = 0;
};

/// tau(t) = tau_high + (tau_low - tau_high) * t / T: low gain early (high t),
/// high gain as denoising approaches t = 0.
double temperature(int t, const DiffusionSchedule& schedule, double tau_low,
                   double tau_high);

/// Softmax weights w_i = exp(tau * (R_i - max R)) / sum, a max-shifted but
/// analytically identical form of exp(tau * R_i) / sum.
Eigen::VectorXd elite_distribution(const Eigen::VectorXd& rewards, double tau);

double entropy_of(const Eigen::VectorXd& weights);

/// `count` multinomial draws (with replacement) by inverse CDF.
std::vector<int> resample_indices(const Eigen::VectorXd& weights, int count,
                                  Rng& rng);

/// Resamples members and carries their rewards over.
Population resample_elites(const Population& pop, const Eigen::VectorXd& weights,
                           Rng& rng);

struct TraceRow {
  int step_k = 0;       // outer search step, 1-based
  int t = 0;            // denoising timestep the row was recorded at
  double best_reward = 0.0;  // best-so-far archive value (non-decreasing)
  double mean_reward = 0.0;
  double entropy = 0.0;      // entropy of the elite distribution
};

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);

/// Reward of a clean (fully denoised) tensor; must return a finite value.
using RewardFn = std::function<double(const TrajectoryTensor&)>;

struct EvolveResult {
  TrajectoryTensor best;  // archived best clean tensor
  double best_reward = 0.0;
  std::vector<TraceRow> trace;
  Population final_population;  // clean members after the last round
};

/// Evolutionary-search guided reverse diffusion over a population of
/// `config.population` members seeded from `conditioning`.
///
/// Step-wise mode ranks every member by the reward of its clean prediction at
/// every timestep, resamples from the elite distribution, then takes the DDPM
/// step. Terminal-only mode denoises without interference and applies the
/// same selection only on the finished samples (one rank/resample per outer
/// step). Outer steps re-noise the clean population to
/// ceil(renoise_fraction * T) and search again.
///
/// Deterministic for a fixed seed independent of `config.threads`: every
/// random draw comes from a substream keyed by (purpose, k, t, member).
/// Throws NonFiniteReward (with the member index) when a reward evaluation
/// yields a non-finite value.
EvolveResult evolve(const TrajectoryTensor& conditioning, const Denoiser& denoiser,
                    const DiffusionSchedule& schedule, const GuidanceConfig& config,
                    const RewardFn& reward);

struct GenerationResult {
  Scenario scenario;  // best decoded joint trajectory
  double best_reward = 0.0;
  std::vector<TraceRow> trace;
  Population final_population;
};

/// End-to-end guided generation: builds the conditioning tensor (pair mode
/// freezes every agent outside the proposal; joint_all regenerates everyone),
/// instantiates the Gaussian-prior denoiser, and maximizes the joint social
/// reward of the proposal pair under (params_i, params_j).
GenerationResult guided_sample(const Scenario& scenario, const Proposal& proposal,
                               const SocialParams& params_i,
                               const SocialParams& params_j,
                               const GuidanceConfig& config,
                               const DiffusionSchedule& schedule,
                               bool joint_all = false,
                               const GaussianPriorDenoiser::Config& prior =
                                   GaussianPriorDenoiser::Config(),
                               const IntrinsicWeights& weights = {});

}  // namespace socialgen

#endif  // SOCIALGEN_ES_GUIDANCE_HPP_
