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

#include "socialgen/es_guidance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>
#include <utility>

namespace socialgen {

namespace {

// Substream purposes; every draw in evolve is keyed by (purpose, k, t, member)
// so results are identical regardless of the number of worker threads.
constexpr std::uint64_t kStreamInit = 1;
constexpr std::uint64_t kStreamRenoise = 2;
constexpr std::uint64_t kStreamStep = 3;
constexpr std::uint64_t kStreamSelect = 4;

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads == 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::mutex mu;
  std::exception_ptr first_error;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    const int begin = static_cast<int>(static_cast<long long>(n) * w / threads);
    const int end = static_cast<int>(static_cast<long long>(n) * (w + 1) / threads);
    workers.emplace_back([&, begin, end] {
      try {
        for (int i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (std::thread& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void check_finite_rewards(const Eigen::VectorXd& rewards) {
  for (int i = 0; i < rewards.size(); ++i) {
    if (!std::isfinite(rewards[i])) {
      throw NonFiniteReward(
          "reward is not finite for member " + std::to_string(i), i);
    }
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void validate_guidance_config(const GuidanceConfig& config) {
  if (config.population < 2) throw ValidationError("guidance population must be >= 2");
  if (config.search_steps < 1) throw ValidationError("search_steps must be >= 1");
  if (!(config.tau_low <= config.tau_high) || !(config.tau_low >= 0.0)) {
    throw ValidationError("temperature endpoints need 0 <= tau_low <= tau_high");
  }
  if (!(config.renoise_fraction > 0.0) || !(config.renoise_fraction <= 1.0)) {
    throw ValidationError("renoise_fraction must lie in (0, 1]");
  }
  if (config.threads < 0) throw ValidationError("threads must be >= 0");
}

double temperature(int t, const DiffusionSchedule& schedule, double tau_low,
                   double tau_high) {
  const int T = schedule.T();
  if (t < 0 || t > T) throw ValidationError("temperature requires 0 <= t <= T");
  return tau_high + (tau_low - tau_high) * static_cast<double>(t) / T;
}

Eigen::VectorXd elite_distribution(const Eigen::VectorXd& rewards, double tau) {
  if (rewards.size() == 0) throw ValidationError("elite_distribution needs rewards");
  if (!(tau >= 0.0)) throw ValidationError("elite_distribution needs tau >= 0");
  const double top = rewards.maxCoeff();
  const Eigen::VectorXd w = (tau * (rewards.array() - top)).exp().matrix();
  return w / w.sum();
}

double entropy_of(const Eigen::VectorXd& weights) {
  double h = 0.0;
  for (int i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) h -= weights[i] * std::log(weights[i]);
  }
  return h;
}

std::vector<int> resample_indices(const Eigen::VectorXd& weights, int count,
                                  Rng& rng) {
  const int n = static_cast<int>(weights.size());
  if (n == 0) throw ValidationError("resample_indices needs weights");
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += weights[i];
    cdf[i] = acc;
  }
  cdf[n - 1] = 1.0;  // guard against rounding shortfall
  std::vector<int> out(count);
  for (int d = 0; d < count; ++d) {
    const double u = rng.uniform();
    out[d] = static_cast<int>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  }
  return out;
}

Population resample_elites(const Population& pop, const Eigen::VectorXd& weights,
                           Rng& rng) {
  const int m = static_cast<int>(pop.members.size());
  const std::vector<int> sel = resample_indices(weights, m, rng);
  Population out;
  out.t = pop.t;
  out.members.reserve(m);
  out.rewards.resize(m);
  for (int i = 0; i < m; ++i) {
    out.members.push_back(pop.members[sel[i]]);
    out.rewards[i] = pop.rewards.size() > sel[i] ? pop.rewards[sel[i]] : 0.0;
  }
  return out;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "step_k,t,best_reward,mean_reward,entropy_q\n";
  for (const TraceRow& row : trace) {
    os << row.step_k << ',' << row.t << ',' << format_double(row.best_reward)
       << ',' << format_double(row.mean_reward) << ','
       << format_double(row.entropy) << '\n';
  }
}

EvolveResult evolve(const TrajectoryTensor& conditioning, const Denoiser& denoiser,
                    const DiffusionSchedule& schedule, const GuidanceConfig& config,
                    const RewardFn& reward) {
  validate_guidance_config(config);
  const int M = config.population;
  const int T = schedule.T();
  const int renoise_t = std::min(
      T, std::max(1, static_cast<int>(std::ceil(config.renoise_fraction * T))));
  const int dim = static_cast<int>(conditioning.size());
  const std::uint64_t seed = config.seed;

  std::vector<TrajectoryTensor> members(M, conditioning);
  parallel_for(M, config.threads, [&](int i) {
    Rng rng(mix_seed(seed, kStreamInit, 0, 0, static_cast<std::uint64_t>(i)));
    if (config.init == InitMode::kPriorNoised) {
      members[i].values = denoiser.sample_clean(rng);
      members[i].clamp_observed();
      members[i] = forward_noise(members[i], T, schedule, rng);
    } else {
      members[i].values = rng.normals(dim);
      members[i].clamp_observed();
    }
  });

  EvolveResult result;
  result.best = conditioning;
  result.best_reward = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd rewards = Eigen::VectorXd::Zero(M);
  std::vector<TrajectoryTensor> x0s(M);

  const auto archive = [&](const Eigen::VectorXd& r,
                           const std::vector<TrajectoryTensor>& clean) {
    for (int i = 0; i < M; ++i) {
      if (r[i] > result.best_reward) {
        result.best_reward = r[i];
        result.best = clean[i];
      }
    }
  };

  for (int k = 1; k <= config.search_steps; ++k) {
    const int t_start = (k == 1) ? T : renoise_t;
    if (k > 1) {
      // Members are clean after the previous round; renoise and search again.
      parallel_for(M, config.threads, [&](int i) {
        Rng rng(mix_seed(seed, kStreamRenoise, static_cast<std::uint64_t>(k), 0,
                         static_cast<std::uint64_t>(i)));
        members[i] = forward_noise(members[i], t_start, schedule, rng);
      });
    }

    for (int t = t_start; t >= 1; --t) {
      if (config.terminal_only) {
        parallel_for(M, config.threads, [&](int i) {
          const TrajectoryTensor x0 = predict_x0(members[i], t, schedule, denoiser);
          Rng rng(mix_seed(seed, kStreamStep, static_cast<std::uint64_t>(k),
                           static_cast<std::uint64_t>(t),
                           static_cast<std::uint64_t>(i)));
          members[i] = reverse_step(members[i], t, x0, schedule, rng);
        });
        continue;
      }
      parallel_for(M, config.threads, [&](int i) {
        x0s[i] = predict_x0(members[i], t, schedule, denoiser);
        rewards[i] = reward(x0s[i]);
      });
      check_finite_rewards(rewards);
      archive(rewards, x0s);
      const Eigen::VectorXd q = elite_distribution(
          rewards, temperature(t, schedule, config.tau_low, config.tau_high));
      result.trace.push_back({k, t, result.best_reward, rewards.mean(),
                              entropy_of(q)});
      Rng select_rng(mix_seed(seed, kStreamSelect, static_cast<std::uint64_t>(k),
                              static_cast<std::uint64_t>(t), 0));
      const std::vector<int> sel = resample_indices(q, M, select_rng);
      std::vector<TrajectoryTensor> picked_x(M), picked_x0(M);
      Eigen::VectorXd picked_r(M);
      for (int i = 0; i < M; ++i) {
        picked_x[i] = members[sel[i]];
        picked_x0[i] = x0s[sel[i]];
        picked_r[i] = rewards[sel[i]];
      }
      rewards = picked_r;
      parallel_for(M, config.threads, [&](int i) {
        Rng rng(mix_seed(seed, kStreamStep, static_cast<std::uint64_t>(k),
                         static_cast<std::uint64_t>(t),
                         static_cast<std::uint64_t>(i)));
        members[i] = reverse_step(picked_x[i], t, picked_x0[i], schedule, rng);
      });
    }

    if (config.terminal_only) {
      // Members are clean here; this is the only place rewards are used.
      parallel_for(M, config.threads,
                   [&](int i) { rewards[i] = reward(members[i]); });
      check_finite_rewards(rewards);
      archive(rewards, members);
      const Eigen::VectorXd q = elite_distribution(
          rewards, temperature(0, schedule, config.tau_low, config.tau_high));
      result.trace.push_back({k, 0, result.best_reward, rewards.mean(),
                              entropy_of(q)});
      if (k < config.search_steps) {
        Rng select_rng(mix_seed(seed, kStreamSelect,
                                static_cast<std::uint64_t>(k), 0, 0));
        Population pop;
        pop.members = std::move(members);
        pop.rewards = rewards;
        pop = resample_elites(pop, q, select_rng);
        members = std::move(pop.members);
        rewards = pop.rewards;
      }
    }
  }

  result.final_population.members = std::move(members);
  result.final_population.rewards = rewards;
  result.final_population.t = 0;
  return result;
}

GenerationResult guided_sample(const Scenario& scenario, const Proposal& proposal,
                               const SocialParams& params_i,
                               const SocialParams& params_j,
                               const GuidanceConfig& config,
                               const DiffusionSchedule& schedule, bool joint_all,
                               const GaussianPriorDenoiser::Config& prior,
                               const IntrinsicWeights& weights) {
  validate_social_params(params_i);
  validate_social_params(params_j);
  scenario.agent(proposal.agent_i);
  scenario.agent(proposal.agent_j);
  std::vector<std::string> ids;
  if (joint_all) {
    for (const Trajectory& traj : scenario.trajectories) ids.push_back(traj.agent_id);
  } else {
    ids = {proposal.agent_i, proposal.agent_j};
  }
  const TrajectoryTensor conditioning = make_conditioning_tensor(scenario, ids);
  const GaussianPriorDenoiser denoiser(conditioning, scenario.dt(), prior);
  const RewardFn fn = [&](const TrajectoryTensor& clean) {
    return joint_reward(decode_tensor(clean, scenario), proposal, params_i,
                        params_j, weights);
  };
  EvolveResult evolved = evolve(conditioning, denoiser, schedule, config, fn);
  GenerationResult out;
  out.scenario = decode_tensor(evolved.best, scenario);
  out.best_reward = evolved.best_reward;
  out.trace = std::move(evolved.trace);
  out.final_population = std::move(evolved.final_population);
  return out;
}

}  // namespace socialgen
