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

#include "socialgen/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "socialgen/geometry.hpp"

namespace socialgen {

DiffusionSchedule::DiffusionSchedule(Eigen::VectorXd beta) : beta_(std::move(beta)) {
  const int T = static_cast<int>(beta_.size());
  alpha_bar_.resize(T + 1);
  alpha_bar_[0] = 1.0;
  for (int t = 1; t <= T; ++t) {
    alpha_bar_[t] = alpha_bar_[t - 1] * (1.0 - beta_[t - 1]);
  }
}

double DiffusionSchedule::beta(int t) const {
  if (t < 1 || t > T()) throw std::out_of_range("beta(t): t out of [1, T]");
  return beta_[t - 1];
}

double DiffusionSchedule::alpha(int t) const { return 1.0 - beta(t); }

double DiffusionSchedule::alpha_bar(int t) const {
  if (t < 0 || t > T()) throw std::out_of_range("alpha_bar(t): t out of [0, T]");
  return alpha_bar_[t];
}

DiffusionSchedule make_schedule(int T, double beta_min, double beta_max) {
  if (T < 1) throw InvalidSchedule("schedule needs T >= 1");
  if (!(beta_min > 0.0) || !(beta_min <= beta_max) || !(beta_max < 1.0)) {
    throw InvalidSchedule("schedule needs 0 < beta_min <= beta_max < 1");
  }
  Eigen::VectorXd beta(T);
  if (T == 1) {
    beta[0] = beta_min;
  } else {
    for (int t = 0; t < T; ++t) {
      beta[t] = beta_min + (beta_max - beta_min) * static_cast<double>(t) / (T - 1);
    }
  }
  return DiffusionSchedule(std::move(beta));
}

void TrajectoryTensor::clamp_observed() {
  values.array() = mask * observed.array() + (1.0 - mask) * values.array();
}

bool TrajectoryTensor::agent_frozen(int agent) const {
  const Eigen::Index block = static_cast<Eigen::Index>(num_steps) * 2;
  return mask.segment(block * agent, block).minCoeff() > 0.5;
}

Eigen::MatrixXd second_difference_matrix(int n) {
  const int rows = std::max(0, n - 2);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows, n);
  for (int r = 0; r < rows; ++r) {
    d(r, r) = 1.0;
    d(r, r + 1) = -2.0;
    d(r, r + 2) = 1.0;
  }
  return d;
}

namespace {

// Channel view of the flat layout: entries (a*T_s + k)*2 + c for fixed (a, c).
Eigen::VectorXd channel_of(const Eigen::VectorXd& flat, int agent, int coord,
                           int num_steps) {
  Eigen::VectorXd out(num_steps);
  for (int k = 0; k < num_steps; ++k) {
    out[k] = flat[TrajectoryTensor::index(agent, k, coord, num_steps)];
  }
  return out;
}

void set_channel(Eigen::VectorXd& flat, int agent, int coord, int num_steps,
                 const Eigen::VectorXd& signal) {
  for (int k = 0; k < num_steps; ++k) {
    flat[TrajectoryTensor::index(agent, k, coord, num_steps)] = signal[k];
  }
}

}  // namespace

GaussianPriorDenoiser::GaussianPriorDenoiser(const TrajectoryTensor& conditioning,
                                             double dt)
    : GaussianPriorDenoiser(conditioning, dt, Config()) {}

GaussianPriorDenoiser::GaussianPriorDenoiser(const TrajectoryTensor& conditioning,
                                             double dt, Config config)
    : num_agents_(conditioning.num_agents),
      num_steps_(conditioning.num_steps),
      observed_(conditioning.observed),
      mask_(conditioning.mask) {
  if (num_agents_ < 1 || num_steps_ < 2) {
    throw ValidationError("prior denoiser needs at least one agent and two steps");
  }
  if (!(dt > 0.0)) throw ValidationError("prior denoiser needs dt > 0");
  if (!(config.eps > 0.0) || !(config.lambda_smooth >= 0.0)) {
    throw ValidationError("prior denoiser needs eps > 0 and lambda_smooth >= 0");
  }
  if (config.horizon < 2) throw ValidationError("prior horizon must be >= 2");

  const int T_s = num_steps_;
  const Eigen::MatrixXd d2 = second_difference_matrix(T_s);
  precision_ = config.lambda_smooth * (d2.transpose() * d2) +
               config.eps * Eigen::MatrixXd::Identity(T_s, T_s);

  // Prior mean: observed prefix, then constant-velocity extrapolation from
  // the velocity across the prefix. Frozen agents keep the full observation.
  mu_.resize(observed_.size());
  const int horizon = std::min(config.horizon, T_s);
  for (int a = 0; a < num_agents_; ++a) {
    for (int c = 0; c < 2; ++c) {
      const Eigen::VectorXd obs = channel_of(observed_, a, c, T_s);
      Eigen::VectorXd mu = obs;
      if (!conditioning.agent_frozen(a)) {
        const double v = (obs[horizon - 1] - obs[0]) / ((horizon - 1) * dt);
        for (int k = horizon; k < T_s; ++k) {
          mu[k] = obs[horizon - 1] + v * (k - (horizon - 1)) * dt;
        }
      }
      set_channel(mu_, a, c, T_s, mu);
    }
  }

  // Conditional-sampling factorizations: P_ff per channel mask pattern.
  samplers_.reserve(static_cast<size_t>(num_agents_) * 2);
  for (int a = 0; a < num_agents_; ++a) {
    for (int c = 0; c < 2; ++c) {
      ChannelSampler s;
      std::vector<int> masked;
      for (int k = 0; k < T_s; ++k) {
        const Eigen::Index i = TrajectoryTensor::index(a, k, c, T_s);
        (mask_[i] > 0.5 ? masked : s.free_idx).push_back(k);
      }
      if (!s.free_idx.empty()) {
        const int nf = static_cast<int>(s.free_idx.size());
        Eigen::MatrixXd p_ff(nf, nf);
        for (int r = 0; r < nf; ++r) {
          for (int q = 0; q < nf; ++q) {
            p_ff(r, q) = precision_(s.free_idx[r], s.free_idx[q]);
          }
        }
        const Eigen::VectorXd obs = channel_of(observed_, a, c, T_s);
        const Eigen::VectorXd mu = channel_of(mu_, a, c, T_s);
        Eigen::VectorXd coupling = Eigen::VectorXd::Zero(nf);
        for (int r = 0; r < nf; ++r) {
          for (int m : masked) {
            coupling[r] += precision_(s.free_idx[r], m) * (obs[m] - mu[m]);
          }
        }
        s.llt.compute(p_ff);
        if (s.llt.info() != Eigen::Success) {
          throw SolverFailure("prior precision is not positive definite");
        }
        Eigen::VectorXd mu_f(nf);
        for (int r = 0; r < nf; ++r) mu_f[r] = mu[s.free_idx[r]];
        s.cond_mean = mu_f - s.llt.solve(coupling);
      }
      samplers_.push_back(std::move(s));
    }
  }
}

Eigen::VectorXd GaussianPriorDenoiser::predict_clean(
    const Eigen::VectorXd& x_t, int t, const DiffusionSchedule& schedule) const {
  if (x_t.size() != dim()) {
    throw DimensionMismatch("predict_clean: input dimension mismatch");
  }
  const double a_bar = schedule.alpha_bar(t);
  const double root = std::sqrt(a_bar);
  const int T_s = num_steps_;
  // A = a*I + (1-a)*P is shared by every channel; factor once per call.
  const Eigen::MatrixXd system =
      a_bar * Eigen::MatrixXd::Identity(T_s, T_s) + (1.0 - a_bar) * precision_;
  const Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success) {
    throw SolverFailure("posterior system is not positive definite");
  }
  Eigen::VectorXd out(dim());
  for (int a = 0; a < num_agents_; ++a) {
    for (int c = 0; c < 2; ++c) {
      const Eigen::VectorXd mu = channel_of(mu_, a, c, T_s);
      const Eigen::VectorXd residual = channel_of(x_t, a, c, T_s) - root * mu;
      const Eigen::VectorXd x0 = mu + root * llt.solve(residual);
      set_channel(out, a, c, T_s, x0);
    }
  }
  return out;
}

Eigen::VectorXd GaussianPriorDenoiser::sample_clean(Rng& rng) const {
  Eigen::VectorXd out = observed_;
  const int T_s = num_steps_;
  for (int a = 0; a < num_agents_; ++a) {
    for (int c = 0; c < 2; ++c) {
      const ChannelSampler& s = samplers_[static_cast<size_t>(a) * 2 + c];
      if (s.free_idx.empty()) continue;
      const Eigen::VectorXd z = rng.normals(static_cast<int>(s.free_idx.size()));
      // Cov(L^-T z) = (L L^T)^-1 = P_ff^-1.
      const Eigen::VectorXd draw =
          s.cond_mean + s.llt.matrixU().solve(z);
      for (size_t r = 0; r < s.free_idx.size(); ++r) {
        out[TrajectoryTensor::index(a, s.free_idx[r], c, T_s)] = draw[r];
      }
    }
  }
  return out;
}

TrajectoryTensor forward_noise(const TrajectoryTensor& x0, int t,
                               const DiffusionSchedule& schedule,
                               const Eigen::VectorXd& noise) {
  if (noise.size() != x0.size()) {
    throw DimensionMismatch("forward_noise: noise dimension mismatch");
  }
  const double a_bar = schedule.alpha_bar(t);
  TrajectoryTensor out = x0;
  out.values = std::sqrt(a_bar) * x0.values + std::sqrt(1.0 - a_bar) * noise;
  out.clamp_observed();
  return out;
}

TrajectoryTensor forward_noise(const TrajectoryTensor& x0, int t,
                               const DiffusionSchedule& schedule, Rng& rng) {
  return forward_noise(x0, t, schedule, rng.normals(static_cast<int>(x0.size())));
}

TrajectoryTensor predict_x0(const TrajectoryTensor& x_t, int t,
                            const DiffusionSchedule& schedule,
                            const Denoiser& denoiser) {
  TrajectoryTensor out = x_t;
  out.values = denoiser.predict_clean(x_t.values, t, schedule);
  out.clamp_observed();
  return out;
}

TrajectoryTensor reverse_step(const TrajectoryTensor& x_t, int t,
                              const TrajectoryTensor& x0_hat,
                              const DiffusionSchedule& schedule, Rng& rng) {
  if (t < 1) throw ValidationError("reverse_step requires t >= 1");
  if (x0_hat.values.size() != x_t.values.size()) {
    throw DimensionMismatch("reverse_step: x0_hat dimension mismatch");
  }
  const double beta = schedule.beta(t);
  const double alpha = schedule.alpha(t);
  const double a_bar = schedule.alpha_bar(t);
  const double a_bar_prev = schedule.alpha_bar(t - 1);
  const double c0 = std::sqrt(a_bar_prev) * beta / (1.0 - a_bar);
  const double ct = std::sqrt(alpha) * (1.0 - a_bar_prev) / (1.0 - a_bar);
  TrajectoryTensor out = x_t;
  out.values = c0 * x0_hat.values + ct * x_t.values;
  if (t > 1) {
    const double var = beta * (1.0 - a_bar_prev) / (1.0 - a_bar);
    out.values += std::sqrt(var) * rng.normals(static_cast<int>(out.size()));
  }
  out.clamp_observed();
  return out;
}

TrajectoryTensor reverse_chain(const TrajectoryTensor& x_init, int t_start,
                               const DiffusionSchedule& schedule,
                               const Denoiser& denoiser, Rng& rng) {
  if (t_start < 1 || t_start > schedule.T()) {
    throw ValidationError("reverse_chain requires 1 <= t_start <= T");
  }
  TrajectoryTensor x = x_init;
  x.clamp_observed();
  for (int t = t_start; t >= 1; --t) {
    const TrajectoryTensor x0 = predict_x0(x, t, schedule, denoiser);
    x = reverse_step(x, t, x0, schedule, rng);
  }
  return x;
}

TrajectoryTensor make_conditioning_tensor(const Scenario& scenario,
                                          const std::vector<std::string>& generated_ids,
                                          int prefix) {
  if (generated_ids.empty()) {
    throw ValidationError("conditioning tensor needs at least one generated agent");
  }
  if (prefix < 0) throw ValidationError("conditioning prefix must be >= 0");
  std::unordered_set<std::string> generated;
  for (const std::string& id : generated_ids) {
    if (scenario.find_agent(id) == nullptr) {
      throw ValidationError("unknown generated agent id: " + id);
    }
    generated.insert(id);
  }

  TrajectoryTensor tensor;
  tensor.num_agents = scenario.num_agents();
  tensor.num_steps = scenario.num_steps();
  tensor.values.resize(tensor.size());
  tensor.mask = Eigen::ArrayXd::Zero(tensor.size());
  const int clamped_prefix = std::min(prefix, tensor.num_steps - 1);
  for (int a = 0; a < tensor.num_agents; ++a) {
    const Trajectory& traj = scenario.trajectories[a];
    const bool frozen = generated.count(traj.agent_id) == 0;
    const int masked_steps = frozen ? tensor.num_steps : clamped_prefix;
    for (int k = 0; k < tensor.num_steps; ++k) {
      const Eigen::Index ix = TrajectoryTensor::index(a, k, 0, tensor.num_steps);
      tensor.values[ix] = traj.states[k].position.x();
      tensor.values[ix + 1] = traj.states[k].position.y();
      if (k < masked_steps) {
        tensor.mask[ix] = 1.0;
        tensor.mask[ix + 1] = 1.0;
      }
    }
  }
  tensor.observed = tensor.values;
  return tensor;
}

Scenario decode_tensor(const TrajectoryTensor& tensor, const Scenario& base) {
  if (tensor.num_agents != base.num_agents() ||
      tensor.num_steps != base.num_steps()) {
    throw DimensionMismatch("decode_tensor: tensor shape does not match scenario");
  }
  Scenario out;
  out.map = base.map;
  out.metadata_json = base.metadata_json;
  out.trajectories.reserve(base.trajectories.size());
  const int T_s = tensor.num_steps;
  const double dt = base.dt();
  for (int a = 0; a < tensor.num_agents; ++a) {
    const Trajectory& ref = base.trajectories[a];
    if (tensor.agent_frozen(a)) {
      out.trajectories.push_back(ref);
      continue;
    }
    Trajectory traj;
    traj.agent_id = ref.agent_id;
    traj.dt = dt;
    traj.states.resize(T_s);
    for (int k = 0; k < T_s; ++k) {
      const Eigen::Index ix = TrajectoryTensor::index(a, k, 0, T_s);
      traj.states[k].position = Vec2(tensor.values[ix], tensor.values[ix + 1]);
    }
    // Forward-difference speed keeps |p_{k+1} - p_k| = v_k * dt, so the
    // decoded trajectory satisfies the scenario consistency bound exactly.
    for (int k = 0; k + 1 < T_s; ++k) {
      const Vec2 d = traj.states[k + 1].position - traj.states[k].position;
      traj.states[k].speed = d.norm() / dt;
      if (d.norm() > 1e-9) {
        traj.states[k].heading = normalize_angle(std::atan2(d.y(), d.x()));
      } else {
        traj.states[k].heading =
            k > 0 ? traj.states[k - 1].heading : ref.states.front().heading;
      }
    }
    traj.states[T_s - 1].speed = traj.states[T_s - 2].speed;
    traj.states[T_s - 1].heading = traj.states[T_s - 2].heading;
    out.trajectories.push_back(std::move(traj));
  }
  return out;
}

}  // namespace socialgen
