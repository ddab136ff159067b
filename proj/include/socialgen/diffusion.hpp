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

#ifndef SOCIALGEN_DIFFUSION_HPP_
#define SOCIALGEN_DIFFUSION_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <string>
#include <vector>

#include "socialgen/errors.hpp"
#include "socialgen/rng.hpp"
#include "socialgen/scenario.hpp"

namespace socialgen {

// Linear beta schedule. beta/alpha are defined for t in [1, T];
// alpha_bar additionally defines alpha_bar(0) == 1.
class DiffusionSchedule {
 public:
  DiffusionSchedule() = default;
  DiffusionSchedule(Eigen::VectorXd beta);

  int T() const { return static_cast<int>(beta_.size()); }
  double beta(int t) const;
  double alpha(int t) const;
  double alpha_bar(int t) const;

 private:
  Eigen::VectorXd beta_;       // beta_[t-1] = beta_t
  Eigen::VectorXd alpha_bar_;  // alpha_bar_[t], size T+1, alpha_bar_[0] = 1
};

constexpr int kDefaultTimesteps = 50;
constexpr double kDefaultBetaMin = 1e-4;
constexpr double kDefaultBetaMax = 0.1;

// Throws InvalidSchedule unless T >= 1 and 0 < beta_min <= beta_max < 1.
// T == 1 yields the single step beta_1 = beta_min.
DiffusionSchedule make_schedule(int T = kDefaultTimesteps,
                                double beta_min = kDefaultBetaMin,
                                double beta_max = kDefaultBetaMax);

// Flat joint-trajectory coordinate vector, agent-major, step-minor, x before
// y. `observed` holds the reference values for every entry; entries with
// mask == 1 are clamped to `observed` by every diffusion operation, so masked
// entries of `values` always hold clean observed data (never noised).
struct TrajectoryTensor {
  int num_agents = 0;
  int num_steps = 0;
  Eigen::VectorXd values;
  Eigen::VectorXd observed;
  Eigen::ArrayXd mask;  // 1.0 = clamped, 0.0 = free

  static Eigen::Index index(int agent, int step, int coord, int num_steps) {
    return (static_cast<Eigen::Index>(agent) * num_steps + step) * 2 + coord;
  }
  Eigen::Index size() const {
    return static_cast<Eigen::Index>(num_agents) * num_steps * 2;
  }
  // values <- mask * observed + (1 - mask) * values
  void clamp_observed();
  bool agent_frozen(int agent) const;
};

// (n-2) x n second-difference operator with rows [1, -2, 1]; 0 x n for n < 3.
Eigen::MatrixXd second_difference_matrix(int n);

// Maps (x_t, t) to a predicted clean sample. Implementations must be
// thread-safe: predict_clean is called concurrently from population workers.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual Eigen::VectorXd predict_clean(const Eigen::VectorXd& x_t, int t,
                                        const DiffusionSchedule& schedule) const = 0;
  // Draws a clean sample from the model's notion of the data distribution.
  // Used to seed reverse chains consistently with the forward marginals.
  virtual Eigen::VectorXd sample_clean(Rng& rng) const {
    (void)rng;
    return Eigen::VectorXd::Zero(dim());
  }
  virtual Eigen::Index dim() const = 0;
};

// Exact Gaussian stand-in for a trained model. Per agent and coordinate
// channel the clean signal has prior N(mu, P^-1) with
// P = lambda_smooth * D2^T D2 + eps * I, where mu is the observed prefix
// extended by constant-velocity extrapolation (frozen agents keep their full
// observed trajectory). predict_clean returns the exact posterior mean
//   E[x0 | x_t] = mu + sqrt(a) * [a*I + (1-a)*P]^-1 * (x_t - sqrt(a)*mu),
// a = alpha_bar_t, solved per channel with a Cholesky factorization.
class GaussianPriorDenoiser : public Denoiser {
 public:
  struct Config {
    double lambda_smooth = 50.0;
    double eps = 1e-4;
    int horizon = 10;  // observed steps feeding the constant-velocity mean
  };

  GaussianPriorDenoiser(const TrajectoryTensor& conditioning, double dt);
  GaussianPriorDenoiser(const TrajectoryTensor& conditioning, double dt,
                        Config config);

  Eigen::VectorXd predict_clean(const Eigen::VectorXd& x_t, int t,
                                const DiffusionSchedule& schedule) const override;
  // Samples from the prior conditioned on the masked entries (which are
  // pinned to their observed values); with an all-zero mask this is an
  // unconditional prior draw.
  Eigen::VectorXd sample_clean(Rng& rng) const override;
  Eigen::Index dim() const override { return mu_.size(); }

  const Eigen::VectorXd& mean() const { return mu_; }
  const Eigen::MatrixXd& precision() const { return precision_; }

 private:
  struct ChannelSampler {
    std::vector<int> free_idx;          // positions within the channel
    Eigen::VectorXd cond_mean;          // conditional mean on free entries
    Eigen::LLT<Eigen::MatrixXd> llt;    // factorization of P_ff
  };

  int num_agents_ = 0;
  int num_steps_ = 0;
  Eigen::VectorXd mu_;
  Eigen::VectorXd observed_;
  Eigen::ArrayXd mask_;
  Eigen::MatrixXd precision_;                 // per-channel P, T_s x T_s
  std::vector<ChannelSampler> samplers_;      // one per (agent, coord)
};

// x_t = sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * noise, masked
// entries re-clamped. Accepts t in [0, T]; t == 0 is the identity.
// Throws DimensionMismatch if the noise length differs.
TrajectoryTensor forward_noise(const TrajectoryTensor& x0, int t,
                               const DiffusionSchedule& schedule,
                               const Eigen::VectorXd& noise);
TrajectoryTensor forward_noise(const TrajectoryTensor& x0, int t,
                               const DiffusionSchedule& schedule, Rng& rng);

// Delegates to the denoiser, then forces masked entries to observed values.
TrajectoryTensor predict_x0(const TrajectoryTensor& x_t, int t,
                            const DiffusionSchedule& schedule,
                            const Denoiser& denoiser);

// One DDPM posterior step. Mean
//   mu~ = (sqrt(alpha_bar_{t-1}) beta_t / (1 - alpha_bar_t)) * x0_hat
//       + (sqrt(alpha_t) (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t)) * x_t,
// variance beta~_t = beta_t (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t).
// t == 1 returns mu~ without noise. Masked entries re-clamped.
TrajectoryTensor reverse_step(const TrajectoryTensor& x_t, int t,
                              const TrajectoryTensor& x0_hat,
                              const DiffusionSchedule& schedule, Rng& rng);

// Runs predict_x0 / reverse_step from t_start down to 1 and returns the
// final clean tensor.
TrajectoryTensor reverse_chain(const TrajectoryTensor& x_init, int t_start,
                               const DiffusionSchedule& schedule,
                               const Denoiser& denoiser, Rng& rng);

constexpr int kDefaultConditioningPrefix = 10;

// Joint tensor over all agents of `scenario`, values initialized to the
// observed trajectories. Agents outside `generated_ids` are fully masked;
// generated agents have their first `prefix` steps masked. Throws
// ValidationError on unknown ids or an empty id list.
TrajectoryTensor make_conditioning_tensor(
    const Scenario& scenario, const std::vector<std::string>& generated_ids,
    int prefix = kDefaultConditioningPrefix);

// Rebuilds a scenario from tensor positions. Fully masked agents are copied
// verbatim from `base`. For the rest, speed comes from forward differences
// (the last step repeats) and heading from the motion direction, carrying
// the previous heading across zero-motion steps; the result always satisfies
// validate_scenario's step-consistency bound.
Scenario decode_tensor(const TrajectoryTensor& tensor, const Scenario& base);

}  // namespace socialgen

#endif  // SOCIALGEN_DIFFUSION_HPP_
