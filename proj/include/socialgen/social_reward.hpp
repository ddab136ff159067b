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

#ifndef SOCIALGEN_SOCIAL_REWARD_HPP_
#define SOCIALGEN_SOCIAL_REWARD_HPP_

#include <functional>
#include <vector>

#include "socialgen/intent.hpp"
#include "socialgen/scenario.hpp"

namespace socialgen {

/// Social preference of one agent: intrinsic reward magnitude lambda >= 0
/// and orientation angle phi in [-pi/2, pi/2] (negative competitive, zero
/// egoist, positive prosocial).
struct SocialParams {
  double lambda = 1.0;
  double phi = 0.0;
};

/// Throws ValidationError when lambda or phi is out of range.
void validate_social_params(const SocialParams& params);

/// Weights and scales of the intrinsic driving-utility components.
struct IntrinsicWeights {
  double w_lane = 1.0;
  double w_speed = 1.0;
  double w_heading = 1.0;
  double w_comfort = 0.5;
  double w_safety = 2.0;
  double ttc_safe = 4.0;    // s
  double accel_ref = 3.0;   // m/s^2
  double jerk_ref = 5.0;    // m/s^3

  double sum() const { return w_lane + w_speed + w_heading + w_comfort + w_safety; }
};

void validate_intrinsic_weights(const IntrinsicWeights& w);

/// total = lambda * (cos(phi) * intrinsic_self + sin(phi) * intrinsic_other)
///         + extrinsic
struct RewardBreakdown {
  double intrinsic_self = 0.0;
  double intrinsic_other = 0.0;
  double extrinsic = 0.0;
  double total = 0.0;
};

double combine_social(const SocialParams& params, double intrinsic_self,
                      double intrinsic_other, double extrinsic);

// -- intrinsic components ----------------------------------------------------
// Each term is the per-step mean of a normalized penalty, clamped to [0, 1]
// and negated, so every component lies in [-1, 0].

double lane_term(const Trajectory& traj, const LaneMap& map);
double speed_term(const Trajectory& traj, const LaneMap& map);
double heading_term(const Trajectory& traj, const LaneMap& map);
double comfort_term(const Trajectory& traj, double accel_ref, double jerk_ref);
/// `ttc_per_step` holds the min TTC against all interaction partners at each
/// step (+inf when clear).
double safety_term(const std::vector<double>& ttc_per_step, double ttc_safe);

/// Weighted mean of the five components; lies in [-1, 0]. With no `others`,
/// the safety component is 0.
double intrinsic_reward(const Trajectory& traj, const std::vector<const Trajectory*>& others,
                        const LaneMap& map, const IntrinsicWeights& w,
                        double collision_radius = 2.0);

// -- extrinsic reward registry ------------------------------------------------

/// Task reward in [0, 1] evaluated on a candidate trajectory within a scene.
using ExtrinsicReward = std::function<double(const Trajectory&, const Scenario&)>;
using ExtrinsicFactory = std::function<ExtrinsicReward(const Intent&)>;

/// Instantiates the task reward for an intent. Throws UnknownIntent when the
/// kind has no registered factory.
ExtrinsicReward make_extrinsic(const Intent& intent);

/// Replaces or adds the factory for a kind (the registry ships with all five
/// built-in kinds).
void register_extrinsic(IntentKind kind, ExtrinsicFactory factory);

// -- combined rewards ----------------------------------------------------------

RewardBreakdown social_reward(const Trajectory& traj_i, const Trajectory& traj_j,
                              const Scenario& scenario, const SocialParams& params_i,
                              const Intent& intent_i, const IntrinsicWeights& w,
                              double collision_radius = 2.0);

/// Sum of both proposal agents' social-reward totals, evaluated on the given
/// (decoded) scenario.
double joint_reward(const Scenario& scenario, const Proposal& proposal,
                    const SocialParams& params_i, const SocialParams& params_j,
                    const IntrinsicWeights& w, double collision_radius = 2.0);

}  // namespace socialgen

#endif  // SOCIALGEN_SOCIAL_REWARD_HPP_
