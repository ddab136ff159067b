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

#include "socialgen/social_reward.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "socialgen/errors.hpp"
#include "socialgen/metrics.hpp"

namespace socialgen {

void validate_social_params(const SocialParams& params) {
  if (!(params.lambda >= 0.0) || !std::isfinite(params.lambda))
    throw ValidationError("social params: lambda must be finite and >= 0");
  if (!(params.phi >= -M_PI / 2.0 && params.phi <= M_PI / 2.0))
    throw ValidationError("social params: phi must lie in [-pi/2, pi/2]");
}

void validate_intrinsic_weights(const IntrinsicWeights& w) {
  const double vals[] = {w.w_lane, w.w_speed, w.w_heading, w.w_comfort, w.w_safety,
                         w.ttc_safe, w.accel_ref, w.jerk_ref};
  for (double v : vals)
    if (!std::isfinite(v) || v < 0.0)
      throw ValidationError("intrinsic weights must be finite and >= 0");
}

double combine_social(const SocialParams& params, double intrinsic_self,
                      double intrinsic_other, double extrinsic) {
  return params.lambda * (std::cos(params.phi) * intrinsic_self +
                          std::sin(params.phi) * intrinsic_other) +
         extrinsic;
}

namespace {

double neg_clamped_mean(double accum, int n) {
  if (n == 0) return 0.0;
  return -std::clamp(accum / n, 0.0, 1.0);
}

/// Reference speed for the speed-maintenance penalty: lane speed limit, or
/// the agent's initial speed when there is no lane to consult.
double reference_speed(const Trajectory& traj, const Lane* lane) {
  double ref = lane ? lane->speed_limit : traj.states.front().speed;
  return std::max(ref, 1e-6);
}

}  // namespace

double lane_term(const Trajectory& traj, const LaneMap& map) {
  if (map.empty()) return 0.0;
  double accum = 0.0;
  for (const auto& s : traj.states) {
    const LaneProjection proj = project_to_lane(s.position, map);
    const Lane* lane = map.find(proj.lane_id);
    const double half = std::max(lane->width / 2.0, 1e-6);
    const double ratio = proj.lateral_offset / half;
    accum += ratio * ratio;
  }
  return neg_clamped_mean(accum, traj.size());
}

double speed_term(const Trajectory& traj, const LaneMap& map) {
  double accum = 0.0;
  for (const auto& s : traj.states) {
    const Lane* lane = nullptr;
    if (!map.empty()) lane = map.find(project_to_lane(s.position, map).lane_id);
    const double ref = reference_speed(traj, lane);
    const double ratio = (s.speed - ref) / ref;
    accum += ratio * ratio;
  }
  return neg_clamped_mean(accum, traj.size());
}

double heading_term(const Trajectory& traj, const LaneMap& map) {
  if (map.empty()) return 0.0;
  double accum = 0.0;
  for (const auto& s : traj.states) {
    const LaneProjection proj = project_to_lane(s.position, map);
    accum += 1.0 - std::cos(s.heading - proj.tangent_heading);
  }
  return neg_clamped_mean(accum, traj.size());
}

double comfort_term(const Trajectory& traj, double accel_ref, double jerk_ref) {
  const KinematicProfile profile = derive_kinematics(traj);
  double accum = 0.0;
  for (int k = 0; k < traj.size(); ++k) {
    const double a = profile.acceleration.col(k).norm() / std::max(accel_ref, 1e-6);
    const double j = profile.jerk.col(k).norm() / std::max(jerk_ref, 1e-6);
    accum += a * a + j * j;
  }
  return neg_clamped_mean(accum, traj.size());
}

double safety_term(const std::vector<double>& ttc_per_step, double ttc_safe) {
  if (ttc_per_step.empty() || ttc_safe <= 0.0) return 0.0;
  double accum = 0.0;
  for (double ttc : ttc_per_step) accum += std::max(0.0, (ttc_safe - ttc) / ttc_safe);
  return neg_clamped_mean(accum, static_cast<int>(ttc_per_step.size()));
}

double intrinsic_reward(const Trajectory& traj, const std::vector<const Trajectory*>& others,
                        const LaneMap& map, const IntrinsicWeights& w,
                        double collision_radius) {
  validate_intrinsic_weights(w);
  const double wsum = w.sum();
  if (wsum <= 0.0) return 0.0;

  double safety = 0.0;
  if (!others.empty()) {
    std::vector<double> ttc_per_step(traj.size());
    for (int k = 0; k < traj.size(); ++k) {
      double best = std::numeric_limits<double>::infinity();
      for (const Trajectory* other : others) {
        if (k >= other->size()) continue;
        best = std::min(best, time_to_collision(traj.states[k], other->states[k],
                                                collision_radius, collision_radius));
      }
      ttc_per_step[k] = best;
    }
    safety = safety_term(ttc_per_step, w.ttc_safe);
  }

  const double total = w.w_lane * lane_term(traj, map) + w.w_speed * speed_term(traj, map) +
                       w.w_heading * heading_term(traj, map) +
                       w.w_comfort * comfort_term(traj, w.accel_ref, w.jerk_ref) +
                       w.w_safety * safety;
  return total / wsum;
}

// -- extrinsic registry -------------------------------------------------------

namespace {

int final_second_steps(const Trajectory& traj) {
  const int n = std::max(1, static_cast<int>(std::lround(1.0 / traj.dt)));
  return std::min(n, traj.size());
}

ExtrinsicReward make_lane_change(const Intent& intent) {
  const std::string target = intent.target_lane_id;
  return [target](const Trajectory& traj, const Scenario& scenario) {
    const Lane* lane = scenario.map.find(target);
    if (!lane) throw ValidationError("lane change intent: unknown lane '" + target + "'");
    const int tail = final_second_steps(traj);
    double mean_offset = 0.0;
    for (int k = traj.size() - tail; k < traj.size(); ++k)
      mean_offset += project_to_polyline(traj.states[k].position, lane->centerline).signed_lateral;
    mean_offset /= tail;
    const double half = std::max(lane->width / 2.0, 1e-6);
    return 1.0 - std::clamp(std::abs(mean_offset) / half, 0.0, 1.0);
  };
}

ExtrinsicReward make_maintain_speed(const Intent& intent) {
  const double target = intent.target_speed;
  return [target](const Trajectory& traj, const Scenario&) {
    double accum = 0.0;
    for (const auto& s : traj.states) accum += std::abs(s.speed - target);
    const double mean_err = accum / traj.size();
    return 1.0 - std::clamp(mean_err / std::max(target, 1.0), 0.0, 1.0);
  };
}

/// Time at which a trajectory first passes a point on its own path; +inf when
/// it never comes within `tol` of the point.
double passage_time(const Trajectory& traj, const Vec2& point, double tol = 1.0) {
  Polyline path;
  path.reserve(traj.size());
  for (const auto& s : traj.states) path.push_back(s.position);
  const PolylineProjection proj = project_to_polyline(point, path);
  if (proj.distance > tol) return std::numeric_limits<double>::infinity();
  return (proj.segment + proj.param) * traj.dt;
}

constexpr double kMinYieldGap = 1.0;  // s of time headway at the conflict point

ExtrinsicReward make_yield(const Intent& intent) {
  const std::string other_id = intent.yield_to;
  return [other_id](const Trajectory& traj, const Scenario& scenario) {
    const Trajectory& other = scenario.agent(other_id);
    Polyline self_path, other_path;
    for (const auto& s : traj.states) self_path.push_back(s.position);
    for (const auto& s : other.states) other_path.push_back(s.position);
    const auto crossing = first_crossing(self_path, other_path);
    if (!crossing) return 1.0;  // paths never contest a point
    const double t_self = crossing->along_a * traj.dt;
    const double t_other = crossing->along_b * other.dt;
    const double gap = t_self - t_other;  // >0 when the other passes first
    return std::clamp(gap / kMinYieldGap, 0.0, 1.0);
  };
}

ExtrinsicReward make_reach_point(const Intent& intent) {
  const Vec2 goal = intent.goal;
  return [goal](const Trajectory& traj, const Scenario&) {
    const double initial = (traj.states.front().position - goal).norm();
    const double final_d = (traj.states.back().position - goal).norm();
    return 1.0 - std::clamp(final_d / std::max(initial, 1e-9), 0.0, 1.0);
  };
}

std::map<IntentKind, ExtrinsicFactory>& extrinsic_registry() {
  static std::map<IntentKind, ExtrinsicFactory> registry = {
      {IntentKind::kLaneChangeLeft, make_lane_change},
      {IntentKind::kLaneChangeRight, make_lane_change},
      {IntentKind::kMaintainSpeed, make_maintain_speed},
      {IntentKind::kYield, make_yield},
      {IntentKind::kReachPoint, make_reach_point},
  };
  return registry;
}

}  // namespace

ExtrinsicReward make_extrinsic(const Intent& intent) {
  auto& registry = extrinsic_registry();
  const auto it = registry.find(intent.kind);
  if (it == registry.end())
    throw UnknownIntent(std::string("no extrinsic reward registered for kind ") +
                        intent_kind_name(intent.kind));
  return it->second(intent);
}

void register_extrinsic(IntentKind kind, ExtrinsicFactory factory) {
  extrinsic_registry()[kind] = std::move(factory);
}

RewardBreakdown social_reward(const Trajectory& traj_i, const Trajectory& traj_j,
                              const Scenario& scenario, const SocialParams& params_i,
                              const Intent& intent_i, const IntrinsicWeights& w,
                              double collision_radius) {
  validate_social_params(params_i);
  RewardBreakdown out;
  out.intrinsic_self = intrinsic_reward(traj_i, {&traj_j}, scenario.map, w, collision_radius);
  out.intrinsic_other = intrinsic_reward(traj_j, {&traj_i}, scenario.map, w, collision_radius);
  out.extrinsic = make_extrinsic(intent_i)(traj_i, scenario);
  out.total = combine_social(params_i, out.intrinsic_self, out.intrinsic_other, out.extrinsic);
  return out;
}

double joint_reward(const Scenario& scenario, const Proposal& proposal,
                    const SocialParams& params_i, const SocialParams& params_j,
                    const IntrinsicWeights& w, double collision_radius) {
  validate_social_params(params_i);
  validate_social_params(params_j);
  const Trajectory& ti = scenario.agent(proposal.agent_i);
  const Trajectory& tj = scenario.agent(proposal.agent_j);
  const double intr_i = intrinsic_reward(ti, {&tj}, scenario.map, w, collision_radius);
  const double intr_j = intrinsic_reward(tj, {&ti}, scenario.map, w, collision_radius);
  const double ext_i = make_extrinsic(proposal.intent_i)(ti, scenario);
  const double ext_j = make_extrinsic(proposal.intent_j)(tj, scenario);
  return combine_social(params_i, intr_i, intr_j, ext_i) +
         combine_social(params_j, intr_j, intr_i, ext_j);
}

}  // namespace socialgen
