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

#ifndef SOCIALGEN_METRICS_HPP_
#define SOCIALGEN_METRICS_HPP_

#include <string>
#include <vector>

#include "socialgen/scenario.hpp"

namespace socialgen {

inline constexpr double kDefaultCollisionRadius = 2.0;  // m, disc per vehicle
inline constexpr double kDefaultTtcThreshold = 4.0;     // s, engagement cut

/// Interaction metrics of one scenario, for a chosen agent pair.
struct MetricsReport {
  std::string scenario_id;
  double min_ttc = std::numeric_limits<double>::infinity();  // s, may be +inf
  bool engaged = false;
  double max_relative_velocity = 0.0;  // m/s
  double max_acceleration = 0.0;       // m/s^2
  double extrinsic_reward_i = 0.0;     // [0, 1]
  double extrinsic_reward_j = 0.0;     // [0, 1]
};

/// Constant-velocity disc time-to-collision: smallest t >= 0 at which discs
/// of radius r_i and r_j around the two agents touch; +inf if they never do;
/// 0 if already overlapping.
double time_to_collision(const AgentState& a, const AgentState& b, double r_i, double r_j);

/// TTC evaluated at every sampled step from the instantaneous states.
std::vector<double> ttc_profile(const Scenario& scenario, const std::string& id_i,
                                const std::string& id_j,
                                double radius = kDefaultCollisionRadius);

double min_ttc(const std::vector<double>& profile);

inline bool engagement(double min_ttc_value, double threshold = kDefaultTtcThreshold) {
  return min_ttc_value < threshold;
}

/// Percentage of engaged reports. Throws EmptyBatch for an empty batch.
double engagement_ratio(const std::vector<MetricsReport>& reports);

double max_relative_velocity(const Scenario& scenario, const std::string& id_i,
                             const std::string& id_j);

/// Max acceleration magnitude over all agents and steps.
double max_acceleration(const Scenario& scenario);

/// CSV row format: scenario_id,min_ttc,engaged,max_rel_vel,max_accel,extrinsic_i,extrinsic_j
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& report);

}  // namespace socialgen

#endif  // SOCIALGEN_METRICS_HPP_
