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

#ifndef SOCIALGEN_SCENARIO_HPP_
#define SOCIALGEN_SCENARIO_HPP_

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "socialgen/geometry.hpp"

namespace socialgen {

/// Per-step vehicle state: planar position [m], scalar speed [m/s] and
/// heading [rad] in (-pi, pi].
struct AgentState {
  Vec2 position = Vec2::Zero();
  double speed = 0.0;
  double heading = 0.0;

  /// Planar velocity vector, speed * (cos heading, sin heading).
  Vec2 velocity() const { return speed * Vec2(std::cos(heading), std::sin(heading)); }
};

/// One agent's sampled state sequence at a fixed period dt.
struct Trajectory {
  std::string agent_id;
  std::vector<AgentState> states;
  double dt = 0.1;

  int size() const { return static_cast<int>(states.size()); }
  double duration() const { return (size() > 0 ? size() - 1 : 0) * dt; }

  /// Positions as a 2 x T matrix (column per step).
  Eigen::Matrix2Xd positions() const;
};

struct Lane {
  std::string id;
  Polyline centerline;
  double width = 3.5;
  double speed_limit = 10.0;
  std::vector<std::string> successors;
};

struct LaneMap {
  std::vector<Lane> lanes;

  const Lane* find(const std::string& id) const;
  bool empty() const { return lanes.empty(); }
};

/// A full scene: one trajectory per agent plus the vector map.
/// All trajectories share dt and length.
struct Scenario {
  std::vector<Trajectory> trajectories;
  LaneMap map;
  std::string metadata_json = "{}";  // free-form key/value, kept as JSON text

  int num_agents() const { return static_cast<int>(trajectories.size()); }
  int num_steps() const { return trajectories.empty() ? 0 : trajectories.front().size(); }
  double dt() const { return trajectories.empty() ? 0.1 : trajectories.front().dt; }

  const Trajectory* find_agent(const std::string& id) const;
  const Trajectory& agent(const std::string& id) const;  // throws ValidationError
};

/// Per-step derivatives of a trajectory, 2 x T each (central differences in
/// the interior, one-sided at the ends; each order differentiates the last).
struct KinematicProfile {
  Eigen::Matrix2Xd velocity;
  Eigen::Matrix2Xd acceleration;
  Eigen::Matrix2Xd jerk;
};

struct LaneProjection {
  std::string lane_id;
  double lateral_offset = 0.0;  // signed, positive left of travel direction
  double tangent_heading = 0.0;
  double arc_length = 0.0;
};

// -- validation ------------------------------------------------------------

/// Slack added to the per-step speed bound when checking that consecutive
/// positions are reachable: |p_{k+1} - p_k| <= (max(v_k, v_{k+1}) + slack)*dt.
inline constexpr double kConsistencySlack = 2.0;  // m/s

/// Throws ValidationError naming the agent and timestep on the first violated
/// invariant. Heading values are assumed normalized (the loaders do this).
void validate_scenario(const Scenario& scenario);

// -- file format -------------------------------------------------------------

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& scenario);

/// Loads and validates a scenario file. Throws ParseError for malformed
/// JSON/schema, ValidationError for invariant violations.
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

// -- derived quantities ------------------------------------------------------

KinematicProfile derive_kinematics(const Trajectory& traj);

/// Projects a point onto the nearest lane centerline (Euclidean distance to
/// the closest polyline segment). Distance ties pick the lexicographically
/// smallest lane id.
LaneProjection project_to_lane(const Vec2& point, const LaneMap& map);

}  // namespace socialgen

#endif  // SOCIALGEN_SCENARIO_HPP_
