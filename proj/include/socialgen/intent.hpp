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

#ifndef SOCIALGEN_INTENT_HPP_
#define SOCIALGEN_INTENT_HPP_

#include <optional>
#include <string>

#include "socialgen/geometry.hpp"

namespace socialgen {

enum class IntentKind {
  kLaneChangeLeft,
  kLaneChangeRight,
  kMaintainSpeed,
  kYield,
  kReachPoint,
};

const char* intent_kind_name(IntentKind kind);
std::optional<IntentKind> parse_intent_kind(const std::string& name);

/// High-level maneuver instruction for one agent. Only the fields relevant
/// to `kind` are meaningful.
struct Intent {
  IntentKind kind = IntentKind::kMaintainSpeed;
  std::string target_lane_id;  // LaneChangeLeft / LaneChangeRight
  double target_speed = 0.0;   // MaintainSpeed, m/s
  std::string yield_to;        // Yield, agent id
  Vec2 goal = Vec2::Zero();    // ReachPoint, meters

  static Intent lane_change_left(std::string lane_id);
  static Intent lane_change_right(std::string lane_id);
  static Intent maintain_speed(double speed);
  static Intent yield_to_agent(std::string agent_id);
  static Intent reach_point(const Vec2& goal);
};

/// Selected agent pair plus one intent each.
struct Proposal {
  std::string agent_i;
  std::string agent_j;
  Intent intent_i;
  Intent intent_j;
  std::string rationale;
  std::string backend = "heuristic";  // heuristic | service | heuristic-fallback
};

}  // namespace socialgen

#endif  // SOCIALGEN_INTENT_HPP_
