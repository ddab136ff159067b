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

#include "socialgen/intent.hpp"

namespace socialgen {

const char* intent_kind_name(IntentKind kind) {
  switch (kind) {
    case IntentKind::kLaneChangeLeft: return "LaneChangeLeft";
    case IntentKind::kLaneChangeRight: return "LaneChangeRight";
    case IntentKind::kMaintainSpeed: return "MaintainSpeed";
    case IntentKind::kYield: return "Yield";
    case IntentKind::kReachPoint: return "ReachPoint";
  }
  return "?";
}

std::optional<IntentKind> parse_intent_kind(const std::string& name) {
  if (name == "LaneChangeLeft") return IntentKind::kLaneChangeLeft;
  if (name == "LaneChangeRight") return IntentKind::kLaneChangeRight;
  if (name == "MaintainSpeed") return IntentKind::kMaintainSpeed;
  if (name == "Yield") return IntentKind::kYield;
  if (name == "ReachPoint") return IntentKind::kReachPoint;
  return std::nullopt;
}

Intent Intent::lane_change_left(std::string lane_id) {
  Intent i;
  i.kind = IntentKind::kLaneChangeLeft;
  i.target_lane_id = std::move(lane_id);
  return i;
}

Intent Intent::lane_change_right(std::string lane_id) {
  Intent i;
  i.kind = IntentKind::kLaneChangeRight;
  i.target_lane_id = std::move(lane_id);
  return i;
}

Intent Intent::maintain_speed(double speed) {
  Intent i;
  i.kind = IntentKind::kMaintainSpeed;
  i.target_speed = speed;
  return i;
}

Intent Intent::yield_to_agent(std::string agent_id) {
  Intent i;
  i.kind = IntentKind::kYield;
  i.yield_to = std::move(agent_id);
  return i;
}

Intent Intent::reach_point(const Vec2& goal) {
  Intent i;
  i.kind = IntentKind::kReachPoint;
  i.goal = goal;
  return i;
}

}  // namespace socialgen
