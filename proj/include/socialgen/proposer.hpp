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

#ifndef SOCIALGEN_PROPOSER_HPP_
#define SOCIALGEN_PROPOSER_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "socialgen/intent.hpp"
#include "socialgen/llm_gateway.hpp"
#include "socialgen/scenario.hpp"

namespace socialgen {

constexpr double kDefaultCvHorizon = 5.0;  // s

struct AgentSummary {
  std::string agent_id;
  std::string lane_id;          // nearest lane, empty without a map
  Vec2 position = Vec2::Zero();  // initial state
  double speed = 0.0;
  double heading = 0.0;
  double mean_speed = 0.0;
  double heading_offset = 0.0;  // heading minus lane tangent, 0 without a map
  double lane_offset = 0.0;     // signed lateral offset, 0 without a map
};

/// Constant-velocity pairwise features from the initial states.
struct PairFeatures {
  std::string agent_a;
  std::string agent_b;
  double distance = 0.0;
  double relative_speed = 0.0;
  double closing_speed = 0.0;  // positive while approaching
  double predicted_min_distance = 0.0;
  bool paths_cross = false;
  double predicted_ttc = 0.0;  // +inf when no collision course
  // Filled when paths_cross: where the extrapolated paths meet and when
  // each agent gets there.
  Vec2 conflict_point = Vec2::Zero();
  double time_to_conflict_a = 0.0;
  double time_to_conflict_b = 0.0;
};

struct SceneDescription {
  std::vector<AgentSummary> agents;
  std::vector<PairFeatures> pairs;  // all unordered pairs, scenario order
  double horizon_seconds = kDefaultCvHorizon;
  std::string rendered_text;
};

/// Deterministic feature extraction plus a templated text rendering.
SceneDescription describe_scene(const Scenario& scenario,
                                double horizon_seconds = kDefaultCvHorizon);

struct PairWeights {
  double w_d = 1.0;   // 1 / (1 + predicted_min_distance)
  double w_c = 0.5;   // path-crossing bonus
  double w_v = 0.05;  // per m/s of positive closing speed
};

double interaction_potential(const PairFeatures& f, const PairWeights& w = {});

/// Argmax of interaction_potential over all pairs; ties go to the
/// lexicographically smallest (agent_a, agent_b). Throws InsufficientAgents
/// when the scene has fewer than two agents.
std::pair<std::string, std::string> select_pair(const SceneDescription& desc,
                                                const PairWeights& w = {});

/// Deterministic rule-table backend. Rules, most specific first: same-lane
/// follower/leader, crossing paths, adjacent-lane converging; anything else
/// falls back to mutual MaintainSpeed with rationale "fallback".
Proposal propose_heuristic(const Scenario& scenario, const SceneDescription& desc,
                           const std::pair<std::string, std::string>& pair);

/// Extracts the first balanced JSON object from free text and validates it
/// against the proposal wire schema and the scenario. Throws NoJsonFound,
/// SchemaError, ReferenceError, or SelfPairError; each carries the offending
/// fragment.
Proposal parse_proposal_text(const std::string& text, const Scenario& scenario);

nlohmann::json proposal_to_json(const Proposal& proposal);
Proposal proposal_from_json(const nlohmann::json& j, const Scenario& scenario);

nlohmann::json intent_to_json(const Intent& intent);

enum class ProposerBackend { kHeuristic, kService };

struct ProposerConfig {
  double horizon_seconds = kDefaultCvHorizon;
  PairWeights weights;
  int max_parse_retries = 2;  // extra service attempts with error feedback
  std::string prompts_dir;    // empty = built-in templates
  const ChatGateway* gateway = nullptr;  // required for the service backend
};

/// Two-stage pipeline. The service backend sends the describe prompt, swaps
/// the rendered description for the model's reply, then sends the propose
/// prompt and parses the reply; malformed replies are retried with the parse
/// error appended, and any remaining service failure falls back to the
/// heuristic backend with the proposal marked "heuristic-fallback".
std::pair<SceneDescription, Proposal> propose(const Scenario& scenario,
                                              ProposerBackend backend,
                                              const ProposerConfig& config = {});

}  // namespace socialgen

#endif  // SOCIALGEN_PROPOSER_HPP_
