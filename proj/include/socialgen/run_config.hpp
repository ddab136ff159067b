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

#ifndef SOCIALGEN_RUN_CONFIG_HPP_
#define SOCIALGEN_RUN_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "socialgen/diffusion.hpp"
#include "socialgen/es_guidance.hpp"
#include "socialgen/llm_gateway.hpp"
#include "socialgen/social_reward.hpp"

namespace socialgen {

struct ScheduleParams {
  int timesteps = kDefaultTimesteps;
  double beta_min = kDefaultBetaMin;
  double beta_max = kDefaultBetaMax;
};

struct MetricsParams {
  double collision_radius = 2.0;  // m
  double ttc_threshold = 4.0;     // s
};

/// Effective settings of one run. Loaded from a JSON config file, then
/// overridden by command-line flags; the result is echoed to
/// run_config.resolved.json next to the other outputs.
struct RunConfig {
  std::string scenario_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;  // required by generate
  std::string backend = "heuristic";  // heuristic | service
  std::string proposal_path;          // optional pre-made proposal.json

  GatewayConfig gateway;   // api_key comes from SOCIALGEN_API_KEY
  std::string prompts_dir = "prompts";

  SocialParams social;         // applied to both generated agents
  IntrinsicWeights weights;
  GuidanceConfig guidance;     // seed field is filled from `seed` at use
  ScheduleParams schedule;
  GaussianPriorDenoiser::Config prior;
  MetricsParams metrics;

  bool joint_all = false;
  bool plot = false;
};

/// Parses and validates a config file. Unknown keys raise ParseError so
/// typos fail loudly.
RunConfig load_run_config(const std::string& path);

/// Applies a parsed JSON object onto `config` (used for file loading; flag
/// overrides are applied by the CLI afterwards).
void apply_config_json(RunConfig& config, const nlohmann::json& j);

nlohmann::json run_config_to_json(const RunConfig& config);

/// Writes run_config.resolved.json into config.out_dir.
void write_resolved_config(const RunConfig& config);

}  // namespace socialgen

#endif  // SOCIALGEN_RUN_CONFIG_HPP_
