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

#include "socialgen/run_config.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace socialgen {

namespace {

using nlohmann::json;

void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                 const std::string& where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ParseError("unknown config key \"" + item.key() + "\" in " + where);
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T* out) {
  if (j.contains(key)) *out = j.at(key).get<T>();
}

}  // namespace

void apply_config_json(RunConfig& config, const json& j) {
  if (!j.is_object()) throw ParseError("config root must be a JSON object");
  expect_keys(j,
              {"scenario", "out", "seed", "backend", "proposal", "gateway",
               "prompts_dir", "social", "weights", "guidance", "schedule",
               "prior", "metrics", "joint_all", "plot"},
              "config root");
  read(j, "scenario", &config.scenario_path);
  read(j, "out", &config.out_dir);
  if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  read(j, "backend", &config.backend);
  read(j, "proposal", &config.proposal_path);
  read(j, "prompts_dir", &config.prompts_dir);
  read(j, "joint_all", &config.joint_all);
  read(j, "plot", &config.plot);

  if (j.contains("gateway")) {
    const json& g = j.at("gateway");
    expect_keys(g, {"base_url", "model", "timeout", "max_retries", "temperature"},
                "gateway");
    read(g, "base_url", &config.gateway.base_url);
    read(g, "model", &config.gateway.model);
    read(g, "timeout", &config.gateway.timeout_seconds);
    read(g, "max_retries", &config.gateway.max_retries);
    read(g, "temperature", &config.gateway.temperature);
  }
  if (j.contains("social")) {
    const json& s = j.at("social");
    expect_keys(s, {"phi", "lambda"}, "social");
    read(s, "phi", &config.social.phi);
    read(s, "lambda", &config.social.lambda);
  }
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    expect_keys(w,
                {"w_lane", "w_speed", "w_heading", "w_comfort", "w_safety",
                 "ttc_safe", "accel_ref", "jerk_ref"},
                "weights");
    read(w, "w_lane", &config.weights.w_lane);
    read(w, "w_speed", &config.weights.w_speed);
    read(w, "w_heading", &config.weights.w_heading);
    read(w, "w_comfort", &config.weights.w_comfort);
    read(w, "w_safety", &config.weights.w_safety);
    read(w, "ttc_safe", &config.weights.ttc_safe);
    read(w, "accel_ref", &config.weights.accel_ref);
    read(w, "jerk_ref", &config.weights.jerk_ref);
  }
  if (j.contains("guidance")) {
    const json& g = j.at("guidance");
    expect_keys(g,
                {"population", "search_steps", "tau_low", "tau_high",
                 "renoise_fraction", "terminal_only", "threads", "init"},
                "guidance");
    read(g, "population", &config.guidance.population);
    read(g, "search_steps", &config.guidance.search_steps);
    read(g, "tau_low", &config.guidance.tau_low);
    read(g, "tau_high", &config.guidance.tau_high);
    read(g, "renoise_fraction", &config.guidance.renoise_fraction);
    read(g, "terminal_only", &config.guidance.terminal_only);
    read(g, "threads", &config.guidance.threads);
    if (g.contains("init")) {
      const std::string init = g.at("init").get<std::string>();
      if (init == "prior") {
        config.guidance.init = InitMode::kPriorNoised;
      } else if (init == "noise") {
        config.guidance.init = InitMode::kPureNoise;
      } else {
        throw ParseError("guidance.init must be \"prior\" or \"noise\"");
      }
    }
  }
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    expect_keys(s, {"timesteps", "beta_min", "beta_max"}, "schedule");
    read(s, "timesteps", &config.schedule.timesteps);
    read(s, "beta_min", &config.schedule.beta_min);
    read(s, "beta_max", &config.schedule.beta_max);
  }
  if (j.contains("prior")) {
    const json& p = j.at("prior");
    expect_keys(p, {"lambda_smooth", "eps", "horizon"}, "prior");
    read(p, "lambda_smooth", &config.prior.lambda_smooth);
    read(p, "eps", &config.prior.eps);
    read(p, "horizon", &config.prior.horizon);
  }
  if (j.contains("metrics")) {
    const json& m = j.at("metrics");
    expect_keys(m, {"collision_radius", "ttc_threshold"}, "metrics");
    read(m, "collision_radius", &config.metrics.collision_radius);
    read(m, "ttc_threshold", &config.metrics.ttc_threshold);
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("config file " + path + " is not valid JSON: " + e.what());
  }
  RunConfig config;
  apply_config_json(config, j);
  return config;
}

json run_config_to_json(const RunConfig& config) {
  json j;
  j["scenario"] = config.scenario_path;
  j["out"] = config.out_dir;
  if (config.seed) j["seed"] = *config.seed;
  j["backend"] = config.backend;
  if (!config.proposal_path.empty()) j["proposal"] = config.proposal_path;
  j["prompts_dir"] = config.prompts_dir;
  j["joint_all"] = config.joint_all;
  j["plot"] = config.plot;
  j["gateway"] = {{"base_url", config.gateway.base_url},
                  {"model", config.gateway.model},
                  {"timeout", config.gateway.timeout_seconds},
                  {"max_retries", config.gateway.max_retries},
                  {"temperature", config.gateway.temperature}};
  j["social"] = {{"phi", config.social.phi}, {"lambda", config.social.lambda}};
  j["weights"] = {{"w_lane", config.weights.w_lane},
                  {"w_speed", config.weights.w_speed},
                  {"w_heading", config.weights.w_heading},
                  {"w_comfort", config.weights.w_comfort},
                  {"w_safety", config.weights.w_safety},
                  {"ttc_safe", config.weights.ttc_safe},
                  {"accel_ref", config.weights.accel_ref},
                  {"jerk_ref", config.weights.jerk_ref}};
  j["guidance"] = {
      {"population", config.guidance.population},
      {"search_steps", config.guidance.search_steps},
      {"tau_low", config.guidance.tau_low},
      {"tau_high", config.guidance.tau_high},
      {"renoise_fraction", config.guidance.renoise_fraction},
      {"terminal_only", config.guidance.terminal_only},
      {"threads", config.guidance.threads},
      {"init", config.guidance.init == InitMode::kPriorNoised ? "prior" : "noise"}};
  j["schedule"] = {{"timesteps", config.schedule.timesteps},
                   {"beta_min", config.schedule.beta_min},
                   {"beta_max", config.schedule.beta_max}};
  j["prior"] = {{"lambda_smooth", config.prior.lambda_smooth},
                {"eps", config.prior.eps},
                {"horizon", config.prior.horizon}};
  j["metrics"] = {{"collision_radius", config.metrics.collision_radius},
                  {"ttc_threshold", config.metrics.ttc_threshold}};
  return j;
}

void write_resolved_config(const RunConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  const std::string path =
      (std::filesystem::path(config.out_dir) / "run_config.resolved.json").string();
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  out << run_config_to_json(config).dump(2) << '\n';
}

}  // namespace socialgen
