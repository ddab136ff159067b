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

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "socialgen/commands.hpp"
#include "socialgen/run_config.hpp"

namespace {

// Pending flag values; only flags the user actually passed are copied onto
// the RunConfig, so config-file values survive unless overridden.
struct Flags {
  std::string scenario;
  std::string config_path;
  std::string out;
  std::string backend;
  std::string prompts_dir;
  std::string proposal;
  std::string base_url;
  std::string model;
  std::uint64_t seed = 0;
  double phi = 0.0;
  double lambda = 0.0;
  int pop = 0;
  int search_steps = 0;
  int threads = 0;
  int timesteps = 0;
  bool terminal_only = false;
  bool joint_all = false;
  bool plot = false;

  std::vector<double> phi_list;
  std::vector<double> lambda_list;
  int num_seeds = 10;
  std::string eval_dir;
};

void add_io_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--scenario", f.scenario, "input scenario JSON");
  cmd->add_option("--config", f.config_path,
                  "JSON run config; explicit flags take precedence");
  cmd->add_option("--out", f.out, "output directory (default: out)");
}

void add_proposer_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--backend", f.backend, "proposer backend: heuristic | service");
  cmd->add_option("--prompts-dir", f.prompts_dir,
                  "directory with describe.txt / propose.txt templates");
  cmd->add_option("--base-url", f.base_url, "chat service base URL");
  cmd->add_option("--model", f.model, "chat service model name");
}

void add_generation_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--proposal", f.proposal, "use this proposal.json instead of proposing");
  cmd->add_option("--phi", f.phi, "SVO angle in radians, [-pi/2, pi/2]");
  cmd->add_option("--lambda", f.lambda, "intrinsic reward scale, [0, 1]");
  cmd->add_option("--pop", f.pop, "population size M");
  cmd->add_option("--search-steps", f.search_steps, "outer renoising rounds K");
  cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
  cmd->add_option("--timesteps", f.timesteps, "diffusion steps T");
  cmd->add_flag("--terminal-only", f.terminal_only,
                "rank and resample finished samples only");
  cmd->add_flag("--joint-all", f.joint_all, "regenerate every non-frozen agent");
}

bool passed(const CLI::App* cmd, const std::string& name) {
  const CLI::Option* opt = cmd->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

socialgen::RunConfig resolve_config(const CLI::App* cmd, const Flags& f) {
  socialgen::RunConfig config;
  if (passed(cmd, "--config")) config = socialgen::load_run_config(f.config_path);
  if (passed(cmd, "--scenario")) config.scenario_path = f.scenario;
  if (passed(cmd, "--out")) config.out_dir = f.out;
  if (passed(cmd, "--backend")) config.backend = f.backend;
  if (passed(cmd, "--prompts-dir")) config.prompts_dir = f.prompts_dir;
  if (passed(cmd, "--base-url")) config.gateway.base_url = f.base_url;
  if (passed(cmd, "--model")) config.gateway.model = f.model;
  if (passed(cmd, "--proposal")) config.proposal_path = f.proposal;
  if (passed(cmd, "--seed")) config.seed = f.seed;
  if (passed(cmd, "--phi")) config.social.phi = f.phi;
  if (passed(cmd, "--lambda")) config.social.lambda = f.lambda;
  if (passed(cmd, "--pop")) config.guidance.population = f.pop;
  if (passed(cmd, "--search-steps")) config.guidance.search_steps = f.search_steps;
  if (passed(cmd, "--threads")) config.guidance.threads = f.threads;
  if (passed(cmd, "--timesteps")) config.schedule.timesteps = f.timesteps;
  if (passed(cmd, "--terminal-only")) config.guidance.terminal_only = true;
  if (passed(cmd, "--joint-all")) config.joint_all = true;
  if (passed(cmd, "--plot")) config.plot = true;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"socialgen: social-aware driving scenario generation"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* propose = app.add_subcommand(
      "propose", "select an agent pair and one intent each");
  add_io_flags(propose, f);
  add_proposer_flags(propose, f);

  CLI::App* generate = app.add_subcommand(
      "generate", "search-guided diffusion rollout of the proposal");
  add_io_flags(generate, f);
  add_proposer_flags(generate, f);
  add_generation_flags(generate, f);
  generate->add_option("--seed", f.seed, "base RNG seed (required)");
  generate->add_flag("--plot", f.plot, "also write an SVG rendering");

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "interaction metrics for every scenario in a directory");
  evaluate->add_option("dir", f.eval_dir, "directory of scenario JSON files")
      ->required();
  evaluate->add_option("--config", f.config_path,
                       "JSON run config; explicit flags take precedence");
  evaluate->add_option("--out", f.out, "output directory (default: out)");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "batch generation over a (phi, lambda) grid");
  add_io_flags(sweep, f);
  add_proposer_flags(sweep, f);
  add_generation_flags(sweep, f);
  sweep->add_option("--seed", f.seed, "base RNG seed (cell runs use seed + s)");
  sweep->add_option("--phi-list", f.phi_list, "comma-separated SVO angles")
      ->delimiter(',')
      ->required();
  sweep->add_option("--lambda-list", f.lambda_list, "comma-separated scales")
      ->delimiter(',')
      ->required();
  sweep->add_option("--num-seeds", f.num_seeds, "seeds per grid cell")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? socialgen::kExitOk : socialgen::kExitInput;
  }

  try {
    if (propose->parsed()) {
      return socialgen::cmd_propose(resolve_config(propose, f));
    }
    if (generate->parsed()) {
      return socialgen::cmd_generate(resolve_config(generate, f));
    }
    if (evaluate->parsed()) {
      return socialgen::cmd_evaluate(resolve_config(evaluate, f), f.eval_dir);
    }
    if (sweep->parsed()) {
      return socialgen::cmd_sweep(resolve_config(sweep, f), f.phi_list,
                                  f.lambda_list, f.num_seeds);
    }
  } catch (const std::exception& e) {
    // resolve_config failures (bad config file / flag values).
    std::cerr << "error: " << e.what() << '\n';
    return socialgen::kExitInput;
  }
  return socialgen::kExitInput;
}
