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

#include "socialgen/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>

#include <nlohmann/json.hpp>

#include "socialgen/metrics.hpp"
#include "socialgen/proposer.hpp"
#include "socialgen/svg_plot.hpp"

namespace socialgen {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int guard(const std::function<int()>& body) {
  try {
    return body();
  } catch (const NonFiniteReward& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const SolverFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const GatewayError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitGateway;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  out << content;
}

Scenario load_input_scenario(const RunConfig& config) {
  if (config.scenario_path.empty()) {
    throw ValidationError("no scenario given (--scenario or config \"scenario\")");
  }
  return load_scenario(config.scenario_path);
}

ProposerBackend parse_backend(const std::string& name) {
  if (name == "heuristic") return ProposerBackend::kHeuristic;
  if (name == "service") return ProposerBackend::kService;
  throw ValidationError("backend must be \"heuristic\" or \"service\", got \"" +
                        name + "\"");
}

std::unique_ptr<ChatGateway> build_gateway(const RunConfig& config) {
  GatewayConfig gc = config.gateway;
  if (const char* key = std::getenv(kApiKeyEnvVar)) gc.api_key = key;
  return std::make_unique<ChatGateway>(std::move(gc));
}

struct ProposalBundle {
  SceneDescription description;
  Proposal proposal;
};

ProposalBundle obtain_proposal(const Scenario& scenario, const RunConfig& config) {
  ProposalBundle bundle;
  if (!config.proposal_path.empty()) {
    std::ifstream in(config.proposal_path);
    if (!in) throw ParseError("cannot open proposal file: " + config.proposal_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ParseError("proposal file is not valid JSON: " + std::string(e.what()));
    }
    bundle.proposal = proposal_from_json(j, scenario);
    bundle.description = describe_scene(scenario);
    return bundle;
  }
  const ProposerBackend backend = parse_backend(config.backend);
  ProposerConfig pc;
  pc.prompts_dir = config.prompts_dir;
  std::unique_ptr<ChatGateway> gateway;
  if (backend == ProposerBackend::kService) {
    gateway = build_gateway(config);
    pc.gateway = gateway.get();
  }
  auto [desc, proposal] = propose(scenario, backend, pc);
  bundle.description = std::move(desc);
  bundle.proposal = std::move(proposal);
  return bundle;
}

MetricsReport make_report(const Scenario& scenario, const Proposal& proposal,
                          const MetricsParams& params, const std::string& id) {
  MetricsReport report;
  report.scenario_id = id;
  report.min_ttc = min_ttc(ttc_profile(scenario, proposal.agent_i,
                                       proposal.agent_j, params.collision_radius));
  report.engaged = engagement(report.min_ttc, params.ttc_threshold);
  report.max_relative_velocity =
      max_relative_velocity(scenario, proposal.agent_i, proposal.agent_j);
  report.max_acceleration = max_acceleration(scenario);
  report.extrinsic_reward_i =
      make_extrinsic(proposal.intent_i)(scenario.agent(proposal.agent_i), scenario);
  report.extrinsic_reward_j =
      make_extrinsic(proposal.intent_j)(scenario.agent(proposal.agent_j), scenario);
  return report;
}

std::string describe_intent(const Intent& intent) {
  std::string out = intent_kind_name(intent.kind);
  switch (intent.kind) {
    case IntentKind::kLaneChangeLeft:
    case IntentKind::kLaneChangeRight:
      out += "(" + intent.target_lane_id + ")";
      break;
    case IntentKind::kMaintainSpeed:
      out += "(" + fmt(intent.target_speed) + " m/s)";
      break;
    case IntentKind::kYield:
      out += "(to " + intent.yield_to + ")";
      break;
    case IntentKind::kReachPoint:
      out += "(" + fmt(intent.goal.x()) + ", " + fmt(intent.goal.y()) + ")";
      break;
  }
  return out;
}

}  // namespace

int cmd_propose(const RunConfig& config) {
  return guard([&] {
    const Scenario scenario = load_input_scenario(config);
    ProposerConfig pc;
    pc.prompts_dir = config.prompts_dir;
    const ProposerBackend backend = parse_backend(config.backend);
    std::unique_ptr<ChatGateway> gateway;
    if (backend == ProposerBackend::kService) {
      gateway = build_gateway(config);
      pc.gateway = gateway.get();
    }
    const auto [desc, proposal] = propose(scenario, backend, pc);
    fs::create_directories(config.out_dir);
    write_text_file(fs::path(config.out_dir) / "proposal.json",
                    proposal_to_json(proposal).dump(2) + "\n");
    write_text_file(fs::path(config.out_dir) / "description.txt", desc.rendered_text);
    write_resolved_config(config);
    std::cout << "proposal [" << proposal.backend << "]: " << proposal.agent_i
              << " " << describe_intent(proposal.intent_i) << " | "
              << proposal.agent_j << " " << describe_intent(proposal.intent_j)
              << " | " << proposal.rationale << '\n';
    return kExitOk;
  });
}

int cmd_generate(const RunConfig& config) {
  return guard([&] {
    if (!config.seed) {
      throw ValidationError("generate requires a seed (--seed or config \"seed\")");
    }
    const Scenario scenario = load_input_scenario(config);
    const ProposalBundle bundle = obtain_proposal(scenario, config);
    const DiffusionSchedule schedule = make_schedule(
        config.schedule.timesteps, config.schedule.beta_min, config.schedule.beta_max);
    GuidanceConfig guidance = config.guidance;
    guidance.seed = *config.seed;

    GenerationResult result =
        guided_sample(scenario, bundle.proposal, config.social, config.social,
                      guidance, schedule, config.joint_all, config.prior,
                      config.weights);
    validate_scenario(result.scenario);

    json meta = json::parse(result.scenario.metadata_json);
    meta["proposal"] = proposal_to_json(bundle.proposal);
    meta["social"] = {{"phi", config.social.phi}, {"lambda", config.social.lambda}};
    meta["seed"] = *config.seed;
    meta["best_reward"] = result.best_reward;
    result.scenario.metadata_json = meta.dump();

    fs::create_directories(config.out_dir);
    const fs::path out(config.out_dir);
    save_scenario(result.scenario, (out / "generated_scenario.json").string());
    std::ofstream trace(out / "trace.csv");
    write_trace_csv(trace, result.trace);
    const MetricsReport report = make_report(result.scenario, bundle.proposal,
                                             config.metrics, "generated_scenario");
    write_text_file(out / "metrics.csv",
                    metrics_csv_header() + "\n" + metrics_csv_row(report) + "\n");
    if (config.plot) {
      write_scenario_svg(result.scenario, (out / "generated_scenario.svg").string(),
                         bundle.proposal.agent_i, bundle.proposal.agent_j);
    }
    write_resolved_config(config);
    std::cout << "best reward " << fmt(result.best_reward) << ", min TTC "
              << fmt(report.min_ttc) << " s, engaged "
              << (report.engaged ? "yes" : "no") << ", wrote "
              << (out / "generated_scenario.json").string() << '\n';
    return kExitOk;
  });
}

int cmd_evaluate(const RunConfig& config, const std::string& dir) {
  return guard([&] {
    if (!fs::is_directory(dir)) {
      throw ValidationError("not a directory: " + dir);
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());

    std::vector<MetricsReport> reports;
    for (const fs::path& file : files) {
      Scenario scenario;
      try {
        scenario = load_scenario(file.string());
      } catch (const Error& e) {
        std::cerr << "warning: skipping " << file.string() << ": " << e.what()
                  << '\n';
        continue;
      }
      std::optional<Proposal> proposal;
      const json meta = json::parse(scenario.metadata_json);
      if (meta.contains("proposal")) {
        try {
          proposal = proposal_from_json(meta["proposal"], scenario);
        } catch (const Error& e) {
          std::cerr << "warning: bad proposal metadata in " << file.string()
                    << ": " << e.what() << '\n';
        }
      }
      if (!proposal) {
        if (scenario.num_agents() < 2) {
          std::cerr << "warning: skipping " << file.string()
                    << ": fewer than two agents and no proposal metadata\n";
          continue;
        }
        const SceneDescription desc = describe_scene(scenario);
        proposal = propose_heuristic(scenario, desc, select_pair(desc));
      }
      reports.push_back(
          make_report(scenario, *proposal, config.metrics, file.stem().string()));
    }
    if (reports.empty()) {
      throw ValidationError("no usable scenario files in " + dir);
    }

    std::string csv = metrics_csv_header() + "\n";
    std::cout << metrics_csv_header() << '\n';
    for (const MetricsReport& r : reports) {
      csv += metrics_csv_row(r) + "\n";
      std::cout << metrics_csv_row(r) << '\n';
    }
    fs::create_directories(config.out_dir);
    write_text_file(fs::path(config.out_dir) / "metrics.csv", csv);
    int engaged = 0;
    for (const MetricsReport& r : reports) engaged += r.engaged ? 1 : 0;
    std::cout << "engagement ratio: " << fmt(engagement_ratio(reports)) << "% ("
              << engaged << "/" << reports.size() << ")\n";
    return kExitOk;
  });
}

int cmd_sweep(const RunConfig& config, const std::vector<double>& phi_list,
              const std::vector<double>& lambda_list, int num_seeds) {
  return guard([&] {
    if (phi_list.empty() || lambda_list.empty()) {
      throw ValidationError("sweep needs non-empty --phi-list and --lambda-list");
    }
    if (num_seeds < 1) throw ValidationError("sweep needs --num-seeds >= 1");
    const Scenario scenario = load_input_scenario(config);
    const ProposalBundle bundle = obtain_proposal(scenario, config);
    const DiffusionSchedule schedule = make_schedule(
        config.schedule.timesteps, config.schedule.beta_min, config.schedule.beta_max);
    const std::uint64_t base_seed = config.seed.value_or(0);

    std::string csv =
        "phi,lambda,seeds,failures,engagement_pct,mean_max_accel,mean_extrinsic,"
        "mean_best_reward\n";
    std::cout << "phi,lambda,seeds,failures,engagement_pct,mean_max_accel,"
                 "mean_extrinsic,mean_best_reward\n";
    int total_successes = 0;
    std::exception_ptr first_error;
    for (const double phi : phi_list) {
      for (const double lambda : lambda_list) {
        int engaged = 0;
        int successes = 0;
        double sum_accel = 0.0;
        double sum_extrinsic = 0.0;
        double sum_best = 0.0;
        for (int s = 0; s < num_seeds; ++s) {
          try {
            SocialParams social;
            social.phi = phi;
            social.lambda = lambda;
            GuidanceConfig guidance = config.guidance;
            guidance.seed = base_seed + static_cast<std::uint64_t>(s);
            const GenerationResult result = guided_sample(
                scenario, bundle.proposal, social, social, guidance, schedule,
                config.joint_all, config.prior, config.weights);
            const MetricsReport report = make_report(
                result.scenario, bundle.proposal, config.metrics, "cell");
            engaged += report.engaged ? 1 : 0;
            sum_accel += report.max_acceleration;
            sum_extrinsic +=
                0.5 * (report.extrinsic_reward_i + report.extrinsic_reward_j);
            sum_best += result.best_reward;
            ++successes;
          } catch (const Error& e) {
            std::cerr << "warning: cell (phi=" << fmt(phi)
                      << ", lambda=" << fmt(lambda) << ") seed "
                      << base_seed + static_cast<std::uint64_t>(s)
                      << " failed: " << e.what() << '\n';
            if (!first_error) first_error = std::current_exception();
          }
        }
        total_successes += successes;
        std::string row = fmt(phi) + "," + fmt(lambda) + "," +
                          std::to_string(successes) + "," +
                          std::to_string(num_seeds - successes) + ",";
        if (successes > 0) {
          row += fmt(100.0 * engaged / successes) + "," +
                 fmt(sum_accel / successes) + "," +
                 fmt(sum_extrinsic / successes) + "," + fmt(sum_best / successes);
        } else {
          row += "nan,nan,nan,nan";
        }
        csv += row + "\n";
        std::cout << row << '\n';
      }
    }
    fs::create_directories(config.out_dir);
    write_text_file(fs::path(config.out_dir) / "sweep.csv", csv);
    write_resolved_config(config);
    if (total_successes == 0 && first_error) std::rethrow_exception(first_error);
    return kExitOk;
  });
}

}  // namespace socialgen
