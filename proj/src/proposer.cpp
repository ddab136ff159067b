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

#include "socialgen/proposer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "socialgen/metrics.hpp"

namespace socialgen {

namespace {

using nlohmann::json;

std::string fmt(const char* spec, double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string replace_all(std::string text, const std::string& needle,
                        const std::string& value) {
  size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), value);
    pos += value.size();
  }
  return text;
}

std::string truncate_fragment(const std::string& text, size_t limit = 300) {
  if (text.size() <= limit) return text;
  return text.substr(0, limit) + "...";
}

const AgentSummary& summary_of(const SceneDescription& desc, const std::string& id) {
  for (const AgentSummary& s : desc.agents) {
    if (s.agent_id == id) return s;
  }
  throw ValidationError("agent not present in scene description: " + id);
}

const PairFeatures* pair_of(const SceneDescription& desc, const std::string& a,
                            const std::string& b) {
  for (const PairFeatures& f : desc.pairs) {
    if ((f.agent_a == a && f.agent_b == b) || (f.agent_a == b && f.agent_b == a)) {
      return &f;
    }
  }
  return nullptr;
}

Vec2 heading_dir(double heading) {
  return Vec2(std::cos(heading), std::sin(heading));
}

constexpr double kGoalLead = 10.0;  // m past the reference point

constexpr const char* kDefaultDescribePrompt = R"(You are a traffic-scene analyst. Below is a structured summary of a recorded
driving scene. Rewrite it as one concise natural-language paragraph that
captures the dynamic features relevant to interaction: who is near whom,
closing speeds, crossing paths, and likely conflict points.

{scenario_summary}

Reply with the paragraph only.
)";

constexpr const char* kDefaultProposePrompt = R"(You are a strategic traffic-scenario designer. Given the scene description
below, pick the pair of vehicles with the highest potential for social
interaction and give each an adversarial but human-like intent.

Scene description:
{scene_description}

Reply with exactly one JSON object and nothing else, following this schema:
{"agent_i": "<id>", "agent_j": "<id>",
 "intent_i": {"kind": "<LaneChangeLeft|LaneChangeRight|MaintainSpeed|Yield|ReachPoint>", ...},
 "intent_j": {"kind": "..."},
 "rationale": "<one sentence>"}
Parameter field by kind: LaneChangeLeft/LaneChangeRight take "target_lane_id"
(a lane id from the scene), MaintainSpeed takes "target_speed" in m/s, Yield
takes "yield_to" (the other agent's id), ReachPoint takes "goal" as [x, y] in
meters.
)";

std::string load_template(const std::string& prompts_dir, const std::string& name,
                          const char* fallback) {
  if (!prompts_dir.empty()) {
    std::ifstream in(prompts_dir + "/" + name);
    if (in) {
      std::ostringstream buf;
      buf << in.rdbuf();
      if (!buf.str().empty()) return buf.str();
    }
  }
  return fallback;
}

}  // namespace

SceneDescription describe_scene(const Scenario& scenario, double horizon_seconds) {
  if (!(horizon_seconds > 0.0)) throw ValidationError("describe_scene needs horizon > 0");
  SceneDescription desc;
  desc.horizon_seconds = horizon_seconds;

  for (const Trajectory& traj : scenario.trajectories) {
    AgentSummary s;
    s.agent_id = traj.agent_id;
    const AgentState& first = traj.states.front();
    s.position = first.position;
    s.speed = first.speed;
    s.heading = first.heading;
    double sum = 0.0;
    for (const AgentState& st : traj.states) sum += st.speed;
    s.mean_speed = sum / traj.size();
    if (!scenario.map.empty()) {
      const LaneProjection proj = project_to_lane(first.position, scenario.map);
      s.lane_id = proj.lane_id;
      s.lane_offset = proj.lateral_offset;
      s.heading_offset = normalize_angle(first.heading - proj.tangent_heading);
    }
    desc.agents.push_back(std::move(s));
  }

  const int n = scenario.num_agents();
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const AgentState& sa = scenario.trajectories[a].states.front();
      const AgentState& sb = scenario.trajectories[b].states.front();
      PairFeatures f;
      f.agent_a = scenario.trajectories[a].agent_id;
      f.agent_b = scenario.trajectories[b].agent_id;
      const Vec2 dp = sb.position - sa.position;
      const Vec2 dv = sb.velocity() - sa.velocity();
      f.distance = dp.norm();
      f.relative_speed = dv.norm();
      f.closing_speed = f.distance > 1e-9 ? -dp.dot(dv) / f.distance : 0.0;
      const double dv2 = dv.squaredNorm();
      double s_star = 0.0;
      if (dv2 > 0.0) s_star = std::clamp(-dp.dot(dv) / dv2, 0.0, horizon_seconds);
      f.predicted_min_distance = (dp + s_star * dv).norm();
      const Vec2 ea = sa.position + horizon_seconds * sa.velocity();
      const Vec2 eb = sb.position + horizon_seconds * sb.velocity();
      const auto hit = segment_intersection(sa.position, ea, sb.position, eb);
      if (hit) {
        f.paths_cross = true;
        f.conflict_point = sa.position + hit->first * (ea - sa.position);
        f.time_to_conflict_a = hit->first * horizon_seconds;
        f.time_to_conflict_b = hit->second * horizon_seconds;
      }
      f.predicted_ttc =
          time_to_collision(sa, sb, kDefaultCollisionRadius, kDefaultCollisionRadius);
      desc.pairs.push_back(std::move(f));
    }
  }

  std::ostringstream text;
  text << "Scene with " << n << (n == 1 ? " agent" : " agents") << " over "
       << fmt("%.1f", scenario.trajectories.front().duration()) << " s (dt = "
       << fmt("%.2f", scenario.dt()) << " s).\nAgents:\n";
  for (const AgentSummary& s : desc.agents) {
    text << "- " << s.agent_id << ": lane "
         << (s.lane_id.empty() ? "none" : s.lane_id) << ", position ("
         << fmt("%.1f", s.position.x()) << ", " << fmt("%.1f", s.position.y())
         << ") m, heading " << fmt("%.3f", s.heading) << " rad, speed "
         << fmt("%.1f", s.speed) << " m/s, mean speed "
         << fmt("%.1f", s.mean_speed) << " m/s, lane offset "
         << fmt("%+.1f", s.lane_offset) << " m, heading offset "
         << fmt("%+.3f", s.heading_offset) << " rad.\n";
  }
  if (!desc.pairs.empty()) {
    text << "Pairs:\n";
    for (const PairFeatures& f : desc.pairs) {
      text << "- " << f.agent_a << "|" << f.agent_b << ": distance "
           << fmt("%.1f", f.distance) << " m, closing speed "
           << fmt("%.1f", f.closing_speed) << " m/s, predicted min distance "
           << fmt("%.1f", f.predicted_min_distance) << " m within "
           << fmt("%.0f", horizon_seconds) << " s, paths cross "
           << (f.paths_cross ? "yes" : "no") << ", predicted TTC "
           << fmt("%.1f", f.predicted_ttc) << " s.\n";
    }
  }
  desc.rendered_text = text.str();
  return desc;
}

double interaction_potential(const PairFeatures& f, const PairWeights& w) {
  return w.w_d / (1.0 + f.predicted_min_distance) +
         w.w_c * (f.paths_cross ? 1.0 : 0.0) +
         w.w_v * std::max(f.closing_speed, 0.0);
}

std::pair<std::string, std::string> select_pair(const SceneDescription& desc,
                                                const PairWeights& w) {
  if (desc.agents.size() < 2 || desc.pairs.empty()) {
    throw InsufficientAgents("pair selection needs at least two agents");
  }
  const PairFeatures* best = nullptr;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const PairFeatures& f : desc.pairs) {
    const double score = interaction_potential(f, w);
    const bool wins =
        score > best_score ||
        (score == best_score &&
         std::make_pair(f.agent_a, f.agent_b) <
             std::make_pair(best->agent_a, best->agent_b));
    if (wins) {
      best = &f;
      best_score = score;
    }
  }
  return {best->agent_a, best->agent_b};
}

Proposal propose_heuristic(const Scenario& scenario, const SceneDescription& desc,
                           const std::pair<std::string, std::string>& pair) {
  const AgentSummary& a = summary_of(desc, pair.first);
  const AgentSummary& b = summary_of(desc, pair.second);
  const PairFeatures* features = pair_of(desc, pair.first, pair.second);

  Proposal p;
  p.backend = "heuristic";

  // Same lane: the follower tries to get ahead, the leader holds its speed.
  if (!a.lane_id.empty() && a.lane_id == b.lane_id) {
    const Lane* lane = scenario.map.find(a.lane_id);
    const double arc_a = project_to_polyline(a.position, lane->centerline).arc_length;
    const double arc_b = project_to_polyline(b.position, lane->centerline).arc_length;
    const AgentSummary& leader = arc_b > arc_a ? b : a;
    const AgentSummary& follower = arc_b > arc_a ? a : b;
    const Vec2 goal = leader.position +
                      desc.horizon_seconds * leader.speed * heading_dir(leader.heading) +
                      kGoalLead * heading_dir(leader.heading);
    p.agent_i = follower.agent_id;
    p.agent_j = leader.agent_id;
    p.intent_i = Intent::reach_point(goal);
    p.intent_j = Intent::maintain_speed(leader.speed);
    p.rationale = "same-lane follower/leader";
    return p;
  }

  // Crossing paths: first to the conflict point pushes through, the other
  // yields to it.
  if (features != nullptr && features->paths_cross) {
    const bool a_first = features->agent_a == a.agent_id
                             ? features->time_to_conflict_a <= features->time_to_conflict_b
                             : features->time_to_conflict_b <= features->time_to_conflict_a;
    const AgentSummary& runner = a_first ? a : b;
    const AgentSummary& yielder = a_first ? b : a;
    const Vec2 goal = features->conflict_point + kGoalLead * heading_dir(runner.heading);
    p.agent_i = runner.agent_id;
    p.agent_j = yielder.agent_id;
    p.intent_i = Intent::reach_point(goal);
    p.intent_j = Intent::yield_to_agent(runner.agent_id);
    p.rationale = "crossing paths";
    return p;
  }

  // Adjacent lanes, converging: the agent ahead cuts into the other's lane.
  if (!a.lane_id.empty() && !b.lane_id.empty() && a.lane_id != b.lane_id &&
      features != nullptr && features->closing_speed > 0.0) {
    const AgentState sa{a.position, a.speed, a.heading};
    const AgentState sb{b.position, b.speed, b.heading};
    Vec2 dir = sa.velocity() + sb.velocity();
    if (dir.norm() < 1e-9) dir = heading_dir(a.heading);
    dir.normalize();
    const bool b_ahead = (b.position - a.position).dot(dir) > 0.0;
    const AgentSummary& ahead = b_ahead ? b : a;
    const AgentSummary& behind = b_ahead ? a : b;
    const Lane* target = scenario.map.find(behind.lane_id);
    const double lateral =
        project_to_polyline(ahead.position, target->centerline).signed_lateral;
    p.agent_i = ahead.agent_id;
    p.agent_j = behind.agent_id;
    p.intent_i = lateral > 0.0 ? Intent::lane_change_right(behind.lane_id)
                               : Intent::lane_change_left(behind.lane_id);
    p.intent_j = Intent::maintain_speed(behind.speed);
    p.rationale = "adjacent-lane converging";
    return p;
  }

  p.agent_i = a.agent_id;
  p.agent_j = b.agent_id;
  p.intent_i = Intent::maintain_speed(a.speed);
  p.intent_j = Intent::maintain_speed(b.speed);
  p.rationale = "fallback";
  return p;
}

namespace {

Intent intent_from_json_checked(const json& j, const Scenario& scenario,
                                const std::string& fragment, const char* field) {
  if (!j.is_object()) {
    throw SchemaError(std::string(field) + " must be an object", fragment);
  }
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw SchemaError(std::string(field) + " is missing a string \"kind\"", fragment);
  }
  const std::string kind_name = j["kind"].get<std::string>();
  const std::optional<IntentKind> kind = parse_intent_kind(kind_name);
  if (!kind) {
    throw SchemaError("unknown intent kind \"" + kind_name + "\"", fragment);
  }
  switch (*kind) {
    case IntentKind::kLaneChangeLeft:
    case IntentKind::kLaneChangeRight: {
      if (!j.contains("target_lane_id") || !j["target_lane_id"].is_string()) {
        throw SchemaError(kind_name + " needs a string \"target_lane_id\"", fragment);
      }
      const std::string lane = j["target_lane_id"].get<std::string>();
      if (scenario.map.find(lane) == nullptr) {
        throw ReferenceError("unknown lane id \"" + lane + "\"", fragment);
      }
      return *kind == IntentKind::kLaneChangeLeft ? Intent::lane_change_left(lane)
                                                  : Intent::lane_change_right(lane);
    }
    case IntentKind::kMaintainSpeed: {
      if (!j.contains("target_speed") || !j["target_speed"].is_number()) {
        throw SchemaError("MaintainSpeed needs a numeric \"target_speed\"", fragment);
      }
      const double speed = j["target_speed"].get<double>();
      if (!std::isfinite(speed) || speed < 0.0) {
        throw SchemaError("target_speed must be finite and >= 0", fragment);
      }
      return Intent::maintain_speed(speed);
    }
    case IntentKind::kYield: {
      if (!j.contains("yield_to") || !j["yield_to"].is_string()) {
        throw SchemaError("Yield needs a string \"yield_to\"", fragment);
      }
      const std::string other = j["yield_to"].get<std::string>();
      if (scenario.find_agent(other) == nullptr) {
        throw ReferenceError("unknown agent id \"" + other + "\" in yield_to", fragment);
      }
      return Intent::yield_to_agent(other);
    }
    case IntentKind::kReachPoint: {
      if (!j.contains("goal") || !j["goal"].is_array() || j["goal"].size() != 2 ||
          !j["goal"][0].is_number() || !j["goal"][1].is_number()) {
        throw SchemaError("ReachPoint needs \"goal\" as [x, y]", fragment);
      }
      const Vec2 goal(j["goal"][0].get<double>(), j["goal"][1].get<double>());
      if (!goal.allFinite()) throw SchemaError("goal must be finite", fragment);
      return Intent::reach_point(goal);
    }
  }
  throw SchemaError("unhandled intent kind", fragment);
}

Proposal proposal_from_json_impl(const json& j, const Scenario& scenario,
                                 const std::string& fragment) {
  if (!j.is_object()) throw SchemaError("proposal must be a JSON object", fragment);
  for (const char* field : {"agent_i", "agent_j"}) {
    if (!j.contains(field) || !j[field].is_string()) {
      throw SchemaError("proposal is missing a string \"" + std::string(field) + "\"",
                        fragment);
    }
  }
  if (!j.contains("intent_i") || !j.contains("intent_j")) {
    throw SchemaError("proposal needs intent_i and intent_j", fragment);
  }
  Proposal p;
  p.agent_i = j["agent_i"].get<std::string>();
  p.agent_j = j["agent_j"].get<std::string>();
  if (p.agent_i == p.agent_j) {
    throw SelfPairError("agent_i and agent_j are both \"" + p.agent_i + "\"", fragment);
  }
  for (const std::string& id : {p.agent_i, p.agent_j}) {
    if (scenario.find_agent(id) == nullptr) {
      throw ReferenceError("unknown agent id \"" + id + "\"", fragment);
    }
  }
  p.intent_i = intent_from_json_checked(j["intent_i"], scenario, fragment, "intent_i");
  p.intent_j = intent_from_json_checked(j["intent_j"], scenario, fragment, "intent_j");
  if (j.contains("rationale")) {
    if (!j["rationale"].is_string()) {
      throw SchemaError("rationale must be a string", fragment);
    }
    p.rationale = j["rationale"].get<std::string>();
  }
  if (j.contains("backend") && j["backend"].is_string()) {
    p.backend = j["backend"].get<std::string>();
  }
  return p;
}

// First balanced brace-delimited substring that parses as JSON, skipping
// braces inside string literals.
std::optional<std::string> extract_json_object(const std::string& text) {
  for (size_t start = text.find('{'); start != std::string::npos;
       start = text.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (size_t i = start; i < text.size(); ++i) {
      const char ch = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (ch == '\\') {
          escaped = true;
        } else if (ch == '"') {
          in_string = false;
        }
        continue;
      }
      if (ch == '"') {
        in_string = true;
      } else if (ch == '{') {
        ++depth;
      } else if (ch == '}') {
        if (--depth == 0) {
          std::string candidate = text.substr(start, i - start + 1);
          if (json::accept(candidate)) return candidate;
          break;
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace

Proposal parse_proposal_text(const std::string& text, const Scenario& scenario) {
  const std::optional<std::string> object = extract_json_object(text);
  if (!object) {
    throw NoJsonFound("no JSON object in reply", truncate_fragment(text));
  }
  const std::string fragment = truncate_fragment(*object);
  return proposal_from_json_impl(json::parse(*object), scenario, fragment);
}

nlohmann::json intent_to_json(const Intent& intent) {
  json j{{"kind", intent_kind_name(intent.kind)}};
  switch (intent.kind) {
    case IntentKind::kLaneChangeLeft:
    case IntentKind::kLaneChangeRight:
      j["target_lane_id"] = intent.target_lane_id;
      break;
    case IntentKind::kMaintainSpeed:
      j["target_speed"] = intent.target_speed;
      break;
    case IntentKind::kYield:
      j["yield_to"] = intent.yield_to;
      break;
    case IntentKind::kReachPoint:
      j["goal"] = {intent.goal.x(), intent.goal.y()};
      break;
  }
  return j;
}

nlohmann::json proposal_to_json(const Proposal& proposal) {
  return json{{"agent_i", proposal.agent_i},
              {"agent_j", proposal.agent_j},
              {"intent_i", intent_to_json(proposal.intent_i)},
              {"intent_j", intent_to_json(proposal.intent_j)},
              {"rationale", proposal.rationale},
              {"backend", proposal.backend}};
}

Proposal proposal_from_json(const nlohmann::json& j, const Scenario& scenario) {
  return proposal_from_json_impl(j, scenario, truncate_fragment(j.dump()));
}

std::pair<SceneDescription, Proposal> propose(const Scenario& scenario,
                                              ProposerBackend backend,
                                              const ProposerConfig& config) {
  SceneDescription desc = describe_scene(scenario, config.horizon_seconds);
  if (backend == ProposerBackend::kService) {
    if (config.gateway == nullptr) {
      throw ValidationError("service backend requires a configured gateway");
    }
    try {
      const std::string describe_template =
          load_template(config.prompts_dir, "describe.txt", kDefaultDescribePrompt);
      const std::string propose_template =
          load_template(config.prompts_dir, "propose.txt", kDefaultProposePrompt);
      const std::string stage1 =
          replace_all(describe_template, "{scenario_summary}", desc.rendered_text);
      const std::string description = config.gateway->chat({{"user", stage1}});
      if (!description.empty()) desc.rendered_text = description;
      const std::string stage2 =
          replace_all(propose_template, "{scene_description}", desc.rendered_text);
      std::string prompt = stage2;
      for (int attempt = 0; attempt <= config.max_parse_retries; ++attempt) {
        const std::string reply = config.gateway->chat({{"user", prompt}});
        try {
          Proposal p = parse_proposal_text(reply, scenario);
          p.backend = "service";
          return {desc, p};
        } catch (const ProposalParseError& e) {
          if (attempt == config.max_parse_retries) break;
          prompt = stage2 + "\n\nYour previous reply could not be used: " + e.what() +
                   "\nReply with exactly one valid JSON object.";
        }
      }
    } catch (const GatewayError&) {
      // Service unavailable; the deterministic backend takes over. The
      // GatewayError surfaces only if the fallback itself cannot run.
      const std::exception_ptr gateway_failure = std::current_exception();
      try {
        Proposal p =
            propose_heuristic(scenario, desc, select_pair(desc, config.weights));
        p.backend = "heuristic-fallback";
        return {desc, p};
      } catch (const Error&) {
        std::rethrow_exception(gateway_failure);
      }
    }
    Proposal p = propose_heuristic(scenario, desc, select_pair(desc, config.weights));
    p.backend = "heuristic-fallback";
    return {desc, p};
  }
  Proposal p = propose_heuristic(scenario, desc, select_pair(desc, config.weights));
  return {desc, p};
}

}  // namespace socialgen
