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

#include "socialgen/scenario.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "socialgen/errors.hpp"

namespace socialgen {

using nlohmann::json;

Eigen::Matrix2Xd Trajectory::positions() const {
  Eigen::Matrix2Xd p(2, size());
  for (int k = 0; k < size(); ++k) p.col(k) = states[k].position;
  return p;
}

const Lane* LaneMap::find(const std::string& id) const {
  for (const auto& lane : lanes)
    if (lane.id == id) return &lane;
  return nullptr;
}

const Trajectory* Scenario::find_agent(const std::string& id) const {
  for (const auto& traj : trajectories)
    if (traj.agent_id == id) return &traj;
  return nullptr;
}

const Trajectory& Scenario::agent(const std::string& id) const {
  const Trajectory* t = find_agent(id);
  if (!t) throw ValidationError("unknown agent id '" + id + "'");
  return *t;
}

namespace {

bool all_finite(const AgentState& s) {
  return std::isfinite(s.position.x()) && std::isfinite(s.position.y()) &&
         std::isfinite(s.speed) && std::isfinite(s.heading);
}

void validate_trajectory(const Trajectory& traj) {
  if (traj.size() < 2)
    throw ValidationError("agent '" + traj.agent_id + "': trajectory needs >= 2 states, got " +
                          std::to_string(traj.size()));
  if (!(traj.dt > 0.0))
    throw ValidationError("agent '" + traj.agent_id + "': dt must be > 0");
  for (int k = 0; k < traj.size(); ++k) {
    const AgentState& s = traj.states[k];
    if (!all_finite(s))
      throw ValidationError("agent '" + traj.agent_id + "': non-finite state at step " +
                            std::to_string(k));
    if (s.speed < 0.0)
      throw ValidationError("agent '" + traj.agent_id + "': negative speed at step " +
                            std::to_string(k));
  }
  for (int k = 0; k + 1 < traj.size(); ++k) {
    const double dist = (traj.states[k + 1].position - traj.states[k].position).norm();
    const double bound =
        (std::max(traj.states[k].speed, traj.states[k + 1].speed) + kConsistencySlack) * traj.dt;
    if (dist > bound) {
      std::ostringstream msg;
      msg << "agent '" << traj.agent_id << "': step " << k << " -> " << (k + 1) << " moves "
          << dist << " m, exceeding the reachable bound " << bound << " m";
      throw ValidationError(msg.str());
    }
  }
}

void validate_map(const LaneMap& map) {
  std::set<std::string> ids;
  for (const auto& lane : map.lanes) {
    if (!ids.insert(lane.id).second)
      throw ValidationError("duplicate lane id '" + lane.id + "'");
    if (lane.centerline.size() < 2)
      throw ValidationError("lane '" + lane.id + "': centerline needs >= 2 points");
    if (!(lane.width > 0.0))
      throw ValidationError("lane '" + lane.id + "': width must be > 0");
  }
  for (const auto& lane : map.lanes)
    for (const auto& succ : lane.successors)
      if (!map.find(succ))
        throw ValidationError("lane '" + lane.id + "': unresolved successor '" + succ + "'");
}

}  // namespace

void validate_scenario(const Scenario& scenario) {
  std::set<std::string> ids;
  for (const auto& traj : scenario.trajectories)
    if (!ids.insert(traj.agent_id).second)
      throw ValidationError("duplicate agent id '" + traj.agent_id + "'");
  for (const auto& traj : scenario.trajectories) validate_trajectory(traj);
  if (!scenario.trajectories.empty()) {
    const double dt = scenario.trajectories.front().dt;
    const int steps = scenario.trajectories.front().size();
    for (const auto& traj : scenario.trajectories) {
      if (traj.dt != dt)
        throw ValidationError("agent '" + traj.agent_id + "': dt differs from the scenario's");
      if (traj.size() != steps)
        throw ValidationError("agent '" + traj.agent_id + "': length differs from the scenario's");
    }
  }
  validate_map(scenario.map);
}

namespace {

Vec2 parse_vec2(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(std::string(what) + " must be a [x, y] number pair");
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("scenario root must be a JSON object");
  Scenario scenario;
  try {
    const double dt = j.at("dt").get<double>();
    for (const auto& ja : j.at("agents")) {
      Trajectory traj;
      traj.agent_id = ja.at("id").get<std::string>();
      traj.dt = dt;
      for (const auto& js : ja.at("states")) {
        if (!js.is_array() || js.size() != 4)
          throw ParseError("agent '" + traj.agent_id + "': each state must be [x, y, speed, heading]");
        AgentState s;
        s.position = Vec2(js[0].get<double>(), js[1].get<double>());
        s.speed = js[2].get<double>();
        s.heading = normalize_angle(js[3].get<double>());
        traj.states.push_back(s);
      }
      scenario.trajectories.push_back(std::move(traj));
    }
    if (j.contains("map")) {
      for (const auto& jl : j.at("map").at("lanes")) {
        Lane lane;
        lane.id = jl.at("id").get<std::string>();
        for (const auto& jp : jl.at("centerline")) lane.centerline.push_back(parse_vec2(jp, "centerline point"));
        lane.width = jl.at("width").get<double>();
        lane.speed_limit = jl.at("speed_limit").get<double>();
        if (jl.contains("successors"))
          for (const auto& js : jl.at("successors")) lane.successors.push_back(js.get<std::string>());
        scenario.map.lanes.push_back(std::move(lane));
      }
    }
    scenario.metadata_json = j.value("metadata", json::object()).dump();
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario schema error: ") + e.what());
  }
  validate_scenario(scenario);
  return scenario;
}

json scenario_to_json(const Scenario& scenario) {
  json j;
  j["dt"] = scenario.dt();
  j["agents"] = json::array();
  for (const auto& traj : scenario.trajectories) {
    json ja;
    ja["id"] = traj.agent_id;
    ja["states"] = json::array();
    for (const auto& s : traj.states)
      ja["states"].push_back({s.position.x(), s.position.y(), s.speed, s.heading});
    j["agents"].push_back(std::move(ja));
  }
  json lanes = json::array();
  for (const auto& lane : scenario.map.lanes) {
    json jl;
    jl["id"] = lane.id;
    jl["centerline"] = json::array();
    for (const auto& p : lane.centerline) jl["centerline"].push_back({p.x(), p.y()});
    jl["width"] = lane.width;
    jl["speed_limit"] = lane.speed_limit;
    jl["successors"] = lane.successors;
    lanes.push_back(std::move(jl));
  }
  j["map"] = {{"lanes", std::move(lanes)}};
  j["metadata"] = json::parse(scenario.metadata_json);
  return j;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("malformed JSON in '" + path + "': " + e.what());
  }
  return scenario_from_json(j);
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write scenario file '" + path + "'");
  out << scenario_to_json(scenario).dump(2) << '\n';
}

namespace {

// Central differences in the interior, one-sided at the ends. Exact for
// polynomials of degree <= 2 at interior columns.
Eigen::Matrix2Xd difference(const Eigen::Matrix2Xd& x, double dt) {
  const Eigen::Index n = x.cols();
  Eigen::Matrix2Xd d(2, n);
  if (n == 1) {
    d.col(0).setZero();
    return d;
  }
  d.col(0) = (x.col(1) - x.col(0)) / dt;
  d.col(n - 1) = (x.col(n - 1) - x.col(n - 2)) / dt;
  for (Eigen::Index k = 1; k + 1 < n; ++k) d.col(k) = (x.col(k + 1) - x.col(k - 1)) / (2.0 * dt);
  return d;
}

}  // namespace

KinematicProfile derive_kinematics(const Trajectory& traj) {
  KinematicProfile profile;
  profile.velocity = difference(traj.positions(), traj.dt);
  profile.acceleration = difference(profile.velocity, traj.dt);
  profile.jerk = difference(profile.acceleration, traj.dt);
  return profile;
}

LaneProjection project_to_lane(const Vec2& point, const LaneMap& map) {
  if (map.empty()) throw ValidationError("project_to_lane requires a non-empty map");
  const Lane* best_lane = nullptr;
  PolylineProjection best;
  for (const auto& lane : map.lanes) {
    const PolylineProjection proj = project_to_polyline(point, lane.centerline);
    const bool better =
        !best_lane || proj.distance < best.distance ||
        (proj.distance == best.distance && lane.id < best_lane->id);
    if (better) {
      best_lane = &lane;
      best = proj;
    }
  }
  LaneProjection out;
  out.lane_id = best_lane->id;
  out.lateral_offset = best.signed_lateral;
  out.tangent_heading = best.tangent_heading;
  out.arc_length = best.arc_length;
  return out;
}

}  // namespace socialgen
