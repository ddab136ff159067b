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

#include "socialgen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "socialgen/errors.hpp"

namespace socialgen {

double time_to_collision(const AgentState& a, const AgentState& b, double r_i, double r_j) {
  const double contact = r_i + r_j;
  const Vec2 dp = b.position - a.position;
  if (dp.norm() <= contact) return 0.0;
  const Vec2 dv = b.velocity() - a.velocity();
  // |dp + dv t| = contact  =>  (dv.dv) t^2 + 2 (dp.dv) t + dp.dp - contact^2 = 0
  const double qa = dv.squaredNorm();
  const double qb = 2.0 * dp.dot(dv);
  const double qc = dp.squaredNorm() - contact * contact;
  const double inf = std::numeric_limits<double>::infinity();
  if (qa < 1e-12) return inf;     // no relative motion
  if (qb >= 0.0) return inf;      // diverging; both roots negative or complex
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return inf;     // closest approach still outside contact
  return (-qb - std::sqrt(disc)) / (2.0 * qa);
}

std::vector<double> ttc_profile(const Scenario& scenario, const std::string& id_i,
                                const std::string& id_j, double radius) {
  const Trajectory& ti = scenario.agent(id_i);
  const Trajectory& tj = scenario.agent(id_j);
  const int steps = std::min(ti.size(), tj.size());
  std::vector<double> profile(steps);
  for (int k = 0; k < steps; ++k)
    profile[k] = time_to_collision(ti.states[k], tj.states[k], radius, radius);
  return profile;
}

double min_ttc(const std::vector<double>& profile) {
  double best = std::numeric_limits<double>::infinity();
  for (double v : profile) best = std::min(best, v);
  return best;
}

double engagement_ratio(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw EmptyBatch("engagement_ratio needs >= 1 report");
  int engaged = 0;
  for (const auto& r : reports) engaged += r.engaged ? 1 : 0;
  return 100.0 * engaged / static_cast<double>(reports.size());
}

double max_relative_velocity(const Scenario& scenario, const std::string& id_i,
                             const std::string& id_j) {
  const Trajectory& ti = scenario.agent(id_i);
  const Trajectory& tj = scenario.agent(id_j);
  const int steps = std::min(ti.size(), tj.size());
  double best = 0.0;
  for (int k = 0; k < steps; ++k)
    best = std::max(best, (ti.states[k].velocity() - tj.states[k].velocity()).norm());
  return best;
}

double max_acceleration(const Scenario& scenario) {
  double best = 0.0;
  for (const auto& traj : scenario.trajectories) {
    const KinematicProfile profile = derive_kinematics(traj);
    for (Eigen::Index k = 0; k < profile.acceleration.cols(); ++k)
      best = std::max(best, profile.acceleration.col(k).norm());
  }
  return best;
}

std::string metrics_csv_header() {
  return "scenario_id,min_ttc,engaged,max_rel_vel,max_accel,extrinsic_i,extrinsic_j";
}

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string metrics_csv_row(const MetricsReport& r) {
  std::string row = r.scenario_id;
  row += ',' + fmt(r.min_ttc);
  row += ',';
  row += (r.engaged ? '1' : '0');
  row += ',' + fmt(r.max_relative_velocity);
  row += ',' + fmt(r.max_acceleration);
  row += ',' + fmt(r.extrinsic_reward_i);
  row += ',' + fmt(r.extrinsic_reward_j);
  return row;
}

}  // namespace socialgen
