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

#include "socialgen/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "socialgen/errors.hpp"

namespace socialgen {

namespace {

constexpr double kScale = 8.0;  // px per meter
constexpr double kPad = 6.0;    // m around the content box

struct Box {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  bool empty = true;
  void add(const Vec2& p) {
    if (empty) {
      min_x = max_x = p.x();
      min_y = max_y = p.y();
      empty = false;
      return;
    }
    min_x = std::min(min_x, p.x());
    max_x = std::max(max_x, p.x());
    min_y = std::min(min_y, p.y());
    max_y = std::max(max_y, p.y());
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// World y grows upward, SVG y downward.
std::string points_attr(const Polyline& line, const Box& box) {
  std::ostringstream out;
  for (size_t i = 0; i < line.size(); ++i) {
    if (i > 0) out << ' ';
    out << num((line[i].x() - box.min_x + kPad) * kScale) << ','
        << num((box.max_y - line[i].y() + kPad) * kScale);
  }
  return out.str();
}

Polyline offset_polyline(const Polyline& line, double offset) {
  Polyline out;
  out.reserve(line.size());
  for (size_t i = 0; i < line.size(); ++i) {
    Vec2 dir;
    if (i + 1 < line.size()) {
      dir = line[i + 1] - line[i];
    } else {
      dir = line[i] - line[i - 1];
    }
    if (dir.norm() < 1e-12) dir = Vec2(1.0, 0.0);
    dir.normalize();
    const Vec2 normal(-dir.y(), dir.x());  // left of travel
    out.push_back(line[i] + offset * normal);
  }
  return out;
}

}  // namespace

std::string render_scenario_svg(const Scenario& scenario,
                                const std::string& highlight_i,
                                const std::string& highlight_j) {
  Box box;
  for (const Lane& lane : scenario.map.lanes) {
    for (const Vec2& p : lane.centerline) {
      box.add(p + Vec2(0.0, lane.width));
      box.add(p - Vec2(0.0, lane.width));
    }
  }
  for (const Trajectory& traj : scenario.trajectories) {
    for (const AgentState& s : traj.states) box.add(s.position);
  }
  if (box.empty) box.add(Vec2::Zero());

  const double width = (box.max_x - box.min_x + 2 * kPad) * kScale;
  const double height = (box.max_y - box.min_y + 2 * kPad) * kScale;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width)
      << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(width)
      << ' ' << num(height) << "\">\n";
  svg << "  <rect width=\"100%\" height=\"100%\" fill=\"#fafafa\"/>\n";

  for (const Lane& lane : scenario.map.lanes) {
    for (const double side : {+0.5, -0.5}) {
      svg << "  <polyline points=\""
          << points_attr(offset_polyline(lane.centerline, side * lane.width), box)
          << "\" fill=\"none\" stroke=\"#b0b0b0\" stroke-width=\"1.5\"/>\n";
    }
    svg << "  <polyline points=\"" << points_attr(lane.centerline, box)
        << "\" fill=\"none\" stroke=\"#d8d8d8\" stroke-width=\"1\""
        << " stroke-dasharray=\"6,6\"/>\n";
  }

  for (const Trajectory& traj : scenario.trajectories) {
    Polyline line;
    line.reserve(traj.states.size());
    for (const AgentState& s : traj.states) line.push_back(s.position);
    std::string color = "#808080";
    double stroke = 1.0;
    if (traj.agent_id == highlight_i) {
      color = "#d62728";
      stroke = 2.0;
    } else if (traj.agent_id == highlight_j) {
      color = "#1f77b4";
      stroke = 2.0;
    }
    svg << "  <polyline points=\"" << points_attr(line, box)
        << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
        << num(stroke) << "\"/>\n";
    const Vec2& start = traj.states.front().position;
    const double cx = (start.x() - box.min_x + kPad) * kScale;
    const double cy = (box.max_y - start.y() + kPad) * kScale;
    svg << "  <circle cx=\"" << num(cx) << "\" cy=\"" << num(cy)
        << "\" r=\"4\" fill=\"" << color << "\"/>\n";
    svg << "  <text x=\"" << num(cx + 6.0) << "\" y=\"" << num(cy - 6.0)
        << "\" font-size=\"11\" fill=\"#404040\">" << traj.agent_id
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_scenario_svg(const Scenario& scenario, const std::string& path,
                        const std::string& highlight_i,
                        const std::string& highlight_j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  out << render_scenario_svg(scenario, highlight_i, highlight_j);
}

}  // namespace socialgen
