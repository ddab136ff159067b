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

#ifndef SOCIALGEN_SVG_PLOT_HPP_
#define SOCIALGEN_SVG_PLOT_HPP_

#include <string>

#include "socialgen/scenario.hpp"

namespace socialgen {

/// Static top-down rendering: lane boundaries and centerlines, one polyline
/// per trajectory, the highlighted pair drawn in color with start markers.
/// Deterministic text output.
std::string render_scenario_svg(const Scenario& scenario,
                                const std::string& highlight_i = "",
                                const std::string& highlight_j = "");

void write_scenario_svg(const Scenario& scenario, const std::string& path,
                        const std::string& highlight_i = "",
                        const std::string& highlight_j = "");

}  // namespace socialgen

#endif  // SOCIALGEN_SVG_PLOT_HPP_
