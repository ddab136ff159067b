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

#ifndef SOCIALGEN_COMMANDS_HPP_
#define SOCIALGEN_COMMANDS_HPP_

#include <string>
#include <vector>

#include "socialgen/run_config.hpp"

namespace socialgen {

// Stable exit-code contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;      // validation / parse / missing files
inline constexpr int kExitGateway = 3;    // chat service failure
inline constexpr int kExitNumerical = 4;  // solver / non-finite reward

/// Writes proposal.json and description.txt into config.out_dir.
int cmd_propose(const RunConfig& config);

/// Runs guided generation; writes generated_scenario.json, trace.csv,
/// metrics.csv, and optionally an SVG rendering.
int cmd_generate(const RunConfig& config);

/// Evaluates every scenario JSON in `dir`; writes metrics.csv and prints a
/// summary line with the engagement ratio.
int cmd_evaluate(const RunConfig& config, const std::string& dir);

/// Generates num_seeds scenarios per (phi, lambda) cell with paired seeds
/// and writes one aggregated row per cell to sweep.csv.
int cmd_sweep(const RunConfig& config, const std::vector<double>& phi_list,
              const std::vector<double>& lambda_list, int num_seeds);

}  // namespace socialgen

#endif  // SOCIALGEN_COMMANDS_HPP_
