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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "socialgen/errors.hpp"
#include "socialgen/metrics.hpp"
#include "test_util.hpp"

using namespace socialgen;
using testutil::ttc_bruteforce;
using testutil::two_agent_scenario;

namespace {

AgentState state(double x, double y, double speed, double heading) {
  AgentState s;
  s.position = Vec2(x, y);
  s.speed = speed;
  s.heading = heading;
  return s;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("ttc head-on closing gap") {
  // 40 m apart, closing at 10 m/s, contact at 2 + 2 = 4 m: covers 36 m.
  const AgentState a = state(0.0, 0.0, 10.0, 0.0);
  const AgentState b = state(40.0, 0.0, 0.0, 0.0);
  const double t = time_to_collision(a, b, 2.0, 2.0);
  CHECK(t == doctest::Approx(3.6));
  CHECK(t == doctest::Approx(ttc_bruteforce(a, b, 2.0, 2.0)).epsilon(1e-3));
}

TEST_CASE("ttc mutual approach") {
  const AgentState a = state(0.0, 0.0, 6.0, 0.0);
  const AgentState b = state(30.0, 0.0, 4.0, M_PI);  // moving in -x
  // Closing speed 10 m/s over 30 - 4 = 26 m.
  CHECK(time_to_collision(a, b, 2.0, 2.0) == doctest::Approx(2.6));
}

TEST_CASE("ttc zero when already overlapping") {
  const AgentState a = state(0.0, 0.0, 3.0, 0.0);
  const AgentState b = state(3.0, 0.0, 0.0, 0.0);
  CHECK(time_to_collision(a, b, 2.0, 2.0) == 0.0);
}

TEST_CASE("ttc infinite when diverging") {
  const AgentState a = state(0.0, 0.0, 5.0, M_PI);  // moving apart
  const AgentState b = state(10.0, 0.0, 5.0, 0.0);
  CHECK(time_to_collision(a, b, 2.0, 2.0) == kInf);
}

TEST_CASE("ttc infinite with no relative motion") {
  const AgentState a = state(0.0, 0.0, 7.0, 0.0);
  const AgentState b = state(10.0, 0.0, 7.0, 0.0);
  CHECK(time_to_collision(a, b, 2.0, 2.0) == kInf);
}

TEST_CASE("ttc infinite when closest approach stays outside contact") {
  // Parallel paths 6 m apart with contact distance 4 m: b overtakes a but the
  // lateral gap never shrinks.
  const AgentState a = state(0.0, 0.0, 2.0, 0.0);
  const AgentState b = state(-20.0, 6.0, 8.0, 0.0);
  CHECK(time_to_collision(a, b, 2.0, 2.0) == kInf);
}

TEST_CASE("ttc perpendicular crossing matches the brute-force oracle") {
  const AgentState a = state(-20.0, 0.0, 8.0, 0.0);
  const AgentState b = state(0.0, -15.0, 6.0, M_PI / 2.0);
  const double t = time_to_collision(a, b, 2.0, 2.0);
  const double oracle = ttc_bruteforce(a, b, 2.0, 2.0);
  REQUIRE(std::isfinite(t));
  CHECK(t == doctest::Approx(oracle).epsilon(1e-3));
}

TEST_CASE("ttc oblique geometry with unequal radii matches the oracle") {
  const AgentState a = state(3.0, -7.0, 9.0, 0.4);
  const AgentState b = state(25.0, 6.0, 5.0, -2.2);
  const double t = time_to_collision(a, b, 1.0, 2.5);
  const double oracle = ttc_bruteforce(a, b, 1.0, 2.5);
  if (std::isfinite(oracle)) {
    CHECK(t == doctest::Approx(oracle).epsilon(1e-3));
  } else {
    CHECK(t == kInf);
  }
}

TEST_CASE("ttc is symmetric in its arguments") {
  // Near-head-on pair with a 1 m lateral offset: they collide, so both
  // orderings yield the same finite root.
  const AgentState a = state(0.0, 0.0, 10.0, 0.0);
  const AgentState b = state(30.0, 1.0, 5.0, std::acos(-1.0));
  const double forward = time_to_collision(a, b, 1.5, 2.5);
  REQUIRE(std::isfinite(forward));
  CHECK(forward == doctest::Approx(time_to_collision(b, a, 2.5, 1.5)));

  // A diverging pair is inf from both sides (compare exactly: inf is not
  // Approx-comparable).
  const AgentState c = state(-5.0, 2.0, 7.0, 0.3);
  const AgentState d = state(20.0, -4.0, 6.0, 2.8);
  CHECK(time_to_collision(c, d, 1.5, 2.5) == time_to_collision(d, c, 2.5, 1.5));
}

TEST_CASE("ttc_profile on a constant-velocity approach decreases by dt") {
  // s0 at v=8 chases s1 at v=6 from 20 m behind: closing 2 m/s, contact 4 m,
  // so ttc(0) = 8 s and each 0.1 s step shaves exactly 0.1 s off.
  const Scenario s = two_agent_scenario();
  const std::vector<double> profile = ttc_profile(s, "s0", "s1");
  REQUIRE(static_cast<int>(profile.size()) == s.num_steps());
  CHECK(profile[0] == doctest::Approx(8.0));
  for (size_t k = 1; k < profile.size(); ++k)
    CHECK(profile[k] == doctest::Approx(profile[0] - 0.1 * k).epsilon(1e-9));
  CHECK(min_ttc(profile) == doctest::Approx(8.0 - 0.1 * (profile.size() - 1)));
}

TEST_CASE("min_ttc of an empty profile is infinite") {
  CHECK(min_ttc({}) == kInf);
  CHECK(min_ttc({kInf, 3.0, 5.0}) == doctest::Approx(3.0));
}

TEST_CASE("engagement thresholding") {
  CHECK(engagement(3.9));
  CHECK_FALSE(engagement(4.0));  // strict: ttc < threshold
  CHECK_FALSE(engagement(kInf));
  CHECK(engagement(5.0, 6.0));
  // Monotone in the threshold: engaged at t implies engaged at any larger t.
  for (double ttc : {0.5, 2.0, 3.99}) {
    CHECK(engagement(ttc, 4.0));
    CHECK(engagement(ttc, 10.0));
  }
}

TEST_CASE("engagement_ratio") {
  std::vector<MetricsReport> reports(4);
  reports[0].engaged = true;
  reports[2].engaged = true;
  reports[3].engaged = true;
  CHECK(engagement_ratio(reports) == doctest::Approx(75.0));
  CHECK_THROWS_AS((void)engagement_ratio({}), EmptyBatch);
}

TEST_CASE("max_relative_velocity") {
  const Scenario s = two_agent_scenario(/*gap=*/20.0, /*v_front=*/6.0, /*v_back=*/8.0);
  CHECK(max_relative_velocity(s, "s0", "s1") == doctest::Approx(2.0));
  CHECK(max_relative_velocity(s, "s1", "s0") == doctest::Approx(2.0));
}

TEST_CASE("max_acceleration is zero for constant velocity and matches a ramp") {
  Scenario s = two_agent_scenario();
  CHECK(max_acceleration(s) == doctest::Approx(0.0).epsilon(1e-9));

  // Replace s0 with a constant-acceleration trajectory: a = 1 m/s^2.
  Trajectory& t = s.trajectories[0];
  for (int k = 0; k < t.size(); ++k) {
    const double time = t.dt * k;
    t.states[k].position = Vec2(0.5 * time * time, 0.0);
    t.states[k].speed = time;
  }
  CHECK(max_acceleration(s) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("metrics csv") {
  CHECK(metrics_csv_header() ==
        "scenario_id,min_ttc,engaged,max_rel_vel,max_accel,extrinsic_i,extrinsic_j");
  MetricsReport r;
  r.scenario_id = "sample";
  r.min_ttc = 3.25;
  r.engaged = true;
  r.max_relative_velocity = 2.5;
  r.max_acceleration = 1.125;
  r.extrinsic_reward_i = 0.5;
  r.extrinsic_reward_j = 1.0;
  CHECK(metrics_csv_row(r) == "sample,3.25,1,2.5,1.125,0.5,1");

  MetricsReport clear;
  clear.scenario_id = "clear";
  CHECK(metrics_csv_row(clear) == "clear,inf,0,0,0,0,0");
}

TEST_CASE("unknown agent id in profile helpers throws") {
  const Scenario s = two_agent_scenario();
  CHECK_THROWS_AS((void)ttc_profile(s, "s0", "ghost"), ValidationError);
  CHECK_THROWS_AS((void)max_relative_velocity(s, "ghost", "s1"), ValidationError);
}
