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
#include <stdexcept>

#include "socialgen/diffusion.hpp"
#include "socialgen/errors.hpp"
#include "test_util.hpp"

using namespace socialgen;
using testutil::free_tensor;
using testutil::posterior_mean_oracle;
using testutil::two_agent_scenario;

namespace {

Eigen::VectorXd channel(const Eigen::VectorXd& flat, int agent, int coord, int steps) {
  Eigen::VectorXd out(steps);
  for (int k = 0; k < steps; ++k)
    out[k] = flat[TrajectoryTensor::index(agent, k, coord, steps)];
  return out;
}

Eigen::MatrixXd default_precision(int steps) {
  const Eigen::MatrixXd d2 = second_difference_matrix(steps);
  return 50.0 * (d2.transpose() * d2) +
         1e-4 * Eigen::MatrixXd::Identity(steps, steps);
}

}  // namespace

TEST_CASE("make_schedule defaults") {
  const DiffusionSchedule s = make_schedule();
  CHECK(s.T() == 50);
  CHECK(s.beta(1) == doctest::Approx(1e-4));
  CHECK(s.beta(50) == doctest::Approx(0.1));
  // Linear interpolation between the endpoints.
  for (int t = 1; t <= 50; ++t) {
    const double expected = 1e-4 + (0.1 - 1e-4) * (t - 1) / 49.0;
    CHECK(s.beta(t) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(s.alpha(t) == doctest::Approx(1.0 - expected).epsilon(1e-12));
  }
}

TEST_CASE("alpha_bar telescopes and decreases") {
  const DiffusionSchedule s = make_schedule(37, 5e-4, 0.08);
  CHECK(s.alpha_bar(0) == 1.0);
  for (int t = 1; t <= 37; ++t) {
    // Defining recurrence: alpha_bar(t) = alpha_bar(t-1) * alpha(t).
    CHECK(s.alpha_bar(t) ==
          doctest::Approx(s.alpha_bar(t - 1) * s.alpha(t)).epsilon(1e-14));
    CHECK(s.alpha_bar(t) < s.alpha_bar(t - 1));
    CHECK(s.alpha_bar(t) > 0.0);
  }
}

TEST_CASE("single-step schedule uses beta_min") {
  const DiffusionSchedule s = make_schedule(1, 2e-3, 0.5);
  CHECK(s.T() == 1);
  CHECK(s.beta(1) == doctest::Approx(2e-3));
  CHECK(s.alpha_bar(1) == doctest::Approx(1.0 - 2e-3));
}

TEST_CASE("make_schedule rejects bad parameters") {
  CHECK_THROWS_AS((void)make_schedule(0), InvalidSchedule);
  CHECK_THROWS_AS((void)make_schedule(-3), InvalidSchedule);
  CHECK_THROWS_AS((void)make_schedule(10, 0.0, 0.1), InvalidSchedule);
  CHECK_THROWS_AS((void)make_schedule(10, 0.2, 0.1), InvalidSchedule);
  CHECK_THROWS_AS((void)make_schedule(10, 1e-4, 1.0), InvalidSchedule);
}

TEST_CASE("schedule accessors reject out-of-range t") {
  const DiffusionSchedule s = make_schedule(10);
  CHECK_THROWS_AS((void)s.beta(0), std::out_of_range);
  CHECK_THROWS_AS((void)s.beta(11), std::out_of_range);
  CHECK_THROWS_AS((void)s.alpha_bar(-1), std::out_of_range);
  CHECK_THROWS_AS((void)s.alpha_bar(11), std::out_of_range);
  CHECK_NOTHROW((void)s.alpha_bar(0));
  CHECK_NOTHROW((void)s.beta(10));
}

TEST_CASE("tensor layout is agent-major, step-minor, x before y") {
  CHECK(TrajectoryTensor::index(0, 0, 0, 8) == 0);
  CHECK(TrajectoryTensor::index(0, 0, 1, 8) == 1);
  CHECK(TrajectoryTensor::index(0, 1, 0, 8) == 2);
  CHECK(TrajectoryTensor::index(1, 0, 0, 8) == 16);
  CHECK(TrajectoryTensor::index(2, 3, 1, 8) == 39);
}

TEST_CASE("clamp_observed and agent_frozen") {
  TrajectoryTensor t;
  t.num_agents = 2;
  t.num_steps = 3;
  t.values = Eigen::VectorXd::Constant(12, 7.0);
  t.observed = Eigen::VectorXd::LinSpaced(12, 0.0, 11.0);
  t.mask = Eigen::ArrayXd::Zero(12);
  t.mask.head(6) = 1.0;  // agent 0 fully masked
  t.clamp_observed();
  for (int i = 0; i < 6; ++i) CHECK(t.values[i] == doctest::Approx(double(i)));
  for (int i = 6; i < 12; ++i) CHECK(t.values[i] == 7.0);
  CHECK(t.agent_frozen(0));
  CHECK_FALSE(t.agent_frozen(1));
}

TEST_CASE("second_difference_matrix annihilates linear ramps") {
  const Eigen::MatrixXd d2 = second_difference_matrix(8);
  REQUIRE(d2.rows() == 6);
  REQUIRE(d2.cols() == 8);
  CHECK(d2(0, 0) == 1.0);
  CHECK(d2(0, 1) == -2.0);
  CHECK(d2(0, 2) == 1.0);
  CHECK(d2(3, 2) == 0.0);
  const Eigen::VectorXd ramp = Eigen::VectorXd::LinSpaced(8, -3.0, 11.0);
  CHECK((d2 * ramp).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(second_difference_matrix(2).rows() == 0);
  CHECK(second_difference_matrix(2).cols() == 2);
}

TEST_CASE("forward_noise formula and clamping") {
  const DiffusionSchedule s = make_schedule();
  TrajectoryTensor x0 = free_tensor(6);
  x0.mask[3] = 1.0;  // pin one entry
  const Eigen::VectorXd eps = Eigen::VectorXd::LinSpaced(12, -1.0, 1.0);

  const int t = 20;
  const double a_bar = s.alpha_bar(t);
  const TrajectoryTensor x_t = forward_noise(x0, t, s, eps);
  for (int i = 0; i < 12; ++i) {
    if (i == 3) {
      CHECK(x_t.values[i] == doctest::Approx(x0.observed[i]));
    } else {
      CHECK(x_t.values[i] == doctest::Approx(std::sqrt(a_bar) * x0.values[i] +
                                             std::sqrt(1.0 - a_bar) * eps[i]));
    }
  }

  SUBCASE("t = 0 is the identity") {
    const TrajectoryTensor same = forward_noise(x0, 0, s, eps);
    CHECK((same.values - x0.values).norm() == doctest::Approx(0.0));
  }
  SUBCASE("dimension mismatch throws") {
    CHECK_THROWS_AS((void)forward_noise(x0, t, s, Eigen::VectorXd::Zero(5)),
                    DimensionMismatch);
  }
}

TEST_CASE("forward_noise marginal statistics at the terminal step") {
  // At t = T the marginal is N(sqrt(a_bar_T) x0, (1 - a_bar_T) I); with the
  // default schedule a_bar_50 is ~0.0663, so draws are nearly unit noise.
  const DiffusionSchedule s = make_schedule();
  const TrajectoryTensor x0 = free_tensor(50);
  const double a_bar = s.alpha_bar(50);
  Rng rng(2024);
  const int trials = 400;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(x0.size());
  double sumsq = 0.0;
  for (int i = 0; i < trials; ++i) {
    const TrajectoryTensor x_t = forward_noise(x0, 50, s, rng);
    mean += x_t.values;
    sumsq += (x_t.values - std::sqrt(a_bar) * x0.values).squaredNorm();
  }
  mean /= trials;
  const Eigen::VectorXd expected = std::sqrt(a_bar) * x0.values;
  // Standard error of each coordinate mean: sqrt((1-a)/trials) ~ 0.048.
  const double se = std::sqrt((1.0 - a_bar) / trials);
  CHECK((mean - expected).cwiseAbs().maxCoeff() < 5.0 * se);
  const double var = sumsq / (trials * static_cast<double>(x0.size()));
  CHECK(var == doctest::Approx(1.0 - a_bar).epsilon(0.05));
}

TEST_CASE("prior mean: observed prefix plus constant-velocity extrapolation") {
  // Quadratic observed channel, T_s = 20, horizon 10: the mean must follow
  // the observation for the first 10 steps, then extrapolate with slope
  // (obs[9] - obs[0]) / (9 dt).
  const int steps = 20;
  const double dt = 0.1;
  TrajectoryTensor t;
  t.num_agents = 1;
  t.num_steps = steps;
  t.observed = Eigen::VectorXd::Zero(2 * steps);
  t.mask = Eigen::ArrayXd::Zero(2 * steps);
  for (int k = 0; k < steps; ++k) {
    const double time = dt * k;
    t.observed[TrajectoryTensor::index(0, k, 0, steps)] = 3.0 * time * time;
    t.observed[TrajectoryTensor::index(0, k, 1, steps)] = 2.0 - time;
  }
  t.values = t.observed;

  const GaussianPriorDenoiser den(t, dt);
  const Eigen::VectorXd mx = channel(den.mean(), 0, 0, steps);
  const Eigen::VectorXd my = channel(den.mean(), 0, 1, steps);
  const Eigen::VectorXd ox = channel(t.observed, 0, 0, steps);
  for (int k = 0; k < 10; ++k) CHECK(mx[k] == doctest::Approx(ox[k]));
  const double v = (ox[9] - ox[0]) / (9.0 * dt);
  for (int k = 10; k < steps; ++k)
    CHECK(mx[k] == doctest::Approx(ox[9] + v * (k - 9) * dt).epsilon(1e-12));
  // The y channel is already linear, so extrapolation continues it exactly.
  for (int k = 0; k < steps; ++k)
    CHECK(my[k] == doctest::Approx(2.0 - dt * k).epsilon(1e-12));
}

TEST_CASE("prior mean keeps frozen agents verbatim") {
  const int steps = 20;
  TrajectoryTensor t;
  t.num_agents = 1;
  t.num_steps = steps;
  t.observed = Eigen::VectorXd::Zero(2 * steps);
  t.mask = Eigen::ArrayXd::Ones(2 * steps);
  for (int k = 0; k < steps; ++k) {
    const double time = 0.1 * k;
    t.observed[TrajectoryTensor::index(0, k, 0, steps)] = std::sin(time);
    t.observed[TrajectoryTensor::index(0, k, 1, steps)] = std::cos(time);
  }
  t.values = t.observed;
  const GaussianPriorDenoiser den(t, 0.1);
  CHECK((den.mean() - t.observed).norm() == doctest::Approx(0.0));
}

TEST_CASE("denoiser constructor validation") {
  const TrajectoryTensor ok = free_tensor(8);
  CHECK_NOTHROW(GaussianPriorDenoiser(ok, 0.1));
  CHECK_THROWS_AS(GaussianPriorDenoiser(ok, 0.0), ValidationError);
  TrajectoryTensor tiny = free_tensor(1);
  CHECK_THROWS_AS(GaussianPriorDenoiser(tiny, 0.1), ValidationError);
  GaussianPriorDenoiser::Config bad;
  bad.eps = 0.0;
  CHECK_THROWS_AS(GaussianPriorDenoiser(ok, 0.1, bad), ValidationError);
  bad = GaussianPriorDenoiser::Config();
  bad.horizon = 1;
  CHECK_THROWS_AS(GaussianPriorDenoiser(ok, 0.1, bad), ValidationError);
  bad = GaussianPriorDenoiser::Config();
  bad.lambda_smooth = -1.0;
  CHECK_THROWS_AS(GaussianPriorDenoiser(ok, 0.1, bad), ValidationError);
}

TEST_CASE("predict_clean matches the covariance-form oracle") {
  // The implementation solves the precision-form system; the oracle inverts
  // the covariance form explicitly. T_s = 8 keeps the explicit inverses tame.
  const int steps = 8;
  const TrajectoryTensor cond = free_tensor(steps);
  const GaussianPriorDenoiser den(cond, 0.1);
  const DiffusionSchedule s = make_schedule();
  const Eigen::MatrixXd precision = default_precision(steps);

  Rng rng(99);
  const Eigen::VectorXd x_t_flat = rng.normals(2 * steps) * 3.0;
  for (int t : {1, 10, 25, 50}) {
    const Eigen::VectorXd got = den.predict_clean(x_t_flat, t, s);
    for (int c = 0; c < 2; ++c) {
      const Eigen::VectorXd expected = testutil::posterior_mean_oracle(
          channel(den.mean(), 0, c, steps), precision,
          channel(x_t_flat, 0, c, steps), s.alpha_bar(t));
      const Eigen::VectorXd got_c = channel(got, 0, c, steps);
      CAPTURE(t);
      CAPTURE(c);
      CHECK((got_c - expected).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  CHECK_THROWS_AS((void)den.predict_clean(Eigen::VectorXd::Zero(3), 10, s),
                  DimensionMismatch);
}

TEST_CASE("predict_x0 clamps masked entries") {
  const int steps = 8;
  TrajectoryTensor cond = free_tensor(steps);
  cond.mask.head(4) = 1.0;  // first two steps of the x/y channels
  const GaussianPriorDenoiser den(cond, 0.1);
  const DiffusionSchedule s = make_schedule();

  TrajectoryTensor x_t = cond;
  Rng rng(5);
  x_t.values = rng.normals(x_t.size());
  x_t.clamp_observed();
  const TrajectoryTensor x0 = predict_x0(x_t, 30, s, den);
  for (int i = 0; i < 4; ++i) CHECK(x0.values[i] == doctest::Approx(cond.observed[i]));
}

TEST_CASE("sample_clean draws around the conditional mean") {
  // Mask the first two steps; the free-block draw must equal
  // cond_mean + U^-1 z for the Schur-complement mean, which the test rebuilds
  // from dense blocks with explicit inverses.
  const int steps = 6;
  TrajectoryTensor cond = free_tensor(steps);
  for (int k = 0; k < 2; ++k) {
    cond.mask[TrajectoryTensor::index(0, k, 0, steps)] = 1.0;
    cond.mask[TrajectoryTensor::index(0, k, 1, steps)] = 1.0;
  }
  // Perturb the masked observations away from the prior mean so the coupling
  // term matters.
  cond.observed[TrajectoryTensor::index(0, 0, 0, steps)] += 0.7;
  cond.observed[TrajectoryTensor::index(0, 1, 1, steps)] -= 0.4;
  const GaussianPriorDenoiser den(cond, 0.1);

  const Eigen::MatrixXd precision = default_precision(steps);
  const std::vector<int> free_idx = {2, 3, 4, 5};
  const std::vector<int> masked_idx = {0, 1};
  Eigen::MatrixXd p_ff(4, 4);
  Eigen::MatrixXd p_fm(4, 2);
  for (int r = 0; r < 4; ++r) {
    for (int q = 0; q < 4; ++q) p_ff(r, q) = precision(free_idx[r], free_idx[q]);
    for (int m = 0; m < 2; ++m) p_fm(r, m) = precision(free_idx[r], masked_idx[m]);
  }

  const std::uint64_t seed = 4242;
  Rng rng(seed);
  const Eigen::VectorXd sample = den.sample_clean(rng);

  // Reproduce the draw stream: channel (0,0) then (0,1), 4 normals each.
  Rng replay(seed);
  const Eigen::VectorXd z0 = replay.normals(4);
  const Eigen::VectorXd z1 = replay.normals(4);
  const Eigen::LLT<Eigen::MatrixXd> llt(p_ff);
  REQUIRE(llt.info() == Eigen::Success);

  for (int c = 0; c < 2; ++c) {
    const Eigen::VectorXd mu = channel(den.mean(), 0, c, steps);
    const Eigen::VectorXd obs = channel(cond.observed, 0, c, steps);
    Eigen::VectorXd mu_f(4), delta_m(2);
    for (int r = 0; r < 4; ++r) mu_f[r] = mu[free_idx[r]];
    for (int m = 0; m < 2; ++m) delta_m[m] = obs[masked_idx[m]] - mu[masked_idx[m]];
    const Eigen::VectorXd cond_mean = mu_f - p_ff.inverse() * (p_fm * delta_m);
    const Eigen::VectorXd expected =
        cond_mean + llt.matrixU().solve(c == 0 ? z0 : z1);
    for (int r = 0; r < 4; ++r) {
      CHECK(sample[TrajectoryTensor::index(0, free_idx[r], c, steps)] ==
            doctest::Approx(expected[r]).epsilon(1e-9));
    }
    // Masked entries come back verbatim.
    for (int m : masked_idx) {
      CHECK(sample[TrajectoryTensor::index(0, m, c, steps)] ==
            doctest::Approx(obs[m]));
    }
  }
}

TEST_CASE("sample_clean on a fully masked tensor returns the observation") {
  TrajectoryTensor cond = free_tensor(8);
  cond.mask = Eigen::ArrayXd::Ones(cond.size());
  const GaussianPriorDenoiser den(cond, 0.1);
  Rng rng(1);
  CHECK((den.sample_clean(rng) - cond.observed).norm() == doctest::Approx(0.0));
}

TEST_CASE("reverse_step implements the posterior mean and variance") {
  const DiffusionSchedule s = make_schedule();
  const TrajectoryTensor x0_hat = free_tensor(10);
  TrajectoryTensor x_t = x0_hat;
  Rng init(7);
  x_t.values = init.normals(x_t.size());

  const int t = 7;
  const double beta = s.beta(t);
  const double a_bar = s.alpha_bar(t);
  const double a_bar_prev = s.alpha_bar(t - 1);
  const double c0 = std::sqrt(a_bar_prev) * beta / (1.0 - a_bar);
  const double ct = std::sqrt(s.alpha(t)) * (1.0 - a_bar_prev) / (1.0 - a_bar);
  const double var = beta * (1.0 - a_bar_prev) / (1.0 - a_bar);

  const std::uint64_t seed = 31337;
  Rng rng(seed);
  const TrajectoryTensor out = reverse_step(x_t, t, x0_hat, s, rng);
  Rng replay(seed);
  const Eigen::VectorXd z = replay.normals(x_t.size());
  const Eigen::VectorXd expected =
      c0 * x0_hat.values + ct * x_t.values + std::sqrt(var) * z;
  CHECK((out.values - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reverse_step posterior weights reproduce a noiseless x_t") {
  // If x_t = sqrt(a_bar_t) x0, the posterior mean must be
  // sqrt(a_bar_{t-1}) x0: c0 + ct sqrt(a_bar_t) == sqrt(a_bar_{t-1}).
  const DiffusionSchedule s = make_schedule();
  for (int t = 1; t <= s.T(); ++t) {
    const double beta = s.beta(t);
    const double a_bar = s.alpha_bar(t);
    const double a_bar_prev = s.alpha_bar(t - 1);
    const double c0 = std::sqrt(a_bar_prev) * beta / (1.0 - a_bar);
    const double ct = std::sqrt(s.alpha(t)) * (1.0 - a_bar_prev) / (1.0 - a_bar);
    CHECK(std::abs(c0 + ct * std::sqrt(a_bar) - std::sqrt(a_bar_prev)) < 1e-12);
  }
}

TEST_CASE("reverse_step at t = 1 is deterministic and returns x0_hat") {
  const DiffusionSchedule s = make_schedule();
  const TrajectoryTensor x0_hat = free_tensor(10);
  TrajectoryTensor x_t = x0_hat;
  Rng init(11);
  x_t.values = init.normals(x_t.size());
  Rng a(1), b(2);
  const TrajectoryTensor out_a = reverse_step(x_t, 1, x0_hat, s, a);
  const TrajectoryTensor out_b = reverse_step(x_t, 1, x0_hat, s, b);
  // Different rngs, identical output: no noise is consumed at t = 1.
  CHECK((out_a.values - out_b.values).norm() == doctest::Approx(0.0));
  // At t = 1, alpha_bar(0) = 1 collapses the mean onto x0_hat.
  CHECK((out_a.values - x0_hat.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS((void)reverse_step(x_t, 0, x0_hat, s, a), ValidationError);
}

TEST_CASE("reverse_chain is deterministic in the seed and clamps the mask") {
  const DiffusionSchedule s = make_schedule();
  TrajectoryTensor cond = free_tensor(12);
  cond.mask.head(6) = 1.0;
  const GaussianPriorDenoiser den(cond, 0.1);

  TrajectoryTensor init = cond;
  Rng noise(3);
  init.values = noise.normals(init.size());
  init.clamp_observed();

  Rng r1(88), r2(88), r3(89);
  const TrajectoryTensor a = reverse_chain(init, s.T(), s, den, r1);
  const TrajectoryTensor b = reverse_chain(init, s.T(), s, den, r2);
  const TrajectoryTensor c = reverse_chain(init, s.T(), s, den, r3);
  CHECK((a.values - b.values).norm() == doctest::Approx(0.0));
  CHECK((a.values - c.values).norm() > 0.0);
  for (int i = 0; i < 6; ++i) CHECK(a.values[i] == doctest::Approx(cond.observed[i]));

  CHECK_THROWS_AS((void)reverse_chain(init, 0, s, den, r1), ValidationError);
  CHECK_THROWS_AS((void)reverse_chain(init, s.T() + 1, s, den, r1), ValidationError);
}

TEST_CASE("conditioned chain lands near the prior mean") {
  // A 2-step masked prefix pins the offset and slope of each channel, so the
  // smoothness prior (lambda_smooth = 50) keeps conditional draws within a
  // few meters of mu. The distribution-level unconditional check lives in the
  // acceptance suite.
  const DiffusionSchedule s = make_schedule();
  TrajectoryTensor cond = free_tensor(12);
  cond.mask.head(4) = 1.0;  // steps 0 and 1, both coordinates
  const GaussianPriorDenoiser den(cond, 0.1);
  Rng rng(1234);
  TrajectoryTensor init = cond;
  init.values = den.sample_clean(rng);
  init.clamp_observed();
  const TrajectoryTensor draw = forward_noise(init, s.T(), s, rng);
  const TrajectoryTensor out = reverse_chain(draw, s.T(), s, den, rng);
  CHECK((out.values - den.mean()).cwiseAbs().maxCoeff() < 15.0);
}

TEST_CASE("make_conditioning_tensor masks and copies") {
  const Scenario scn = two_agent_scenario();
  const int steps = scn.num_steps();

  SUBCASE("frozen vs generated masking") {
    const TrajectoryTensor t = make_conditioning_tensor(scn, {"s0"}, 10);
    REQUIRE(t.num_agents == 2);
    REQUIRE(t.num_steps == steps);
    CHECK_FALSE(t.agent_frozen(0));
    CHECK(t.agent_frozen(1));
    // Generated agent: exactly the 10-step prefix is masked.
    for (int k = 0; k < steps; ++k) {
      const double expect = k < 10 ? 1.0 : 0.0;
      CHECK(t.mask[TrajectoryTensor::index(0, k, 0, steps)] == expect);
      CHECK(t.mask[TrajectoryTensor::index(0, k, 1, steps)] == expect);
    }
    // Values mirror the scenario positions.
    for (int k = 0; k < steps; ++k) {
      CHECK(t.values[TrajectoryTensor::index(0, k, 0, steps)] ==
            doctest::Approx(scn.trajectories[0].states[k].position.x()));
      CHECK(t.values[TrajectoryTensor::index(1, k, 1, steps)] ==
            doctest::Approx(scn.trajectories[1].states[k].position.y()));
    }
    CHECK((t.observed - t.values).norm() == doctest::Approx(0.0));
  }
  SUBCASE("prefix clamps to leave at least one free step") {
    const TrajectoryTensor t = make_conditioning_tensor(scn, {"s0"}, steps + 50);
    CHECK_FALSE(t.agent_frozen(0));
    CHECK(t.mask[TrajectoryTensor::index(0, steps - 1, 0, steps)] == 0.0);
    CHECK(t.mask[TrajectoryTensor::index(0, steps - 2, 0, steps)] == 1.0);
  }
  SUBCASE("zero prefix leaves generated agents fully free") {
    const TrajectoryTensor t = make_conditioning_tensor(scn, {"s0", "s1"}, 0);
    CHECK(t.mask.sum() == 0.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS((void)make_conditioning_tensor(scn, {}, 10), ValidationError);
    CHECK_THROWS_AS((void)make_conditioning_tensor(scn, {"ghost"}, 10), ValidationError);
    CHECK_THROWS_AS((void)make_conditioning_tensor(scn, {"s0"}, -1), ValidationError);
  }
}

TEST_CASE("decode_tensor rebuilds a valid scenario") {
  const Scenario base = two_agent_scenario();
  TrajectoryTensor t = make_conditioning_tensor(base, {"s0"}, 10);

  SUBCASE("identity tensor reproduces positions; frozen agent verbatim") {
    const Scenario out = decode_tensor(t, base);
    REQUIRE(out.num_agents() == 2);
    for (int k = 0; k < base.num_steps(); ++k) {
      CHECK(out.trajectories[0].states[k].position.x() ==
            doctest::Approx(base.trajectories[0].states[k].position.x()));
      // Frozen agent keeps speed/heading, not just positions.
      CHECK(out.trajectories[1].states[k].speed ==
            doctest::Approx(base.trajectories[1].states[k].speed));
    }
    CHECK_NOTHROW(validate_scenario(out));
  }

  SUBCASE("speeds come from forward differences, last step repeated") {
    // Overwrite the generated agent's free tail with a crafted path.
    const int steps = t.num_steps;
    for (int k = 10; k < steps; ++k) {
      t.values[TrajectoryTensor::index(0, k, 0, steps)] = 8.0 + 0.25 * (k - 10);
      t.values[TrajectoryTensor::index(0, k, 1, steps)] = 0.0;
    }
    const Scenario out = decode_tensor(t, base);
    const Trajectory& traj = out.trajectories[0];
    for (int k = 10; k + 1 < steps; ++k) {
      const double d =
          (traj.states[k + 1].position - traj.states[k].position).norm();
      CHECK(traj.states[k].speed == doctest::Approx(d / base.dt()));
    }
    CHECK(traj.states[steps - 1].speed == doctest::Approx(traj.states[steps - 2].speed));
    CHECK(traj.states[steps - 1].heading == traj.states[steps - 2].heading);
    CHECK_NOTHROW(validate_scenario(out));
  }

  SUBCASE("random tensors always decode to consistent scenarios") {
    Rng rng(555);
    t.values = 20.0 * rng.normals(t.size());
    t.clamp_observed();
    const Scenario out = decode_tensor(t, base);
    CHECK_NOTHROW(validate_scenario(out));
  }

  SUBCASE("zero-motion steps carry the previous heading") {
    const int steps = t.num_steps;
    // Hold the position constant after step 20.
    const double x20 = t.values[TrajectoryTensor::index(0, 20, 0, steps)];
    const double y20 = t.values[TrajectoryTensor::index(0, 20, 1, steps)];
    for (int k = 21; k < steps; ++k) {
      t.values[TrajectoryTensor::index(0, k, 0, steps)] = x20;
      t.values[TrajectoryTensor::index(0, k, 1, steps)] = y20;
    }
    const Scenario out = decode_tensor(t, base);
    const Trajectory& traj = out.trajectories[0];
    for (int k = 21; k < steps; ++k)
      CHECK(traj.states[k].heading == doctest::Approx(traj.states[20].heading));
  }

  SUBCASE("shape mismatch throws") {
    TrajectoryTensor small = free_tensor(4);
    CHECK_THROWS_AS((void)decode_tensor(small, base), DimensionMismatch);
  }
}
