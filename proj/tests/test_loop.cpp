// Encoder, channel, filter, controller and the assembled closed loop.

#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ratecost/loop.hpp"

using Catch::Approx;
using namespace ratecost;

namespace {

ChannelConfig channel(double P, double N, double delta) { return ChannelConfig{P, N, delta}; }

LoopOptions options(double horizon, double burn_in, FeedbackMode mode = FeedbackMode::deadbeat) {
  LoopOptions o;
  o.horizon = horizon;
  o.burn_in = burn_in;
  o.feedback = mode;
  return o;
}

}  // namespace

TEST_CASE("encode", "[loop][encoder]") {
  LoopState s;
  s.xbar = 3.0;
  s.p_prior = 4.0;
  CHECK(encode(3.0, s, channel(1.0, 1.0, 0.01)) == 0.0);
  CHECK(encode(3.0, s, channel(100.0, 1.0, 0.01)) == 0.0);
  CHECK(encoder_scale(4.0, channel(1.0, 1.0, 0.01)) == Approx(0.5));
  CHECK(encode(5.0, s, channel(1.0, 1.0, 0.01)) == Approx(1.0));
  s.p_prior = 0.0;
  CHECK(encode(5.0, s, channel(1.0, 1.0, 0.01)) == 0.0);
}

TEST_CASE("channel_transmit", "[loop][channel]") {
  RandomStream rng(8);
  const auto cfg = channel(1.0, 1.0, 0.01);
  RunningMoments m;
  for (int i = 0; i < 100000; ++i) m.add(channel_transmit(0.0, cfg, rng));
  CHECK(std::abs(m.mean()) < 5.0 * std::sqrt(0.01 / 1e5));
  CHECK(m.variance() == Approx(0.01).epsilon(0.02));

  ChannelConfig noiseless = cfg;
  noiseless.noise_intensity = 0.0;
  CHECK(channel_transmit(2.5, noiseless, rng) == 2.5 * 0.01);
}

TEST_CASE("measurement update information matches the sampled channel", "[loop][channel]") {
  for (double delta : {1e-1, 1e-2, 1e-3}) {
    const auto cfg = channel(2.0, 0.5, delta);
    LoopState s;
    s.p_prior = 3.0;
    const auto post = measurement_update(0.0, s, cfg);
    CHECK(post.info_nats == Approx(0.5 * std::log1p(cfg.power * delta / cfg.noise_intensity)));
    CHECK(post.info_nats / delta <= cfg.capacity());
    CHECK(post.info_nats / delta == Approx(cfg.capacity()).epsilon(2.0 * delta));
  }
}

TEST_CASE("kalman_update", "[loop][kalman]") {
  SECTION("perfect observation limit") {
    RandomStream rng(4);
    const auto cfg = channel(1e14, 1.0, 0.01);
    LoopState s;
    s.xbar = 0.0;
    s.p_prior = 1.0;
    const double x = 0.7;
    const double dy = channel_transmit(encode(x, s, cfg), cfg, rng);
    const auto post = measurement_update(dy, s, cfg);
    CHECK(post.p_post < 1e-10);
    CHECK(post.xhat == Approx(x).margin(1e-5));
  }

  SECTION("halving the error variance costs half a log 2") {
    LoopState s;
    s.p_prior = 2.0;
    const auto post = observe(0.0, 2.0, s);
    CHECK(post.p_post == Approx(1.0));
    CHECK(post.info_nats == Approx(0.5 * std::log(2.0)));
    CHECK(post.info_nats == Approx(0.3466).margin(1e-4));
  }

  SECTION("time update") {
    LoopState s;
    s.xhat = 2.0;
    s.p_post = 0.5;
    const auto next = time_update(s, {0.5, 1.0, 0.25, 0.1});
    CHECK(next.xbar == Approx(2.0));
    CHECK(next.p_prior == Approx(0.375));
  }

  SECTION("state invariants along a run") {
    RandomStream rng(12);
    const auto cfg = channel(1.0, 1.0, 0.01);
    const auto step = discretize_constant({0.5, 0.0, 1.0}, cfg.delta);
    LoopState s;
    s.p_prior = 1.0;
    double x = 0.3, info = 0.0;
    for (int k = 0; k < 2000; ++k) {
      const double dy = channel_transmit(encode(x, s, cfg), cfg, rng);
      s = measurement_update(dy, s, cfg);
      CHECK(s.p_post >= 0.0);
      CHECK(s.p_post <= s.p_prior);
      CHECK(s.info_nats >= info);
      info = s.info_nats;
      x = step_discrete(x, step, rng);
      s = time_update(s, step);
    }
  }

  SECTION("non-finite covariance is reported") {
    LoopState s;
    s.p_post = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(time_update(s, {1.0, 0.0, 1.0, 0.1}), NumericalDivergence);
  }
}

TEST_CASE("riccati_root", "[loop][kalman]") {
  CHECK(riccati_root(0.0, 1.0, 1.0) == Approx(1.0));
  RandomStream rng(3);
  for (int i = 0; i < 100; ++i) {
    const double mu = 2.0 * rng.uniform_positive(), s2 = 3.0 * rng.uniform_positive(), rho2 = rng.uniform_positive();
    const double p = riccati_root(mu, s2, rho2);
    CHECK(p > 0.0);
    CHECK(p * p / rho2 + 2.0 * mu * p - s2 == Approx(0.0).margin(1e-12 * (1.0 + s2)));
  }
}

TEST_CASE("the filter variance settles on the Riccati fixed point", "[loop][kalman][property]") {
  const auto cfg = channel(1.0, 1.0, 1e-3);
  const auto step = discretize_constant({0.5, 0.0, 1.0}, cfg.delta);
  LoopState s;
  s.p_prior = 1.0;
  for (int k = 0; k < 40000; ++k) s = kalman_update(0.0, s, step, cfg);
  const double before = s.p_prior;
  s = measurement_update(0.0, s, cfg);
  CHECK(s.p_post == Approx((1.0 - s.gain) * s.p_prior).epsilon(1e-12));
  s = time_update(s, step);
  CHECK(std::abs(s.p_prior - (step.A * step.A * s.p_post + step.sigma2)) / s.p_prior < 1e-6);
  CHECK(std::abs(s.p_prior - before) / before < 1e-6);
  CHECK(s.p_prior == Approx(deadbeat_stationary_variance(0.5, 1.0, cfg)).epsilon(1e-6));
  // Midpoint of prior and posterior: p* (1 + C^2 delta / (mu + C)) + O(delta^2).
  const double mid = 0.5 * (s.p_prior + measurement_update(0.0, s, cfg).p_post);
  const double C = cfg.capacity(), pstar = 1.0 / (2.0 * (0.5 + C));
  CHECK(mid == Approx(pstar * (1.0 + C * C * cfg.delta / (0.5 + C))).epsilon(1e-6));
  const double rho2 = cfg.noise_intensity * pstar / cfg.power;
  CHECK(pstar == Approx(riccati_root(0.5, 1.0, rho2)).epsilon(1e-12));
}

TEST_CASE("control_action", "[loop][controller]") {
  LoopState s;
  const double delta = 0.01;

  SECTION("rate-form law") {
    auto model = ModelConfig::centered(2.0, 0.0, 1.0, true);
    s.xhat = 3.0;
    CHECK(control_action(s, 1.0, 1.0, model, FeedbackMode::proportional, delta).sample.lambda == Approx(-3.0));

    model = ModelConfig::centered(2.0, 10.0, 1.0);
    s.xhat = 10.0;
    CHECK(control_action(s, 0.5, 1.0, model, FeedbackMode::proportional, delta).sample.lambda == Approx(5.0));
    s.xhat = 12.0;
    CHECK(control_action(s, 0.5, 1.0, model, FeedbackMode::proportional, delta).sample.lambda == Approx(4.0));
  }

  SECTION("deadbeat holds the mean at zero deviation and cancels it otherwise") {
    const auto model = ModelConfig::centered(2.0, 10.0, 1.0, true);
    s.xhat = 10.0;
    const auto hold = control_action(s, 0.5, 1.0, model, FeedbackMode::deadbeat, delta);
    CHECK(hold.sample.lambda == Approx(5.0));
    s.xhat = 10.4;
    const auto d = control_action(s, 0.5, 1.0, model, FeedbackMode::deadbeat, delta);
    const double A = std::exp(-0.5 * delta);
    CHECK(A * s.xhat + d.lam == Approx(10.0));
  }

  SECTION("clamping") {
    const auto model = ModelConfig::centered(2.0, 0.0, 1.0);
    s.xhat = 3.0;
    const auto d = control_action(s, 1.0, 1.0, model, FeedbackMode::proportional, delta);
    CHECK(d.clamped);
    CHECK(d.sample.lambda == 0.0);
    CHECK(d.lam == 0.0);
  }
}

TEST_CASE("closed loop at zero capacity is the open loop", "[loop][closed]") {
  const auto model = ModelConfig::centered(2.0, 0.0, 1.0, true);
  const auto run = run_closed_loop(model, channel(0.0, 1.0, 0.01), {PlantKind::linear_gaussian, 1.0},
                                   constant_mu(0.5), options(2000.0, 20.0), 20, 7);
  CHECK(run.achieved_var == Approx(1.0).epsilon(0.03));
  CHECK(run.info_rate == 0.0);
  CHECK(directed_info_rate(run) == 0.0);
  CHECK_FALSE(run.diverged());
}

TEST_CASE("matched Gauss-Markov loop", "[loop][closed]") {
  const auto model = ModelConfig::centered(2.0, 0.0, 0.5, true);
  const auto cfg = channel(1.0, 1.0, 0.01);
  auto opt = options(500.0, 20.0);
  opt.record_stride = 100;
  const auto run = run_closed_loop(model, cfg, {PlantKind::linear_gaussian, 1.0}, constant_mu(0.5), opt, 20, 99);

  CHECK(run.achieved_var == Approx(0.5).epsilon(0.05));
  CHECK(run.achieved_var == Approx(deadbeat_stationary_variance(0.5, 1.0, cfg)).epsilon(0.03));
  CHECK(directed_info_rate(run) == Approx(0.5).epsilon(0.05));
  CHECK(run.capacity == Approx(0.5));
  CHECK(run.bounds.re_lower == Approx(0.5));
  CHECK(run.bounds.var_lower == Approx(0.5));

  // Power audit and orthogonality of error and estimate.
  CHECK(run.mean_power == Approx(cfg.power).epsilon(0.03));
  CHECK(std::abs(run.error_estimate_correlation) < 0.02);

  // Converse.
  CHECK(run.achieved_var >= run.bounds.var_lower * 0.97);
  CHECK(run.info_rate >= rd_lower_continuous(run.mean_sigma2, run.mean_mu, run.achieved_var).value * 0.98);

  CHECK(run.trajectories.size() == 20);
  CHECK(run.trajectories.front().size() == 500);
  CHECK(run.clamp_fraction == 0.0);
}

TEST_CASE("mean regulation with positive rates", "[loop][closed]") {
  const double x_star = 20.0;
  const auto model = ModelConfig::centered(2.0, x_star, 1.0);
  for (auto mode : {FeedbackMode::deadbeat, FeedbackMode::proportional}) {
    auto m = model;
    m.allow_signed_lambda = mode == FeedbackMode::deadbeat;
    const auto run = run_closed_loop(m, channel(1.0, 1.0, 0.01), {PlantKind::linear_gaussian, 1.0},
                                     constant_mu(0.5), options(500.0, 20.0, mode), 8, 3);
    CHECK(run.achieved_mean == Approx(x_star).epsilon(0.02));
  }
}

TEST_CASE("clamp audit in the biological regime", "[loop][closed][property]") {
  // x* >= 5 sqrt(D) with nonnegative rates.
  const auto model = ModelConfig::centered(2.0, 10.0, 1.0);
  const auto run = run_closed_loop(model, channel(1.0, 1.0, 0.01), {PlantKind::linear_gaussian, 1.0},
                                   constant_mu(0.5), options(500.0, 20.0, FeedbackMode::proportional), 8, 5);
  CHECK(run.clamp_fraction < 0.01);
  CHECK(run.achieved_var >= run.bounds.var_lower * 0.97);
}

TEST_CASE("constant degradation is optimal among equal-energy schedules", "[loop][closed][property]") {
  const auto model = ModelConfig::centered(2.0, 0.0, 0.5, true);
  const auto cfg = channel(1.0, 1.0, 0.01);
  const PlantConfig plant{PlantKind::linear_gaussian, 1.0};
  const double mu = 0.5, eps = 0.9;
  const double hi = mu * std::sqrt(1.0 + eps), lo = mu * std::sqrt(1.0 - eps);
  const auto opt = options(500.0, 20.0);

  const std::vector<MuSchedule> family{
      [=](double, std::size_t k) { return k % 2 ? hi : lo; },
      [=](double xhat, std::size_t) { return xhat > 0.0 ? hi : lo; },
      [=](double xhat, std::size_t) { return xhat < 0.0 ? hi : lo; },
  };
  const auto best = run_closed_loop(model, cfg, plant, constant_mu(mu), opt, 10, 21);
  for (const auto& schedule : family) {
    const auto run = run_closed_loop(model, cfg, plant, schedule, opt, 10, 21);
    INFO("mean mu " << run.mean_mu);
    CHECK(run.mean_mu < mu);
    CHECK(best.achieved_var <= run.achieved_var * 1.02);
    CHECK(run.achieved_var >= var_lower(1.0, run.mean_mu, cfg.capacity()) * 0.97);
  }
}

TEST_CASE("mu schedule outside the admissible band is rejected", "[loop][closed]") {
  const auto model = ModelConfig::centered(1.0, 0.0, 0.5, true);
  const PlantConfig plant{PlantKind::linear_gaussian, 1.0};
  CHECK_THROWS_AS(run_closed_loop(model, channel(1.0, 1.0, 0.01), plant, constant_mu(1.5), options(1.0, 0.0), 1, 0),
                  ConstraintViolation);
  auto opt = options(1.0, 0.0);
  opt.mu_floor = 0.2;
  CHECK_THROWS_AS(run_closed_loop(model, channel(1.0, 1.0, 0.01), plant, constant_mu(0.1), opt, 1, 0),
                  ConstraintViolation);
  CHECK_NOTHROW(run_closed_loop(model, channel(1.0, 1.0, 0.01), plant, constant_mu(0.3), opt, 1, 0));
}

TEST_CASE("divergence is reported, not thrown", "[loop][closed]") {
  const auto model = ModelConfig::centered(1.0, 0.0, 1e-6, true);
  const auto run = run_closed_loop(model, channel(0.0, 1.0, 0.01), {PlantKind::linear_gaussian, 1.0},
                                   constant_mu(0.0), options(100.0, 0.0), 3, 1);
  CHECK(run.diverged());
  CHECK(run.diverged_replicas == 3);
  CHECK(run.notes.size() == 3);
}

TEST_CASE("birth-death plant", "[loop][closed][birthdeath]") {
  const double x_star = 100.0, mu = 1.0;
  const auto model = ModelConfig::centered(2.0, x_star, 100.0);
  const auto cfg = channel(1.0, 1.0, 0.01);
  const PlantConfig plant{PlantKind::birth_death, langevin_sigma2(mu * x_star, mu, x_star, 1.0)};
  const auto run = run_closed_loop(model, cfg, plant, constant_mu(mu), options(200.0, 10.0, FeedbackMode::proportional),
                                   4, 17);
  CHECK(run.achieved_mean == Approx(x_star).epsilon(0.03));
  CHECK(run.achieved_fano < 1.0);
  CHECK(run.achieved_fano >= run.bounds.fano_lower * 0.93);
  CHECK(run.gamma_x == Approx(1.0).epsilon(0.02));
  CHECK(run.ell_x == Approx(1.0).epsilon(0.03));
  CHECK_THROWS_AS(directed_info_rate(run), Unsupported);
}

TEST_CASE("closed loop is deterministic and independent of worker count", "[loop][closed]") {
  const auto model = ModelConfig::centered(2.0, 0.0, 0.5, true);
  const PlantConfig plant{PlantKind::linear_gaussian, 1.0};
  const auto a = run_closed_loop(model, channel(1.0, 1.0, 0.01), plant, constant_mu(0.5), options(50.0, 5.0), 6, 42, 1);
  const auto b = run_closed_loop(model, channel(1.0, 1.0, 0.01), plant, constant_mu(0.5), options(50.0, 5.0), 6, 42, 3);
  const auto c = run_closed_loop(model, channel(1.0, 1.0, 0.01), plant, constant_mu(0.5), options(50.0, 5.0), 6, 43, 1);
  CHECK(a.achieved_var == b.achieved_var);
  CHECK(a.info_rate == b.info_rate);
  CHECK(a.mean_power == b.mean_power);
  CHECK(a.achieved_var != c.achieved_var);
}

TEST_CASE("power_for_variance inverts the deadbeat stationary variance", "[loop][inverse]") {
  for (double D : {0.2, 0.35, 0.8}) {
    const double P = power_for_variance(0.5, 1.0, D, 1.0, 0.01);
    CHECK(deadbeat_stationary_variance(0.5, 1.0, channel(P, 1.0, 0.01)) == Approx(D).epsilon(1e-10));
  }
  CHECK(power_for_variance(0.5, 1.0, 2.0, 1.0, 0.01) == 0.0);
  CHECK(std::isinf(power_for_variance(0.5, 1.0, 1e-4, 1.0, 0.01)));
}
