#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "levyruin/cumulant.hpp"
#include "levyruin/errors.hpp"
#include "levyruin/fixed_point.hpp"
#include "levyruin/parallel.hpp"
#include "levyruin/path_sim.hpp"
#include "levyruin/presets.hpp"
#include "levyruin/stats.hpp"

using namespace levyruin;

namespace {

ModelPair gbm_model(double a, double sigma2) {
  ModelPair m = presets::example1_powertail();
  m.r.drift = a;
  m.r.diffusion_var = sigma2;
  return m;
}

}  // namespace

TEST_CASE("contractive power and truncation depth for the GBM preset") {
  // H(p) = (1/2 - 3/2 + p/2) p is minimised over (0, 1] at p = 1, rho = e^{-1/2}
  PerpetuitySampler s(presets::example1_powertail(), 0.0, 1e-3, 1, 2);
  CHECK(s.p() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.rho() == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  const double expected_n =
      std::ceil(std::log(s.pilot_abs_moment() / 1e-3) / 0.5);
  CHECK(s.depth() == static_cast<std::uint32_t>(expected_n));

  const PerpetuitySample draw = s.draw(0);
  CHECK(draw.depth == s.depth());
  CHECK(draw.trunc_bound <= 1e-3);
  CHECK(draw.trunc_bound > 0.0);
}

TEST_CASE("no contractive power when H >= 0 on (0, 1]") {
  CHECK_THROWS_AS((void)PerpetuitySampler(gbm_model(0.5, 1.0), 0.0, 1e-3, 1),
                  NoContractivePowerError);
  // explicitly supplied p with H(p) >= 0 is rejected too
  CHECK_THROWS_AS((void)PerpetuitySampler(gbm_model(0.5, 1.0), 0.5, 1e-3, 1),
                  NoContractivePowerError);
}

TEST_CASE("fixed point: Y_inf =d= Q + M Y_inf' (KS at 1%)") {
  const ModelPair m = presets::example1_powertail();
  const std::uint64_t n = 30'000;
  auto a = y_infinity_ensemble(m, n, 1e-3, 11, 2);
  auto y2 = y_infinity_ensemble(m, n, 1e-3, 12, 2);
  std::vector<double> b(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    const MQSample mq = sample_MQ(m, 13, k);
    b[k] = mq.q1 + mq.m1 * y2[k];
  }
  const double d = stats::ks_statistic(a, b);
  CHECK(d < stats::ks_critical(0.01, n, n));
}

TEST_CASE("series composition agrees in law with the path integrator at n = 1, 2, 5") {
  const ModelPair m = presets::example1_powertail();
  const std::uint64_t nrep = 15'000;
  for (const int nsteps : {1, 2, 5}) {
    std::vector<double> from_series(nrep), from_path(nrep);
    for (std::uint64_t k = 0; k < nrep; ++k) {
      UnitIntervalSampler s(m, 1000 + nsteps, k);
      double val = 0.0, z = 1.0;
      for (int j = 0; j < nsteps; ++j) {
        const MQSample mq = s.next();
        val += z * mq.q1;
        z *= mq.m1;
      }
      from_series[k] = val;
    }
    PathConfig cfg;
    cfg.horizon = nsteps;
    cfg.seed = 2000 + nsteps;
    for (std::uint64_t k = 0; k < nrep; ++k) {
      cfg.replicate_index = k;
      from_path[k] = sample_path(m, cfg).y.back();
    }
    const double d = stats::ks_statistic(from_series, from_path);
    CHECK(d < stats::ks_critical(0.01, nrep, nrep));
  }
}

TEST_CASE("sign structure: Y_inf charges both half-lines for the dual model") {
  const auto draws = y_infinity_ensemble(presets::example1_powertail(), 20'000, 1e-3, 21, 2);
  const auto pos = std::count_if(draws.begin(), draws.end(), [](double x) { return x > 0; });
  CHECK(pos > 0);
  CHECK(pos < static_cast<long>(draws.size()));
}

TEST_CASE("truncation honesty: doubling the depth moves the 0.99-quantile within bound") {
  const ModelPair m = presets::example1_powertail();
  for (const double eps : {1e-3, 1e-4}) {
    PerpetuitySampler s(m, 0.0, eps, 31, 2);
    const std::uint64_t n = 40'000;
    std::vector<double> base(n), deep(n);
    parallel_replicates(n, 2, [&](std::uint64_t lo, std::uint64_t hi) {
      for (std::uint64_t k = lo; k < hi; ++k) {
        base[k] = std::fabs(s.draw_with_depth(k, s.depth()).value);
        deep[k] = std::fabs(s.draw_with_depth(k, 2 * s.depth()).value);
      }
    });
    std::sort(base.begin(), base.end());
    std::sort(deep.begin(), deep.end());
    const double q_base = stats::quantile_sorted(base, 0.99);
    const double q_deep = stats::quantile_sorted(deep, 0.99);
    // Markov: the dropped tail exceeds t with prob <= rho^N E|Q|^p / t^p, so
    // a 0.005 probability shift is bounded by t* = (bound / 0.005)^{1/p}.
    const double bound = std::pow(s.rho(), s.depth()) * s.pilot_abs_moment();
    const double t_star = std::pow(bound / 0.005, 1.0 / s.p());
    // quantile sampling noise, via the density estimated from nearby quantiles
    const double dq = (stats::quantile_sorted(base, 0.992) -
                       stats::quantile_sorted(base, 0.988));
    const double se_q = std::sqrt(0.99 * 0.01 / static_cast<double>(n)) * dq / 0.004;
    CHECK(std::fabs(q_base - q_deep) <= t_star + 3.0 * se_q);
  }
}

TEST_CASE("autoregression: degenerate B = 0 keeps X at zero") {
  ModelPair m;
  m.r = presets::example1_powertail().r;  // valid V
  m.p = LevyTriplet{};                    // P = 0 so Q = 0 (bypass required)
  const ArPath path = run_autoregression(m, 0.0, 50, 5, 0, /*allow_degenerate=*/true);
  for (double x : path.x) CHECK(x == 0.0);
  CHECK(path.erg_avg.back() == 0.0);
  CHECK(!path.first_negative.has_value());
}

TEST_CASE("certain-ruin model: nearly all autoregression paths go negative") {
  const ModelPair m = presets::example1_certain_ruin();
  const std::uint64_t n_traj = 400;
  const std::uint64_t n_steps = 4000;
  std::vector<int> ruined(n_traj, 0);
  parallel_replicates(n_traj, 2, [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t k = lo; k < hi; ++k) {
      UnitIntervalSampler s(m, 41, k);
      double x = 0.5;  // u = 0.5
      for (std::uint64_t j = 0; j < n_steps; ++j) {
        const MQSample mq = s.next();
        x = (x - mq.q1) / mq.m1;
        if (x < 0.0) {
          ruined[k] = 1;
          break;
        }
      }
    }
  });
  double frac = 0.0;
  for (int r : ruined) frac += r;
  frac /= static_cast<double>(n_traj);
  CHECK(frac >= 0.99);
}

TEST_CASE("ergodic average limit does not depend on the start") {
  // contraction needs E V_1 < 0: take a = 0, sigma^2 = 1
  const ModelPair m = gbm_model(0.0, 1.0);
  const std::uint64_t n_traj = 60, n_steps = 400;
  auto erg_mean = [&](double u, std::uint64_t salt) {
    std::vector<double> finals(n_traj);
    parallel_replicates(n_traj, 2, [&](std::uint64_t lo, std::uint64_t hi) {
      for (std::uint64_t k = lo; k < hi; ++k)
        finals[k] = run_autoregression(m, u, n_steps, salt, k).erg_avg.back();
    });
    return stats::mean_se(finals);
  };
  const auto a = erg_mean(0.0, 51);
  const auto b = erg_mean(5.0, 52);
  const double se = std::sqrt(a.se * a.se + b.se * b.se);
  CHECK(std::fabs(a.mean - b.mean) <= 2.0 * se);
}

TEST_CASE("autoregression long run matches the A/B series fixed point (KS at 1%)") {
  const ModelPair m = gbm_model(0.0, 1.0);  // E ln A = E V_1 = -1/2 < 0
  const std::uint64_t n = 5000;
  std::vector<double> from_ar(n), from_series(n);
  parallel_replicates(n, 2, [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t k = lo; k < hi; ++k) {
      from_ar[k] = run_autoregression(m, 0.0, 64, 61, k).x.back();
      // X_inf^0 = sum_n B_n prod_{j<n} A_j, truncated once the product is tiny
      UnitIntervalSampler s(m, 62, k);
      double val = 0.0, prod = 1.0;
      for (int j = 0; j < 400 && prod > 1e-9; ++j) {
        const MQSample mq = s.next();
        const double a_j = 1.0 / mq.m1;
        const double b_j = -a_j * mq.q1;
        val += b_j * prod;
        prod *= a_j;
      }
      from_series[k] = val;
    }
  });
  const double d = stats::ks_statistic(from_ar, from_series);
  CHECK(d < stats::ks_critical(0.01, n, n));
}

TEST_CASE("ladder times") {
  SUBCASE("V_1 ~ Normal(-1,1): P(T_1 = 1) = Phi(1)") {
    ModelPair m = gbm_model(-0.5, 1.0);
    const std::uint64_t n = 100'000;
    std::uint64_t ones = 0;
    parallel_chunks(n, 2, [&](unsigned, std::uint64_t lo, std::uint64_t hi) {
      std::uint64_t local = 0;
      for (std::uint64_t k = lo; k < hi; ++k)
        local += (sample_ladder_time(m, 71, k) == 1);
      static std::mutex mu;
      std::lock_guard<std::mutex> g(mu);
      ones += local;
    });
    const double p_hat = static_cast<double>(ones) / static_cast<double>(n);
    const double p_true = stats::normal_cdf(1.0);
    CHECK(std::fabs(p_hat - p_true) <= 3.0 * stats::binomial_se(p_true, n));
  }
  SUBCASE("deterministic down-drift: T_1 = 1 always") {
    ModelPair m;
    m.r = LevyTriplet{-1.0, 0.0, 0.0, JumpLaw{}};
    m.p = presets::example1_powertail().p;
    for (std::uint64_t k = 0; k < 50; ++k) CHECK(sample_ladder_time(m, 81, k) == 1);
  }
  SUBCASE("up-drift overflows the cap") {
    ModelPair m;
    m.r = LevyTriplet{1.0, 0.0, 0.0, JumpLaw{}};
    m.p = presets::example1_powertail().p;
    CHECK_THROWS_AS((void)sample_ladder_time(m, 91, 0, 1000), LadderTimeOverflowError);
  }
  SUBCASE("zero-mean walk: sqrt(n) P(T_1 > n) is flat (light Feller check)") {
    const ModelPair m = presets::example1_certain_ruin();
    const std::uint64_t n = 20'000;
    const std::vector<std::uint64_t> levels = {10, 100, 1000};
    std::vector<std::uint64_t> counts(levels.size(), 0);
    for (std::uint64_t k = 0; k < n; ++k) {
      std::uint64_t t1;
      try {
        t1 = sample_ladder_time(m, 95, k, levels.back() + 1);
      } catch (const LadderTimeOverflowError&) {
        t1 = levels.back() + 1;
      }
      for (std::size_t i = 0; i < levels.size(); ++i) counts[i] += (t1 > levels[i]);
    }
    double vmin = kInf, vmax = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const double v = std::sqrt(static_cast<double>(levels[i])) *
                       static_cast<double>(counts[i]) / static_cast<double>(n);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    CHECK(vmax / vmin < 3.0);
  }
}

TEST_CASE("ensemble generation is identical for any worker count") {
  const ModelPair m = presets::example1_powertail();
  const auto a = y_infinity_ensemble(m, 4000, 1e-3, 99, 1);
  const auto b = y_infinity_ensemble(m, 4000, 1e-3, 99, 2);
  const auto c = y_infinity_ensemble(m, 4000, 1e-3, 99, 7);
  CHECK(a == b);
  CHECK(a == c);
}
