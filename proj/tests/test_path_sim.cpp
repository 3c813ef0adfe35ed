#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "levyruin/cumulant.hpp"
#include "levyruin/errors.hpp"
#include "levyruin/path_sim.hpp"
#include "levyruin/presets.hpp"
#include "levyruin/stats.hpp"

using namespace levyruin;

namespace {

ModelPair degenerate_v_model(double p_drift) {
  // V = 0: no diffusion, no jumps, zero drift. Standing assumptions fail,
  // so every use goes through the test bypass.
  ModelPair m;
  m.r = LevyTriplet{};
  m.p = LevyTriplet{p_drift, 0.0, 0.0, JumpLaw{}};
  return m;
}

ModelPair gbm_model(double a, double sigma2) {
  ModelPair m = presets::example1_powertail();
  m.r.drift = a;
  m.r.diffusion_var = sigma2;
  return m;
}

}  // namespace

TEST_CASE("drift-only P with V = 0: the integral is exact") {
  // Y_1 = -int_0^1 e^{0} dP = -a_P * 1 = 1 for a_P = -1
  const ModelPair m = degenerate_v_model(-1.0);
  const MQSample s = sample_MQ(m, 3, 0, kDefaultGridStep, /*allow_degenerate=*/true);
  CHECK(s.m1 == 1.0);
  CHECK(s.q1 == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS((void)sample_MQ(m, 3, 0), DegenerateModelError);
}

TEST_CASE("pure-Poisson P makes Y jump down only") {
  // P = N_t (unit claims at unit rate, no drift between jumps): canonical
  // a_P equals E[h(xi)] = 1 so the between-jump slope vanishes. Such a P is
  // an increasing process, hence only reachable through the test bypass.
  ModelPair m = gbm_model(1.5, 1.0);
  m.p = LevyTriplet{1.0, 0.0, 1.0, JumpLaw{DiscreteAtoms{{1.0}, {1.0}}}};
  CHECK(!validate(m).empty());
  bool saw_jump_path = false;
  for (std::uint64_t k = 0; k < 200; ++k) {
    const MQSample s = sample_MQ(m, 5, k, kDefaultGridStep, /*allow_degenerate=*/true);
    CHECK(s.q1 <= 0.0);
    if (s.q1 < 0.0) saw_jump_path = true;
  }
  CHECK(saw_jump_path);
}

TEST_CASE("E M^beta = 1 at the cumulant root (MC, 3 SE)") {
  const ModelPair m = presets::example1_powertail();
  std::vector<double> xs(100'000);
  for (std::uint64_t k = 0; k < xs.size(); ++k) {
    const Dynamics d = make_dynamics(m);
    Stream rv(21, k, StreamTag::kReturns);
    xs[k] = std::exp(-2.0 * draw_log_price_increment(d, rv));
  }
  const auto ms = stats::mean_se(xs);
  CHECK(std::fabs(ms.mean - 1.0) <= 3.0 * ms.se);
}

TEST_CASE("sample_MQ marginals: ln M_1 is the exact Gaussian when Pi = 0") {
  // a = 1.5, sigma^2 = 1, P drift-only: ln M_1 ~ Normal(-1, 1)
  ModelPair m = gbm_model(1.5, 1.0);
  m.p = LevyTriplet{-1.0, 0.0, 0.0, JumpLaw{}};
  REQUIRE(validate(m).empty());
  std::vector<double> lnm(100'000);
  for (std::uint64_t k = 0; k < lnm.size(); ++k)
    lnm[k] = std::log(sample_MQ(m, 9, k).m1);
  const auto ms = stats::mean_se(lnm);
  CHECK(std::fabs(ms.mean - (-1.0)) <= 3.0 * ms.se);
  double var = 0.0;
  for (double x : lnm) var += (x - ms.mean) * (x - ms.mean);
  var /= static_cast<double>(lnm.size() - 1);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("ln E M^q matches H(q) (MC, 3 SE via the delta method)") {
  const ModelPair m = presets::example1_powertail();
  for (double q : {0.5, 1.0}) {
    std::vector<double> xs(100'000);
    for (std::uint64_t k = 0; k < xs.size(); ++k)
      xs[k] = std::pow(sample_MQ(m, 31, k).m1, q);
    const auto ms = stats::mean_se(xs);
    const double ln_mean = std::log(ms.mean);
    const double se_log = ms.se / ms.mean;
    CHECK(std::fabs(ln_mean - evaluate_H(m, q)) <= 3.0 * se_log);
  }
}

TEST_CASE("Q_theta: theta=+1 reproduces sample_MQ bitwise; positivity for down-drift P") {
  ModelPair m = gbm_model(1.5, 1.0);
  m.p = LevyTriplet{-1.0, 0.0, 0.0, JumpLaw{}};
  for (std::uint64_t k = 0; k < 50; ++k) {
    CHECK(sample_Q_theta(m, 1, 77, k) == sample_MQ(m, 77, k).q1);
    CHECK(sample_Q_theta(m, 1, 77, k) > 0.0);   // integrand e^{-V} > 0, dP = -dt
    CHECK(sample_Q_theta(m, -1, 78, k) > 0.0);  // integrand e^{+V} > 0
  }
}

TEST_CASE("L(Q_{-1}) = L(Q_1 / M_1): two-sample KS at 1%") {
  const ModelPair m = presets::example1_powertail();
  const std::uint64_t n = 30'000;
  std::vector<double> a(n), b(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    a[k] = sample_Q_theta(m, -1, 101, k);
    const MQSample mq = sample_MQ(m, 202, k);
    b[k] = mq.q1 / mq.m1;
  }
  const double d = stats::ks_statistic(a, b);
  CHECK(d < stats::ks_critical(0.01, n, n));
}

TEST_CASE("PathSample: structure, positivity, reserve reconstruction") {
  PathConfig cfg;
  cfg.horizon = 4.0;
  cfg.grid_step = 1.0 / 128.0;
  cfg.seed = 5;
  const PathSample s = sample_path(presets::example1_powertail(), cfg);
  REQUIRE(s.times.size() == s.v.size());
  REQUIRE(s.times.size() == s.y.size());
  CHECK(s.times.front() == 0.0);
  CHECK(s.times.back() == doctest::Approx(4.0));
  CHECK(s.y.front() == 0.0);
  for (std::size_t i = 1; i < s.times.size(); ++i) CHECK(s.times[i] >= s.times[i - 1]);
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    CHECK(s.price[i] > 0.0);
    CHECK(s.price[i] == doctest::Approx(std::exp(s.v[i])));
    CHECK(std::isfinite(s.reserve(i, 2.0)));
  }
}

TEST_CASE("determinism: identical (seed, replicate, h) gives identical paths") {
  PathConfig cfg;
  cfg.horizon = 2.0;
  cfg.seed = 19;
  cfg.replicate_index = 3;
  const PathSample a = sample_path(presets::example2_jumps(), cfg);
  const PathSample b = sample_path(presets::example2_jumps(), cfg);
  CHECK(a.times == b.times);
  CHECK(a.v == b.v);
  CHECK(a.p == b.p);
  CHECK(a.y == b.y);
  cfg.replicate_index = 4;
  const PathSample c = sample_path(presets::example2_jumps(), cfg);
  CHECK(a.v != c.v);
}

TEST_CASE("distributional refresh: Y_2 - Y_1 vs M_1' Q_2' (KS at 1%)") {
  const ModelPair m = presets::example1_powertail();
  const std::uint64_t n = 20'000;
  std::vector<double> direct(n), composed(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    UnitIntervalSampler s(m, 303, k);
    const MQSample first = s.next();
    const MQSample second = s.next();
    direct[k] = first.m1 * second.q1;  // Y_2 - Y_1 along one stream
  }
  for (std::uint64_t k = 0; k < n; ++k) {
    const MQSample m1 = sample_MQ(m, 404, k);
    const MQSample q2 = sample_MQ(m, 505, k);
    composed[k] = m1.m1 * q2.q1;
  }
  const double d = stats::ks_statistic(direct, composed);
  CHECK(d < stats::ks_critical(0.01, n, n));
}

TEST_CASE("two-interval path agrees in law with composed unit draws (KS at 1%)") {
  const ModelPair m = presets::example1_powertail();
  const std::uint64_t n = 20'000;
  std::vector<double> from_path(n), from_units(n);
  PathConfig cfg;
  cfg.horizon = 2.0;
  cfg.seed = 606;
  for (std::uint64_t k = 0; k < n; ++k) {
    cfg.replicate_index = k;
    const PathSample s = sample_path(m, cfg);
    // last recorded row at t = 1 carries the post-jump Y_1
    double y1 = 0.0;
    for (std::size_t i = 0; i < s.times.size(); ++i)
      if (s.times[i] <= 1.0) y1 = s.y[i];
    from_path[k] = s.y.back() - y1;
  }
  for (std::uint64_t k = 0; k < n; ++k) {
    UnitIntervalSampler s(m, 707, k);
    const MQSample first = s.next();
    const MQSample second = s.next();
    from_units[k] = first.m1 * second.q1;
  }
  const double d = stats::ks_statistic(from_path, from_units);
  CHECK(d < stats::ks_critical(0.01, n, n));
}

TEST_CASE("unboundedness smoke test: running max of Q keeps growing") {
  const ModelPair m = presets::example1_powertail();
  double max1 = -kInf, max2 = -kInf, max3 = -kInf;
  for (std::uint64_t k = 0; k < 100'000; ++k) {
    const double q = sample_MQ(m, 808, k).q1;
    if (k < 1000) max1 = std::max(max1, q);
    if (k < 10'000) max2 = std::max(max2, q);
    max3 = std::max(max3, q);
  }
  CHECK(max2 > max1);
  CHECK(max3 > max2);
}

TEST_CASE("maximal function of e^{-qV} is finite and stable (sanity)") {
  const ModelPair m = presets::example1_powertail();
  PathConfig cfg;
  cfg.horizon = 1.0;
  cfg.grid_step = 1.0 / 128.0;
  cfg.seed = 909;
  auto mean_sup = [&](std::uint64_t n) {
    double s = 0.0;
    for (std::uint64_t k = 0; k < n; ++k) {
      cfg.replicate_index = k;
      const PathSample ps = sample_path(m, cfg);
      double sup = 0.0;
      for (double v : ps.v) sup = std::max(sup, std::exp(-v));
      s += sup;
    }
    return s / static_cast<double>(n);
  };
  const double m1 = mean_sup(1000);
  const double m2 = mean_sup(2000);
  CHECK(std::isfinite(m1));
  CHECK(m2 / m1 > 0.5);
  CHECK(m2 / m1 < 2.0);
}

TEST_CASE("solution-route consistency: reconstruction vs direct Euler") {
  const std::vector<double> hs = {1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512};
  const auto errs = euler_consistency_errors(presets::example1_powertail(), 2.0, 1.0,
                                             hs, 100, 1111);
  REQUIRE(errs.size() == 4);
  double log_ratio = 0.0;
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    CHECK(errs[i + 1] < errs[i]);  // the gap shrinks monotonically here
    log_ratio += std::log(errs[i + 1] / errs[i]);
  }
  // mean halving ratio over the range: strong order >= 1/2 up to noise
  CHECK(std::exp(log_ratio / 3.0) <= 0.75);
}

TEST_CASE("crossing detection: first_crossing_time is hit iff Y reaches u") {
  const ModelPair m = presets::example1_certain_ruin();
  PathConfig cfg;
  cfg.horizon = 64.0;
  cfg.grid_step = 1.0 / 64.0;
  cfg.seed = 1212;
  int crossed = 0;
  for (std::uint64_t k = 0; k < 200; ++k) {
    cfg.replicate_index = k;
    const auto tau = first_crossing_time(m, 0.5, cfg);
    if (tau) {
      ++crossed;
      CHECK(*tau >= 0.0);
      CHECK(*tau <= 64.0);
    }
  }
  CHECK(crossed > 0);  // certain-ruin model: many paths cross a low barrier
}
