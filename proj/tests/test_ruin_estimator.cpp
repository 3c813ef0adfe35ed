#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "levyruin/errors.hpp"
#include "levyruin/fixed_point.hpp"
#include "levyruin/presets.hpp"
#include "levyruin/rng.hpp"
#include "levyruin/ruin_estimator.hpp"
#include "levyruin/stats.hpp"

using namespace levyruin;

TEST_CASE("estimate_G_bar on a known ensemble") {
  std::vector<double> ens;
  for (int i = 1; i <= 100; ++i) ens.push_back(i);
  const auto rows = estimate_G_bar(ens, {0.5, 50.5, 200.0});
  CHECK(rows[0].g_bar == 1.0);
  CHECK(!rows[0].sparse_tail);
  CHECK(rows[1].g_bar == doctest::Approx(0.5));
  CHECK(rows[2].g_bar == 0.0);
  CHECK(rows[2].se == 0.0);
  CHECK(rows[2].sparse_tail);
}

TEST_CASE("G_bar and Psi are non-increasing in u on a shared ensemble") {
  const auto ens = y_infinity_ensemble(presets::example1_powertail(), 30'000, 1e-3, 3, 2);
  std::vector<double> us;
  for (int i = 0; i <= 20; ++i) us.push_back(-1.0 + 0.4 * i);
  const auto rows = estimate_G_bar(ens, us);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].g_bar <= rows[i - 1].g_bar);

  PsiParams params;
  params.n_replicates = 30'000;
  params.seed = 3;
  params.workers = 2;
  const auto psis = estimate_psi_table(presets::example1_powertail(), {1.0, 2.0, 4.0, 8.0},
                                       PsiMethod::paulsen_reduction, params);
  for (std::size_t i = 1; i < psis.size(); ++i) CHECK(psis[i].psi_hat <= psis[i - 1].psi_hat);
}

TEST_CASE("paulsen_reduction preconditions") {
  PsiParams params;
  params.n_replicates = 2000;
  params.workers = 2;
  SUBCASE("two-sided P jumps are rejected") {
    ModelPair m = presets::example1_powertail();
    m.p.jump_law = JumpLaw{DiscreteAtoms{{-0.5, 1.0}, {0.3, 0.7}}};
    CHECK_THROWS_AS((void)estimate_psi(m, 2.0, PsiMethod::paulsen_reduction, params),
                    MethodPreconditionError);
  }
  SUBCASE("Brownian P is gated off by default, overridable") {
    ModelPair m = presets::example1_powertail();
    m.p.diffusion_var = 0.04;
    CHECK_THROWS_AS((void)estimate_psi(m, 2.0, PsiMethod::paulsen_reduction, params),
                    MethodPreconditionError);
    params.allow_brownian_p = true;
    CHECK_NOTHROW((void)estimate_psi(m, 2.0, PsiMethod::paulsen_reduction, params));
  }
}

TEST_CASE("reduction at u = 0 returns Psi = 1 exactly") {
  PsiParams params;
  params.n_replicates = 10'000;
  params.seed = 5;
  params.workers = 2;
  const auto est =
      estimate_psi(presets::example1_powertail(), 0.0, PsiMethod::paulsen_reduction, params);
  CHECK(est.psi_hat == 1.0);
}

TEST_CASE("crossing_mc agrees with the reduction (3 combined SE, light run)") {
  PsiParams params;
  params.n_replicates = 20'000;
  params.eps = 1e-3;
  params.seed = 7;
  params.workers = 2;
  params.horizon0 = 32.0;
  params.grid_step = 1.0 / 256.0;
  const ModelPair m = presets::example1_powertail();
  const auto red = estimate_psi(m, 2.0, PsiMethod::paulsen_reduction, params);
  const auto cross = estimate_psi(m, 2.0, PsiMethod::crossing_mc, params);
  const double se = std::sqrt(red.se * red.se + cross.se * cross.se);
  CHECK(std::fabs(red.psi_hat - cross.psi_hat) <= 3.0 * se);
}

TEST_CASE("bounds method brackets the crossing estimate for two-sided P") {
  ModelPair m = presets::example1_powertail();
  m.p.jump_law = JumpLaw{DiscreteAtoms{{-0.5, 1.0}, {0.3, 0.7}}};
  REQUIRE(validate(m).empty());
  PsiParams params;
  params.n_replicates = 20'000;
  params.seed = 9;
  params.workers = 2;
  params.horizon0 = 32.0;
  const auto bounds = estimate_psi(m, 2.0, PsiMethod::bounds, params);
  CHECK(bounds.psi_lower <= bounds.psi_hat);
  CHECK(bounds.psi_hat <= bounds.psi_upper);
  const auto cross = estimate_psi(m, 2.0, PsiMethod::crossing_mc, params);
  CHECK(cross.psi_hat >= bounds.psi_lower - 3.0 * cross.se);
  CHECK(cross.psi_hat <= bounds.psi_upper + 3.0 * cross.se);
}

TEST_CASE("fit_tail on exact Pareto samples (inverse-CDF oracle)") {
  // P(Y > u) = u^{-2} for u >= 1: draw u = U^{-1/2}
  Stream rng(123, 0, StreamTag::kAux);
  std::vector<double> samples(400'000);
  for (auto& s : samples) s = 1.0 / std::sqrt(rng.uniform());
  const TailFit fit = fit_tail(samples, WindowPolicy{}, 5);
  CHECK(std::fabs(fit.beta_hat - 2.0) <= 0.05);
  CHECK(std::fabs(fit.c_hat - 1.0) <= 0.1);
  CHECK(fit.r2 > 0.99);
  CHECK(fit.u_min < fit.u_max);
  CHECK(fit.beta_ci_halfwidth > 0.0);
}

TEST_CASE("fit_tail rejects empty positive tails") {
  std::vector<double> neg = {-3.0, -2.0, -1.0, -0.5};
  CHECK_THROWS_AS((void)fit_tail(neg), InsufficientTailError);
}

TEST_CASE("fit_tail_pairs needs six usable points") {
  std::vector<std::pair<double, double>> pairs = {
      {1.0, 0.5}, {2.0, 0.13}, {4.0, 0.03}, {8.0, 0.008}};
  CHECK_THROWS_AS((void)fit_tail_pairs(pairs), InsufficientTailError);
  pairs.push_back({16.0, 0.002});
  pairs.push_back({32.0, 0.0005});
  pairs.push_back({64.0, 0.00012});
  const TailFit fit = fit_tail_pairs(pairs);
  CHECK(fit.beta_hat == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("tail fit on a perpetuity ensemble recovers beta = 2 (+-0.15)") {
  const auto ens = y_infinity_ensemble(presets::example1_powertail(), 200'000, 1e-3, 11, 2);
  const TailFit fit = fit_tail(ens, WindowPolicy{}, 13);
  CHECK(fit.beta_hat >= 1.85);
  CHECK(fit.beta_hat <= 2.15);
}

TEST_CASE("classify_regime") {
  SUBCASE("power tail with exponential claims") {
    const RegimeReport r = classify_regime(presets::example1_powertail());
    CHECK(r.regime == Regime::PowerTail);
    REQUIRE(r.beta.has_value());
    CHECK(*r.beta == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("critical drift is certain ruin") {
    const RegimeReport r = classify_regime(presets::example1_certain_ruin());
    CHECK(r.regime == Regime::CertainRuin);
  }
  SUBCASE("Pareto claims with alpha < beta lose the moment condition") {
    ModelPair m = presets::example1_powertail();
    m.p.jump_law = JumpLaw{ParetoPositive{1.5, 0.5}};
    const RegimeReport r = classify_regime(m);
    CHECK(r.regime == Regime::Inconclusive);
    REQUIRE(r.beta.has_value());
  }
  SUBCASE("Pareto claims with alpha > beta keep the power tail") {
    ModelPair m = presets::example1_powertail();
    m.p.jump_law = JumpLaw{ParetoPositive{3.5, 0.5}};
    CHECK(classify_regime(m).regime == Regime::PowerTail);
  }
}
