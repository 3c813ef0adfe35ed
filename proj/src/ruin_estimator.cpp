#include "levyruin/ruin_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levyruin/cumulant.hpp"
#include "levyruin/errors.hpp"
#include "levyruin/parallel.hpp"
#include "levyruin/path_sim.hpp"
#include "levyruin/stats.hpp"

namespace levyruin {

namespace {

bool spectrally_positive_p(const LevyTriplet& p) {
  if (p.jump_intensity <= 0.0 || is_none(p.jump_law)) return true;
  return !has_negative_jumps(p.jump_law) && support_min(p.jump_law) >= 0.0;
}

struct CrossingRun {
  std::vector<double> tau;  // first crossing time, or +inf
  double horizon = 0.0;
  double psi_at(double t) const {
    std::size_t c = 0;
    for (double x : tau) c += (x <= t);
    return static_cast<double>(c) / static_cast<double>(tau.size());
  }
};

CrossingRun run_crossings(const ModelPair& m, double u, double horizon, double h,
                          std::uint64_t n, std::uint64_t seed, unsigned workers) {
  CrossingRun run;
  run.horizon = horizon;
  run.tau.assign(n, kInf);
  parallel_replicates(n, workers, [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t k = lo; k < hi; ++k) {
      PathConfig cfg;
      cfg.horizon = horizon;
      cfg.grid_step = h;
      cfg.seed = seed;
      cfg.replicate_index = k;
      if (auto t = first_crossing_time(m, u, cfg)) run.tau[k] = *t;
    }
  });
  return run;
}

}  // namespace

std::string method_name(PsiMethod m) {
  switch (m) {
    case PsiMethod::paulsen_reduction: return "paulsen_reduction";
    case PsiMethod::crossing_mc: return "crossing_mc";
    case PsiMethod::bounds: return "bounds";
  }
  return "?";
}

std::vector<GBarRow> estimate_G_bar(std::vector<double> ensemble,
                                    const std::vector<double>& u_list) {
  if (ensemble.empty()) throw Error("bad_config", "empty ensemble");
  std::sort(ensemble.begin(), ensemble.end());
  const std::size_t n = ensemble.size();
  std::vector<GBarRow> rows;
  rows.reserve(u_list.size());
  for (double u : u_list) {
    GBarRow r;
    r.u = u;
    r.g_bar = stats::exceedance_sorted(ensemble, u);
    r.se = stats::binomial_se(r.g_bar, n);
    r.sparse_tail = (r.g_bar == 0.0);
    rows.push_back(r);
  }
  return rows;
}

namespace {

RuinEstimate reduction_from_ensemble(const std::vector<double>& sorted, double u,
                                     PsiMethod method) {
  const std::size_t n = sorted.size();
  const double g_u = stats::exceedance_sorted(sorted, u);
  const double g_0 = stats::exceedance_sorted(sorted, 0.0);
  if (g_0 <= 0.0)
    throw InsufficientTailError("Y_inf ensemble has no positive mass: Gbar(0) = 0");
  RuinEstimate est;
  est.u = u;
  est.method = method;
  est.n_replicates = n;
  est.g_bar_hat = g_u;
  est.g_bar0_hat = g_0;
  est.psi_hat = g_u / g_0;
  // Delta-method SE for the ratio of nested exceedance frequencies.
  const double nn = static_cast<double>(n);
  if (g_u > 0.0) {
    const double var_rel = (1.0 - g_u) / (nn * g_u) - (1.0 - g_0) / (nn * g_0);
    est.se = est.psi_hat * std::sqrt(std::max(var_rel, 0.0));
  }
  est.psi_lower = g_u;
  est.psi_upper = std::min(1.0, g_u / g_0);
  return est;
}

}  // namespace

std::vector<RuinEstimate> estimate_psi_table(const ModelPair& m,
                                             const std::vector<double>& u_list,
                                             PsiMethod method, const PsiParams& params) {
  std::vector<RuinEstimate> out;
  if (method == PsiMethod::paulsen_reduction || method == PsiMethod::bounds) {
    if (method == PsiMethod::paulsen_reduction) {
      if (!spectrally_positive_p(m.p))
        throw MethodPreconditionError(
            "paulsen_reduction needs a spectrally positive P (no jumps on ]-inf,0])");
      if (m.p.diffusion_var > 0.0 && !params.allow_brownian_p)
        throw MethodPreconditionError(
            "paulsen_reduction is gated on sigma_P = 0 (set allow_brownian_p to override)");
    }
    std::vector<double> ens = y_infinity_ensemble(m, params.n_replicates, params.eps,
                                                  params.seed, params.workers);
    std::sort(ens.begin(), ens.end());
    for (double u : u_list) out.push_back(reduction_from_ensemble(ens, u, method));
    if (method == PsiMethod::bounds) {
      for (auto& e : out) e.psi_hat = 0.5 * (e.psi_lower + e.psi_upper);
    }
    return out;
  }

  // crossing_mc: simulate once per horizon, derive Psi(u, T) from the first
  // crossing times; grow the horizon until the estimate stabilises within
  // one standard error (checked against the half-horizon value of the same
  // run, so the estimate is monotone in T by construction).
  for (double u : u_list) {
    double horizon = params.horizon0;
    CrossingRun run;
    for (int round = 0;; ++round) {
      run = run_crossings(m, u, horizon, params.grid_step, params.n_replicates,
                          params.seed + static_cast<std::uint64_t>(round), params.workers);
      const double psi_full = run.psi_at(horizon);
      const double psi_half = run.psi_at(0.5 * horizon);
      const double se = stats::binomial_se(psi_full, params.n_replicates);
      if (!params.adapt_horizon || round >= params.max_doublings ||
          psi_full - psi_half < se)
        break;
      horizon *= 4.0;
    }
    double h = params.grid_step;
    double psi = run.psi_at(run.horizon);
    if (params.adapt_grid) {
      for (int halved = 0; halved < params.max_halvings; ++halved) {
        const CrossingRun finer =
            run_crossings(m, u, run.horizon, 0.5 * h, params.n_replicates,
                          params.seed + 1000 + static_cast<std::uint64_t>(halved),
                          params.workers);
        const double psi_fine = finer.psi_at(run.horizon);
        const double se = stats::binomial_se(psi_fine, params.n_replicates);
        const bool settled = std::fabs(psi_fine - psi) < se;
        h *= 0.5;
        psi = psi_fine;
        if (settled) break;
      }
    }
    RuinEstimate est;
    est.u = u;
    est.method = PsiMethod::crossing_mc;
    est.n_replicates = params.n_replicates;
    est.horizon = run.horizon;
    est.psi_hat = psi;
    est.se = stats::binomial_se(est.psi_hat, params.n_replicates);
    est.psi_lower = est.psi_hat;
    est.psi_upper = est.psi_hat;
    out.push_back(est);
  }
  return out;
}

RuinEstimate estimate_psi(const ModelPair& m, double u, PsiMethod method,
                          const PsiParams& params) {
  return estimate_psi_table(m, {u}, method, params).front();
}

namespace {

TailFit fit_from_points(const std::vector<double>& us, const std::vector<double>& gs) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < us.size(); ++i) {
    if (gs[i] > 0.0 && us[i] > 0.0) {
      lx.push_back(std::log(us[i]));
      ly.push_back(std::log(gs[i]));
    }
  }
  if (lx.size() < 6)
    throw InsufficientTailError("fewer than 6 usable grid points in the tail window");
  const auto f = stats::ols(lx, ly);
  TailFit out;
  out.beta_hat = -f.slope;
  out.c_hat = std::exp(f.intercept);
  out.r2 = f.r2;
  out.u_min = std::exp(lx.front());
  out.u_max = std::exp(lx.back());
  out.beta_ci_halfwidth = 1.96 * f.slope_se;
  return out;
}

}  // namespace

TailFit fit_tail(std::vector<double> samples, const WindowPolicy& wp, std::uint64_t seed) {
  if (samples.empty()) throw InsufficientTailError("empty sample");
  std::sort(samples.begin(), samples.end());
  if (samples.back() <= 0.0)
    throw InsufficientTailError("no positive samples: tail fit undefined");

  double u_min = stats::quantile_sorted(samples, wp.q_lo);
  const double u_max = stats::quantile_sorted(samples, wp.q_hi);
  const double min_pos =
      *std::upper_bound(samples.begin(), samples.end(), 0.0);  // smallest positive
  u_min = std::max(u_min, min_pos);
  if (!(u_min > 0.0) || !(u_max > u_min))
    throw InsufficientTailError("tail window is not positive");

  const int J = std::max(wp.n_points, 6);
  std::vector<double> us(J), gs(J);
  const double lr = std::log(u_max / u_min);
  for (int j = 0; j < J; ++j) {
    us[j] = u_min * std::exp(lr * static_cast<double>(j) / (J - 1));
    gs[j] = stats::exceedance_sorted(samples, us[j]);
  }
  TailFit fit = fit_from_points(us, gs);

  // Bootstrap of the slope via multinomial resampling of the cell counts
  // between grid points (equivalent to index resampling for these statistics).
  if (wp.bootstrap > 0) {
    const std::size_t n = samples.size();
    std::vector<std::uint64_t> cum(J);  // exceedance counts at each grid point
    for (int j = 0; j < J; ++j)
      cum[j] = static_cast<std::uint64_t>(std::llround(
          gs[j] * static_cast<double>(n)));
    Stream rng(seed, 0, StreamTag::kAux);
    std::vector<double> betas;
    betas.reserve(wp.bootstrap);
    for (int b = 0; b < wp.bootstrap; ++b) {
      // sequential binomial thinning reproduces a multinomial over the cells
      std::vector<double> gstar(J);
      std::uint64_t prev_level = n;
      std::uint64_t star_prev = n;
      for (int j = 0; j < J; ++j) {
        // count falling below us[j] among those still above us[j-1]
        const std::uint64_t below = prev_level - cum[j];
        std::uint64_t thinned = 0;
        if (prev_level > 0) {
          const double pr = static_cast<double>(below) / static_cast<double>(prev_level);
          thinned = rng.binomial(star_prev, pr);
        }
        const std::uint64_t star_now = star_prev - thinned;
        gstar[j] = static_cast<double>(star_now) / static_cast<double>(n);
        prev_level = cum[j];
        star_prev = star_now;
      }
      try {
        betas.push_back(fit_from_points(us, gstar).beta_hat);
      } catch (const InsufficientTailError&) {
        continue;
      }
    }
    if (betas.size() > 8) {
      const auto ms = stats::mean_se(betas);
      fit.beta_ci_halfwidth =
          1.96 * ms.se * std::sqrt(static_cast<double>(betas.size()));
    }
  }
  return fit;
}

TailFit fit_tail_pairs(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<double> us, gs;
  for (const auto& [u, g] : pairs) {
    us.push_back(u);
    gs.push_back(g);
  }
  return fit_from_points(us, gs);
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::PowerTail: return "PowerTail";
    case Regime::CertainRuin: return "CertainRuin";
    case Regime::Inconclusive: return "Inconclusive";
  }
  return "?";
}

RegimeReport classify_regime(const ModelPair& m) {
  const CumulantReport rep = analyze_cumulant(m);
  RegimeReport out;
  out.beta = rep.beta;
  if (rep.beta) {
    const bool p_moment_ok = (m.p.jump_intensity <= 0.0 || is_none(m.p.jump_law))
                                 ? true
                                 : abs_moment_finite(m.p.jump_law, *rep.beta);
    if (p_moment_ok) {
      out.regime = Regime::PowerTail;
      out.reason = "H has a positive root in int dom H and E|xi_P|^beta < inf";
      return out;
    }
    out.regime = Regime::Inconclusive;
    out.reason = "beta exists but E|xi_P|^beta = inf (claim-tail moment fails)";
    return out;
  }
  // All supported P jump laws have a finite epsilon-moment, so certain ruin
  // reduces to E V_1 <= 0 with 0 interior to dom H.
  if (rep.dplus_H0 >= 0.0 && rep.q_lower < 0.0 && rep.q_upper > 0.0) {
    out.regime = Regime::CertainRuin;
    out.reason = "E V_1 <= 0: the reserve hits zero with probability one";
    return out;
  }
  out.regime = Regime::Inconclusive;
  out.reason = "no positive root of H on the effective domain";
  return out;
}

}  // namespace levyruin
