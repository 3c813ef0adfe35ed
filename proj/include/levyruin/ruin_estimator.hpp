#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levyruin/fixed_point.hpp"
#include "levyruin/model.hpp"

namespace levyruin {

struct GBarRow {
  double u = 0.0;
  double g_bar = 0.0;
  double se = 0.0;
  bool sparse_tail = false;  // no exceedances in the ensemble
};

// Exceedance frequencies of one shared Y_inf ensemble (sorted internally).
std::vector<GBarRow> estimate_G_bar(std::vector<double> ensemble,
                                    const std::vector<double>& u_list);

enum class PsiMethod { paulsen_reduction, crossing_mc, bounds };

std::string method_name(PsiMethod m);

struct RuinEstimate {
  double u = 0.0;
  double psi_hat = 0.0;
  double g_bar_hat = 0.0;
  double g_bar0_hat = 1.0;
  PsiMethod method = PsiMethod::paulsen_reduction;
  std::uint64_t n_replicates = 0;
  double se = 0.0;
  double horizon = 0.0;                 // crossing method only
  double psi_lower = 0.0, psi_upper = 1.0;  // bounds method
};

struct PsiParams {
  std::uint64_t n_replicates = 100'000;
  double eps = 1e-3;            // perpetuity truncation tolerance
  std::uint64_t seed = 1;
  unsigned workers = 1;
  // crossing_mc controls
  double horizon0 = 32.0;       // initial horizon, grown until stable
  int max_doublings = 10;
  double grid_step = 1.0 / 256.0;
  bool adapt_horizon = true;
  bool adapt_grid = false;      // halve the step until the estimate settles
  int max_halvings = 3;
  // Override the sigma_P = 0 gate of the Paulsen reduction.
  bool allow_brownian_p = false;
};

// Psi(u) by the requested method. paulsen_reduction requires spectrally
// positive P with sigma_P = 0 (overridable); crossing_mc needs a horizon.
RuinEstimate estimate_psi(const ModelPair& m, double u, PsiMethod method,
                          const PsiParams& params);

// Same method across a grid of u, sharing one ensemble / one path set.
std::vector<RuinEstimate> estimate_psi_table(const ModelPair& m,
                                             const std::vector<double>& u_list,
                                             PsiMethod method, const PsiParams& params);

struct WindowPolicy {
  double q_lo = 0.95;
  double q_hi = 0.999;
  int n_points = 12;   // log-spaced grid over the window
  int bootstrap = 200; // resamples for the beta CI
};

struct TailFit {
  double beta_hat = 0.0;
  double c_hat = 0.0;
  double u_min = 0.0, u_max = 0.0;
  double r2 = 0.0;
  double beta_ci_halfwidth = 0.0;
};

// Log-log regression of the empirical tail of a sample.
TailFit fit_tail(std::vector<double> samples, const WindowPolicy& wp = {},
                 std::uint64_t seed = 0);
// Fit on precomputed (u, Gbar) pairs (no bootstrap; CI from the OLS slope SE).
TailFit fit_tail_pairs(const std::vector<std::pair<double, double>>& pairs);

enum class Regime { PowerTail, CertainRuin, Inconclusive };

struct RegimeReport {
  Regime regime = Regime::Inconclusive;
  std::optional<double> beta;
  std::string reason;
};

std::string regime_name(Regime r);

RegimeReport classify_regime(const ModelPair& m);

}  // namespace levyruin
