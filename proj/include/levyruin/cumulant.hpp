#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "levyruin/model.hpp"

namespace levyruin {

// Report on H(q) = ln E exp(-q V_1): effective domain, right derivative at 0,
// the positive root beta when it exists, and the lattice structure of L(V_1).
struct CumulantReport {
  std::optional<double> beta;
  double q_lower = -kInf;
  double q_upper = kInf;
  double dplus_H0 = 0.0;  // D+H(0) = -E V_1 for the supported families
  std::vector<std::pair<double, double>> h_values;
  bool arithmetic = false;
  std::optional<double> lattice_step;
};

// H(q); exactly 0 at q = 0, +inf outside the effective domain.
double evaluate_H(const ModelPair& m, double q);

// H'(q) on the interior of the domain (analytic, not finite differences).
double cumulant_derivative(const ModelPair& m, double q);

// Endpoints of {q : J(q) < inf} as extended reals.
std::pair<double, double> effective_domain(const ModelPair& m);

// Full cumulant analysis; `beta` is absent when no positive root exists.
CumulantReport analyze_cumulant(const ModelPair& m);

// As analyze_cumulant but throws NoPositiveRootError when beta is absent.
CumulantReport find_root_beta(const ModelPair& m);

// V under the Esscher change of measure dP~ = M^beta dP with M = e^{-V_1}:
// Brownian drift shifted by -beta sigma^2, jump law reweighted by
// (1+x)^{-beta}, intensity rescaled to lambda E(1+xi)^{-beta}.
struct TiltedVModel {
  double cv_tilted = 0.0;       // between-jump drift of V under the tilt
  double drift_av_tilted = 0.0; // canonical a_V - beta sigma^2
  double sigma = 0.0;
  double intensity = 0.0;       // tilted jump intensity
  JumpLaw base_law{};           // pre-tilt R-jump law
  double beta = 0.0;
  // Exact draw of ln M = -V_1 under the tilted measure.
  double sample_log_m(Stream& rng) const;
};

struct TiltedModel {
  TiltedVModel v;
  LevyTriplet p;             // unchanged
  double mean_log_m_tilted;  // E~ ln M = E M^beta ln M = H'(beta) > 0
};

TiltedModel esscher_tilt(const ModelPair& m, double beta);

}  // namespace levyruin
