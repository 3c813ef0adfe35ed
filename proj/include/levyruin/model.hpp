#pragma once

#include <optional>
#include <string>
#include <vector>

#include "levyruin/jump_law.hpp"

namespace levyruin {

// Levy triplet under the standard truncation h(x) = x 1{|x|<=1}, restricted
// to finite activity: the jump part is compound Poisson with the given
// intensity and jump-size law.
struct LevyTriplet {
  double drift = 0.0;          // canonical drift a (resp. a_P)
  double diffusion_var = 0.0;  // sigma^2
  double jump_intensity = 0.0; // lambda
  JumpLaw jump_law{};
};

struct ModelPair {
  LevyTriplet r;  // returns process driving the price E(R)
  LevyTriplet p;  // business (revenue/expense) process
};

// Drift of the compound-Poisson-plus-drift representation,
// c = a - lambda * E[h(xi)], i.e. the slope between jumps.
double compound_drift(const LevyTriplet& t);

// Standing-assumption checks. Returns one message per violated clause;
// empty result means the model is admissible.
std::vector<std::string> validate(const ModelPair& m);

inline bool is_valid(const ModelPair& m) { return validate(m).empty(); }

// True when P is an increasing process (never admissible here).
bool is_subordinator(const LevyTriplet& p);

// Triplet of the log price V = ln E(R). The jump measure of V is the image
// of R's under x -> ln(1+x); it stays in the parametric families only for
// atomic laws, so `v_jump_law` is present exactly when representable
// (None or DiscreteAtoms input). `r_jump_law` always carries the pre-image
// law, which together with the map determines V's jumps.
struct LogPriceTriplet {
  double drift = 0.0;          // a_V = a - sigma^2/2 + Pi(h(ln(1+x)) - h)
  double diffusion_var = 0.0;  // unchanged sigma^2
  double jump_intensity = 0.0;
  std::optional<JumpLaw> v_jump_law;
  JumpLaw r_jump_law{};
};

LogPriceTriplet log_price_triplet(const LevyTriplet& r);

// Precomputed constants used by the simulators and the cumulant function.
struct Dynamics {
  double cv = 0.0;       // V drift between jumps: a - sigma^2/2 - lambda E[h(xi)]
  double sigma = 0.0;    // sqrt(r.diffusion_var)
  double lam_r = 0.0;
  double cp = 0.0;       // P drift between jumps
  double sigma_p = 0.0;
  double lam_p = 0.0;
  double ev1 = 0.0;      // E V_1 = cv + lambda E[ln(1+xi)]
  JumpLaw r_law{};
  JumpLaw p_law{};
};

Dynamics make_dynamics(const ModelPair& m);

}  // namespace levyruin
