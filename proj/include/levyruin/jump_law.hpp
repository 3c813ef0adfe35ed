#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "levyruin/rng.hpp"

namespace levyruin {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Jumps are exponentially distributed on (0, inf).
struct ExponentialPositive {
  double rate = 1.0;
};

// Jump = exp(N(mu, s^2)) - 1, supported on (-1, inf).
struct ShiftedLognormal {
  double mu = 0.0;
  double s = 1.0;
};

// Pareto density alpha * x_min^alpha / x^(alpha+1) on [x_min, inf).
struct ParetoPositive {
  double alpha = 1.0;
  double x_min = 1.0;
};

// Finite discrete law; probabilities must sum to one.
struct DiscreteAtoms {
  std::vector<double> values;
  std::vector<double> probs;
};

// monostate = no jump law (zero intensity).
using JumpLaw = std::variant<std::monostate, ExponentialPositive, ShiftedLognormal,
                             ParetoPositive, DiscreteAtoms>;

inline bool is_none(const JumpLaw& law) {
  return std::holds_alternative<std::monostate>(law);
}

std::string law_name(const JumpLaw& law);

// Structural checks; returns a human-readable problem or "" when fine.
std::string check_law(const JumpLaw& law);

// Support descriptors.
double support_min(const JumpLaw& law);  // essential infimum of the jump size
bool has_negative_jumps(const JumpLaw& law);
bool has_positive_jumps(const JumpLaw& law);

// E (1+xi)^{-q}; +inf when the transform diverges. mellin(law, 0) == 1.
double mellin(const JumpLaw& law, double q);
// d/dq E (1+xi)^{-q} = -E[ ln(1+xi) (1+xi)^{-q} ].
double mellin_dq(const JumpLaw& law, double q);
// Open strip {q : mellin < inf} as (lo, hi) with infinite endpoints allowed.
std::pair<double, double> mellin_domain(const JumpLaw& law);

// E[ xi 1{|xi|<=1} ]  (truncation h(x) = x 1{|x|<=1}).
double mean_h(const JumpLaw& law);
// E[ h(ln(1+xi)) ]  (requires support in (-1, inf)).
double mean_h_log1p(const JumpLaw& law);
// E[ ln(1+xi) ]  (requires support in (-1, inf)).
double mean_log1p(const JumpLaw& law);
// E |xi|^p; +inf when divergent (Pareto with p >= alpha).
double abs_moment(const JumpLaw& law, double p);
inline bool abs_moment_finite(const JumpLaw& law, double p) {
  return abs_moment(law, p) < kInf;
}

double sample(const JumpLaw& law, Stream& rng);

// Draw from the Esscher-tilted law dF~(x) ∝ (1+x)^{-beta} dF(x).
// Exact for atoms and lognormal; rejection sampling otherwise.
double sample_tilted(const JumpLaw& law, double beta, Stream& rng);

}  // namespace levyruin
