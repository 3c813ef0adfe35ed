#include "levyruin/presets.hpp"

#include <cmath>

#include "levyruin/errors.hpp"

namespace levyruin::presets {

namespace {

// Exponential(1) claims at unit rate; canonical drift chosen so the premium
// outflow between claims is 0.1 per unit time: a_P = E[h(xi)] - 0.1 with
// E[h(xi)] = 1 - 2/e for the unit exponential.
LevyTriplet lundberg_business() {
  LevyTriplet p;
  p.jump_intensity = 1.0;
  p.jump_law = JumpLaw{ExponentialPositive{1.0}};
  p.drift = 0.9 - 2.0 / M_E;
  return p;
}

}  // namespace

ModelPair example1_powertail() {
  ModelPair m;
  m.r.drift = 1.5;
  m.r.diffusion_var = 1.0;
  m.p = lundberg_business();
  return m;
}

ModelPair example1_certain_ruin() {
  // Price drift at the critical level a = sigma^2/2 (E V_1 = 0). The business
  // process runs near break-even (outflow 0.9 per unit time against unit-rate
  // exponential claims) so the certain ruin materialises on simulable
  // horizons; the theorem itself holds for any admissible premium.
  ModelPair m;
  m.r.drift = 0.5;
  m.r.diffusion_var = 1.0;
  m.p = lundberg_business();
  m.p.drift = (1.0 - 2.0 / M_E) - 0.9;
  return m;
}

ModelPair example2_jumps() {
  ModelPair m;
  m.r.drift = 1.5;
  m.r.diffusion_var = 1.0;
  m.r.jump_intensity = 1.0;
  m.r.jump_law = JumpLaw{ShiftedLognormal{0.05, 0.2}};
  m.p = lundberg_business();
  return m;
}

ModelPair arithmetic_lattice() {
  // Log-jumps +-ln2 with probabilities 3/4, 1/4 and between-jump drift ln2:
  // H(2) = -2 ln2 + lambda * (3/16 + 1 - 1) = 0 at lambda = 32 ln2 / 3,
  // so beta = 2 exactly and L(V_1) lives on the lattice Z ln2.
  ModelPair m;
  const double ln2 = std::log(2.0);
  const double lambda = 32.0 * ln2 / 3.0;
  m.r.jump_intensity = lambda;
  m.r.jump_law = JumpLaw{DiscreteAtoms{{1.0, -0.5}, {0.75, 0.25}}};
  // canonical a = c_V + lambda E[h(xi)] with c_V = ln2, E[h] = 5/8
  m.r.drift = ln2 + lambda * 0.625;
  m.p = lundberg_business();
  return m;
}

std::vector<std::string> preset_names() {
  return {"example1_powertail", "example1_certain_ruin", "example2_jumps",
          "arithmetic_lattice"};
}

ModelPair by_name(const std::string& name) {
  if (name == "example1_powertail") return example1_powertail();
  if (name == "example1_certain_ruin") return example1_certain_ruin();
  if (name == "example2_jumps") return example2_jumps();
  if (name == "arithmetic_lattice") return arithmetic_lattice();
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace levyruin::presets
