#pragma once

#include <string>
#include <vector>

#include "levyruin/model.hpp"

namespace levyruin::presets {

// GBM price (a = 1.5, sigma^2 = 1, beta = 2) financing a spectrally positive
// claim stream: exponential(1) claims at unit rate, net premium outflow 0.1.
ModelPair example1_powertail();

// Same business process, price with a = sigma^2/2 (E V_1 = 0): ruin is
// certain whatever the initial reserve.
ModelPair example1_certain_ruin();

// Price with a Brownian component plus lognormal relative jumps.
ModelPair example2_jumps();

// sigma = 0, two-sided atoms with log-jumps on the lattice Z ln 2 and the
// drift on the same lattice; beta = 2 exactly, L(V_1) arithmetic.
ModelPair arithmetic_lattice();

std::vector<std::string> preset_names();
ModelPair by_name(const std::string& name);

}  // namespace levyruin::presets
