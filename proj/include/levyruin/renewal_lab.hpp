#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "levyruin/cumulant.hpp"
#include "levyruin/model.hpp"

namespace levyruin {

// Function samples on a uniform grid x0, x0+step, ...
struct RenewalGrid {
  double x0 = 0.0;
  double step = 0.0;
  std::vector<double> values;

  double x(std::size_t i) const { return x0 + step * static_cast<double>(i); }
  std::size_t size() const { return values.size(); }
  // Trapezoid mass over the grid.
  double mass() const;
};

RenewalGrid read_grid_csv(const std::string& path);
void write_grid_csv(const RenewalGrid& g, const std::string& path);

// Exponential smoothing psi_check(x) = int_{-inf}^x e^{-(x-y)} psi(y) dy,
// computed cell by cell with the exact piecewise-linear kernel integral.
// Throws GridTooCoarseError when the discrete mass is not preserved to 1e-6
// relative (after accounting for the analytic tail past the last grid point).
RenewalGrid smooth(const RenewalGrid& psi);

// (delta * sum of block infima, delta * sum of block suprema) over blocks of
// width delta tiled from the grid origin. delta must refine onto the grid.
std::pair<double, double> riemann_bounds(const RenewalGrid& f, double delta);

struct GoldieEstimate {
  double c_plus_hat = 0.0;
  double se = 0.0;
  double beta = 0.0;
  double m_tilde_hat = 0.0;  // MC mean of M^beta ln M; must be positive
  std::uint64_t n_replicates = 0;
  // Arithmetic models: [min, max] over one lattice period of the periodic
  // limit; absent for non-arithmetic models.
  std::optional<std::pair<double, double>> arithmetic_band;
};

// Goldie's representation C+ = E[((Q+MY)^+)^beta - ((MY)^+)^beta] / (beta E M^beta ln M)
// with (M,Q) drawn independently of the Y_inf draws. When `y_ensemble` is
// supplied its entries are paired with fresh (M,Q) draws; otherwise an
// ensemble of `n` draws is generated at eps.
GoldieEstimate estimate_goldie_constant(const ModelPair& m, double beta, std::uint64_t n,
                                        std::uint64_t seed, unsigned workers = 1,
                                        const std::vector<double>* y_ensemble = nullptr,
                                        double eps = 1e-3, bool allow_degenerate = false);

struct LatticeRenewalReport {
  double d = 0.0;             // lattice step
  double mean_step = 0.0;     // m = E xi
  double limit = 0.0;         // (d/m) sum_j F(x + j d)
  std::vector<std::pair<std::uint64_t, double>> estimates;  // (n, MC value)
  double max_dev_last = 0.0;  // max |estimate - limit| over the reported n
};

// MC check of the lattice renewal theorem: E sum_{k>=0} F(x + n d - S_k)
// against the closed-form limit, for the last `n_report` values of n up to
// n_max. F is given as (point, value) atoms.
LatticeRenewalReport lattice_renewal_check(const DiscreteAtoms& step_law,
                                           const std::vector<std::pair<double, double>>& f_atoms,
                                           double x, std::uint64_t n_max,
                                           std::uint64_t n_replicates, std::uint64_t seed,
                                           unsigned workers = 1, int n_report = 5);

// Exceedance tail of Z*_inf = sup_{j>=1} M_1...M_j, simulated as the running
// maximum of the random walk sum ln M_i with stopping once the walk has
// fallen 40/beta below its maximum.
std::vector<std::pair<double, double>> supremum_tail(const ModelPair& m,
                                                     const std::vector<double>& u_list,
                                                     std::uint64_t n, std::uint64_t seed,
                                                     unsigned workers = 1);

struct RenewalResidualReport {
  std::vector<double> x;
  std::vector<double> residual;      // g(x) - D(x) - E~ g(x - ln M)
  std::vector<double> combined_se;
  double d_abs_integral = 0.0;       // empirical int |D|
  double m_tilde_hat = 0.0;
  double m_tilde_direct = 0.0;       // from direct tilted sampling (cross-check)
};

// Empirical residual of the renewal identity g = D + tilted shift of g,
// where g(x) = e^{beta x} Gbar(e^x). The tilted expectation is computed both
// by importance weighting M^beta and by direct tilted draws.
RenewalResidualReport renewal_equation_residual(const ModelPair& m, double beta,
                                                std::uint64_t n, std::uint64_t seed,
                                                unsigned workers = 1,
                                                int n_grid = 9, double eps = 1e-3);

}  // namespace levyruin
