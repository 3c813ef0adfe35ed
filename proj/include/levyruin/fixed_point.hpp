#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levyruin/model.hpp"

namespace levyruin {

struct PerpetuitySample {
  double value = 0.0;
  std::uint32_t depth = 0;      // truncation depth N
  double rho = 0.0;             // E M^p = e^{H(p)}
  double p = 0.0;
  double trunc_bound = 0.0;     // rho^N * (pilot estimate of E|Q|^p)
};

// Smallest p on a 64-point grid over (0, min(1, q_upper)) minimising H;
// throws NoContractivePowerError when H >= 0 on the whole grid.
double default_contractive_p(const ModelPair& m);

// Truncated-series sampler for Y_inf = sum_j Q_j M_1...M_{j-1}. The depth is
// fixed at construction from a cached pilot estimate of E|Q|^p (1e4 draws),
// choosing the smallest N with rho^N E|Q|^p <= eps.
class PerpetuitySampler {
 public:
  // p <= 0 selects the default contractive power.
  PerpetuitySampler(const ModelPair& m, double p, double eps, std::uint64_t seed,
                    unsigned workers = 1, bool allow_degenerate = false);

  PerpetuitySample draw(std::uint64_t replicate) const;
  // Draw with a depth override (used by truncation-honesty checks).
  PerpetuitySample draw_with_depth(std::uint64_t replicate, std::uint32_t depth) const;

  double p() const { return p_; }
  double rho() const { return rho_; }
  std::uint32_t depth() const { return depth_; }
  double pilot_abs_moment() const { return eq_abs_p_; }

 private:
  ModelPair model_;
  double p_, eps_, rho_, eq_abs_p_;
  std::uint32_t depth_;
  std::uint64_t seed_;
  bool allow_degenerate_;
};

PerpetuitySample sample_Y_infinity(const ModelPair& m, double p, double eps,
                                   std::uint64_t seed, std::uint64_t replicate);

struct EnsembleMeta {
  double p = 0.0;
  double rho = 0.0;
  std::uint32_t depth = 0;
  double trunc_bound = 0.0;
};

// n parallel Y_inf draws (replicates 0..n-1 regardless of worker count).
std::vector<double> y_infinity_ensemble(const ModelPair& m, std::uint64_t n, double eps,
                                        std::uint64_t seed, unsigned workers,
                                        EnsembleMeta* meta = nullptr,
                                        bool allow_degenerate = false);

void write_ensemble_csv(const std::vector<double>& draws, const EnsembleMeta& meta,
                        const std::string& path);

// Random-coefficient autoregression X_n = A_n X_{n-1} + B_n with
// A_n = M_n^{-1}, B_n = -M_n^{-1} Q_n, i.e. the reserve at integer times.
struct ArPath {
  std::vector<double> x;        // X_1..X_n
  std::vector<double> erg_avg;  // running mean of f(X_k), f = 1{x<-1} - x 1{-1<=x<0}
  std::optional<std::uint64_t> first_negative;  // 1-based step index
};

ArPath run_autoregression(const ModelPair& m, double u, std::uint64_t n_steps,
                          std::uint64_t seed, std::uint64_t replicate = 0,
                          bool allow_degenerate = false);

// First k >= 1 with V_k < 0 (descending ladder time of the log-price walk).
// Throws LadderTimeOverflowError when max_steps is reached.
std::uint64_t sample_ladder_time(const ModelPair& m, std::uint64_t seed,
                                 std::uint64_t replicate,
                                 std::uint64_t max_steps = 10'000'000);

}  // namespace levyruin
