#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levyruin/model.hpp"

namespace levyruin {

inline constexpr double kDefaultGridStep = 1.0 / 1024.0;  // 2^-10

struct PathConfig {
  double horizon = 1.0;
  double grid_step = kDefaultGridStep;
  std::uint64_t seed = 0;
  std::uint64_t replicate_index = 0;
  // Unit-test bypass: allow standing-assumption violations (degenerate models).
  bool allow_degenerate = false;
};

// Trajectory of (V, P, Y, price) on the uniform grid refined by every jump
// epoch. Jump epochs contribute two rows (left limit, then post-jump value),
// so pre-jump states are recoverable.
struct PathSample {
  std::vector<double> times;
  std::vector<double> v;
  std::vector<double> p;
  std::vector<double> y;      // Y_t = -int e^{-V_{s-}} dP_s
  std::vector<double> price;  // E_t(R) = e^{V_t}

  // Reserve X^u_t = price * (u - Y).
  double reserve(std::size_t i, double u) const { return price[i] * (u - y[i]); }
};

PathSample sample_path(const ModelPair& m, const PathConfig& cfg);

void write_path_csv(const PathSample& s, double u, const std::string& path);

struct MQSample {
  double m1 = 1.0;  // e^{-V_1}
  double q1 = 0.0;  // Y_1
};

// Sequential i.i.d. unit-interval draws of (M, Q_theta) from one replicate's
// streams; V is rebased at the start of every interval.
class UnitIntervalSampler {
 public:
  UnitIntervalSampler(const ModelPair& m, std::uint64_t seed, std::uint64_t replicate,
                      double grid_step = kDefaultGridStep, int theta = 1,
                      bool allow_degenerate = false);
  MQSample next();

 private:
  Dynamics dyn_;
  Stream rv_, rp_;
  double h_;
  double theta_;
  bool use_grid_ = true;
};

// Exact draw of V_1 (unit-interval increment of the log price).
double draw_log_price_increment(const Dynamics& d, Stream& rv);

// One unit-interval draw of (M_1, Q_1); Q_1 has the law of Y_1.
MQSample sample_MQ(const ModelPair& m, std::uint64_t seed, std::uint64_t replicate,
                   double grid_step = kDefaultGridStep, bool allow_degenerate = false);

// Q_theta = -int_0^1 e^{-theta V_{s-}} dP_s for theta in {+1, -1}.
double sample_Q_theta(const ModelPair& m, int theta, std::uint64_t seed,
                      std::uint64_t replicate, double grid_step = kDefaultGridStep,
                      bool allow_degenerate = false);

// First-passage simulation for the reserve: smallest grid/jump epoch t with
// Y_t >= u (equivalently X^u_t <= 0), or absent if none before the horizon.
std::optional<double> first_crossing_time(const ModelPair& m, double u,
                                          const PathConfig& cfg);

// Shared-noise comparison of the two solution routes for the reserve SDE:
// the e^{V}(u - Y) reconstruction versus a direct Euler scheme, both driven
// by one fine-grid noise realisation aggregated to each step size. Returns
// the mean (over paths) max-abs pathwise gap for each step size.
std::vector<double> euler_consistency_errors(const ModelPair& m, double u, double horizon,
                                             const std::vector<double>& grid_steps,
                                             std::uint64_t n_paths, std::uint64_t seed);

}  // namespace levyruin
