#include "levyruin/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "levyruin/cumulant.hpp"
#include "levyruin/errors.hpp"
#include "levyruin/parallel.hpp"
#include "levyruin/path_sim.hpp"

namespace levyruin {

namespace {
constexpr std::uint64_t kPilotDraws = 10'000;

std::uint64_t salted_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (salt + 1));
  return detail::splitmix64(s);
}
}  // namespace

double default_contractive_p(const ModelPair& m) {
  const auto [lo, hi] = effective_domain(m);
  (void)lo;
  const double pmax = std::min(1.0, hi < kInf ? 0.999 * hi : 1.0);
  double best_p = 0.0, best_h = 0.0;
  for (int k = 1; k <= 64; ++k) {
    const double p = pmax * static_cast<double>(k) / 64.0;
    const double hp = evaluate_H(m, p);
    if (hp < best_h) {
      best_h = hp;
      best_p = p;
    }
  }
  if (best_p == 0.0)
    throw NoContractivePowerError(
        "H >= 0 on the whole grid over (0, min(1, q_upper)): no contractive power");
  return best_p;
}

PerpetuitySampler::PerpetuitySampler(const ModelPair& m, double p, double eps,
                                     std::uint64_t seed, unsigned workers,
                                     bool allow_degenerate)
    : model_(m), p_(p), eps_(eps), seed_(seed), allow_degenerate_(allow_degenerate) {
  if (!(eps > 0.0)) throw Error("bad_config", "eps must be positive");
  if (p_ <= 0.0) p_ = default_contractive_p(m);
  const double hp = evaluate_H(m, p_);
  if (!(hp < 0.0)) {
    std::ostringstream oss;
    oss << "H(p) = " << hp << " >= 0 at p = " << p_ << ": series does not contract";
    throw NoContractivePowerError(oss.str());
  }
  rho_ = std::exp(hp);

  // Pilot estimate of E|Q|^p, cached for the sampler's lifetime.
  const std::uint64_t pilot_seed = salted_seed(seed, 151);
  std::vector<double> pilot(kPilotDraws);
  parallel_replicates(kPilotDraws, workers, [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t k = lo; k < hi; ++k) {
      UnitIntervalSampler u(model_, pilot_seed, k, kDefaultGridStep, 1, allow_degenerate_);
      pilot[k] = std::pow(std::fabs(u.next().q1), p_);
    }
  });
  double total = 0.0;
  for (double a : pilot) total += a;
  eq_abs_p_ = total / static_cast<double>(kPilotDraws);

  if (eq_abs_p_ <= 0.0) {
    depth_ = 1;
  } else {
    const double n_real = std::log(eq_abs_p_ / eps_) / (-hp);
    depth_ = static_cast<std::uint32_t>(std::max(1.0, std::ceil(n_real)));
  }
}

PerpetuitySample PerpetuitySampler::draw(std::uint64_t replicate) const {
  return draw_with_depth(replicate, depth_);
}

PerpetuitySample PerpetuitySampler::draw_with_depth(std::uint64_t replicate,
                                                    std::uint32_t depth) const {
  UnitIntervalSampler u(model_, seed_, replicate, kDefaultGridStep, 1, allow_degenerate_);
  double value = 0.0, z = 1.0;
  for (std::uint32_t j = 0; j < depth; ++j) {
    const MQSample mq = u.next();
    value += z * mq.q1;
    z *= mq.m1;
    if (z < 1e-300) break;  // remaining terms are below double resolution
  }
  PerpetuitySample out;
  out.value = value;
  out.depth = depth;
  out.rho = rho_;
  out.p = p_;
  out.trunc_bound = std::pow(rho_, static_cast<double>(depth)) * eq_abs_p_;
  return out;
}

PerpetuitySample sample_Y_infinity(const ModelPair& m, double p, double eps,
                                   std::uint64_t seed, std::uint64_t replicate) {
  PerpetuitySampler s(m, p, eps, seed);
  return s.draw(replicate);
}

std::vector<double> y_infinity_ensemble(const ModelPair& m, std::uint64_t n, double eps,
                                        std::uint64_t seed, unsigned workers,
                                        EnsembleMeta* meta, bool allow_degenerate) {
  PerpetuitySampler s(m, 0.0, eps, seed, workers, allow_degenerate);
  std::vector<double> out(n);
  parallel_replicates(n, workers, [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t k = lo; k < hi; ++k) out[k] = s.draw(k).value;
  });
  if (meta) {
    meta->p = s.p();
    meta->rho = s.rho();
    meta->depth = s.depth();
    meta->trunc_bound =
        std::pow(s.rho(), static_cast<double>(s.depth())) * s.pilot_abs_moment();
  }
  return out;
}

void write_ensemble_csv(const std::vector<double>& draws, const EnsembleMeta& meta,
                        const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("io_error", "cannot open " + path);
  f << "replicate,value,depth,trunc_bound\n";
  f.precision(17);
  for (std::size_t i = 0; i < draws.size(); ++i)
    f << i << ',' << draws[i] << ',' << meta.depth << ',' << meta.trunc_bound << '\n';
}

ArPath run_autoregression(const ModelPair& m, double u, std::uint64_t n_steps,
                          std::uint64_t seed, std::uint64_t replicate,
                          bool allow_degenerate) {
  UnitIntervalSampler s(m, seed, replicate, kDefaultGridStep, 1, allow_degenerate);
  ArPath out;
  out.x.reserve(n_steps);
  out.erg_avg.reserve(n_steps);
  double x = u, avg = 0.0;
  for (std::uint64_t n = 1; n <= n_steps; ++n) {
    const MQSample mq = s.next();
    const double a = 1.0 / mq.m1;  // e^{V_n - V_{n-1}}
    const double b = -a * mq.q1;
    x = a * x + b;
    out.x.push_back(x);
    // test function from the ergodic argument: 1{x<-1} - x 1{-1<=x<0}
    const double f = (x < -1.0) ? 1.0 : (x < 0.0 ? -x : 0.0);
    avg += (f - avg) / static_cast<double>(n);
    out.erg_avg.push_back(avg);
    if (!out.first_negative && x < 0.0) out.first_negative = n;
  }
  return out;
}

std::uint64_t sample_ladder_time(const ModelPair& m, std::uint64_t seed,
                                 std::uint64_t replicate, std::uint64_t max_steps) {
  const Dynamics d = make_dynamics(m);
  Stream rv(seed, replicate, StreamTag::kReturns);
  double s = 0.0;
  for (std::uint64_t k = 1; k <= max_steps; ++k) {
    s += draw_log_price_increment(d, rv);
    if (s < 0.0) return k;
  }
  std::ostringstream oss;
  oss << "ladder time exceeded " << max_steps << " steps";
  throw LadderTimeOverflowError(oss.str());
}

}  // namespace levyruin
