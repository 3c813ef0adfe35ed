#include "levyruin/renewal_lab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "levyruin/errors.hpp"
#include "levyruin/fixed_point.hpp"
#include "levyruin/parallel.hpp"
#include "levyruin/path_sim.hpp"
#include "levyruin/stats.hpp"

namespace levyruin {

namespace {
std::uint64_t salted(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (salt + 1));
  return detail::splitmix64(s);
}
}  // namespace

double RenewalGrid::mass() const {
  if (values.size() < 2) return 0.0;
  double s = 0.0;
  for (double v : values) s += v;
  s -= 0.5 * (values.front() + values.back());
  return s * step;
}

RenewalGrid read_grid_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("io_error", "cannot open " + path);
  std::vector<double> xs, vs;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == 'x' || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    xs.push_back(std::stod(line.substr(0, comma)));
    vs.push_back(std::stod(line.substr(comma + 1)));
  }
  if (xs.size() < 2) throw Error("io_error", "grid csv needs at least two rows");
  RenewalGrid g;
  g.x0 = xs.front();
  g.step = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  g.values = std::move(vs);
  return g;
}

void write_grid_csv(const RenewalGrid& g, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("io_error", "cannot open " + path);
  f << "x,value\n";
  f.precision(17);
  for (std::size_t i = 0; i < g.values.size(); ++i)
    f << g.x(i) << ',' << g.values[i] << '\n';
}

RenewalGrid smooth(const RenewalGrid& psi) {
  if (psi.values.size() < 2 || !(psi.step > 0.0))
    throw GridTooCoarseError("smoothing needs a grid with at least two points");
  const double dl = psi.step;
  // Exact convolution of the piecewise-linear interpolant with e^{-t}:
  // cell contribution A (k0 - k1) + B k1 on values A -> B.
  const double decay = std::exp(-dl);
  const double k0 = -std::expm1(-dl);
  const double k1 = (dl - 1.0 + decay) / dl;
  RenewalGrid out;
  out.x0 = psi.x0;
  out.step = dl;
  out.values.assign(psi.values.size(), 0.0);
  for (std::size_t i = 1; i < psi.values.size(); ++i) {
    const double a = psi.values[i - 1], b = psi.values[i];
    out.values[i] = decay * out.values[i - 1] + a * (k0 - k1) + b * k1;
  }
  // Mass preservation: the smoothed mass on the grid plus the analytic tail
  // past the right edge must reproduce the input mass.
  double abs_mass = 0.0;
  for (double v : psi.values) abs_mass += std::fabs(v);
  abs_mass *= dl;
  const double in_mass = psi.mass();
  const double out_mass = out.mass() + out.values.back();
  if (std::fabs(out_mass - in_mass) > 1e-6 * std::max(abs_mass, 1e-300))
    throw GridTooCoarseError("smoothing does not preserve mass at this grid step");
  return out;
}

std::pair<double, double> riemann_bounds(const RenewalGrid& f, double delta) {
  if (!(delta > 0.0) || f.values.empty())
    throw Error("bad_config", "riemann_bounds needs delta > 0 and a non-empty grid");
  const double ratio_real = delta / f.step;
  const long ratio = std::lround(ratio_real);
  if (ratio < 1 || std::fabs(ratio_real - static_cast<double>(ratio)) > 1e-9 * ratio_real)
    throw Error("bad_config", "delta must be an integer multiple of the grid step");
  double lo_sum = 0.0, hi_sum = 0.0;
  const std::size_t n = f.values.size();
  for (std::size_t start = 0; start + 1 < n; start += static_cast<std::size_t>(ratio)) {
    const std::size_t end = std::min(n - 1, start + static_cast<std::size_t>(ratio));
    double lo = f.values[start], hi = f.values[start];
    for (std::size_t i = start + 1; i <= end; ++i) {
      lo = std::min(lo, f.values[i]);
      hi = std::max(hi, f.values[i]);
    }
    lo_sum += lo;
    hi_sum += hi;
  }
  return {delta * lo_sum, delta * hi_sum};
}

namespace {

// Shared draw set for the Goldie estimator and the renewal-equation
// diagnostics: per replicate one fresh (M, Q) paired with one Y_inf value.
struct PairedDraws {
  std::vector<double> m, q, y;
};

PairedDraws make_paired_draws(const ModelPair& model, std::uint64_t n, std::uint64_t seed,
                              unsigned workers, const std::vector<double>* y_ensemble,
                              double eps, bool allow_degenerate = false) {
  PairedDraws d;
  std::vector<double> ens;
  if (y_ensemble == nullptr) {
    ens = y_infinity_ensemble(model, n, eps, salted(seed, 11), workers, nullptr,
                              allow_degenerate);
    y_ensemble = &ens;
  }
  if (y_ensemble->size() < n) n = y_ensemble->size();
  d.m.assign(n, 0.0);
  d.q.assign(n, 0.0);
  d.y.assign(y_ensemble->begin(), y_ensemble->begin() + static_cast<std::ptrdiff_t>(n));
  const std::uint64_t mq_seed = salted(seed, 23);
  parallel_replicates(n, workers, [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t k = lo; k < hi; ++k) {
      const MQSample mq = sample_MQ(model, mq_seed, k, kDefaultGridStep, allow_degenerate);
      d.m[k] = mq.m1;
      d.q[k] = mq.q1;
    }
  });
  return d;
}

double pow_plus(double x, double b) { return x > 0.0 ? std::pow(x, b) : 0.0; }

}  // namespace

GoldieEstimate estimate_goldie_constant(const ModelPair& model, double beta,
                                        std::uint64_t n, std::uint64_t seed,
                                        unsigned workers,
                                        const std::vector<double>* y_ensemble,
                                        double eps, bool allow_degenerate) {
  const PairedDraws d =
      make_paired_draws(model, n, seed, workers, y_ensemble, eps, allow_degenerate);
  const std::uint64_t nn = d.m.size();

  // term = ((Q + M Y)^+)^beta - ((M Y)^+)^beta ; w = M^beta ln M
  double sum_t = 0.0, sum_t2 = 0.0, sum_w = 0.0, sum_w2 = 0.0, sum_tw = 0.0;
  for (std::uint64_t k = 0; k < nn; ++k) {
    const double eta = d.m[k] * d.y[k];
    const double term = pow_plus(d.q[k] + eta, beta) - pow_plus(eta, beta);
    const double w = std::pow(d.m[k], beta) * std::log(d.m[k]);
    sum_t += term;
    sum_t2 += term * term;
    sum_w += w;
    sum_w2 += w * w;
    sum_tw += term * w;
  }
  const double fn = static_cast<double>(nn);
  const double mt = sum_t / fn, mw = sum_w / fn;
  const double vt = sum_t2 / fn - mt * mt;
  const double vw = sum_w2 / fn - mw * mw;
  const double ctw = sum_tw / fn - mt * mw;

  GoldieEstimate out;
  out.beta = beta;
  out.n_replicates = nn;
  out.m_tilde_hat = mw;
  if (!(mw > 0.0))
    throw InvalidTiltError("MC mean of M^beta ln M is not positive");
  out.c_plus_hat = mt / (beta * mw);
  // delta method on the ratio of means
  const double rel_var = vt / (mt * mt) + vw / (mw * mw) - 2.0 * ctw / (mt * mw);
  out.se = std::fabs(out.c_plus_hat) * std::sqrt(std::max(rel_var, 0.0) / fn);

  // Arithmetic models: the limit is periodic in ln u, so report the band of
  // the lattice sum (d / m~) sum_j D_check(x + j d) over one period.
  const CumulantReport rep = analyze_cumulant(model);
  if (rep.arithmetic && rep.lattice_step) {
    const double dstep = *rep.lattice_step;
    // Empirical D on a fine grid of x = ln u over the resolvable range.
    std::vector<double> xi(d.q.size()), eta(d.q.size());
    for (std::size_t k = 0; k < d.q.size(); ++k) {
      eta[k] = d.m[k] * d.y[k];
      xi[k] = d.q[k] + eta[k];
    }
    std::sort(xi.begin(), xi.end());
    std::sort(eta.begin(), eta.end());
    const double u_hi = stats::quantile_sorted(xi, 0.999);
    const double u_lo = std::max(stats::quantile_sorted(xi, 0.5), 1e-8);
    if (!(u_hi > u_lo * std::exp(2.0 * dstep)))
      throw ArithmeticBandError("resolvable range shorter than two lattice periods");
    const double step = dstep / 16.0;
    const double x_lo = std::log(u_lo), x_hi = std::log(u_hi);
    const auto npts = static_cast<std::size_t>((x_hi - x_lo) / step) + 1;
    RenewalGrid dgrid;
    dgrid.x0 = x_lo;
    dgrid.step = step;
    dgrid.values.resize(npts);
    for (std::size_t i = 0; i < npts; ++i) {
      const double x = dgrid.x(i);
      const double ex = std::exp(x);
      const double g1 = stats::exceedance_sorted(xi, ex);
      const double g2 = stats::exceedance_sorted(eta, ex);
      dgrid.values[i] = std::exp(beta * x) * (g1 - g2);
    }
    RenewalGrid dcheck;
    try {
      dcheck = smooth(dgrid);
    } catch (const GridTooCoarseError&) {
      throw ArithmeticBandError("lattice grid underresolved for the smoothed sum");
    }
    double band_lo = kInf, band_hi = -kInf;
    const int offsets = 16;
    for (int o = 0; o < offsets; ++o) {
      double s = 0.0;
      for (std::size_t i = static_cast<std::size_t>(o); i < dcheck.values.size();
           i += 16)
        s += dcheck.values[i];
      const double c_off = dstep / mw * s;
      band_lo = std::min(band_lo, c_off);
      band_hi = std::max(band_hi, c_off);
    }
    out.arithmetic_band = std::make_pair(band_lo, band_hi);
  }
  return out;
}

LatticeRenewalReport lattice_renewal_check(const DiscreteAtoms& step_law,
                                           const std::vector<std::pair<double, double>>& f_atoms,
                                           double x, std::uint64_t n_max,
                                           std::uint64_t n_replicates, std::uint64_t seed,
                                           unsigned workers, int n_report) {
  if (auto problem = check_law(JumpLaw{step_law}); !problem.empty())
    throw Error("bad_config", "step law invalid: " + problem);
  const double d = stats::real_lattice_step(step_law.values);
  if (!(d > 0.0)) throw Error("bad_config", "step law is not lattice-valued");
  double m = 0.0, min_step = kInf;
  for (std::size_t i = 0; i < step_law.values.size(); ++i) {
    m += step_law.values[i] * step_law.probs[i];
    min_step = std::min(min_step, step_law.values[i]);
  }
  if (!(m > 0.0)) throw Error("bad_config", "step law needs a positive mean");

  LatticeRenewalReport rep;
  rep.d = d;
  rep.mean_step = m;

  // Closed-form limit: (d/m) * sum of F over the points reachable on x + Zd.
  double limit = 0.0;
  double z_min = kInf;
  for (const auto& [z, fv] : f_atoms) {
    z_min = std::min(z_min, z);
    const double j = (z - x) / d;
    if (std::fabs(j - std::round(j)) < 1e-9) limit += fv;
  }
  limit *= d / m;
  rep.limit = limit;

  const JumpLaw law{step_law};
  const auto first_n = n_max > static_cast<std::uint64_t>(n_report - 1)
                           ? n_max - static_cast<std::uint64_t>(n_report - 1)
                           : 1;
  const std::size_t n_targets = static_cast<std::size_t>(n_max - first_n + 1);
  // Negative steps can revisit levels after passing them; allow headroom.
  const double overshoot = (min_step >= 0.0) ? 0.0 : 64.0 * d;

  std::vector<std::vector<double>> sums(std::max(1u, workers),
                                        std::vector<double>(n_targets, 0.0));
  parallel_chunks(n_replicates, workers, [&](unsigned slot, std::uint64_t lo, std::uint64_t hi) {
    auto& acc = sums[slot];
    for (std::uint64_t r = lo; r < hi; ++r) {
      Stream rng(seed, r, StreamTag::kAux);
      double s = 0.0;
      const double stop_at =
          x + static_cast<double>(n_max) * d - z_min + overshoot;
      const std::uint64_t hard_cap =
          4 * (n_max + 64) * static_cast<std::uint64_t>(std::ceil(d / m + 1.0));
      for (std::uint64_t k = 0; k <= hard_cap; ++k) {
        for (std::size_t ti = 0; ti < n_targets; ++ti) {
          const double arg =
              x + static_cast<double>(first_n + ti) * d - s;
          for (const auto& [z, fv] : f_atoms)
            if (std::fabs(arg - z) < 1e-9 * (1.0 + std::fabs(z))) acc[ti] += fv;
        }
        if (s > stop_at) break;
        s += sample(law, rng);
      }
    }
  });

  for (std::size_t ti = 0; ti < n_targets; ++ti) {
    double total = 0.0;
    for (const auto& acc : sums) total += acc[ti];
    const double est = total / static_cast<double>(n_replicates);
    rep.estimates.emplace_back(first_n + ti, est);
    rep.max_dev_last = std::max(rep.max_dev_last, std::fabs(est - limit));
  }
  return rep;
}

std::vector<std::pair<double, double>> supremum_tail(const ModelPair& m,
                                                     const std::vector<double>& u_list,
                                                     std::uint64_t n, std::uint64_t seed,
                                                     unsigned workers) {
  const Dynamics dyn = make_dynamics(m);
  if (!(dyn.ev1 > 0.0))
    throw MethodPreconditionError("supremum_tail needs E ln M = -E V_1 < 0");
  const CumulantReport rep = find_root_beta(m);
  const double cutoff = 40.0 / *rep.beta;

  std::vector<double> thresholds;
  thresholds.reserve(u_list.size());
  for (double u : u_list) thresholds.push_back(std::log(u));

  std::vector<std::vector<std::uint64_t>> counts(
      std::max(1u, workers), std::vector<std::uint64_t>(u_list.size(), 0));
  parallel_chunks(n, workers, [&](unsigned slot, std::uint64_t lo, std::uint64_t hi) {
    auto& cnt = counts[slot];
    for (std::uint64_t r = lo; r < hi; ++r) {
      Stream rv(seed, r, StreamTag::kReturns);
      double s = 0.0, smax = -kInf;
      // Z*_inf = sup_{j>=1} e^{S_j}, S_j = -V_j
      while (true) {
        s -= draw_log_price_increment(dyn, rv);
        smax = std::max(smax, s);
        if (s < smax - cutoff) break;
      }
      for (std::size_t i = 0; i < thresholds.size(); ++i) cnt[i] += (smax > thresholds[i]);
    }
  });
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < u_list.size(); ++i) {
    std::uint64_t total = 0;
    for (const auto& cnt : counts) total += cnt[i];
    out.emplace_back(u_list[i], static_cast<double>(total) / static_cast<double>(n));
  }
  return out;
}

RenewalResidualReport renewal_equation_residual(const ModelPair& model, double beta,
                                                std::uint64_t n, std::uint64_t seed,
                                                unsigned workers, int n_grid, double eps) {
  // Split: an independent base ensemble defines g; paired draws give the
  // left side e^{beta x} P(MY > e^x) and the tilted shift.
  std::vector<double> base =
      y_infinity_ensemble(model, n, eps, salted(seed, 31), workers);
  std::sort(base.begin(), base.end());
  const PairedDraws d = make_paired_draws(model, n, salted(seed, 37), workers, nullptr, eps);

  auto g_hat = [&](double xx) {
    return std::exp(beta * xx) * stats::exceedance_sorted(base, std::exp(xx));
  };

  std::vector<double> eta(d.m.size());
  for (std::size_t k = 0; k < d.m.size(); ++k) eta[k] = d.m[k] * d.y[k];
  std::vector<double> eta_sorted = eta;
  std::sort(eta_sorted.begin(), eta_sorted.end());

  // Grid of x over a range where both tails are resolvable.
  const double x_lo = std::log(std::max(stats::quantile_sorted(base, 0.80), 1e-6));
  const double x_hi = std::log(std::max(stats::quantile_sorted(base, 0.995), 2e-6));
  RenewalResidualReport out;
  const TiltedModel tilted = esscher_tilt(model, beta);

  // m~ both ways
  {
    double sw = 0.0;
    for (std::size_t k = 0; k < d.m.size(); ++k)
      sw += std::pow(d.m[k], beta) * std::log(d.m[k]);
    out.m_tilde_hat = sw / static_cast<double>(d.m.size());
    Stream rng(salted(seed, 41), 0, StreamTag::kAux);
    double sd = 0.0;
    const std::uint64_t n_direct = std::min<std::uint64_t>(d.m.size(), 200'000);
    for (std::uint64_t k = 0; k < n_direct; ++k) sd += tilted.v.sample_log_m(rng);
    out.m_tilde_direct = sd / static_cast<double>(n_direct);
  }

  for (int i = 0; i < n_grid; ++i) {
    const double x = x_lo + (x_hi - x_lo) * (i + 0.5) / n_grid;
    const double ex = std::exp(x);
    // lhs = e^{beta x} P(M Y > e^x) == E~ g(x - ln M) by the change of measure
    const double p_eta = stats::exceedance_sorted(eta_sorted, ex);
    const double lhs = std::exp(beta * x) * p_eta;
    const double lhs_se =
        std::exp(beta * x) * stats::binomial_se(p_eta, eta_sorted.size());
    // rhs: importance-weighted tilted expectation of g(x - ln M)
    double sw = 0.0, sw2 = 0.0;
    for (std::size_t k = 0; k < d.m.size(); ++k) {
      const double val = std::pow(d.m[k], beta) * g_hat(x - std::log(d.m[k]));
      sw += val;
      sw2 += val * val;
    }
    const double fn = static_cast<double>(d.m.size());
    const double rhs = sw / fn;
    const double rhs_se = std::sqrt(std::max(sw2 / fn - rhs * rhs, 0.0) / fn);
    out.x.push_back(x);
    out.residual.push_back(lhs - rhs);
    out.combined_se.push_back(std::sqrt(lhs_se * lhs_se + rhs_se * rhs_se));
  }

  // Empirical integral of |D| over the grid (stability diagnostic).
  {
    std::vector<double> xi_sorted(d.q.size());
    for (std::size_t k = 0; k < d.q.size(); ++k) xi_sorted[k] = d.q[k] + eta[k];
    std::sort(xi_sorted.begin(), xi_sorted.end());
    const double step = (x_hi - x_lo) / 256.0;
    double s = 0.0;
    for (int i = 0; i <= 256; ++i) {
      const double x = x_lo + step * i;
      const double ex = std::exp(x);
      const double dd = std::exp(beta * x) * (stats::exceedance_sorted(xi_sorted, ex) -
                                              stats::exceedance_sorted(eta_sorted, ex));
      s += std::fabs(dd) * step;
    }
    out.d_abs_integral = s;
  }
  return out;
}

}  // namespace levyruin
