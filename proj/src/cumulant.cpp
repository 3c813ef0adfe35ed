#include "levyruin/cumulant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levyruin/errors.hpp"
#include "levyruin/stats.hpp"

namespace levyruin {

namespace {

constexpr double kRootTolQ = 1e-12;
constexpr double kRootTolH = 1e-10;
constexpr double kLatticeTol = 1e-9;

double evaluate_H_dyn(const Dynamics& d, double q) {
  if (q == 0.0) return 0.0;
  double jump_part = 0.0;
  if (d.lam_r > 0.0 && !is_none(d.r_law)) {
    const double mel = mellin(d.r_law, q);
    if (!(mel < kInf)) return kInf;
    jump_part = d.lam_r * (mel - 1.0);
  }
  return -d.cv * q + 0.5 * d.sigma * d.sigma * q * q + jump_part;
}

// Lattice structure of L(V_1): arithmetic iff sigma = 0, finite intensity
// (always, by construction) and the between-jump drift together with every
// log-jump atom sit on a common lattice Z d.
void detect_lattice(const Dynamics& d, CumulantReport& rep) {
  rep.arithmetic = false;
  rep.lattice_step.reset();
  if (d.sigma != 0.0) return;
  if (d.lam_r <= 0.0) return;  // deterministic V_1: degenerate, not arithmetic
  const auto* atoms = std::get_if<DiscreteAtoms>(&d.r_law);
  if (atoms == nullptr) return;  // continuous jump law
  std::vector<double> vals;
  vals.push_back(d.cv);
  for (double x : atoms->values) vals.push_back(std::log1p(x));
  const double step = stats::real_lattice_step(vals, kLatticeTol);
  if (step > 0.0) {
    rep.arithmetic = true;
    rep.lattice_step = step;
  }
}

}  // namespace

double evaluate_H(const ModelPair& m, double q) {
  return evaluate_H_dyn(make_dynamics(m), q);
}

double cumulant_derivative(const ModelPair& m, double q) {
  const Dynamics d = make_dynamics(m);
  double jump_part = 0.0;
  if (d.lam_r > 0.0 && !is_none(d.r_law)) {
    const double dm = mellin_dq(d.r_law, q);
    if (!(std::fabs(dm) < kInf)) return kInf;
    jump_part = d.lam_r * dm;
  }
  return -d.cv + d.sigma * d.sigma * q + jump_part;
}

std::pair<double, double> effective_domain(const ModelPair& m) {
  if (m.r.jump_intensity <= 0.0 || is_none(m.r.jump_law)) return {-kInf, kInf};
  return mellin_domain(m.r.jump_law);
}

CumulantReport analyze_cumulant(const ModelPair& m) {
  const Dynamics d = make_dynamics(m);
  CumulantReport rep;
  std::tie(rep.q_lower, rep.q_upper) = effective_domain(m);
  rep.dplus_H0 = -d.ev1;
  detect_lattice(d, rep);

  // Diagnostic grid of H values over (a clipped view of) the domain.
  {
    const double lo = std::max(rep.q_lower, -5.0);
    const double hi = std::min(rep.q_upper, 12.0);
    const int n = 65;
    for (int i = 1; i < n; ++i) {
      const double q = lo + (hi - lo) * static_cast<double>(i) / n;
      rep.h_values.emplace_back(q, evaluate_H_dyn(d, q));
    }
  }

  if (rep.dplus_H0 >= 0.0) return rep;  // no positive root: H increases at 0+

  // Bracket by doubling from q = 1 (H is convex, H(0) = 0, H'(0+) < 0).
  double hi = 1.0;
  double h_hi = evaluate_H_dyn(d, hi);
  if (rep.q_upper < kInf && hi >= rep.q_upper) {
    hi = 0.5 * rep.q_upper;
    h_hi = evaluate_H_dyn(d, hi);
  }
  int guard = 0;
  while (h_hi <= 0.0 && guard++ < 200) {
    double next = (rep.q_upper < kInf) ? hi + 0.5 * (rep.q_upper - hi) : 2.0 * hi;
    if (next > 1e7) break;
    hi = next;
    h_hi = evaluate_H_dyn(d, hi);
  }
  if (!(h_hi > 0.0)) return rep;  // H < 0 on the whole positive domain

  // H < 0 somewhere in (0, hi); walk the lower bracket down from hi.
  double lo = hi * 0.5;
  while (evaluate_H_dyn(d, lo) > 0.0) lo *= 0.5;

  // Bisection to 1e-12 in q.
  for (int it = 0; it < 200 && hi - lo > kRootTolQ; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (evaluate_H_dyn(d, mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  const double beta = 0.5 * (lo + hi);
  if (std::fabs(evaluate_H_dyn(d, beta)) <= kRootTolH ||
      std::fabs(hi - lo) <= kRootTolQ) {
    rep.beta = beta;
  }
  return rep;
}

CumulantReport find_root_beta(const ModelPair& m) {
  CumulantReport rep = analyze_cumulant(m);
  if (!rep.beta) {
    std::ostringstream oss;
    oss << "no positive root of H: D+H(0) = " << rep.dplus_H0
        << (rep.dplus_H0 >= 0.0 ? " >= 0 (certain-ruin candidate)"
                                : ", H < 0 on the positive domain");
    throw NoPositiveRootError(oss.str());
  }
  return rep;
}

double TiltedVModel::sample_log_m(Stream& rng) const {
  double v = cv_tilted;
  if (sigma > 0.0) v += sigma * rng.normal();
  if (intensity > 0.0) {
    const std::uint64_t n = rng.poisson(intensity);
    for (std::uint64_t i = 0; i < n; ++i)
      v += std::log1p(sample_tilted(base_law, beta, rng));
  }
  return -v;
}

TiltedModel esscher_tilt(const ModelPair& m, double beta) {
  const double h_at_beta = evaluate_H(m, beta);
  if (!(std::fabs(h_at_beta) <= 1e-8)) {
    std::ostringstream oss;
    oss << "H(" << beta << ") = " << h_at_beta << " not ~ 0";
    throw InvalidTiltError(oss.str());
  }
  const Dynamics d = make_dynamics(m);
  TiltedModel t;
  t.p = m.p;
  t.v.sigma = d.sigma;
  t.v.beta = beta;
  t.v.base_law = d.r_law;
  t.v.cv_tilted = d.cv - beta * d.sigma * d.sigma;
  t.v.drift_av_tilted = log_price_triplet(m.r).drift - beta * d.sigma * d.sigma;
  t.v.intensity =
      (d.lam_r > 0.0 && !is_none(d.r_law)) ? d.lam_r * mellin(d.r_law, beta) : 0.0;
  t.mean_log_m_tilted = cumulant_derivative(m, beta);
  if (!(t.mean_log_m_tilted > 0.0))
    throw InvalidTiltError("tilted mean of ln M is not positive");
  return t;
}

}  // namespace levyruin
