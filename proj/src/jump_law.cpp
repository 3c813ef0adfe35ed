#include "levyruin/jump_law.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>

#include "levyruin/errors.hpp"
#include "levyruin/stats.hpp"

namespace levyruin {

namespace {

constexpr double kQuadTol = 1e-9;  // tanh_sinh/exp_sinh termination (sqrt of target)

double h_trunc(double x) { return std::fabs(x) <= 1.0 ? x : 0.0; }

template <typename F>
double integrate_semi_infinite(F f, double a) {
  boost::math::quadrature::exp_sinh<double> integ;
  double err = 0.0;
  const double val = integ.integrate([&](double t) { return f(a + t); }, kQuadTol, &err);
  return val;
}

template <typename F>
double integrate_finite(F f, double a, double b) {
  if (b <= a) return 0.0;
  boost::math::quadrature::tanh_sinh<double> integ;
  return integ.integrate(f, a, b, kQuadTol);
}

// Pareto expectations via y = x_min / x, mapping [x_min, inf) to (0, 1]:
// E g(xi) = alpha * int_0^1 g(x_min / y) y^{alpha-1} dy.
template <typename F>
double pareto_expect(const ParetoPositive& law, F g) {
  const double alpha = law.alpha;
  const double xm = law.x_min;
  return alpha * integrate_finite(
                     [&](double y) { return g(xm / y) * std::pow(y, alpha - 1.0); }, 0.0, 1.0);
}

// Lognormal expectations E g(e^N - 1), N ~ Normal(mu, s^2), truncated at 12
// standard deviations (mass beyond is < 1e-32).
template <typename F>
double lognormal_expect(const ShiftedLognormal& law, F g) {
  return integrate_finite(
      [&](double z) { return g(std::expm1(law.mu + law.s * z)) * stats::normal_pdf(z); },
      -12.0, 12.0);
}

}  // namespace

std::string law_name(const JumpLaw& law) {
  return std::visit(
      [](const auto& l) -> std::string {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "none";
        else if constexpr (std::is_same_v<T, ExponentialPositive>) return "exponential";
        else if constexpr (std::is_same_v<T, ShiftedLognormal>) return "lognormal";
        else if constexpr (std::is_same_v<T, ParetoPositive>) return "pareto";
        else return "atoms";
      },
      law);
}

std::string check_law(const JumpLaw& law) {
  if (const auto* e = std::get_if<ExponentialPositive>(&law)) {
    if (!(e->rate > 0.0)) return "exponential rate must be positive";
  } else if (const auto* l = std::get_if<ShiftedLognormal>(&law)) {
    if (!(l->s > 0.0)) return "lognormal s must be positive";
  } else if (const auto* p = std::get_if<ParetoPositive>(&law)) {
    if (!(p->alpha > 0.0)) return "pareto alpha must be positive";
    if (!(p->x_min > 0.0)) return "pareto x_min must be positive";
  } else if (const auto* a = std::get_if<DiscreteAtoms>(&law)) {
    if (a->values.empty() || a->values.size() != a->probs.size())
      return "atoms need matching non-empty values/probs";
    double total = 0.0;
    for (double pr : a->probs) {
      if (pr < 0.0) return "atom probabilities must be nonnegative";
      total += pr;
    }
    if (std::fabs(total - 1.0) > 1e-12) return "atom probabilities must sum to 1";
  }
  return "";
}

double support_min(const JumpLaw& law) {
  return std::visit(
      [](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, std::monostate>) return 0.0;
        else if constexpr (std::is_same_v<T, ExponentialPositive>) return 0.0;
        else if constexpr (std::is_same_v<T, ShiftedLognormal>) return -1.0;
        else if constexpr (std::is_same_v<T, ParetoPositive>) return l.x_min;
        else return *std::min_element(l.values.begin(), l.values.end());
      },
      law);
}

bool has_negative_jumps(const JumpLaw& law) {
  if (const auto* a = std::get_if<DiscreteAtoms>(&law)) {
    for (std::size_t i = 0; i < a->values.size(); ++i)
      if (a->values[i] < 0.0 && a->probs[i] > 0.0) return true;
    return false;
  }
  if (std::holds_alternative<ShiftedLognormal>(law)) return true;
  return false;
}

bool has_positive_jumps(const JumpLaw& law) {
  if (is_none(law)) return false;
  if (const auto* a = std::get_if<DiscreteAtoms>(&law)) {
    for (std::size_t i = 0; i < a->values.size(); ++i)
      if (a->values[i] > 0.0 && a->probs[i] > 0.0) return true;
    return false;
  }
  return true;
}

std::pair<double, double> mellin_domain(const JumpLaw& law) {
  // Only the Pareto tail restricts the strip: (1+x)^{-q} is integrable at
  // +inf iff q > -alpha. All other families have every polynomial moment.
  if (const auto* p = std::get_if<ParetoPositive>(&law)) return {-p->alpha, kInf};
  return {-kInf, kInf};
}

namespace {

// exp with an explicit zero at -inf and with nan-free handling of the huge
// negative exponents the quadrature probes in the far tails.
double exp_or_zero(double e) {
  if (e < -700.0) return 0.0;
  return std::exp(e);
}

}  // namespace

double mellin(const JumpLaw& law, double q) {
  if (q == 0.0) return 1.0;
  const auto [lo, hi] = mellin_domain(law);
  if (q <= lo || q >= hi) return kInf;
  return std::visit(
      [q](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, ExponentialPositive>) {
          const double r = l.rate;
          return r * integrate_semi_infinite(
                         [q, r](double x) {
                           return exp_or_zero(-q * std::log1p(x) - r * x);
                         },
                         0.0);
        } else if constexpr (std::is_same_v<T, ShiftedLognormal>) {
          // (1+xi)^{-q} = e^{-qN}, N ~ Normal(mu, s^2)
          return std::exp(-q * l.mu + 0.5 * q * q * l.s * l.s);
        } else if constexpr (std::is_same_v<T, ParetoPositive>) {
          // y = x_min / x substitution, fused into one exponent so the
          // integrable endpoint singularity never overflows
          const double alpha = l.alpha, xm = l.x_min;
          return alpha * integrate_finite(
                             [q, alpha, xm](double y) {
                               return exp_or_zero(-q * std::log1p(xm / y) +
                                                  (alpha - 1.0) * std::log(y));
                             },
                             0.0, 1.0);
        } else {
          double s = 0.0;
          for (std::size_t i = 0; i < l.values.size(); ++i)
            s += l.probs[i] * std::exp(-q * std::log1p(l.values[i]));
          return s;
        }
      },
      law);
}

double mellin_dq(const JumpLaw& law, double q) {
  const auto [lo, hi] = mellin_domain(law);
  if (q <= lo || q >= hi) return kInf;
  return std::visit(
      [q](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, ExponentialPositive>) {
          const double r = l.rate;
          return -r * integrate_semi_infinite(
                          [q, r](double x) {
                            const double y = std::log1p(x);
                            if (y <= 0.0) return 0.0;
                            return exp_or_zero(std::log(y) - q * y - r * x);
                          },
                          0.0);
        } else if constexpr (std::is_same_v<T, ShiftedLognormal>) {
          // d/dq e^{-q mu + q^2 s^2/2}
          return (-l.mu + q * l.s * l.s) * std::exp(-q * l.mu + 0.5 * q * q * l.s * l.s);
        } else if constexpr (std::is_same_v<T, ParetoPositive>) {
          const double alpha = l.alpha, xm = l.x_min;
          return -alpha * integrate_finite(
                              [q, alpha, xm](double y) {
                                const double ly = std::log1p(xm / y);
                                if (ly <= 0.0) return 0.0;
                                return exp_or_zero(std::log(ly) - q * ly +
                                                   (alpha - 1.0) * std::log(y));
                              },
                              0.0, 1.0);
        } else {
          double s = 0.0;
          for (std::size_t i = 0; i < l.values.size(); ++i) {
            const double y = std::log1p(l.values[i]);
            s += l.probs[i] * (-y) * std::exp(-q * y);
          }
          return s;
        }
      },
      law);
}

double mean_h(const JumpLaw& law) {
  return std::visit(
      [](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, ExponentialPositive>) {
          const double r = l.rate;
          return (1.0 - std::exp(-r)) / r - std::exp(-r);
        } else if constexpr (std::is_same_v<T, ShiftedLognormal>) {
          // E[(e^N - 1) 1{N <= ln 2}]
          const double mu = l.mu, s = l.s;
          const double b = (std::log(2.0) - mu) / s;
          return std::exp(mu + 0.5 * s * s) * stats::normal_cdf(b - s) - stats::normal_cdf(b);
        } else if constexpr (std::is_same_v<T, ParetoPositive>) {
          if (l.x_min >= 1.0) return 0.0;
          const double a = l.alpha, xm = l.x_min;
          if (std::fabs(a - 1.0) < 1e-12) return -xm * std::log(xm);
          return a * std::pow(xm, a) * (1.0 - std::pow(xm, 1.0 - a)) / (1.0 - a);
        } else {
          double s = 0.0;
          for (std::size_t i = 0; i < l.values.size(); ++i)
            s += l.probs[i] * h_trunc(l.values[i]);
          return s;
        }
      },
      law);
}

double mean_h_log1p(const JumpLaw& law) {
  return std::visit(
      [](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, ExponentialPositive>) {
          // ln(1+x) in (0,1] iff x <= e-1
          const double r = l.rate;
          return integrate_finite(
              [r](double x) { return std::log1p(x) * r * std::exp(-r * x); }, 0.0,
              std::expm1(1.0));
        } else if constexpr (std::is_same_v<T, ShiftedLognormal>) {
          // E[N 1{|N| <= 1}], N ~ Normal(mu, s^2)
          const double mu = l.mu, s = l.s;
          const double a = (-1.0 - mu) / s, b = (1.0 - mu) / s;
          return mu * (stats::normal_cdf(b) - stats::normal_cdf(a)) +
                 s * (stats::normal_pdf(a) - stats::normal_pdf(b));
        } else if constexpr (std::is_same_v<T, ParetoPositive>) {
          const double hi = std::expm1(1.0);
          if (l.x_min >= hi) return 0.0;
          const double a = l.alpha, xm = l.x_min;
          return a * std::pow(xm, a) *
                 integrate_finite(
                     [a](double x) { return std::log1p(x) * std::pow(x, -a - 1.0); }, xm, hi);
        } else {
          double s = 0.0;
          for (std::size_t i = 0; i < l.values.size(); ++i)
            s += l.probs[i] * h_trunc(std::log1p(l.values[i]));
          return s;
        }
      },
      law);
}

double mean_log1p(const JumpLaw& law) {
  return std::visit(
      [](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, ExponentialPositive>) {
          const double r = l.rate;
          return integrate_semi_infinite(
              [r](double x) { return std::log1p(x) * r * std::exp(-r * x); }, 0.0);
        } else if constexpr (std::is_same_v<T, ShiftedLognormal>) {
          return l.mu;
        } else if constexpr (std::is_same_v<T, ParetoPositive>) {
          return pareto_expect(l, [](double x) { return std::log1p(x); });
        } else {
          double s = 0.0;
          for (std::size_t i = 0; i < l.values.size(); ++i) {
            if (l.values[i] <= -1.0)
              throw UnsupportedJumpLawError("ln(1+x) undefined for atom <= -1");
            s += l.probs[i] * std::log1p(l.values[i]);
          }
          return s;
        }
      },
      law);
}

double abs_moment(const JumpLaw& law, double p) {
  return std::visit(
      [p](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, ExponentialPositive>) {
          return std::tgamma(p + 1.0) / std::pow(l.rate, p);
        } else if constexpr (std::is_same_v<T, ShiftedLognormal>) {
          return lognormal_expect(l, [p](double x) { return std::pow(std::fabs(x), p); });
        } else if constexpr (std::is_same_v<T, ParetoPositive>) {
          if (p >= l.alpha) return kInf;
          return l.alpha / (l.alpha - p) * std::pow(l.x_min, p);
        } else {
          double s = 0.0;
          for (std::size_t i = 0; i < l.values.size(); ++i)
            s += l.probs[i] * std::pow(std::fabs(l.values[i]), p);
          return s;
        }
      },
      law);
}

double sample(const JumpLaw& law, Stream& rng) {
  return std::visit(
      [&rng](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, ExponentialPositive>) {
          return rng.exponential(l.rate);
        } else if constexpr (std::is_same_v<T, ShiftedLognormal>) {
          return std::expm1(l.mu + l.s * rng.normal());
        } else if constexpr (std::is_same_v<T, ParetoPositive>) {
          return l.x_min * std::pow(rng.uniform(), -1.0 / l.alpha);
        } else {
          double u = rng.uniform();
          for (std::size_t i = 0; i + 1 < l.values.size(); ++i) {
            if (u < l.probs[i]) return l.values[i];
            u -= l.probs[i];
          }
          return l.values.back();
        }
      },
      law);
}

double sample_tilted(const JumpLaw& law, double beta, Stream& rng) {
  if (const auto* ln = std::get_if<ShiftedLognormal>(&law)) {
    // e^{-beta N} tilt of N ~ Normal(mu, s^2) shifts the mean to mu - beta s^2.
    return std::expm1(ln->mu - beta * ln->s * ln->s + ln->s * rng.normal());
  }
  if (const auto* a = std::get_if<DiscreteAtoms>(&law)) {
    double norm = 0.0;
    for (std::size_t i = 0; i < a->values.size(); ++i)
      norm += a->probs[i] * std::pow(1.0 + a->values[i], -beta);
    double u = rng.uniform() * norm;
    for (std::size_t i = 0; i + 1 < a->values.size(); ++i) {
      const double w = a->probs[i] * std::pow(1.0 + a->values[i], -beta);
      if (u < w) return a->values[i];
      u -= w;
    }
    return a->values.back();
  }
  if (is_none(law)) return 0.0;
  // Rejection against the base law: accept with ((1+x)/(1+x_lo))^{-beta} <= 1.
  const double x_lo = support_min(law);
  const double log_ref = std::log1p(x_lo);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Stream& r = rng;
    const double x = sample(law, r);
    const double log_accept = -beta * (std::log1p(x) - log_ref);
    if (std::log(r.uniform()) <= log_accept) return x;
  }
  throw UnsupportedJumpLawError("tilted rejection sampler failed to accept");
}

}  // namespace levyruin
