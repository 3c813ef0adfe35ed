#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace levyruin::stats {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

inline MeanSE mean_se(std::span<const double> xs) {
  MeanSE out;
  out.n = xs.size();
  if (xs.empty()) return out;
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  if (xs.size() > 1) v /= static_cast<double>(xs.size() - 1);
  out.mean = m;
  out.se = std::sqrt(v / static_cast<double>(xs.size()));
  return out;
}

inline double binomial_se(double p_hat, std::size_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(std::max(p_hat * (1.0 - p_hat), 0.0) / static_cast<double>(n));
}

// Empirical quantile (linear interpolation) of a sorted vector.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(i);
  return sorted[i] * (1.0 - frac) + sorted[i + 1] * frac;
}

// Fraction of a sorted sample strictly above u.
inline double exceedance_sorted(std::span<const double> sorted, double u) {
  auto it = std::upper_bound(sorted.begin(), sorted.end(), u);
  return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

// Two-sample Kolmogorov-Smirnov statistic. Inputs are sorted in place.
inline double ks_statistic(std::vector<double>& a, std::vector<double>& b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

// Critical value of the two-sample KS test at level alpha (asymptotic).
inline double ks_critical(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt((static_cast<double>(n) + static_cast<double>(m)) /
                       (static_cast<double>(n) * static_cast<double>(m)));
}

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
};

inline OlsFit ols(std::span<const double> x, std::span<const double> y) {
  OlsFit f;
  const std::size_t n = x.size();
  if (n < 2) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
  mx /= n; my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - f.intercept - f.slope * x[i];
    sse += e * e;
  }
  f.r2 = (syy > 0) ? 1.0 - sse / syy : 1.0;
  if (n > 2) f.slope_se = std::sqrt(sse / (static_cast<double>(n - 2) * sxx));
  return f;
}

// GCD-style lattice step for a set of real values: the largest d such that
// every value is within tol of an integer multiple of d. Incommensurable
// inputs drive the Euclidean remainders toward zero, so candidates below
// min_step are rejected as numerical dust rather than genuine lattices.
inline double real_lattice_step(std::span<const double> values, double tol = 1e-9,
                                double min_step = 1e-6) {
  double g = 0.0;
  for (double v : values) {
    double b = std::fabs(v);
    if (b <= tol) continue;
    double a = g;
    if (a == 0.0) { g = b; continue; }
    if (b > a) std::swap(a, b);
    while (b > tol) {
      double r = std::fmod(a, b);
      r = std::min(r, b - r);
      a = b;
      b = r;
    }
    g = a;
  }
  if (g <= min_step) return 0.0;
  for (double v : values) {
    const double k = std::round(v / g);
    if (std::fabs(v - k * g) > tol) return 0.0;
  }
  return g;
}

}  // namespace levyruin::stats
