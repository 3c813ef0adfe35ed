#pragma once

#include <cmath>
#include <cstdint>

namespace levyruin {

// Stream tags keep the randomness of the two driving processes (and auxiliary
// consumers) in disjoint streams, so the number of draws consumed by one
// process never shifts the other.
enum class StreamTag : std::uint64_t {
  kReturns = 0,   // R / V process: jump counts, epochs, sizes, Brownian cells
  kBusiness = 1,  // P process
  kPilot = 2,     // pilot moment estimation
  kAux = 3,       // estimator-internal randomness (bootstrap, pairing)
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// xoshiro256++ engine seeded from a (seed, replicate, tag) key via splitmix64.
// Replicate streams are independent of worker scheduling by construction:
// the key alone determines the entire sequence.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t replicate, StreamTag tag) {
    std::uint64_t key = seed;
    key = detail::splitmix64(key) ^ (replicate * 0x9e3779b97f4a7c15ULL);
    key = detail::splitmix64(key) ^ (static_cast<std::uint64_t>(tag) + 0x517cc1b727220a95ULL);
    std::uint64_t sm = detail::splitmix64(key);
    for (auto& w : s_) w = detail::splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on (0,1); never returns 0 or 1.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Wichura's PPND16 inverse CDF (one uniform per draw).
  double normal() { return inverse_normal_cdf(uniform()); }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  // Knuth's product method, chunked so e^{-lambda} never underflows.
  std::uint64_t poisson(double lambda) {
    std::uint64_t total = 0;
    while (lambda > 32.0) {
      total += poisson_knuth(32.0);
      lambda -= 32.0;
    }
    return total + poisson_knuth(lambda);
  }

  // Binomial(n, p): exact Bernoulli counting for small n, Poisson or normal
  // approximation otherwise (used only inside bootstrap resampling).
  std::uint64_t binomial(std::uint64_t n, double p) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    const double np = static_cast<double>(n) * p;
    const double var = np * (1.0 - p);
    if (n <= 256) {
      std::uint64_t k = 0;
      for (std::uint64_t i = 0; i < n; ++i) k += (uniform() < p);
      return k;
    }
    if (np < 24.0) return std::min<std::uint64_t>(n, poisson(np));
    if (var < 24.0) return n - std::min<std::uint64_t>(n, poisson(static_cast<double>(n) * (1.0 - p)));
    const double x = np + std::sqrt(var) * normal();
    if (x <= 0.0) return 0;
    const auto k = static_cast<std::uint64_t>(std::llround(x));
    return std::min(k, n);
  }

  static double inverse_normal_cdf(double p);

 private:
  std::uint64_t poisson_knuth(double lambda) {
    if (lambda <= 0.0) return 0;
    const double l = std::exp(-lambda);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > l);
    return k - 1;
  }

  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

// PPND16 (Wichura, AS 241): double-precision normal quantile.
inline double Stream::inverse_normal_cdf(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -v : v;
}

}  // namespace levyruin
