#pragma once

#include <cmath>
#include <cstdint>

#include "errors.hpp"

namespace llfpca {

struct Seed {
  std::uint64_t value = 0;
};

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer: a strong 64-bit mixing function.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Inverse of the standard normal CDF (Wichura's PPND16 rational
// approximations, accurate to ~1e-16 over (0,1)). Deterministic across
// platforms, unlike rejection samplers whose draw consumption varies.
inline double inverse_normal_cdf(double p) {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -x : x;
}

}  // namespace detail

// Counter-based generator: output i is mix64(key + i * golden-ratio gamma).
// Streams derived via split(index) are statistically independent and do not
// depend on how much the parent stream has been consumed, so per-curve
// generation is order-independent and parallelizable.
class CounterRng {
 public:
  explicit CounterRng(Seed seed) : key_(seed.value) {}

  std::uint64_t next_u64() { return detail::mix64(key_ + (++counter_) * detail::kGolden); }

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() { return detail::inverse_normal_cdf(uniform01()); }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Integer uniform on {lo, ..., hi} inclusive.
  long uniform_int(long lo, long hi) {
    double u = uniform01();
    long span = hi - lo + 1;
    long k = lo + static_cast<long>(u * static_cast<double>(span));
    return k > hi ? hi : k;
  }

  CounterRng split(std::uint64_t index) const {
    return CounterRng(Seed{detail::mix64(key_ ^ detail::mix64((index + 1) * detail::kGolden))});
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Hierarchical seed derivation for nested Monte Carlo loops.
inline Seed derive_seed(Seed base, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t k = detail::mix64(base.value ^ detail::mix64((a + 1) * detail::kGolden));
  k = detail::mix64(k ^ detail::mix64((b + 1) * 0xD1342543DE82EF95ull));
  return Seed{k};
}

}  // namespace llfpca
