#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace spdr {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Counter-derived per-path seed, constant time in the index; concurrent path
// generation stays schedule-independent.
inline std::uint64_t path_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base + (index + 1) * 0x9E3779B97F4A7C15ull);
}

// Deterministic N(0,1) stream: mt19937_64 + Box-Muller. std::normal_distribution
// is implementation-defined and would tie outputs to the standard library.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // in (0,1)
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Eigen::VectorXd vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = (*this)();
    return v;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spdr
