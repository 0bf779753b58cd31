#include "torusmf/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>
#include <random>

#include "torusmf/errors.hpp"

namespace torusmf {

ScalarField smooth_random_field(std::size_t n, std::uint64_t seed, int kmax, double amplitude) {
  if (kmax < 1 || 2 * static_cast<std::size_t>(kmax) >= n) throw InvalidArgument("smooth_random_field: bad mode cutoff");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const double h = 1.0 / static_cast<double>(n);
  const double tau = 2.0 * std::numbers::pi;
  ScalarField u(n);
  for (int kx = -kmax; kx <= kmax; ++kx) {
    for (int ky = 0; ky <= kmax; ++ky) {
      if (ky == 0 && kx <= 0) continue;
      const double a = normal(rng), b = normal(rng);
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
          const double ph = tau * (kx * static_cast<double>(i) + ky * static_cast<double>(j)) * h;
          u(i, j) += a * std::cos(ph) + b * std::sin(ph);
        }
      }
    }
  }
  double m = 0.0;
  for (double x : u.values()) m = std::max(m, std::abs(x));
  if (m > 0.0) u *= amplitude / m;
  return u;
}

ScalarField white_noise_field(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  ScalarField u(n);
  for (double& x : u.values()) x = normal(rng);
  return u;
}

}  // namespace torusmf
