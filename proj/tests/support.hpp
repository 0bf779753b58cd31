#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "torusmf/bundle.hpp"
#include "torusmf/functional.hpp"
#include "torusmf/grid.hpp"
#include "torusmf/random.hpp"

namespace support {

inline constexpr double pi = std::numbers::pi;

inline torusmf::ProblemSpec problem(std::size_t n, const std::string& v = "zero", const std::string& conn = "zero",
                                    const std::string& h = "one", double rho = 0.0) {
  auto grid = torusmf::build_grid(n, v);
  auto c = torusmf::connection_preset(conn, grid);
  auto hw = torusmf::h_preset_field(grid, h);
  return torusmf::make_problem(std::move(grid), std::move(c), std::move(hw), rho, h);
}

// Explicit trigonometric polynomial, evaluable on any grid.
struct Trig {
  struct Mode {
    int kx, ky;
    double a, b;
  };
  std::vector<Mode> modes;

  static Trig random(std::uint64_t seed, int kmax = 3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Trig t;
    for (int kx = -kmax; kx <= kmax; ++kx)
      for (int ky = 0; ky <= kmax; ++ky) {
        if (ky == 0 && kx < 0) continue;
        t.modes.push_back({kx, ky, nd(rng) / (1 + kx * kx + ky * ky), nd(rng) / (1 + kx * kx + ky * ky)});
      }
    return t;
  }

  double operator()(double x, double y) const {
    double s = 0.0;
    for (const auto& m : modes) {
      const double ph = 2.0 * pi * (m.kx * x + m.ky * y);
      s += m.a * std::cos(ph) + m.b * std::sin(ph);
    }
    return s;
  }
  double dx(double x, double y) const {
    double s = 0.0;
    for (const auto& m : modes) {
      const double ph = 2.0 * pi * (m.kx * x + m.ky * y);
      s += 2.0 * pi * m.kx * (-m.a * std::sin(ph) + m.b * std::cos(ph));
    }
    return s;
  }

  torusmf::ScalarField sample(std::size_t n) const {
    torusmf::ScalarField f(n);
    const double h = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) f(i, j) = (*this)(i * h, j * h);
    return f;
  }
};

inline double max_abs(const torusmf::ScalarField& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

inline double max_diff(const torusmf::ScalarField& a, const torusmf::ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

// Dedekind eta at tau = i from its q-product, q = e^{-2 pi}.
inline double dedekind_eta_i() {
  const double q = std::exp(-2.0 * pi);
  double prod = 1.0, qn = 1.0;
  for (int k = 1; k < 60; ++k) {
    qn *= q;
    prod *= 1.0 - qn;
  }
  return std::exp(-2.0 * pi / 24.0) * prod;
}

// Regular part of the Green function of the unit square torus, normalized
// as G = -4 log r + A + o(1) with Delta G = 8 pi (delta - 1).
inline double flat_square_regular_part() {
  const double eta = dedekind_eta_i();
  return -4.0 * std::log(2.0 * pi * eta * eta);
}

}  // namespace support
