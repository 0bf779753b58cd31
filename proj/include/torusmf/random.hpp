#pragma once

#include <cstddef>
#include <cstdint>

#include "torusmf/field.hpp"

namespace torusmf {

// Trigonometric polynomial with Fourier modes |kx|, |ky| <= kmax and
// independent normal coefficients, scaled to max |u| = amplitude.
ScalarField smooth_random_field(std::size_t n, std::uint64_t seed, int kmax = 4, double amplitude = 1.0);

// Independent normal node values (not band-limited).
ScalarField white_noise_field(std::size_t n, std::uint64_t seed);

}  // namespace torusmf
