// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace cdosr {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits, so results do not
// depend on the standard library's distribution implementation.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Returns log(sum(exp(v))). Empty input or all -inf gives -inf.
double log_sum_exp(std::span<const double> v);

// Draws an index with probability proportional to exp(log_weights[i]).
// Entries equal to -inf are never selected.
std::size_t sample_log_categorical(std::span<const double> log_weights,
                                   Rng& rng);

// Gamma(shape, rate) draw; mean is shape / rate.
double draw_gamma(double shape, double rate, Rng& rng);

}  // namespace cdosr
