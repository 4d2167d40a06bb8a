// Apache License, Version 2.0, refer to LICENSE.txt

#include "cdosr/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cdosr {

double log_sum_exp(std::span<const double> v) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (v.empty()) return kNegInf;
  const double hi = *std::max_element(v.begin(), v.end());
  if (hi == kNegInf) return kNegInf;
  if (std::isinf(hi)) return hi;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

std::size_t sample_log_categorical(std::span<const double> log_weights,
                                   Rng& rng) {
  if (log_weights.empty())
    throw std::invalid_argument("sample_log_categorical: no weights");
  const double total = log_sum_exp(log_weights);
  if (!std::isfinite(total))
    throw std::domain_error("sample_log_categorical: no finite weight");

  const double u = uniform01(rng);
  double cum = 0.0;
  std::size_t last_live = log_weights.size();
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    if (log_weights[i] == -std::numeric_limits<double>::infinity()) continue;
    cum += std::exp(log_weights[i] - total);
    last_live = i;
    if (u < cum) return i;
  }
  // Rounding left cum slightly below 1.
  return last_live;
}

double draw_gamma(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("draw_gamma: shape and rate must be > 0");
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(rng);
}

}  // namespace cdosr
