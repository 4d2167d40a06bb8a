// Apache License, Version 2.0, refer to LICENSE.txt

// Data-parallel scoring kernels used by the sampler's inner loops. Each
// kernel has a serial reference and an OpenMP variant; both write one
// output slot per component, so results are identical for any thread count.

#pragma once

#include <span>
#include <vector>

#include "cdosr/normal_wishart.hpp"

namespace cdosr {

enum class Execution { kSerial, kParallel };

// Components below this count are scored serially even under kParallel.
inline constexpr std::size_t kParallelMinComponents = 16;

// out[k] = log predictive of x under components[k]; null entries give -inf.
void score_point_serial(std::span<const NormalWishartPosterior* const> components,
                        const Eigen::Ref<const Vector>& x, std::span<double> out);
void score_point_parallel(std::span<const NormalWishartPosterior* const> components,
                          const Eigen::Ref<const Vector>& x, std::span<double> out);

// out[k] = log joint predictive of the set `added` under components[k].
void score_set_serial(std::span<const NormalWishartPosterior* const> components,
                      const GaussianSuffStats& added, std::span<double> out);
void score_set_parallel(std::span<const NormalWishartPosterior* const> components,
                        const GaussianSuffStats& added, std::span<double> out);

inline void score_point(Execution exec,
                        std::span<const NormalWishartPosterior* const> components,
                        const Eigen::Ref<const Vector>& x, std::span<double> out) {
  if (exec == Execution::kParallel)
    score_point_parallel(components, x, out);
  else
    score_point_serial(components, x, out);
}

inline void score_set(Execution exec,
                      std::span<const NormalWishartPosterior* const> components,
                      const GaussianSuffStats& added, std::span<double> out) {
  if (exec == Execution::kParallel)
    score_set_parallel(components, added, out);
  else
    score_set_serial(components, added, out);
}

// Number of OpenMP threads available (1 when built without OpenMP).
int max_threads();

}  // namespace cdosr
