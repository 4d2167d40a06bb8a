// Apache License, Version 2.0, refer to LICENSE.txt

#include "cdosr/kernels.hpp"

#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cdosr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_sizes(std::size_t n, std::size_t m) {
  if (n != m) throw std::invalid_argument("score kernel: output size mismatch");
}

}  // namespace

void score_point_serial(std::span<const NormalWishartPosterior* const> components,
                        const Eigen::Ref<const Vector>& x, std::span<double> out) {
  check_sizes(components.size(), out.size());
  for (std::size_t k = 0; k < components.size(); ++k)
    out[k] = components[k] ? components[k]->log_predictive(x) : kNegInf;
}

void score_point_parallel(std::span<const NormalWishartPosterior* const> components,
                          const Eigen::Ref<const Vector>& x, std::span<double> out) {
  check_sizes(components.size(), out.size());
  const auto n = static_cast<std::ptrdiff_t>(components.size());
#pragma omp parallel for schedule(static) if (components.size() >= kParallelMinComponents)
  for (std::ptrdiff_t k = 0; k < n; ++k)
    out[k] = components[k] ? components[k]->log_predictive(x) : kNegInf;
}

void score_set_serial(std::span<const NormalWishartPosterior* const> components,
                      const GaussianSuffStats& added, std::span<double> out) {
  check_sizes(components.size(), out.size());
  for (std::size_t k = 0; k < components.size(); ++k)
    out[k] = components[k] ? components[k]->log_marginal(added) : kNegInf;
}

void score_set_parallel(std::span<const NormalWishartPosterior* const> components,
                        const GaussianSuffStats& added, std::span<double> out) {
  check_sizes(components.size(), out.size());
  const auto n = static_cast<std::ptrdiff_t>(components.size());
#pragma omp parallel for schedule(dynamic, 4) if (components.size() >= kParallelMinComponents)
  for (std::ptrdiff_t k = 0; k < n; ++k)
    out[k] = components[k] ? components[k]->log_marginal(added) : kNegInf;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace cdosr
