// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <vector>

#include "cdosr/normal_wishart.hpp"

namespace cdosr {

// Zero-mean, unit-variance scaling with statistics from training rows.
// Constant features keep scale 1.
struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer fit(const Matrix& rows);
  Matrix apply(const Matrix& rows) const;
};

struct PcaProjection {
  Vector mean;
  Matrix components;      // d x k, columns by decreasing variance
  Vector eigenvalues;     // all d, decreasing
  double retained = 1.0;  // variance fraction kept by the k components

  int output_dim() const { return static_cast<int>(components.cols()); }
  Matrix apply(const Matrix& rows) const;
};

// Fits on rows, keeping the smallest k whose cumulative variance fraction is
// at least `retain`. Throws std::invalid_argument unless retain is in (0, 1]
// and rows is nonempty. Zero-variance input keeps k = 1 with a warning.
PcaProjection pca_fit(const Matrix& rows, double retain);

struct PcaResult {
  PcaProjection projection;
  std::vector<Matrix> projected;
};

// pca_fit on `train` then projects each matrix in `apply_to`.
PcaResult pca_fit_transform(const Matrix& train, const std::vector<Matrix>& apply_to,
                            double retain);

}  // namespace cdosr
