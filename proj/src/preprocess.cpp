// Apache License, Version 2.0, refer to LICENSE.txt

#include "cdosr/preprocess.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "cdosr/log.hpp"

namespace cdosr {

Standardizer Standardizer::fit(const Matrix& rows) {
  if (rows.rows() == 0) throw std::invalid_argument("Standardizer: no rows");
  Standardizer s;
  s.mean = rows.colwise().mean().transpose();
  const Matrix centered = rows.rowwise() - s.mean.transpose();
  const double denom = rows.rows() > 1 ? static_cast<double>(rows.rows() - 1) : 1.0;
  s.scale = (centered.array().square().colwise().sum() / denom).sqrt().transpose();
  for (Eigen::Index c = 0; c < s.scale.size(); ++c)
    if (!(s.scale(c) > 1e-12)) s.scale(c) = 1.0;
  return s;
}

Matrix Standardizer::apply(const Matrix& rows) const {
  if (rows.rows() == 0) return Matrix(0, mean.size());
  return ((rows.rowwise() - mean.transpose()).array().rowwise() /
          scale.transpose().array())
      .matrix();
}

Matrix PcaProjection::apply(const Matrix& rows) const {
  if (rows.rows() == 0) return Matrix(0, components.cols());
  return (rows.rowwise() - mean.transpose()) * components;
}

PcaProjection pca_fit(const Matrix& rows, double retain) {
  if (!(retain > 0.0 && retain <= 1.0))
    throw std::invalid_argument("pca_fit: retain must lie in (0, 1]");
  if (rows.rows() == 0) throw std::invalid_argument("pca_fit: no rows");
  const Eigen::Index d = rows.cols();

  PcaProjection p;
  p.mean = rows.colwise().mean().transpose();
  const Matrix centered = rows.rowwise() - p.mean.transpose();
  const double denom = rows.rows() > 1 ? static_cast<double>(rows.rows() - 1) : 1.0;
  const Matrix cov = centered.transpose() * centered / denom;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("pca_fit: eigensolver failed");
  // Ascending from Eigen; reverse to decreasing and clamp round-off negatives.
  p.eigenvalues = eig.eigenvalues().reverse().cwiseMax(0.0);
  const Matrix vectors = eig.eigenvectors().rowwise().reverse();

  const double total = p.eigenvalues.sum();
  Eigen::Index k = 1;
  if (!(total > 0.0)) {
    log_warning("pca_fit: data has zero variance; keeping one component");
    p.retained = 1.0;
  } else {
    double cum = 0.0;
    for (k = 0; k < d;) {
      cum += p.eigenvalues(k);
      ++k;
      if (cum / total >= retain - 1e-12) break;
    }
    p.retained = cum / total;
  }
  p.components = vectors.leftCols(k);
  return p;
}

PcaResult pca_fit_transform(const Matrix& train, const std::vector<Matrix>& apply_to,
                            double retain) {
  PcaResult r;
  r.projection = pca_fit(train, retain);
  r.projected.reserve(apply_to.size());
  for (const auto& m : apply_to) {
    if (m.rows() > 0 && m.cols() != train.cols())
      throw std::invalid_argument("pca_fit_transform: dimension mismatch");
    r.projected.push_back(r.projection.apply(m));
  }
  return r;
}

}  // namespace cdosr
