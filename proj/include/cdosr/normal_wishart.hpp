// Apache License, Version 2.0, refer to LICENSE.txt

// Conjugate Normal-Wishart machinery for Gaussian mixture components.
//
// Parameterization: a component has mean mu and precision L with
//
//   L      ~ Wishart, density proportional to |L|^((nu-d-1)/2) exp(-tr(S0 L)/2)
//   mu | L ~ Normal(mu0, (beta L)^-1)
//
// so S0 (`sigma0`) is the inverse scale of the Wishart and behaves like a
// prior scatter matrix: E[L] = nu * S0^-1. The posterior after observing
// points with count n, sum s and mean xbar is
//
//   beta_n = beta + n,  nu_n = nu + n,  mu_n = (beta mu0 + s) / beta_n
//   S_n    = S0 + C + beta n / beta_n (xbar - mu0)(xbar - mu0)^T
//
// where C is the centered scatter. The posterior predictive of one point is
// a multivariate Student-t with nu_n - d + 1 degrees of freedom, location
// mu_n and scale S_n (beta_n + 1) / (beta_n (nu_n - d + 1)).

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <vector>

namespace cdosr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct NormalWishartParams {
  Vector mu0;
  double beta = 1.0;
  Matrix sigma0;
  double nu = 1.0;

  int dim() const { return static_cast<int>(mu0.size()); }

  // Throws std::invalid_argument when beta <= 0, nu <= d - 1, shapes
  // disagree, or sigma0 is not symmetric positive definite.
  void validate() const;
};

// Count, sum and raw scatter (sum of outer products) of a point set.
class GaussianSuffStats {
 public:
  GaussianSuffStats() = default;
  explicit GaussianSuffStats(int dim);

  int dim() const { return static_cast<int>(sum_.size()); }
  int count() const { return count_; }
  bool empty() const { return count_ == 0; }
  const Vector& sum() const { return sum_; }
  const Matrix& scatter() const { return scatter_; }

  void add(const Eigen::Ref<const Vector>& x);
  // Throws std::logic_error when empty.
  void remove(const Eigen::Ref<const Vector>& x);
  void merge(const GaussianSuffStats& other);
  void unmerge(const GaussianSuffStats& other);
  void clear();

  // Scatter about the sample mean; zero when empty.
  Matrix centered_scatter() const;

 private:
  void check_dim(Eigen::Index d) const;

  int count_ = 0;
  Vector sum_;
  Matrix scatter_;
};

GaussianSuffStats stats_add(GaussianSuffStats stats,
                            const Eigen::Ref<const Vector>& x);
GaussianSuffStats stats_remove(GaussianSuffStats stats,
                               const Eigen::Ref<const Vector>& x);
GaussianSuffStats stats_from_points(const std::vector<Vector>& points,
                                    int dim);

NormalWishartParams posterior_params(const NormalWishartParams& prior,
                                     const GaussianSuffStats& stats);

// log Gamma_d(a), the multivariate log-gamma function.
double log_multigamma(double a, int d);

// A Normal-Wishart distribution with its scale matrix factored once, so
// that predictive evaluations cost O(d^2) and set marginals O(d^3) without
// forming inverses or determinants explicitly.
class NormalWishartPosterior {
 public:
  NormalWishartPosterior() = default;
  explicit NormalWishartPosterior(NormalWishartParams params);

  const NormalWishartParams& params() const { return params_; }
  double log_det_scale() const { return log_det_scale_; }

  // Log posterior-predictive density of one point. No input checks.
  double log_predictive(const Eigen::Ref<const Vector>& x) const;

  // Log joint predictive density of the points summarized by `added`.
  // Returns 0 for an empty set.
  double log_marginal(const GaussianSuffStats& added) const;

 private:
  NormalWishartParams params_;
  Eigen::LLT<Matrix> chol_;
  double log_det_scale_ = 0.0;
  // Student-t constants for the single-point predictive.
  double t_dof_ = 0.0;
  double t_log_norm_ = 0.0;
  double t_scale_factor_ = 0.0;
};

// Log posterior-predictive density of x given the points in `context`.
// An empty context gives the prior predictive. Throws std::invalid_argument
// on non-finite coordinates or dimension mismatch.
double log_predictive(const Eigen::Ref<const Vector>& x,
                      const NormalWishartParams& prior,
                      const GaussianSuffStats& context);

// Log joint predictive density of `points` given `context`; 0 when empty.
double log_marginal_set(const std::vector<Vector>& points,
                        const NormalWishartParams& prior,
                        const GaussianSuffStats& context);

}  // namespace cdosr
