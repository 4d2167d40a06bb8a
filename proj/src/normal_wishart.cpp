// Apache License, Version 2.0, refer to LICENSE.txt

#include "cdosr/normal_wishart.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cdosr {

namespace {

constexpr double kLogPi = 1.1447298858494002;  // log(pi)

double log_det_from_llt(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

void require_finite(const Eigen::Ref<const Vector>& x, const char* what) {
  if (!x.allFinite())
    throw std::invalid_argument(std::string(what) + ": non-finite coordinate");
}

}  // namespace

void NormalWishartParams::validate() const {
  const int d = dim();
  if (d < 1) throw std::invalid_argument("NormalWishartParams: empty mu0");
  if (sigma0.rows() != d || sigma0.cols() != d)
    throw std::invalid_argument("NormalWishartParams: sigma0 shape mismatch");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("NormalWishartParams: beta must be > 0");
  if (!(nu > d - 1.0) || !std::isfinite(nu))
    throw std::invalid_argument("NormalWishartParams: nu must exceed d - 1");
  if (!mu0.allFinite() || !sigma0.allFinite())
    throw std::invalid_argument("NormalWishartParams: non-finite entries");
  const double asym = (sigma0 - sigma0.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(1.0, sigma0.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("NormalWishartParams: sigma0 not symmetric");
  Eigen::LLT<Matrix> llt(sigma0);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument(
        "NormalWishartParams: sigma0 not positive definite");
}

GaussianSuffStats::GaussianSuffStats(int dim)
    : sum_(Vector::Zero(dim)), scatter_(Matrix::Zero(dim, dim)) {}

void GaussianSuffStats::check_dim(Eigen::Index d) const {
  if (d != sum_.size())
    throw std::invalid_argument("GaussianSuffStats: dimension mismatch");
}

void GaussianSuffStats::add(const Eigen::Ref<const Vector>& x) {
  check_dim(x.size());
  ++count_;
  sum_ += x;
  scatter_.noalias() += x * x.transpose();
}

void GaussianSuffStats::remove(const Eigen::Ref<const Vector>& x) {
  check_dim(x.size());
  if (count_ == 0)
    throw std::logic_error("GaussianSuffStats: remove from empty stats");
  if (--count_ == 0) {
    clear();
    return;
  }
  sum_ -= x;
  scatter_.noalias() -= x * x.transpose();
}

void GaussianSuffStats::merge(const GaussianSuffStats& other) {
  check_dim(other.dim());
  count_ += other.count_;
  sum_ += other.sum_;
  scatter_ += other.scatter_;
}

void GaussianSuffStats::unmerge(const GaussianSuffStats& other) {
  check_dim(other.dim());
  if (other.count_ > count_)
    throw std::logic_error("GaussianSuffStats: unmerge larger than self");
  count_ -= other.count_;
  if (count_ == 0) {
    clear();
    return;
  }
  sum_ -= other.sum_;
  scatter_ -= other.scatter_;
}

void GaussianSuffStats::clear() {
  count_ = 0;
  sum_.setZero();
  scatter_.setZero();
}

Matrix GaussianSuffStats::centered_scatter() const {
  if (count_ == 0) return Matrix::Zero(dim(), dim());
  Matrix c = scatter_ - sum_ * sum_.transpose() / count_;
  return 0.5 * (c + c.transpose());
}

GaussianSuffStats stats_add(GaussianSuffStats stats,
                            const Eigen::Ref<const Vector>& x) {
  stats.add(x);
  return stats;
}

GaussianSuffStats stats_remove(GaussianSuffStats stats,
                               const Eigen::Ref<const Vector>& x) {
  stats.remove(x);
  return stats;
}

GaussianSuffStats stats_from_points(const std::vector<Vector>& points,
                                    int dim) {
  GaussianSuffStats s(dim);
  for (const auto& p : points) s.add(p);
  return s;
}

NormalWishartParams posterior_params(const NormalWishartParams& prior,
                                     const GaussianSuffStats& stats) {
  if (stats.dim() != prior.dim())
    throw std::invalid_argument("posterior_params: dimension mismatch");
  const int n = stats.count();
  if (n == 0) return prior;

  NormalWishartParams post;
  post.beta = prior.beta + n;
  post.nu = prior.nu + n;
  post.mu0 = (prior.beta * prior.mu0 + stats.sum()) / post.beta;
  const Vector diff = stats.sum() / n - prior.mu0;
  post.sigma0 = prior.sigma0 + stats.centered_scatter();
  post.sigma0.noalias() += (prior.beta * n / post.beta) * diff * diff.transpose();
  post.sigma0 = 0.5 * (post.sigma0 + post.sigma0.transpose());
  return post;
}

double log_multigamma(double a, int d) {
  double r = 0.25 * d * (d - 1) * kLogPi;
  for (int i = 0; i < d; ++i) r += std::lgamma(a - 0.5 * i);
  return r;
}

NormalWishartPosterior::NormalWishartPosterior(NormalWishartParams params)
    : params_(std::move(params)), chol_(params_.sigma0) {
  if (chol_.info() != Eigen::Success)
    throw std::domain_error("NormalWishartPosterior: scale not positive definite");
  const int d = params_.dim();
  log_det_scale_ = log_det_from_llt(chol_);
  t_dof_ = params_.nu - d + 1.0;
  t_scale_factor_ = (params_.beta + 1.0) / (params_.beta * t_dof_);
  t_log_norm_ = std::lgamma(0.5 * (t_dof_ + d)) - std::lgamma(0.5 * t_dof_) -
                0.5 * d * (std::log(t_dof_) + kLogPi) -
                0.5 * (d * std::log(t_scale_factor_) + log_det_scale_);
}

double NormalWishartPosterior::log_predictive(
    const Eigen::Ref<const Vector>& x) const {
  const int d = params_.dim();
  Vector r = x - params_.mu0;
  chol_.matrixL().solveInPlace(r);
  const double quad = r.squaredNorm() / t_scale_factor_;
  return t_log_norm_ - 0.5 * (t_dof_ + d) * std::log1p(quad / t_dof_);
}

double NormalWishartPosterior::log_marginal(
    const GaussianSuffStats& added) const {
  const int n = added.count();
  if (n == 0) return 0.0;
  if (n == 1) return log_predictive(added.sum());

  const int d = params_.dim();
  const double beta = params_.beta;
  const double beta_n = beta + n;
  const double nu = params_.nu;
  const double nu_n = nu + n;
  const Vector diff = added.sum() / n - params_.mu0;
  Matrix scale_n = params_.sigma0 + added.centered_scatter();
  scale_n.noalias() += (beta * n / beta_n) * diff * diff.transpose();
  Eigen::LLT<Matrix> llt(scale_n);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("log_marginal: posterior scale not positive definite");
  const double log_det_n = log_det_from_llt(llt);

  return -0.5 * n * d * kLogPi + 0.5 * d * (std::log(beta) - std::log(beta_n)) +
         log_multigamma(0.5 * nu_n, d) - log_multigamma(0.5 * nu, d) +
         0.5 * nu * log_det_scale_ - 0.5 * nu_n * log_det_n;
}

double log_predictive(const Eigen::Ref<const Vector>& x,
                      const NormalWishartParams& prior,
                      const GaussianSuffStats& context) {
  if (x.size() != prior.dim() || context.dim() != prior.dim())
    throw std::invalid_argument("log_predictive: dimension mismatch");
  require_finite(x, "log_predictive");
  return NormalWishartPosterior(posterior_params(prior, context))
      .log_predictive(x);
}

double log_marginal_set(const std::vector<Vector>& points,
                        const NormalWishartParams& prior,
                        const GaussianSuffStats& context) {
  if (points.empty()) return 0.0;
  if (context.dim() != prior.dim())
    throw std::invalid_argument("log_marginal_set: dimension mismatch");
  GaussianSuffStats added(prior.dim());
  for (const auto& p : points) {
    if (p.size() != prior.dim())
      throw std::invalid_argument("log_marginal_set: dimension mismatch");
    require_finite(p, "log_marginal_set");
    added.add(p);
  }
  return NormalWishartPosterior(posterior_params(prior, context))
      .log_marginal(added);
}

}  // namespace cdosr
