// Apache License, Version 2.0, refer to LICENSE.txt

// Reference computations that share no code with the library.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

// Normal-Gamma posterior on (mu, lambda) for one-dimensional data, tabulated
// on a grid. Prior: lambda has density proportional to
// lambda^(nu/2 - 1) exp(-s0 lambda / 2) and mu | lambda ~ N(mu0, 1/(beta lambda)).
class GridPosterior1D {
 public:
  GridPosterior1D(double mu0, double beta, double nu, double s0, const std::vector<double>& data,
                  int n_mu = 1200, int n_u = 1200)
      : mu0_(mu0), beta_(beta), nu_(nu), s0_(s0), data_(data) {
    // Coarse pass locates the mass, fine pass integrates.
    double mu_lo = -200, mu_hi = 200, u_lo = -25, u_hi = 15;
    for (int pass = 0; pass < 3; ++pass) {
      tabulate(mu_lo, mu_hi, u_lo, u_hi, pass < 2 ? 400 : n_mu, pass < 2 ? 400 : n_u);
      if (pass == 2) break;
      double a = 1e300, b = -1e300, c = 1e300, d = -1e300;
      for (int i = 0; i < n_mu_; ++i)
        for (int k = 0; k < n_u_; ++k)
          if (logp_[i * n_u_ + k] > max_ - 46) {
            a = std::min(a, mu_[i]);
            b = std::max(b, mu_[i]);
            c = std::min(c, u_[k]);
            d = std::max(d, u_[k]);
          }
      const double hm = (mu_hi - mu_lo) / (n_mu_ - 1), hu = (u_hi - u_lo) / (n_u_ - 1);
      mu_lo = a - 2 * hm;
      mu_hi = b + 2 * hm;
      u_lo = c - 2 * hu;
      u_hi = d + 2 * hu;
    }
  }

  // E[f(mu, lambda)] under the posterior.
  template <typename F>
  double expect(F f) const {
    double num = 0.0;
    for (int i = 0; i < n_mu_; ++i)
      for (int k = 0; k < n_u_; ++k) {
        const double w = weight_[i * n_u_ + k];
        if (w > 0) num += w * f(mu_[i], std::exp(u_[k]));
      }
    return num / norm_;
  }

  double predictive(double x) const {
    return expect([x](double mu, double lam) {
      return std::sqrt(lam / (2 * std::numbers::pi)) * std::exp(-0.5 * lam * (x - mu) * (x - mu));
    });
  }

 private:
  double log_joint(double mu, double lam) const {
    double lp = (nu_ / 2 - 1) * std::log(lam) - s0_ * lam / 2 + 0.5 * std::log(lam) -
                0.5 * beta_ * lam * (mu - mu0_) * (mu - mu0_);
    for (double x : data_) lp += 0.5 * std::log(lam) - 0.5 * lam * (x - mu) * (x - mu);
    return lp;
  }

  void tabulate(double mu_lo, double mu_hi, double u_lo, double u_hi, int n_mu, int n_u) {
    n_mu_ = n_mu;
    n_u_ = n_u;
    mu_.resize(n_mu);
    u_.resize(n_u);
    for (int i = 0; i < n_mu; ++i) mu_[i] = mu_lo + (mu_hi - mu_lo) * i / (n_mu - 1);
    for (int k = 0; k < n_u; ++k) u_[k] = u_lo + (u_hi - u_lo) * k / (n_u - 1);
    logp_.assign(static_cast<std::size_t>(n_mu) * n_u, 0.0);
    max_ = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_mu; ++i)
      for (int k = 0; k < n_u; ++k) {
        const double lam = std::exp(u_[k]);
        // Jacobian of lambda = exp(u).
        const double v = log_joint(mu_[i], lam) + u_[k];
        logp_[i * n_u + k] = v;
        max_ = std::max(max_, v);
      }
    weight_.resize(logp_.size());
    norm_ = 0.0;
    for (int i = 0; i < n_mu; ++i)
      for (int k = 0; k < n_u; ++k) {
        // Trapezoid weights.
        const double wi = (i == 0 || i == n_mu - 1) ? 0.5 : 1.0;
        const double wk = (k == 0 || k == n_u - 1) ? 0.5 : 1.0;
        const double w = wi * wk * std::exp(logp_[i * n_u + k] - max_);
        weight_[i * n_u + k] = w;
        norm_ += w;
      }
  }

  double mu0_, beta_, nu_, s0_;
  std::vector<double> data_;
  int n_mu_ = 0, n_u_ = 0;
  std::vector<double> mu_, u_, logp_, weight_;
  double max_ = 0.0, norm_ = 0.0;
};

// Trapezoid rule for f over [a, b].
template <typename F>
double trapezoid(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

// Multivariate normal log density with covariance `cov`.
inline double mvn_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                         const Eigen::MatrixXd& cov) {
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  const Eigen::VectorXd z = llt.matrixL().solve(x - mean);
  double logdet = 0.0;
  for (int i = 0; i < cov.rows(); ++i) logdet += 2 * std::log(llt.matrixL()(i, i));
  return -0.5 * (cov.rows() * std::log(2 * std::numbers::pi) + logdet + z.squaredNorm());
}

// Bartlett draw of a Wishart matrix with scale V and dof nu.
template <typename R>
Eigen::MatrixXd draw_wishart(const Eigen::MatrixXd& V, double nu, R& rng) {
  const int d = static_cast<int>(V.rows());
  const Eigen::MatrixXd Lv = V.llt().matrixL();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  std::normal_distribution<double> z;
  for (int i = 0; i < d; ++i) {
    std::chi_squared_distribution<double> chi(nu - i);
    A(i, i) = std::sqrt(chi(rng));
    for (int j = 0; j < i; ++j) A(i, j) = z(rng);
  }
  const Eigen::MatrixXd LA = Lv * A;
  return LA * LA.transpose();
}

}  // namespace oracle
