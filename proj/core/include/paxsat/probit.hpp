#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "paxsat/features.hpp"

namespace paxsat {

/// Estimation failure that is not a data error (separation, singular
/// information matrix, non-convergence where a fit cannot be returned).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FitOptions {
  double grad_tol = 1e-6;
  int max_iter = 500;
  bool clustered_vcov = true;
  double prob_floor = 1e-300;  // cell-probability floor before log
};

struct InfoCriteria {
  double aic, bic;
};
InfoCriteria info_criteria(double loglik, int k, std::int64_t n);

struct OrderedFit {
  std::vector<std::string> names;
  Eigen::VectorXd beta;
  Eigen::VectorXd cutpoints;           // strictly increasing, size I-1
  int n_categories = 0;                // I after merging unobserved categories
  std::vector<double> category_values; // original outcome value per category
  double loglik = 0;
  Eigen::MatrixXd vcov;  // over (beta, kappa_1, log-increments)
  Eigen::VectorXd se;    // per covariate
  bool converged = false;
  std::int64_t n = 0;
  int k = 0;
  double aic = 0, bic = 0;
  int n_clusters = 0;
  std::vector<std::string> notes;
};

struct BinaryFit {
  std::vector<std::string> names;  // "(intercept)" first
  Eigen::VectorXd beta;
  double loglik = 0;
  Eigen::MatrixXd vcov;
  Eigen::VectorXd se;
  bool converged = false;
  std::int64_t n = 0;
  int k = 0;
  double aic = 0, bic = 0;
  int n_clusters = 0;
  std::optional<double> sigma_u;  // random-intercept scale when estimated
  std::vector<std::string> notes;
};

struct OrderedLoglik {
  double loglik;
  Eigen::VectorXd grad_beta;
  Eigen::VectorXd grad_increments;  // d/d(kappa_1, log-increments)
};

/// Log-likelihood and analytic gradient of the ordered probit at the given
/// parameters; y must hold integers 1..I. Cutpoints must be strictly
/// increasing (contract error otherwise).
OrderedLoglik ordered_loglik_grad(const Eigen::VectorXd& beta, const Eigen::VectorXd& cutpoints,
                                  const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  int n_categories, double prob_floor = 1e-300);

/// Quasi-Newton MLE from beta = 0 and cutpoints at the normal quantiles of
/// the empirical cumulative category shares. Unobserved categories merge into
/// the adjacent lower one with a note. Constant columns are rejected (the
/// intercept lives in the cutpoints); rank-deficient designs raise an error
/// naming collinear columns.
OrderedFit fit_ordered_probit(const DesignMatrix& m, const FitOptions& opt = {});

BinaryFit fit_binary_probit(const DesignMatrix& m, const FitOptions& opt = {});

/// Probit with a normal random intercept per group, integrated by
/// Gauss-Hermite quadrature. A collapsing scale (sigma_u -> 0) returns the
/// pooled fit with sigma_u = 0.
BinaryFit fit_random_intercept_probit(const DesignMatrix& m,
                                      const std::vector<std::string>& group, int quad_nodes = 12,
                                      const FitOptions& opt = {});

/// Integrated log-likelihood at fixed parameters (beta includes the
/// intercept first); sigma_u = 0 is handled exactly.
double re_probit_loglik(const DesignMatrix& m, const std::vector<std::string>& group,
                        const Eigen::VectorXd& beta_with_intercept, double sigma_u,
                        int quad_nodes);

/// Cluster sandwich H^-1 (sum_g s_g s_g') H^-1 with small-sample factor
/// G/(G-1); recomputed at the fit's parameters.
Eigen::MatrixXd cluster_sandwich_vcov(const OrderedFit& fit, const DesignMatrix& m);
Eigen::MatrixXd cluster_sandwich_vcov(const BinaryFit& fit, const DesignMatrix& m);

/// Per-row category probabilities at the fit's parameters (rows x categories).
Eigen::MatrixXd ordered_probs(const OrderedFit& fit, const Eigen::MatrixXd& X);

/// z-statistics to two-sided p-values under the normal reference.
double normal_pvalue(double z);
/// Significance stars at the 0.01 / 0.05 / 0.10 levels.
std::string p_stars(double p);

}  // namespace paxsat
