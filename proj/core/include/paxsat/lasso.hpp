#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "paxsat/features.hpp"

namespace paxsat {

struct PenalizedProblem {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::uint8_t> penalized;  // per column
  Eigen::VectorXd loadings;             // per column; 0 on unpenalized columns
  double lambda = 0;
  std::vector<std::string> cluster_id;  // informational; loadings carry the clustering
  double tolerance = 1e-10;
  int max_iter = 100000;
};

struct LassoFit {
  Eigen::VectorXd beta;
  double intercept = 0;
  std::vector<int> active_set;  // penalized columns with beta != 0
  double lambda_used = 0;
  int iterations = 0;
  double kkt_violation = 0;
  bool converged = true;
  std::vector<std::string> warnings;
};

/// Cluster-robust penalty loadings:
///   loading_j = sqrt( (1/n) * sum_g ( sum_{i in g} x_ij eps_i )^2 ).
/// An all-zero column gets loading 0 and a warning entry in `warnings`.
Eigen::VectorXd cluster_penalty_loadings(const Eigen::MatrixXd& X,
                                         const Eigen::VectorXd& residuals,
                                         const std::vector<std::string>& cluster_id,
                                         std::vector<std::string>* warnings = nullptr);

/// lambda = 2 c sqrt(n) PhiInv(1 - gamma/(2p)); gamma < 0 means 0.1/ln(n).
double plugin_lambda(std::int64_t n, std::int64_t p_penalized, double c = 1.1,
                     double gamma = -1.0);

/// Minimizes (1/2n)||y - b0 - X beta||^2 + (lambda/n) sum_j loading_j |beta_j|
/// by cyclic coordinate descent; the intercept and unpenalized columns take
/// exact least-squares steps. Columns are standardized internally and results
/// mapped back; loadings are interpreted on the original scale.
LassoFit solve_lasso(const PenalizedProblem& problem);

/// Objective value at a given coefficient vector (testing hook).
double lasso_objective(const PenalizedProblem& problem, double intercept,
                       const Eigen::VectorXd& beta);

/// Max KKT violation of a solution, in the units of the stationarity
/// condition x_j'(y - b0 - X beta)/n.
double lasso_kkt_violation(const PenalizedProblem& problem, double intercept,
                           const Eigen::VectorXd& beta);

struct PdsOptions {
  double c = 1.1;
  double gamma = -1.0;  // default 0.1/ln(n)
  double tolerance = 1e-10;
  int max_iter = 100000;
};

struct PdsRegressionAudit {
  std::string target;            // "y" or a focal column name
  std::vector<int> active;       // indices into the control block
  double lambda = 0;
  Eigen::VectorXd loadings;      // final (refined) loadings
};

struct PdsResult {
  std::vector<int> selected;     // union, indices into the control block
  std::vector<PdsRegressionAudit> regressions;
};

/// Post-double selection over a penalized control block: LASSO of the outcome
/// on the controls, then LASSO of every focal column on the controls; the
/// union of active sets is the retained control set. Loadings are refined once
/// from a preliminary pass, per regression.
PdsResult pds_select(const Eigen::VectorXd& y, const Eigen::MatrixXd& focal,
                     const std::vector<std::string>& focal_names,
                     const Eigen::MatrixXd& controls,
                     const std::vector<std::string>& control_names,
                     const std::vector<std::string>& cluster_id, const PdsOptions& opt = {});

/// Plain-text selection audit (lambda, loadings, per-regression active sets,
/// union).
std::string format_pds_audit(const PdsResult& r, const std::vector<std::string>& control_names);

}  // namespace paxsat
