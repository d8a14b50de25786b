#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "paxsat/probit.hpp"

namespace paxsat {

/// Delay-determinants fit with each covariate tagged internal or external;
/// external covers the weather alerts, everything else is industry-side.
struct DelayStageFit {
  BinaryFit fit;                         // intercept first
  std::vector<std::string> names;        // covariates, no intercept
  std::vector<std::uint8_t> is_external; // per covariate
  std::vector<std::string> notes;
};

struct AttributionOptions {
  bool random_intercept = true;  // Step I estimator; pooled probit behind the flag
  int quad_nodes = 12;
  FitOptions fit;
};

/// Step I: estimate the delay model on the delay-determinants design, groups
/// clustering the random intercept (terminal x date by default upstream).
DelayStageFit fit_delay_stage(const DesignMatrix& m, const std::vector<std::string>& group,
                              const AttributionOptions& opt = {});

/// Stage fit from externally supplied coefficients (intercept first), for
/// plugging published estimates straight into the decomposition.
DelayStageFit make_delay_stage(const std::vector<std::string>& names,
                               const Eigen::VectorXd& beta_with_intercept);

struct Decomposition {
  Eigen::VectorXd del_int;  // P(delay | internal factors, reference weather)
  Eigen::VectorXd del_ext;  // weather increment, floored at 0
  Eigen::VectorXd eta_int;
  Eigen::VectorXd eta_ext;
  double alpha = 0;
  int floored_rows = 0;  // rows whose weather increment came out negative
};

/// Step II: split the predicted delay probability into the internal-origin
/// prediction (weather at its no-adverse reference) and the weather
/// increment. Random-intercept fits evaluate at the zero group effect unless
/// marginalize is set.
Decomposition decompose_predictions(const DelayStageFit& fit, const Eigen::MatrixXd& X,
                                    bool marginalize = false);

/// Replaces the DEL column with penalized DEL(INT)/DEL(EXT) columns.
DesignMatrix plug_into_satisfaction(const Eigen::VectorXd& del_int, const Eigen::VectorXd& del_ext,
                                    const DesignMatrix& base);

void write_decomposition_csv(const Decomposition& d, const std::string& path);

}  // namespace paxsat
