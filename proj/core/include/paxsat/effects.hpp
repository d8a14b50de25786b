#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "paxsat/postselect.hpp"

namespace paxsat {

/// Per-row category distributions with and without a delay, plus the
/// aggregate drop statistics.
struct ShiftReport {
  Eigen::MatrixXd probs_delay;      // n x I
  Eigen::MatrixXd probs_nodelay;    // n x I
  Eigen::VectorXd expected_delay;   // expected rating per row
  Eigen::VectorXd expected_nodelay;
  /// Share of rows whose expected rating falls by >= 1 point (headline).
  double share_drop_ge1_expected = 0;
  /// Share of rows where an independent-draws coupling puts more than half
  /// its mass on a >= 1-point-lower category.
  double share_drop_ge1_coupled = 0;
  /// Percent change of the mean predicted rating, delay vs no delay.
  double mean_pct_change = 0;
};

struct QuadCoef {
  double b1 = 0;  // linear term
  double b2 = 0;  // quadratic term
};

struct CurvePoints {
  std::vector<double> t;  // hours
  std::vector<double> leisure;
  std::vector<double> business;
  std::optional<double> vertex_leisure;   // -b1/(2 b2)
  std::optional<double> vertex_business;
};

struct BiasReport {
  double rho_naive = 0;
  double rho_controlled = 0;
  double percent_drop = 0;  // (|naive| - |controlled|) / |naive|, as a fraction
  bool naive_converged = false;
  bool controlled_converged = false;
  std::optional<double> rho_true;
  std::optional<double> naive_gap;       // |rho_naive - rho_true|
  std::optional<double> controlled_gap;
  std::vector<std::string> selected_controls;
};

/// Category probabilities at the fit's parameters with per-column value
/// overrides applied first. Unknown override names are an error.
Eigen::MatrixXd predict_probs(const OrderedFit& fit, const DesignMatrix& m,
                              const std::map<std::string, double>& overrides = {});

Eigen::VectorXd expected_rating(const OrderedFit& fit, const Eigen::MatrixXd& probs);

ShiftReport simulate_delay_shift(const OrderedFit& fit, const DesignMatrix& m,
                                 const std::string& delay_column);

/// f(t) = b1 t + b2 t^2 per segment; vertex absent when b2 == 0.
CurvePoints duration_curve(QuadCoef leisure, QuadCoef business, const std::vector<double>& grid);
std::vector<double> default_duration_grid();  // 0..3 h in 0.05 steps

/// Fits the delay coefficient with and without the penalized control blocks
/// (selection + ordered-probit refit on both sides) over the same rows.
BiasReport compare_bias(const std::vector<JoinedRecord>& records,
                        const FeatureSpec& spec_without_controls,
                        const FeatureSpec& spec_with_controls,
                        std::optional<double> rho_true = {}, const PdsOptions& pds = {},
                        const FitOptions& fit = {});

void write_shift_csv(const ShiftReport& r, const std::string& path);
void write_curve_csv(const CurvePoints& c, const std::string& path);

}  // namespace paxsat
