#include "paxsat/effects.hpp"

#include <cmath>

#include "paxsat/csv.hpp"

namespace paxsat {

Eigen::MatrixXd predict_probs(const OrderedFit& fit, const DesignMatrix& m,
                              const std::map<std::string, double>& overrides) {
  Eigen::MatrixXd X(m.n(), fit.beta.size());
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(fit.names.size()); ++j) {
    int src = m.col(fit.names[static_cast<std::size_t>(j)]);
    if (src < 0)
      throw std::invalid_argument("predict_probs: design lacks column '" +
                                  fit.names[static_cast<std::size_t>(j)] + "'");
    X.col(j) = m.X.col(src);
  }
  for (const auto& [name, value] : overrides) {
    bool found = false;
    for (std::size_t j = 0; j < fit.names.size(); ++j)
      if (fit.names[j] == name) {
        X.col(static_cast<Eigen::Index>(j)).setConstant(value);
        found = true;
      }
    if (!found) throw std::invalid_argument("predict_probs: override of unknown column '" + name + "'");
  }
  return ordered_probs(fit, X);
}

Eigen::VectorXd expected_rating(const OrderedFit& fit, const Eigen::MatrixXd& probs) {
  Eigen::VectorXd values(fit.n_categories);
  for (int c = 0; c < fit.n_categories; ++c)
    values[c] = fit.category_values[static_cast<std::size_t>(c)];
  return probs * values;
}

ShiftReport simulate_delay_shift(const OrderedFit& fit, const DesignMatrix& m,
                                 const std::string& delay_column) {
  bool has_delay = false;
  for (const auto& n : fit.names) has_delay |= n == delay_column;
  if (!has_delay)
    throw std::invalid_argument("simulate_delay_shift: fit has no coefficient on '" +
                                delay_column + "'");

  ShiftReport r;
  r.probs_delay = predict_probs(fit, m, {{delay_column, 1.0}});
  r.probs_nodelay = predict_probs(fit, m, {{delay_column, 0.0}});
  r.expected_delay = expected_rating(fit, r.probs_delay);
  r.expected_nodelay = expected_rating(fit, r.probs_nodelay);

  const Eigen::Index n = m.n();
  const int I = fit.n_categories;
  std::int64_t drop_expected = 0, drop_coupled = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (r.expected_nodelay[i] - r.expected_delay[i] >= 1.0) ++drop_expected;
    // P(Y1 <= Y0 - 1) under independent draws from the two distributions,
    // categories compared on their original values.
    double p_drop = 0;
    for (int c0 = 0; c0 < I; ++c0) {
      double cdf1 = 0;
      for (int c1 = 0; c1 < I; ++c1)
        if (fit.category_values[static_cast<std::size_t>(c1)] <=
            fit.category_values[static_cast<std::size_t>(c0)] - 1.0)
          cdf1 += r.probs_delay(i, c1);
      p_drop += r.probs_nodelay(i, c0) * cdf1;
    }
    if (p_drop > 0.5) ++drop_coupled;
  }
  r.share_drop_ge1_expected = static_cast<double>(drop_expected) / static_cast<double>(n);
  r.share_drop_ge1_coupled = static_cast<double>(drop_coupled) / static_cast<double>(n);
  double mean_no = r.expected_nodelay.mean();
  double mean_del = r.expected_delay.mean();
  r.mean_pct_change = 100.0 * (mean_del - mean_no) / mean_no;
  return r;
}

std::vector<double> default_duration_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 60; ++i) g.push_back(i * 0.05);
  return g;
}

CurvePoints duration_curve(QuadCoef leisure, QuadCoef business, const std::vector<double>& grid) {
  for (double t : grid)
    if (t < 0) throw std::invalid_argument("duration_curve: grid must be non-negative");
  CurvePoints c;
  c.t = grid;
  for (double t : grid) {
    c.leisure.push_back(leisure.b1 * t + leisure.b2 * t * t);
    c.business.push_back(business.b1 * t + business.b2 * t * t);
  }
  if (leisure.b2 != 0) c.vertex_leisure = -leisure.b1 / (2.0 * leisure.b2);
  if (business.b2 != 0) c.vertex_business = -business.b1 / (2.0 * business.b2);
  return c;
}

BiasReport compare_bias(const std::vector<JoinedRecord>& records,
                        const FeatureSpec& spec_without_controls,
                        const FeatureSpec& spec_with_controls, std::optional<double> rho_true,
                        const PdsOptions& pds, const FitOptions& fit_opt) {
  AssembleOptions del_only;
  del_only.delay = DelayEncoding::Del;
  DesignMatrix naive = assemble_design(records, spec_without_controls, del_only);
  DesignMatrix ctrl = assemble_design(records, spec_with_controls, del_only);

  PostSelectionFit f_naive = pds_ordered_fit(naive, pds, fit_opt);
  PostSelectionFit f_ctrl = pds_ordered_fit(ctrl, pds, fit_opt);

  auto rho_of = [](const PostSelectionFit& f) {
    for (std::size_t j = 0; j < f.fit.names.size(); ++j)
      if (f.fit.names[j] == "DEL") return f.fit.beta[static_cast<Eigen::Index>(j)];
    throw ModelError("compare_bias: DEL not present in the refit");
  };

  BiasReport r;
  r.rho_naive = rho_of(f_naive);
  r.rho_controlled = rho_of(f_ctrl);
  r.naive_converged = f_naive.fit.converged;
  r.controlled_converged = f_ctrl.fit.converged;
  r.percent_drop =
      (std::abs(r.rho_naive) - std::abs(r.rho_controlled)) / std::abs(r.rho_naive);
  r.selected_controls = f_ctrl.selected_controls;
  if (rho_true) {
    r.rho_true = rho_true;
    r.naive_gap = std::abs(r.rho_naive - *rho_true);
    r.controlled_gap = std::abs(r.rho_controlled - *rho_true);
  }
  return r;
}

void write_shift_csv(const ShiftReport& r, const std::string& path) {
  CsvWriter w(path);
  std::vector<std::string> head = {"row_id", "expected_nodelay", "expected_delay"};
  const int I = static_cast<int>(r.probs_delay.cols());
  for (int c = 0; c < I; ++c) head.push_back("p_delay_cat" + std::to_string(c + 1));
  for (int c = 0; c < I; ++c) head.push_back("p_nodelay_cat" + std::to_string(c + 1));
  w.write_row(head);
  for (Eigen::Index i = 0; i < r.probs_delay.rows(); ++i) {
    std::vector<std::string> row = {std::to_string(i), format_double(r.expected_nodelay[i]),
                                    format_double(r.expected_delay[i])};
    for (int c = 0; c < I; ++c) row.push_back(format_double(r.probs_delay(i, c)));
    for (int c = 0; c < I; ++c) row.push_back(format_double(r.probs_nodelay(i, c)));
    w.write_row(row);
  }
}

void write_curve_csv(const CurvePoints& c, const std::string& path) {
  CsvWriter w(path);
  w.write_row({"t_hours", "leisure", "business"});
  for (std::size_t i = 0; i < c.t.size(); ++i)
    w.write_row({format_double(c.t[i]), format_double(c.leisure[i]),
                 format_double(c.business[i])});
}

}  // namespace paxsat
