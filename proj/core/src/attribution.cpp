#include "paxsat/attribution.hpp"

#include <algorithm>
#include <cmath>

#include "paxsat/stats.hpp"

namespace paxsat {

namespace {

bool is_external_name(const std::string& name) {
  return name == "WEATHER(ORG)" || name == "WEATHER(DST)";
}

}  // namespace

DelayStageFit make_delay_stage(const std::vector<std::string>& names,
                               const Eigen::VectorXd& beta_with_intercept) {
  if (static_cast<Eigen::Index>(names.size()) + 1 != beta_with_intercept.size())
    throw std::invalid_argument("make_delay_stage: beta must be intercept + one per covariate");
  DelayStageFit d;
  d.fit.names.push_back("(intercept)");
  for (const auto& n : names) d.fit.names.push_back(n);
  d.fit.beta = beta_with_intercept;
  d.fit.converged = true;
  d.names = names;
  for (const auto& n : names) d.is_external.push_back(is_external_name(n) ? 1 : 0);
  return d;
}

DelayStageFit fit_delay_stage(const DesignMatrix& m, const std::vector<std::string>& group,
                              const AttributionOptions& opt) {
  // Contract: the delay-determinants roster must be accounted for, either as
  // a live column or as a recorded constant-column drop.
  std::vector<std::string> dropped_notes;
  for (const auto& name : delay_roster_names()) {
    if (m.col(name) >= 0) continue;
    bool noted = false;
    for (const auto& note : m.notes)
      if (note.find("dropped constant column " + name) != std::string::npos) noted = true;
    if (!noted) throw DataError("delay stage: missing roster column '" + name + "'");
    dropped_notes.push_back("roster column " + name + " constant in sample; fit proceeds without it");
  }

  DelayStageFit d;
  if (opt.random_intercept)
    d.fit = fit_random_intercept_probit(m, group, opt.quad_nodes, opt.fit);
  else
    d.fit = fit_binary_probit(m, opt.fit);
  d.names = m.names;
  for (const auto& n : m.names) d.is_external.push_back(is_external_name(n) ? 1 : 0);
  d.notes = dropped_notes;
  for (const auto& n : d.fit.notes) d.notes.push_back(n);
  return d;
}

Decomposition decompose_predictions(const DelayStageFit& d, const Eigen::MatrixXd& X,
                                    bool marginalize) {
  const Eigen::Index n = X.rows();
  if (X.cols() != static_cast<Eigen::Index>(d.names.size()))
    throw std::invalid_argument("decompose_predictions: column mismatch with the stage fit");

  const double alpha = d.fit.beta[0];
  Eigen::VectorXd beta = d.fit.beta.tail(d.fit.beta.size() - 1);

  Decomposition out;
  out.alpha = alpha;
  out.eta_int.setZero(n);
  out.eta_ext.setZero(n);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (d.is_external[static_cast<std::size_t>(j)])
      out.eta_ext += beta[j] * X.col(j);
    else
      out.eta_int += beta[j] * X.col(j);
  }

  // Random-intercept fits predict at the zero group effect unless asked to
  // marginalize over it.
  double sigma = marginalize && d.fit.sigma_u ? *d.fit.sigma_u : 0.0;
  auto prob = [&](double eta) {
    if (sigma == 0.0) return norm_cdf(eta);
    // E[Phi(eta + sigma v)] with v ~ N(0,1) has the closed form
    // Phi(eta / sqrt(1 + sigma^2)).
    return norm_cdf(eta / std::sqrt(1.0 + sigma * sigma));
  };

  out.del_int.resize(n);
  out.del_ext.resize(n);
  out.floored_rows = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double p_int = prob(alpha + out.eta_int[i]);
    double p_full = prob(alpha + out.eta_int[i] + out.eta_ext[i]);
    double ext = p_full - p_int;
    if (ext < 0) {
      ext = 0;
      ++out.floored_rows;
    }
    out.del_int[i] = p_int;
    out.del_ext[i] = ext;
  }
  return out;
}

DesignMatrix plug_into_satisfaction(const Eigen::VectorXd& del_int, const Eigen::VectorXd& del_ext,
                                    const DesignMatrix& base) {
  if (del_int.size() != base.n() || del_ext.size() != base.n())
    throw std::invalid_argument("plug_into_satisfaction: row mismatch");
  int del_col = base.col("DEL");
  if (del_col < 0) throw std::invalid_argument("plug_into_satisfaction: base design has no DEL");

  DesignMatrix out;
  out.y = base.y;
  out.cluster_id = base.cluster_id;
  out.synthetic = base.synthetic;
  out.notes = base.notes;
  out.outcome_categories = base.outcome_categories;

  std::vector<Eigen::VectorXd> cols;
  auto push = [&](const std::string& name, const Eigen::VectorXd& v, bool pen) {
    if (v.minCoeff() == v.maxCoeff()) {
      out.notes.push_back("dropped constant column " + name);
      return;
    }
    cols.push_back(v);
    out.names.push_back(name);
    out.penalized.push_back(pen ? 1 : 0);
  };
  for (Eigen::Index j = 0; j < base.p(); ++j) {
    if (j == del_col) {
      // The probability decomposition replaces the delay dummy; both parts
      // sit under the penalty.
      push("DEL(INT)", del_int, true);
      push("DEL(EXT)", del_ext, true);
      continue;
    }
    push(base.names[static_cast<std::size_t>(j)], base.X.col(j),
         base.penalized[static_cast<std::size_t>(j)] != 0);
  }
  out.X.resize(base.n(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    out.X.col(static_cast<Eigen::Index>(j)) = cols[j];
  return out;
}

void write_decomposition_csv(const Decomposition& d, const std::string& path) {
  CsvWriter w(path);
  w.write_row({"row_id", "del_int", "del_ext", "eta_int", "eta_ext"});
  for (Eigen::Index i = 0; i < d.del_int.size(); ++i)
    w.write_row({std::to_string(i), format_double(d.del_int[i]), format_double(d.del_ext[i]),
                 format_double(d.eta_int[i]), format_double(d.eta_ext[i])});
}

}  // namespace paxsat
