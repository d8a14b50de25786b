#include "paxsat/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "paxsat/stats.hpp"

namespace paxsat {

Eigen::VectorXd cluster_penalty_loadings(const Eigen::MatrixXd& X,
                                         const Eigen::VectorXd& residuals,
                                         const std::vector<std::string>& cluster_id,
                                         std::vector<std::string>* warnings) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (residuals.size() != n || static_cast<Eigen::Index>(cluster_id.size()) != n)
    throw std::invalid_argument("cluster_penalty_loadings: size mismatch");

  std::map<std::string, std::vector<Eigen::Index>> groups;
  for (Eigen::Index i = 0; i < n; ++i) groups[cluster_id[static_cast<std::size_t>(i)]].push_back(i);
  if (groups.size() < 2 && n > 1)
    throw std::invalid_argument("cluster_penalty_loadings: need >= 2 clusters");

  Eigen::VectorXd loadings(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double acc = 0;
    for (const auto& [key, rows] : groups) {
      (void)key;
      double s = 0;
      for (Eigen::Index i : rows) s += X(i, j) * residuals[i];
      acc += s * s;
    }
    loadings[j] = std::sqrt(acc / static_cast<double>(n));
    if (loadings[j] == 0.0 && warnings)
      warnings->push_back("column " + std::to_string(j) + " has zero penalty loading");
  }
  return loadings;
}

double plugin_lambda(std::int64_t n, std::int64_t p_penalized, double c, double gamma) {
  if (n < 1 || p_penalized < 1) throw std::invalid_argument("plugin_lambda: n, p >= 1 required");
  if (gamma < 0) gamma = 0.1 / std::log(static_cast<double>(n));
  double tail = gamma / (2.0 * static_cast<double>(p_penalized));
  if (tail >= 1.0) throw std::invalid_argument("plugin_lambda: gamma/(2p) >= 1");
  return 2.0 * c * std::sqrt(static_cast<double>(n)) * norm_quantile(1.0 - tail);
}

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

struct Standardized {
  Eigen::MatrixXd Xs;       // centered, unit population sd (zero-sd cols left zero)
  Eigen::VectorXd mu;       // column means
  Eigen::VectorXd sd;       // population sd; 0 marks a constant column
  Eigen::VectorXd ys;       // centered y
  double ymean = 0;
};

Standardized standardize(const Eigen::VectorXd& y, const Eigen::MatrixXd& X) {
  Standardized s;
  const Eigen::Index n = X.rows(), p = X.cols();
  s.mu.resize(p);
  s.sd.resize(p);
  s.Xs.resize(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double m = X.col(j).mean();
    double var = (X.col(j).array() - m).square().sum() / static_cast<double>(n);
    s.mu[j] = m;
    s.sd[j] = std::sqrt(var);
    if (s.sd[j] > 0)
      s.Xs.col(j) = (X.col(j).array() - m) / s.sd[j];
    else
      s.Xs.col(j).setZero();
  }
  s.ymean = y.mean();
  s.ys = y.array() - s.ymean;
  return s;
}

}  // namespace

double lasso_objective(const PenalizedProblem& pb, double intercept,
                       const Eigen::VectorXd& beta) {
  const double n = static_cast<double>(pb.X.rows());
  Eigen::VectorXd r = pb.y - Eigen::VectorXd::Constant(pb.X.rows(), intercept) - pb.X * beta;
  double obj = 0.5 * r.squaredNorm() / n;
  for (Eigen::Index j = 0; j < pb.X.cols(); ++j)
    if (pb.penalized[static_cast<std::size_t>(j)])
      obj += pb.lambda / n * pb.loadings[j] * std::abs(beta[j]);
  return obj;
}

double lasso_kkt_violation(const PenalizedProblem& pb, double intercept,
                           const Eigen::VectorXd& beta) {
  const double n = static_cast<double>(pb.X.rows());
  Eigen::VectorXd r = pb.y - Eigen::VectorXd::Constant(pb.X.rows(), intercept) - pb.X * beta;
  double worst = std::abs(r.sum() / n);  // intercept stationarity
  for (Eigen::Index j = 0; j < pb.X.cols(); ++j) {
    double g = pb.X.col(j).dot(r) / n;
    double v;
    if (!pb.penalized[static_cast<std::size_t>(j)]) {
      v = std::abs(g);
    } else {
      double t = pb.lambda / n * pb.loadings[j];
      if (beta[j] != 0.0)
        v = std::abs(g - t * (beta[j] > 0 ? 1.0 : -1.0));
      else
        v = std::max(0.0, std::abs(g) - t);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

LassoFit solve_lasso(const PenalizedProblem& pb) {
  const Eigen::Index n = pb.X.rows(), p = pb.X.cols();
  if (pb.y.size() != n || static_cast<Eigen::Index>(pb.penalized.size()) != p ||
      pb.loadings.size() != p)
    throw std::invalid_argument("solve_lasso: inconsistent problem sizes");
  for (Eigen::Index j = 0; j < p; ++j)
    if (pb.penalized[static_cast<std::size_t>(j)] && pb.loadings[j] < 0)
      throw std::invalid_argument("solve_lasso: negative loading");

  LassoFit fit;
  Standardized s = standardize(pb.y, pb.X);

  // Loadings on the scaled columns: penalty lambda*l_j*|beta_j| becomes
  // lambda*(l_j/sd_j)*|beta_scaled_j|.
  Eigen::VectorXd thr(p);  // per-coordinate soft threshold in scaled space
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!pb.penalized[static_cast<std::size_t>(j)] || s.sd[j] == 0)
      thr[j] = 0;
    else
      thr[j] = pb.lambda / static_cast<double>(n) * pb.loadings[j] / s.sd[j];
  }

  Eigen::VectorXd beta_s = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd r = s.ys;  // residual in scaled space
  const double dn = static_cast<double>(n);

  auto unscale = [&] {
    fit.beta.resize(p);
    for (Eigen::Index j = 0; j < p; ++j)
      fit.beta[j] = s.sd[j] > 0 ? beta_s[j] / s.sd[j] : 0.0;
    fit.intercept = s.ymean - s.mu.dot(fit.beta);
  };

  int sweep = 0;
  bool first_sweep = true;
  for (int round = 0; round < 4 && sweep < pb.max_iter; ++round) {
    for (; sweep < pb.max_iter; ++sweep) {
      double max_delta = 0;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (s.sd[j] == 0) {
          if (pb.penalized[static_cast<std::size_t>(j)] && first_sweep)
            fit.warnings.push_back("constant column " + std::to_string(j) + " left at zero");
          continue;
        }
        double old = beta_s[j];
        double z = old + s.Xs.col(j).dot(r) / dn;  // Xs'Xs/n == 1 by construction
        double next = pb.penalized[static_cast<std::size_t>(j)] ? soft_threshold(z, thr[j]) : z;
        if (next != old) {
          r -= s.Xs.col(j) * (next - old);
          beta_s[j] = next;
          max_delta = std::max(max_delta, std::abs(next - old));
        }
      }
      first_sweep = false;
      if (max_delta < pb.tolerance) {
        ++sweep;
        break;
      }
    }
    // Coefficient-change convergence usually implies stationarity; verify and
    // keep sweeping in the rare ill-conditioned case.
    unscale();
    fit.kkt_violation = lasso_kkt_violation(pb, fit.intercept, fit.beta);
    if (fit.kkt_violation <= 1e-9) break;
  }
  fit.iterations = sweep;
  fit.converged = sweep < pb.max_iter;
  if (!fit.converged)
    fit.warnings.push_back("coordinate descent hit max_iter without converging");

  unscale();
  fit.lambda_used = pb.lambda;
  for (Eigen::Index j = 0; j < p; ++j)
    if (pb.penalized[static_cast<std::size_t>(j)] && fit.beta[j] != 0.0)
      fit.active_set.push_back(static_cast<int>(j));
  fit.kkt_violation = lasso_kkt_violation(pb, fit.intercept, fit.beta);
  return fit;
}

// ---------------------------------------------------------------------------
// Post-double selection

namespace {

/// One selection regression of `target` on the control block, with a single
/// loading-refinement pass.
PdsRegressionAudit select_controls(const Eigen::VectorXd& target, const std::string& name,
                                   const Eigen::MatrixXd& controls,
                                   const std::vector<std::string>& cluster_id,
                                   const PdsOptions& opt) {
  const Eigen::Index n = controls.rows(), p = controls.cols();
  PdsRegressionAudit audit;
  audit.target = name;
  if (p == 0) return audit;
  audit.lambda = plugin_lambda(n, p, opt.c, opt.gamma);

  PenalizedProblem pb;
  pb.y = target;
  pb.X = controls;
  pb.penalized.assign(static_cast<std::size_t>(p), 1);
  pb.cluster_id = cluster_id;
  pb.lambda = audit.lambda;
  pb.tolerance = opt.tolerance;
  pb.max_iter = opt.max_iter;

  // Initial residuals: target regressed on the unpenalized part alone, which
  // here is just the intercept.
  Eigen::VectorXd resid = target.array() - target.mean();
  pb.loadings = cluster_penalty_loadings(controls, resid, cluster_id);
  LassoFit prelim = solve_lasso(pb);

  Eigen::VectorXd r2 = target - Eigen::VectorXd::Constant(n, prelim.intercept) -
                       controls * prelim.beta;
  pb.loadings = cluster_penalty_loadings(controls, r2, cluster_id);
  audit.loadings = pb.loadings;
  LassoFit fin = solve_lasso(pb);
  audit.active = fin.active_set;
  return audit;
}

}  // namespace

PdsResult pds_select(const Eigen::VectorXd& y, const Eigen::MatrixXd& focal,
                     const std::vector<std::string>& focal_names,
                     const Eigen::MatrixXd& controls,
                     const std::vector<std::string>& control_names,
                     const std::vector<std::string>& cluster_id, const PdsOptions& opt) {
  if (focal.cols() != static_cast<Eigen::Index>(focal_names.size()) ||
      controls.cols() != static_cast<Eigen::Index>(control_names.size()))
    throw std::invalid_argument("pds_select: name/column mismatch");

  PdsResult result;
  result.regressions.push_back(select_controls(y, "y", controls, cluster_id, opt));
  for (Eigen::Index d = 0; d < focal.cols(); ++d)
    result.regressions.push_back(select_controls(
        focal.col(d), focal_names[static_cast<std::size_t>(d)], controls, cluster_id, opt));

  std::vector<std::uint8_t> in_union(control_names.size(), 0);
  for (const auto& reg : result.regressions)
    for (int j : reg.active) in_union[static_cast<std::size_t>(j)] = 1;
  for (std::size_t j = 0; j < in_union.size(); ++j)
    if (in_union[j]) result.selected.push_back(static_cast<int>(j));
  return result;
}

std::string format_pds_audit(const PdsResult& r, const std::vector<std::string>& control_names) {
  std::string out;
  out += "post-double-selection audit\n";
  for (const auto& reg : r.regressions) {
    out += "regression target=" + reg.target +
           " lambda=" + std::to_string(reg.lambda) + " active={";
    for (std::size_t k = 0; k < reg.active.size(); ++k) {
      if (k) out += ", ";
      out += control_names[static_cast<std::size_t>(reg.active[k])];
    }
    out += "}\n";
    if (reg.loadings.size() > 0) {
      out += "  loadings:";
      for (Eigen::Index j = 0; j < reg.loadings.size(); ++j)
        out += " " + control_names[static_cast<std::size_t>(j)] + "=" +
               std::to_string(reg.loadings[j]);
      out += "\n";
    }
  }
  out += "union={";
  for (std::size_t k = 0; k < r.selected.size(); ++k) {
    if (k) out += ", ";
    out += control_names[static_cast<std::size_t>(r.selected[k])];
  }
  out += "}\n";
  return out;
}

}  // namespace paxsat
