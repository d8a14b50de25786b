#pragma once

#include <Eigen/Dense>
#include <functional>

namespace paxsat::detail {

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0;               // objective (maximized)
  Eigen::VectorXd grad;
  bool converged = false;
  int iterations = 0;
};

/// BFGS ascent with backtracking line search. `f` returns the objective and
/// fills the gradient. Deterministic; converges on gradient inf-norm.
inline OptimResult maximize_bfgs(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, double grad_tol, int max_iter) {
  const Eigen::Index d = x0.size();
  OptimResult res;
  res.x = x0;
  Eigen::VectorXd g(d);
  double fx = f(res.x, g);

  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(d, d);
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it;
    if (g.lpNorm<Eigen::Infinity>() < grad_tol) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd dir = Hinv * g;
    double slope = g.dot(dir);
    if (!(slope > 0)) {  // not an ascent direction; reset curvature
      Hinv.setIdentity();
      dir = g;
      slope = g.squaredNorm();
      if (!(slope > 0)) break;
    }

    double step = 1.0;
    Eigen::VectorXd x_new(d), g_new(d);
    double f_new = -std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = res.x + step * dir;
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new >= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no improving step along the gradient

    Eigen::VectorXd s = x_new - res.x;
    Eigen::VectorXd yv = g_new - g;  // gradient change (note: ascent)
    double sy = -s.dot(yv);          // positive when curvature behaves
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      Eigen::VectorXd Hy = Hinv * (-yv);
      double yHy = (-yv).dot(Hy);
      Hinv += ((sy + yHy) / (sy * sy)) * (s * s.transpose()) -
              (Hy * s.transpose() + s * Hy.transpose()) / sy;
    }
    res.x = x_new;
    fx = f_new;
    g = g_new;
  }
  res.value = fx;
  res.grad = g;
  if (g.lpNorm<Eigen::Infinity>() < grad_tol) res.converged = true;
  return res;
}

/// Observed information (negative Hessian of the maximized objective) by
/// central differences of the analytic gradient.
inline Eigen::MatrixXd observed_information(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x) {
  const Eigen::Index d = x.size();
  Eigen::MatrixXd H(d, d);
  Eigen::VectorXd gp(d), gm(d), xp = x, xm = x;
  for (Eigen::Index j = 0; j < d; ++j) {
    double h = 1e-5 * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    f(xp, gp);
    f(xm, gm);
    H.col(j) = -(gp - gm) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return 0.5 * (H + H.transpose());
}

}  // namespace paxsat::detail
