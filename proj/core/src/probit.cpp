#include "paxsat/probit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "optim.hpp"
#include "paxsat/stats.hpp"

namespace paxsat {

InfoCriteria info_criteria(double loglik, int k, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("info_criteria: n >= 1 required");
  return {2.0 * k - 2.0 * loglik, k * std::log(static_cast<double>(n)) - 2.0 * loglik};
}

double normal_pvalue(double z) { return 2.0 * norm_sf(std::abs(z)); }

std::string p_stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.10) return "*";
  return "";
}

namespace {

// theta = (beta, a) with kappa_1 = a_0 and kappa_m = kappa_1 + sum_{j<m} exp(a_j).
Eigen::VectorXd cutpoints_from_increments(const Eigen::VectorXd& a) {
  Eigen::VectorXd kappa(a.size());
  if (a.size() == 0) return kappa;
  kappa[0] = a[0];
  for (Eigen::Index j = 1; j < a.size(); ++j) kappa[j] = kappa[j - 1] + std::exp(a[j]);
  return kappa;
}

Eigen::VectorXd increments_from_cutpoints(const Eigen::VectorXd& kappa) {
  Eigen::VectorXd a(kappa.size());
  if (kappa.size() == 0) return a;
  a[0] = kappa[0];
  for (Eigen::Index j = 1; j < kappa.size(); ++j) a[j] = std::log(kappa[j] - kappa[j - 1]);
  return a;
}

struct OrderedData {
  Eigen::MatrixXd X;
  std::vector<int> y;  // 1..I
  int I = 0;
  double prob_floor = 1e-300;
};

/// Log-likelihood + gradient over theta = (beta, a).
double ordered_eval(const OrderedData& d, const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
  const Eigen::Index p = d.X.cols();
  const Eigen::Index n = d.X.rows();
  const int I = d.I;
  Eigen::VectorXd beta = theta.head(p);
  Eigen::VectorXd a = theta.tail(I - 1);
  Eigen::VectorXd kappa = cutpoints_from_increments(a);
  Eigen::VectorXd eta = d.X * beta;

  grad.setZero(theta.size());
  Eigen::VectorXd gkappa = Eigen::VectorXd::Zero(I - 1);
  double ll = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int yi = d.y[static_cast<std::size_t>(i)];
    const bool top = yi == I, bottom = yi == 1;
    double zhi = top ? 0.0 : kappa[yi - 1] - eta[i];
    double zlo = bottom ? 0.0 : kappa[yi - 2] - eta[i];
    double P;
    if (top)
      P = norm_sf(zlo);
    else if (bottom)
      P = norm_cdf(zhi);
    else
      P = norm_interval(zlo, zhi);
    if (P < d.prob_floor) P = d.prob_floor;
    ll += std::log(P);

    double phi_hi = top ? 0.0 : norm_pdf(zhi);
    double phi_lo = bottom ? 0.0 : norm_pdf(zlo);
    double dldeta = -(phi_hi - phi_lo) / P;
    grad.head(p) += dldeta * d.X.row(i).transpose();
    if (!top) gkappa[yi - 1] += phi_hi / P;
    if (!bottom) gkappa[yi - 2] -= phi_lo / P;
  }
  // Chain to (kappa_1, log-increments): d kappa_m / d a_0 = 1,
  // d kappa_m / d a_j = exp(a_j) for j <= m.
  double suffix = 0;
  for (Eigen::Index m = I - 2; m >= 1; --m) {
    suffix += gkappa[m];
    grad[p + m] = std::exp(a[m]) * suffix;
  }
  grad[p] = suffix + gkappa[0];
  return ll;
}

std::map<std::string, std::vector<Eigen::Index>> group_rows(
    const std::vector<std::string>& labels) {
  std::map<std::string, std::vector<Eigen::Index>> g;
  for (std::size_t i = 0; i < labels.size(); ++i)
    g[labels[i]].push_back(static_cast<Eigen::Index>(i));
  return g;
}

/// H^-1 * (sum_g s_g s_g') * H^-1 * G/(G-1); scores supplied per row.
Eigen::MatrixXd sandwich(const Eigen::MatrixXd& Hobs, const Eigen::MatrixXd& row_scores,
                         const std::vector<std::string>& cluster_id) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(Hobs);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hobs);
    throw ModelError("observed information is singular; eigenvalues from " +
                     std::to_string(es.eigenvalues().minCoeff()) + " to " +
                     std::to_string(es.eigenvalues().maxCoeff()));
  }
  auto groups = group_rows(cluster_id);
  const double G = static_cast<double>(groups.size());
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(Hobs.rows(), Hobs.cols());
  for (const auto& [key, rows] : groups) {
    (void)key;
    Eigen::VectorXd sg = Eigen::VectorXd::Zero(Hobs.rows());
    for (Eigen::Index i : rows) sg += row_scores.row(i).transpose();
    meat += sg * sg.transpose();
  }
  if (G > 1) meat *= G / (G - 1.0);
  Eigen::MatrixXd Hinv = ldlt.solve(Eigen::MatrixXd::Identity(Hobs.rows(), Hobs.cols()));
  return Hinv * meat * Hinv;
}

/// Per-row ordered-probit scores in theta space (n x dim).
Eigen::MatrixXd ordered_row_scores(const OrderedData& d, const Eigen::VectorXd& theta) {
  const Eigen::Index p = d.X.cols(), n = d.X.rows();
  const int I = d.I;
  Eigen::VectorXd beta = theta.head(p);
  Eigen::VectorXd a = theta.tail(I - 1);
  Eigen::VectorXd kappa = cutpoints_from_increments(a);
  Eigen::VectorXd eta = d.X * beta;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, theta.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const int yi = d.y[static_cast<std::size_t>(i)];
    const bool top = yi == I, bottom = yi == 1;
    double zhi = top ? 0.0 : kappa[yi - 1] - eta[i];
    double zlo = bottom ? 0.0 : kappa[yi - 2] - eta[i];
    double P = top ? norm_sf(zlo) : (bottom ? norm_cdf(zhi) : norm_interval(zlo, zhi));
    if (P < d.prob_floor) P = d.prob_floor;
    double phi_hi = top ? 0.0 : norm_pdf(zhi);
    double phi_lo = bottom ? 0.0 : norm_pdf(zlo);
    S.row(i).head(p) = -(phi_hi - phi_lo) / P * d.X.row(i);
    // cutpoint pair, then chain to (kappa_1, log-increments)
    auto add_kappa = [&](int m, double v) {  // m is 0-based cutpoint index
      S(i, p) += v;
      for (int j = 1; j <= m; ++j) S(i, p + j) += std::exp(a[j]) * v;
    };
    if (!top) add_kappa(yi - 1, phi_hi / P);
    if (!bottom) add_kappa(yi - 2, -phi_lo / P);
  }
  return S;
}

void check_design(const DesignMatrix& m) {
  const Eigen::Index n = m.X.rows(), p = m.X.cols();
  for (Eigen::Index j = 0; j < p; ++j) {
    double lo = m.X.col(j).minCoeff(), hi = m.X.col(j).maxCoeff();
    if (lo == hi)
      throw ModelError("constant column '" + m.names[static_cast<std::size_t>(j)] +
                       "'; the intercept is absorbed by the cutpoints");
  }
  // Rank check on the standardized Gram matrix; name columns past the rank.
  Eigen::MatrixXd Xs(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double mu = m.X.col(j).mean();
    double sd = std::sqrt((m.X.col(j).array() - mu).square().sum() / static_cast<double>(n));
    Xs.col(j) = (m.X.col(j).array() - mu) / sd;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    std::string msg = "rank-deficient design; collinear columns:";
    for (Eigen::Index k = qr.rank(); k < p; ++k)
      msg += " '" + m.names[static_cast<std::size_t>(qr.colsPermutation().indices()[k])] + "'";
    throw ModelError(msg);
  }
}

}  // namespace

OrderedLoglik ordered_loglik_grad(const Eigen::VectorXd& beta, const Eigen::VectorXd& cutpoints,
                                  const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  int n_categories, double prob_floor) {
  for (Eigen::Index j = 1; j < cutpoints.size(); ++j)
    if (!(cutpoints[j] > cutpoints[j - 1]))
      throw std::invalid_argument("ordered_loglik_grad: cutpoints must be strictly increasing");
  OrderedData d;
  d.X = X;
  d.I = n_categories;
  d.prob_floor = prob_floor;
  d.y.resize(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    int yi = static_cast<int>(std::lround(y[i]));
    if (yi < 1 || yi > n_categories)
      throw std::invalid_argument("ordered_loglik_grad: y outside 1..I");
    d.y[static_cast<std::size_t>(i)] = yi;
  }
  Eigen::VectorXd theta(X.cols() + cutpoints.size());
  theta.head(X.cols()) = beta;
  theta.tail(cutpoints.size()) = increments_from_cutpoints(cutpoints);
  Eigen::VectorXd grad;
  double ll = ordered_eval(d, theta, grad);
  OrderedLoglik out;
  out.loglik = ll;
  out.grad_beta = grad.head(X.cols());
  out.grad_increments = grad.tail(cutpoints.size());
  return out;
}

OrderedFit fit_ordered_probit(const DesignMatrix& m, const FitOptions& opt) {
  const Eigen::Index n = m.X.rows(), p = m.X.cols();
  if (n == 0) throw ModelError("fit_ordered_probit: empty sample");
  check_design(m);

  // Recode the outcome onto observed categories; empty categories merge into
  // the adjacent lower one.
  std::set<int> observed;
  std::vector<int> yi(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    yi[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(m.y[i]));
    observed.insert(yi[static_cast<std::size_t>(i)]);
  }
  std::map<int, int> recode;
  std::vector<double> category_values;
  int next = 1;
  for (int v : observed) {
    recode[v] = next++;
    category_values.push_back(v);
  }
  const int I = static_cast<int>(observed.size());
  if (I < 2) throw ModelError("fit_ordered_probit: outcome has a single category");

  OrderedFit fit;
  if (I < m.outcome_categories)
    fit.notes.push_back(std::to_string(m.outcome_categories - I) +
                        " unobserved categories merged into their lower neighbor");

  OrderedData d;
  d.X = m.X;
  d.I = I;
  d.prob_floor = opt.prob_floor;
  d.y.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    d.y[static_cast<std::size_t>(i)] = recode[yi[static_cast<std::size_t>(i)]];

  // Start: beta = 0, cutpoints at normal quantiles of cumulative shares.
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(I);
  for (int v : d.y) counts[v - 1] += 1;
  Eigen::VectorXd kappa0(I - 1);
  double cum = 0;
  for (int c = 0; c + 1 < I; ++c) {
    cum += counts[c];
    kappa0[c] = norm_quantile(cum / static_cast<double>(n));
  }
  Eigen::VectorXd theta0 = Eigen::VectorXd::Zero(p + I - 1);
  theta0.tail(I - 1) = increments_from_cutpoints(kappa0);

  auto obj = [&](const Eigen::VectorXd& th, Eigen::VectorXd& g) { return ordered_eval(d, th, g); };
  auto res = detail::maximize_bfgs(obj, theta0, opt.grad_tol, opt.max_iter);

  fit.names = m.names;
  fit.beta = res.x.head(p);
  fit.cutpoints = cutpoints_from_increments(res.x.tail(I - 1));
  fit.n_categories = I;
  fit.category_values = category_values;
  fit.loglik = res.value;
  fit.converged = res.converged;
  fit.n = n;
  fit.k = static_cast<int>(p) + I - 1;
  auto ic = info_criteria(fit.loglik, fit.k, fit.n);
  fit.aic = ic.aic;
  fit.bic = ic.bic;
  if (!res.converged) {
    fit.notes.push_back("optimizer stopped with gradient max-norm " +
                        std::to_string(res.grad.lpNorm<Eigen::Infinity>()));
  }

  Eigen::MatrixXd H = detail::observed_information(obj, res.x);
  Eigen::MatrixXd scores = ordered_row_scores(d, res.x);
  std::vector<std::string> clusters = m.cluster_id;
  if (!opt.clustered_vcov || clusters.empty()) {
    clusters.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
      clusters[static_cast<std::size_t>(i)] = std::to_string(i);  // heteroskedastic fallback
  }
  fit.vcov = sandwich(H, scores, clusters);
  fit.n_clusters = static_cast<int>(group_rows(clusters).size());
  fit.se.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) fit.se[j] = std::sqrt(std::max(0.0, fit.vcov(j, j)));
  return fit;
}

Eigen::MatrixXd ordered_probs(const OrderedFit& fit, const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  const int I = fit.n_categories;
  Eigen::VectorXd eta = X * fit.beta;
  Eigen::MatrixXd P(n, I);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 1; c <= I; ++c) {
      if (c == 1)
        P(i, 0) = norm_cdf(fit.cutpoints[0] - eta[i]);
      else if (c == I)
        P(i, I - 1) = norm_sf(fit.cutpoints[I - 2] - eta[i]);
      else
        P(i, c - 1) = norm_interval(fit.cutpoints[c - 2] - eta[i], fit.cutpoints[c - 1] - eta[i]);
    }
  }
  return P;
}

// ---------------------------------------------------------------------------
// Binary probit

namespace {

struct BinaryData {
  Eigen::MatrixXd X;  // includes intercept column
  Eigen::VectorXd q;  // 2y - 1
  double prob_floor;
};

double binary_eval(const BinaryData& d, const Eigen::VectorXd& beta, Eigen::VectorXd& grad,
                   Eigen::MatrixXd* hess) {
  const Eigen::Index n = d.X.rows(), p = d.X.cols();
  Eigen::VectorXd eta = d.X * beta;
  grad.setZero(p);
  if (hess) hess->setZero(p, p);
  double ll = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = d.q[i] * eta[i];
    double Phi = norm_cdf(s);
    if (Phi < d.prob_floor) Phi = d.prob_floor;
    ll += std::log(Phi);
    double mills = norm_pdf(s) / Phi;
    grad += d.q[i] * mills * d.X.row(i).transpose();
    if (hess) {
      double w = mills * (mills + s);  // positive for all s
      *hess -= w * d.X.row(i).transpose() * d.X.row(i);
    }
  }
  return ll;
}

Eigen::MatrixXd binary_row_scores(const BinaryData& d, const Eigen::VectorXd& beta) {
  const Eigen::Index n = d.X.rows(), p = d.X.cols();
  Eigen::VectorXd eta = d.X * beta;
  Eigen::MatrixXd S(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = d.q[i] * eta[i];
    double Phi = std::max(norm_cdf(s), d.prob_floor);
    S.row(i) = d.q[i] * (norm_pdf(s) / Phi) * d.X.row(i);
  }
  return S;
}

BinaryData binary_data(const DesignMatrix& m, double prob_floor) {
  const Eigen::Index n = m.X.rows();
  BinaryData d;
  d.prob_floor = prob_floor;
  d.X.resize(n, m.X.cols() + 1);
  d.X.col(0).setOnes();
  d.X.rightCols(m.X.cols()) = m.X;
  d.q.resize(n);
  bool any0 = false, any1 = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    int yi = static_cast<int>(std::lround(m.y[i]));
    if (yi != 0 && yi != 1) throw ModelError("fit_binary_probit: outcome must be 0/1");
    d.q[i] = yi ? 1.0 : -1.0;
    (yi ? any1 : any0) = true;
  }
  if (!any0 || !any1) throw ModelError("fit_binary_probit: both outcome classes required");
  return d;
}

void finish_binary(BinaryFit& fit, const DesignMatrix& m, const BinaryData& d,
                   const Eigen::MatrixXd& H, const Eigen::MatrixXd& scores,
                   const FitOptions& opt, int extra_params) {
  const Eigen::Index n = d.X.rows();
  std::vector<std::string> clusters = m.cluster_id;
  if (!opt.clustered_vcov || clusters.empty()) {
    clusters.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) clusters[static_cast<std::size_t>(i)] = std::to_string(i);
  }
  fit.vcov = sandwich(H, scores, clusters);
  fit.n_clusters = static_cast<int>(group_rows(clusters).size());
  fit.se.resize(fit.beta.size());
  for (Eigen::Index j = 0; j < fit.beta.size(); ++j)
    fit.se[j] = j < fit.vcov.rows() ? std::sqrt(std::max(0.0, fit.vcov(j, j))) : 0.0;
  fit.n = n;
  fit.k = static_cast<int>(fit.beta.size()) + extra_params;
  auto ic = info_criteria(fit.loglik, fit.k, fit.n);
  fit.aic = ic.aic;
  fit.bic = ic.bic;
}

}  // namespace

BinaryFit fit_binary_probit(const DesignMatrix& m, const FitOptions& opt) {
  BinaryData d = binary_data(m, opt.prob_floor);
  const Eigen::Index p = d.X.cols();

  BinaryFit fit;
  fit.names.push_back("(intercept)");
  for (const auto& nme : m.names) fit.names.push_back(nme);

  // Newton-Raphson with step halving; start at the intercept-only MLE.
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double ybar = (d.q.array() > 0).cast<double>().mean();
  beta[0] = norm_quantile(std::min(1.0 - 1e-12, std::max(1e-12, ybar)));
  Eigen::VectorXd grad(p);
  Eigen::MatrixXd hess(p, p);
  double ll = binary_eval(d, beta, grad, &hess);
  bool converged = false;
  for (int it = 0; it < opt.max_iter; ++it) {
    if (grad.lpNorm<Eigen::Infinity>() < opt.grad_tol) {
      converged = true;
      break;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(-hess);
    Eigen::VectorXd step = ldlt.solve(grad);
    double scale = 1.0;
    for (int h = 0; h < 50; ++h) {
      Eigen::VectorXd cand = beta + scale * step;
      Eigen::VectorXd g2(p);
      Eigen::MatrixXd h2(p, p);
      double ll2 = binary_eval(d, cand, g2, &h2);
      if (std::isfinite(ll2) && ll2 >= ll - 1e-12) {
        beta = cand;
        ll = ll2;
        grad = g2;
        hess = h2;
        break;
      }
      scale *= 0.5;
    }
  }
  fit.beta = beta;
  fit.loglik = ll;
  fit.converged = converged && beta.lpNorm<Eigen::Infinity>() < 1e3;
  if (!fit.converged)
    fit.notes.push_back(beta.lpNorm<Eigen::Infinity>() >= 1e3
                            ? "coefficients diverging; possible perfect separation"
                            : "Newton iterations exhausted before gradient tolerance");

  Eigen::MatrixXd scores = binary_row_scores(d, beta);
  finish_binary(fit, m, d, -hess, scores, opt, 0);
  return fit;
}

// ---------------------------------------------------------------------------
// Random-intercept probit (Gauss-Hermite)

namespace {

struct ReData {
  Eigen::MatrixXd X;  // with intercept
  Eigen::VectorXd q;
  std::vector<std::vector<Eigen::Index>> groups;
  GaussHermite gh;
  double prob_floor;
};

/// theta = (beta, ln sigma_u); returns loglik, fills gradient, and optionally
/// per-group scores (G x dim).
double re_eval(const ReData& d, const Eigen::VectorXd& theta, Eigen::VectorXd& grad,
               Eigen::MatrixXd* group_scores) {
  const Eigen::Index p = d.X.cols();
  const int M = static_cast<int>(d.gh.nodes.size());
  const double sqrt2 = std::sqrt(2.0);
  const double ln_sqrt_pi = 0.5 * std::log(std::acos(-1.0));
  Eigen::VectorXd beta = theta.head(p);
  const double sigma = std::exp(theta[p]);
  Eigen::VectorXd eta = d.X * beta;

  grad.setZero(p + 1);
  if (group_scores) group_scores->setZero(static_cast<Eigen::Index>(d.groups.size()), p + 1);
  double ll = 0;

  std::vector<double> logterm(M);
  Eigen::MatrixXd dS_dbeta(M, p);
  Eigen::VectorXd dS_dlns(M);
  for (std::size_t g = 0; g < d.groups.size(); ++g) {
    const auto& rows = d.groups[g];
    dS_dbeta.setZero();
    dS_dlns.setZero();
    for (int mnode = 0; mnode < M; ++mnode) {
      double shift = sqrt2 * sigma * d.gh.nodes[mnode];
      double S = 0;
      for (Eigen::Index i : rows) {
        double s = d.q[i] * (eta[i] + shift);
        double Phi = std::max(norm_cdf(s), d.prob_floor);
        S += std::log(Phi);
        double mills = norm_pdf(s) / Phi;
        dS_dbeta.row(mnode) += d.q[i] * mills * d.X.row(i);
        dS_dlns[mnode] += d.q[i] * mills * sqrt2 * d.gh.nodes[mnode] * sigma;
      }
      logterm[mnode] = std::log(d.gh.weights[mnode]) - ln_sqrt_pi + S;
    }
    double lg = logsumexp(logterm);
    ll += lg;
    Eigen::VectorXd sg = Eigen::VectorXd::Zero(p + 1);
    for (int mnode = 0; mnode < M; ++mnode) {
      double alpha = std::exp(logterm[mnode] - lg);
      sg.head(p) += alpha * dS_dbeta.row(mnode).transpose();
      sg[p] += alpha * dS_dlns[mnode];
    }
    grad += sg;
    if (group_scores) group_scores->row(static_cast<Eigen::Index>(g)) = sg;
  }
  return ll;
}

}  // namespace

BinaryFit fit_random_intercept_probit(const DesignMatrix& m, const std::vector<std::string>& group,
                                      int quad_nodes, const FitOptions& opt) {
  if (quad_nodes < 4) throw std::invalid_argument("fit_random_intercept_probit: quad_nodes >= 4");
  if (group.size() != static_cast<std::size_t>(m.X.rows()))
    throw std::invalid_argument("fit_random_intercept_probit: group label per row required");

  ReData d;
  {
    BinaryData bd = binary_data(m, opt.prob_floor);
    d.X = std::move(bd.X);
    d.q = std::move(bd.q);
  }
  d.prob_floor = opt.prob_floor;
  d.gh = gauss_hermite(quad_nodes);
  auto gmap = group_rows(group);
  std::vector<std::string> group_keys;
  for (auto& [key, rows] : gmap) {
    d.groups.push_back(rows);
    group_keys.push_back(key);
  }

  // Start from the pooled fit.
  BinaryFit pooled = fit_binary_probit(m, opt);
  const Eigen::Index p = d.X.cols();
  Eigen::VectorXd theta0(p + 1);
  theta0.head(p) = pooled.beta;
  theta0[p] = std::log(0.5);

  auto obj = [&](const Eigen::VectorXd& th, Eigen::VectorXd& g) {
    return re_eval(d, th, g, nullptr);
  };
  auto res = detail::maximize_bfgs(obj, theta0, opt.grad_tol, opt.max_iter);
  double sigma = std::exp(res.x[p]);

  if (sigma < 1e-4) {
    // Degenerate scale: the pooled probit is the same model.
    pooled.sigma_u = 0.0;
    pooled.notes.push_back("random-intercept scale collapsed to zero; pooled fit returned");
    return pooled;
  }

  BinaryFit fit;
  fit.names = pooled.names;
  fit.beta = res.x.head(p);
  fit.loglik = res.value;
  fit.converged = res.converged;
  fit.sigma_u = sigma;
  if (!res.converged)
    fit.notes.push_back("optimizer stopped with gradient max-norm " +
                        std::to_string(res.grad.lpNorm<Eigen::Infinity>()));

  Eigen::MatrixXd H = detail::observed_information(obj, res.x);
  Eigen::MatrixXd gscores;
  Eigen::VectorXd gdummy;
  gscores.resize(static_cast<Eigen::Index>(d.groups.size()), p + 1);
  re_eval(d, res.x, gdummy, &gscores);
  // Groups are the clustering unit of the integrated likelihood.
  std::vector<std::string> cluster_of_group = group_keys;
  Eigen::MatrixXd vcov_full = sandwich(H, gscores, cluster_of_group);
  fit.vcov = vcov_full.topLeftCorner(p, p);
  fit.n_clusters = static_cast<int>(d.groups.size());
  fit.se.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) fit.se[j] = std::sqrt(std::max(0.0, fit.vcov(j, j)));
  fit.n = m.X.rows();
  fit.k = static_cast<int>(p) + 1;  // + sigma_u
  auto ic = info_criteria(fit.loglik, fit.k, fit.n);
  fit.aic = ic.aic;
  fit.bic = ic.bic;
  return fit;
}

double re_probit_loglik(const DesignMatrix& m, const std::vector<std::string>& group,
                        const Eigen::VectorXd& beta_with_intercept, double sigma_u,
                        int quad_nodes) {
  ReData d;
  {
    BinaryData bd = binary_data(m, 1e-300);
    d.X = std::move(bd.X);
    d.q = std::move(bd.q);
  }
  d.prob_floor = 1e-300;
  d.gh = gauss_hermite(quad_nodes);
  for (auto& [key, rows] : group_rows(group)) {
    (void)key;
    d.groups.push_back(rows);
  }
  if (sigma_u == 0.0) {
    // Degenerate integral: weights sum to sqrt(pi), the product is constant
    // in the node, so the pooled likelihood comes back exactly.
    Eigen::VectorXd eta = d.X * beta_with_intercept;
    double ll = 0;
    for (Eigen::Index i = 0; i < d.X.rows(); ++i)
      ll += std::log(std::max(norm_cdf(d.q[i] * eta[i]), d.prob_floor));
    return ll;
  }
  Eigen::VectorXd theta(d.X.cols() + 1);
  theta.head(d.X.cols()) = beta_with_intercept;
  theta[d.X.cols()] = std::log(sigma_u);
  Eigen::VectorXd g;
  return re_eval(d, theta, g, nullptr);
}

// ---------------------------------------------------------------------------
// Sandwich entry points

Eigen::MatrixXd cluster_sandwich_vcov(const OrderedFit& fit, const DesignMatrix& m) {
  if (!fit.converged) throw ModelError("cluster_sandwich_vcov: fit did not converge");
  OrderedData d;
  d.X = m.X;
  d.I = fit.n_categories;
  d.prob_floor = 1e-300;
  d.y.resize(static_cast<std::size_t>(m.y.size()));
  std::map<int, int> recode;
  for (int c = 0; c < fit.n_categories; ++c)
    recode[static_cast<int>(std::lround(fit.category_values[static_cast<std::size_t>(c)]))] =
        c + 1;
  for (Eigen::Index i = 0; i < m.y.size(); ++i) {
    auto it = recode.find(static_cast<int>(std::lround(m.y[i])));
    if (it == recode.end()) throw ModelError("cluster_sandwich_vcov: outcome outside fit categories");
    d.y[static_cast<std::size_t>(i)] = it->second;
  }
  Eigen::VectorXd theta(fit.beta.size() + fit.cutpoints.size());
  theta.head(fit.beta.size()) = fit.beta;
  theta.tail(fit.cutpoints.size()) = increments_from_cutpoints(fit.cutpoints);
  auto obj = [&](const Eigen::VectorXd& th, Eigen::VectorXd& g) { return ordered_eval(d, th, g); };
  Eigen::MatrixXd H = detail::observed_information(obj, theta);
  return sandwich(H, ordered_row_scores(d, theta), m.cluster_id);
}

Eigen::MatrixXd cluster_sandwich_vcov(const BinaryFit& fit, const DesignMatrix& m) {
  if (!fit.converged) throw ModelError("cluster_sandwich_vcov: fit did not converge");
  BinaryData d = binary_data(m, 1e-300);
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess(d.X.cols(), d.X.cols());
  binary_eval(d, fit.beta, grad, &hess);
  return sandwich(-hess, binary_row_scores(d, fit.beta), m.cluster_id);
}

}  // namespace paxsat
