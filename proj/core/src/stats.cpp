#include "paxsat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace paxsat {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double norm_interval(double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("norm_interval: lo > hi");
  if (lo > 0.0) return norm_sf(lo) - norm_sf(hi);  // both in the upper tail
  return norm_cdf(hi) - norm_cdf(lo);
}

double norm_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) throw std::domain_error("norm_quantile: p must be in (0,1)");

  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One step of Halley's method against the erfc-based CDF.
  double e = norm_cdf(x) - p;
  double u = e / norm_pdf(x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean: empty");
  return block_sum(x) / static_cast<double>(x.size());
}

namespace {
double sum_sq_dev(std::span<const double> x, double m) {
  std::vector<double> dev(x.size());
  for (size_t i = 0; i < x.size(); ++i) dev[i] = (x[i] - m) * (x[i] - m);
  return block_sum(dev);
}
}  // namespace

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("sample_sd: need n >= 2");
  return std::sqrt(sum_sq_dev(x, mean(x)) / static_cast<double>(x.size() - 1));
}

double population_sd(std::span<const double> x) {
  double m = mean(x);
  return std::sqrt(sum_sq_dev(x, m) / static_cast<double>(x.size()));
}

double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("correlation: size mismatch or too small");
  double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw std::invalid_argument("quantile: empty");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q outside [0,1]");
  std::sort(x.begin(), x.end());
  double h = (static_cast<double>(x.size()) - 1.0) * q;
  size_t lo = static_cast<size_t>(h);
  if (lo + 1 >= x.size()) return x.back();
  double frac = h - static_cast<double>(lo);
  return x[lo] + frac * (x[lo + 1] - x[lo]);
}

double logsumexp(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("logsumexp: empty");
  double m = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

double block_sum(std::span<const double> x) {
  // Fixed block size so the reduction tree does not depend on how callers
  // chunk work across threads.
  constexpr size_t kBlock = 128;
  if (x.size() <= kBlock) {
    double s = 0;
    for (double v : x) s += v;
    return s;
  }
  std::vector<double> partial;
  partial.reserve((x.size() + kBlock - 1) / kBlock);
  for (size_t i = 0; i < x.size(); i += kBlock) {
    double s = 0;
    size_t end = std::min(i + kBlock, x.size());
    for (size_t j = i; j < end; ++j) s += x[j];
    partial.push_back(s);
  }
  return block_sum(partial);
}

GaussHermite gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n >= 1 required");
  GaussHermite gh;
  gh.nodes.resize(n);
  gh.weights.resize(n);
  const double sqrt_pi = std::sqrt(std::acos(-1.0));

  // Newton iteration on physicists' Hermite polynomials, standard initial
  // guesses (Numerical Recipes style), exploiting root symmetry.
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * gh.nodes[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * gh.nodes[1];
    else
      z = 2.0 * z - gh.nodes[i - 2];

    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0 / std::sqrt(sqrt_pi);  // orthonormal recurrence
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
             std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    gh.nodes[i] = z;
    gh.nodes[n - 1 - i] = -z;
    gh.weights[i] = 2.0 / (pp * pp);
    gh.weights[n - 1 - i] = gh.weights[i];
  }
  // Store nodes ascending.
  std::reverse(gh.nodes.begin(), gh.nodes.end());
  std::reverse(gh.weights.begin(), gh.weights.end());
  return gh;
}

}  // namespace paxsat
