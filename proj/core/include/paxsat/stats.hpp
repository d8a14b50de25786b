#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace paxsat {

double norm_pdf(double x);
double norm_cdf(double x);
/// Upper tail P(Z > x), accurate for large x via erfc.
double norm_sf(double x);
/// Inverse standard-normal CDF (Acklam rational approximation + one Halley
/// polish against erfc); |error| < 1e-14 over (1e-300, 1-1e-16).
double norm_quantile(double p);

/// P(lo < Z <= hi) computed tail-side to keep accuracy when both ends are far
/// in the same tail. Requires lo <= hi.
double norm_interval(double lo, double hi);

double mean(std::span<const double> x);
double sample_sd(std::span<const double> x);   // 1/(n-1)
double population_sd(std::span<const double> x);  // 1/n
double correlation(std::span<const double> x, std::span<const double> y);

/// Type-7 (linear interpolation) empirical quantile, q in [0,1].
double quantile(std::vector<double> x, double q);

double logsumexp(std::span<const double> x);

/// Deterministic fixed-block pairwise sum; independent of thread count.
double block_sum(std::span<const double> x);

struct GaussHermite {
  std::vector<double> nodes;    // roots of physicists' Hermite H_n
  std::vector<double> weights;  // sum(weights) == sqrt(pi)
};
/// Nodes/weights for integrals of the form  int exp(-t^2) f(t) dt.
GaussHermite gauss_hermite(int n);

}  // namespace paxsat
