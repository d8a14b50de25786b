#include <doctest.h>

#include <cmath>

#include "paxsat/rng.hpp"
#include "paxsat/stats.hpp"

using namespace paxsat;

TEST_CASE("normal cdf/pdf reference values") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(norm_cdf(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-12));
  CHECK(norm_cdf(1.0) - norm_cdf(-1.0) == doctest::Approx(0.6826894921370859).epsilon(1e-12));
  CHECK(norm_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-12));
  // deep tail stays accurate through erfc
  CHECK(norm_sf(10.0) == doctest::Approx(7.61985302416053e-24).epsilon(1e-9));
}

TEST_CASE("normal quantile inverts the cdf") {
  CHECK(norm_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(norm_quantile(0.17) == doctest::Approx(-0.9541652531461943).epsilon(1e-11));
  for (double p : {1e-10, 1e-4, 0.01, 0.3, 0.7, 0.975, 1 - 1e-6}) {
    CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  }
  CHECK_THROWS(norm_quantile(0.0));
  CHECK_THROWS(norm_quantile(1.0));
}

TEST_CASE("norm_interval matches direct difference and handles far tails") {
  CHECK(norm_interval(-1.0, 1.0) == doctest::Approx(0.6826894921370859).epsilon(1e-12));
  // both endpoints deep in the upper tail: naive subtraction would cancel
  double p = norm_interval(8.0, 9.0);
  CHECK(p > 0);
  CHECK(p == doctest::Approx(norm_sf(8.0) - norm_sf(9.0)).epsilon(1e-12));
}

TEST_CASE("quantile type-7 interpolation") {
  std::vector<double> x = {1, 2, 3, 4};
  CHECK(quantile(x, 0.0) == doctest::Approx(1.0));
  CHECK(quantile(x, 1.0) == doctest::Approx(4.0));
  CHECK(quantile(x, 0.5) == doctest::Approx(2.5));
  CHECK(quantile(x, 0.75) == doctest::Approx(3.25));
}

TEST_CASE("gauss-hermite integrates polynomials exactly") {
  // int exp(-t^2) dt = sqrt(pi); int t^2 exp(-t^2) = sqrt(pi)/2
  for (int n : {4, 12, 32}) {
    GaussHermite gh = gauss_hermite(n);
    double s0 = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      s0 += gh.weights[i];
      s2 += gh.weights[i] * gh.nodes[i] * gh.nodes[i];
    }
    double sqrt_pi = std::sqrt(std::acos(-1.0));
    CHECK(s0 == doctest::Approx(sqrt_pi).epsilon(1e-12));
    CHECK(s2 == doctest::Approx(sqrt_pi / 2).epsilon(1e-12));
  }
  // E[Phi(a + b Z)] has the closed form Phi(a / sqrt(1 + b^2))
  GaussHermite gh = gauss_hermite(24);
  double a = 0.7, b = 1.3, acc = 0;
  for (std::size_t i = 0; i < gh.nodes.size(); ++i)
    acc += gh.weights[i] * norm_cdf(a + b * std::sqrt(2.0) * gh.nodes[i]);
  acc /= std::sqrt(std::acos(-1.0));
  CHECK(acc == doctest::Approx(norm_cdf(a / std::sqrt(1 + b * b))).epsilon(1e-9));
}

TEST_CASE("block_sum is chunk-invariant and matches plain sum") {
  Rng rng = make_rng(42);
  std::vector<double> x(10001);
  for (auto& v : x) v = rng.normal();
  double plain = 0;
  for (double v : x) plain += v;
  CHECK(block_sum(x) == doctest::Approx(plain).epsilon(1e-9));
}

TEST_CASE("rng streams are deterministic and moment-correct") {
  Rng a = make_rng(7), b = make_rng(7);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());

  Rng rng = make_rng(123);
  std::vector<double> z(20000);
  for (auto& v : z) v = rng.normal();
  CHECK(std::abs(mean(z)) < 0.03);
  CHECK(sample_sd(z) == doctest::Approx(1.0).epsilon(0.03));

  std::vector<double> g(20000);
  for (auto& v : g) v = rng.gamma(2.5, 1.5);
  CHECK(mean(g) == doctest::Approx(2.5 * 1.5).epsilon(0.03));
}
