/*
 Copyright 2026 the a2gsounder authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#include <cmath>
#include <vector>

#include "a2g/distributions.hpp"
#include "a2g/fft.hpp"
#include "a2g/rng.hpp"
#include "doctest.h"

using namespace a2g;

TEST_CASE("fft round trip and Parseval") {
  Rng rng(42);
  CVec x(512);
  for (auto& v : x) v = rng.cnormal();
  CVec X = fft(x);
  CVec back = ifft(X);
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    err += std::norm(back[i] - x[i]);
    ref += std::norm(x[i]);
  }
  CHECK(err / ref < 1e-20);

  CVec Xu = fft_unitary(x);
  CHECK(power_sum(Xu) == doctest::Approx(power_sum(x)).epsilon(1e-12));
}

TEST_CASE("fft matches direct DFT") {
  Rng rng(7);
  CVec x(20); // non power of two
  for (auto& v : x) v = rng.cnormal();
  CVec X = fft(x);
  for (int k = 0; k < 20; ++k) {
    cplx acc = 0.0;
    for (int n = 0; n < 20; ++n)
      acc += x[n] * std::polar(1.0, -kTwoPi * k * n / 20.0);
    CHECK(std::abs(X[k] - acc) < 1e-10);
  }
}

TEST_CASE("normal quantile inverts cdf") {
  for (double p : {1e-9, 1e-4, 0.01, 0.3, 0.5, 0.9, 0.999, 1 - 1e-9}) {
    const double x = norm_quantile(p);
    CHECK(norm_cdf(x) == doctest::Approx(p).epsilon(1e-9));
  }
  CHECK(norm_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("box-muller moments") {
  Rng rng(123);
  const int n = 200000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    ss += x * x;
  }
  const double mean = s / n;
  const double var = ss / n - mean * mean;
  CHECK(std::fabs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("normal fit recovers parameters") {
  Rng rng(5);
  std::vector<double> x(100000);
  for (auto& v : x) v = rng.normal(0.0, 2.7);
  const DistFit fit = fit_distribution(x, DistFamily::normal);
  CHECK(std::fabs(fit.p1) < 0.03);
  CHECK(fit.p2 == doctest::Approx(2.7).epsilon(0.012));
  CHECK(fit.ks_pvalue > 0.01);
}

TEST_CASE("extreme value sampling, fit and moments") {
  const double mu = 0.9, sigma = 0.4;
  Rng rng(9);
  std::vector<double> x(100000);
  for (auto& v : x) v = ev_quantile(rng.uniform(), mu, sigma);

  SUBCASE("analytic moments match the sample") {
    CHECK(std::fabs(mean_of(x) - ev_mean(mu, sigma)) < 0.01);
    CHECK(std::fabs(std_of(x) - ev_std(mu, sigma)) < 0.01);
  }
  SUBCASE("mle recovers parameters within 0.01") {
    const DistFit fit = fit_distribution(x, DistFamily::extreme_value);
    CHECK(std::fabs(fit.p1 - mu) < 0.01);
    CHECK(std::fabs(fit.p2 - sigma) < 0.01);
    CHECK(fit.ks_pvalue > 0.01);
  }
  SUBCASE("cdf/quantile are inverse") {
    for (double p : {0.01, 0.2, 0.5, 0.8, 0.99})
      CHECK(ev_cdf(ev_quantile(p, mu, sigma), mu, sigma) ==
            doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("fit_distribution rejects degenerate input") {
  std::vector<double> flat(100, 1.25);
  CHECK_THROWS_AS(fit_distribution(flat, DistFamily::normal), ConfigError);
  std::vector<double> tiny(10, 0.0);
  CHECK_THROWS_AS(fit_distribution(tiny, DistFamily::normal), ConfigError);
}

TEST_CASE("correlation basics") {
  Rng rng(11);
  std::vector<double> x(1000), y(1000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.normal();
    y[i] = -x[i];
  }
  CHECK(correlation(x, x) == doctest::Approx(1.0));
  CHECK(correlation(x, y) == doctest::Approx(-1.0));
  // affine invariance with positive slope
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = 3.0 * x[i] + 7.0;
  CHECK(correlation(x, z) == doctest::Approx(1.0));
  std::vector<double> c(5, 2.0);
  std::vector<double> d = {1, 2, 3, 4, 5};
  CHECK_THROWS_AS(correlation(c, d), ConfigError);
}

TEST_CASE("planted bivariate correlation is recovered") {
  Rng rng(13);
  const double rho = 0.36;
  const int n = 100000;
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    const double a = rng.normal(), b = rng.normal();
    x[i] = a;
    y[i] = rho * a + std::sqrt(1 - rho * rho) * b;
  }
  CHECK(std::fabs(correlation(x, y) - rho) < 0.01);
  CHECK(rank_correlation(x, x) == doctest::Approx(1.0));
}

TEST_CASE("ks statistic sensitivity") {
  Rng rng(17);
  std::vector<double> x(20000);
  for (auto& v : x) v = rng.normal();
  const double d_ok = ks_statistic(x, [](double v) { return norm_cdf(v); });
  CHECK(ks_pvalue(d_ok, x.size()) > 0.01);
  // shifted reference must be rejected
  const double d_bad =
      ks_statistic(x, [](double v) { return norm_cdf(v - 0.1); });
  CHECK(ks_pvalue(d_bad, x.size()) < 0.01);
}
