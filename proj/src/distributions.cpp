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
#include "a2g/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "a2g/common.hpp"

namespace a2g {

namespace {
constexpr double kEulerGamma = 0.57721566490153286061;
} // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Wichura, Applied Statistics 37 (1988), algorithm AS241 (PPND16).
double norm_quantile(double p) {
  if (p <= 0.0 || p >= 1.0) throw ConfigError("norm_quantile: p outside (0,1)");
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -val : val;
}

double ev_cdf(double x, double mu, double sigma) {
  return 1.0 - std::exp(-std::exp((x - mu) / sigma));
}

double ev_quantile(double p, double mu, double sigma) {
  if (p <= 0.0 || p >= 1.0) throw ConfigError("ev_quantile: p outside (0,1)");
  return mu + sigma * std::log(-std::log1p(-p));
}

double ev_mean(double mu, double sigma) { return mu - kEulerGamma * sigma; }

double ev_std(double mu, double sigma) {
  (void)mu;
  return kPi * sigma / std::sqrt(6.0);
}

double mean_of(std::span<const double> v) {
  if (v.empty()) throw ConfigError("mean_of: empty input");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(std::span<const double> v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

double ks_statistic(std::span<const double> samples,
                    const std::function<double(double)>& cdf) {
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-12) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

DistFit fit_normal(std::span<const double> x) {
  DistFit fit;
  fit.family = DistFamily::normal;
  fit.p1 = mean_of(x);
  fit.p2 = std_of(x);
  if (fit.p2 <= 0.0) throw ConfigError("fit_distribution: degenerate sample");
  double ll = 0.0;
  for (double v : x) {
    const double z = (v - fit.p1) / fit.p2;
    ll += -0.5 * z * z - std::log(fit.p2) - 0.5 * std::log(kTwoPi);
  }
  fit.log_likelihood = ll;
  fit.ks_stat = ks_statistic(
      x, [&](double v) { return norm_cdf((v - fit.p1) / fit.p2); });
  fit.ks_pvalue = ks_pvalue(fit.ks_stat, x.size());
  return fit;
}

// MLE for the minimum Gumbel. With y = -x the problem becomes the classic
// maximum-Gumbel fit: sigma solves
//   sigma = mean(y) - sum(y e^{-y/sigma}) / sum(e^{-y/sigma}),
// solved by damped fixed-point iteration, then mu from the location equation.
DistFit fit_ev(std::span<const double> x) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = -x[i];
  const double ybar = mean_of(y);
  double sigma = std_of(y) * std::sqrt(6.0) / kPi;
  if (sigma <= 0.0) throw ConfigError("fit_distribution: degenerate sample");
  for (int it = 0; it < 200; ++it) {
    double sw = 0.0, syw = 0.0;
    for (double v : y) {
      const double w = std::exp(-v / sigma);
      sw += w;
      syw += v * w;
    }
    const double next = ybar - syw / sw;
    if (std::fabs(next - sigma) < 1e-12 * sigma) {
      sigma = next;
      break;
    }
    sigma = 0.5 * (sigma + next);
  }
  double sw = 0.0;
  for (double v : y) sw += std::exp(-v / sigma);
  const double mu_y = -sigma * std::log(sw / static_cast<double>(y.size()));

  DistFit fit;
  fit.family = DistFamily::extreme_value;
  fit.p1 = -mu_y; // back to minimum-Gumbel location
  fit.p2 = sigma;
  double ll = 0.0;
  for (double v : x) {
    const double z = (v - fit.p1) / fit.p2;
    ll += z - std::exp(z) - std::log(fit.p2);
  }
  fit.log_likelihood = ll;
  fit.ks_stat =
      ks_statistic(x, [&](double v) { return ev_cdf(v, fit.p1, fit.p2); });
  fit.ks_pvalue = ks_pvalue(fit.ks_stat, x.size());
  return fit;
}

} // namespace

DistFit fit_distribution(std::span<const double> samples, DistFamily family) {
  if (samples.size() < 30)
    throw ConfigError("fit_distribution: need at least 30 samples");
  switch (family) {
    case DistFamily::normal: return fit_normal(samples);
    case DistFamily::extreme_value: return fit_ev(samples);
  }
  throw ConfigError("fit_distribution: unsupported family");
}

double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("correlation: length mismatch");
  if (x.size() < 2) throw ConfigError("correlation: need at least 2 samples");
  const double mx = mean_of(x), my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ConfigError("correlation: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

namespace {
std::vector<double> ranks_of(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = rank;
    i = j + 1;
  }
  return r;
}
} // namespace

double rank_correlation(std::span<const double> x, std::span<const double> y) {
  const auto rx = ranks_of(x);
  const auto ry = ranks_of(y);
  return correlation(rx, ry);
}

} // namespace a2g
