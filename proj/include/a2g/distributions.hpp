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
#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace a2g {

/// Standard normal CDF.
double norm_cdf(double x);

/// Standard normal quantile (Wichura's AS241, ~1e-15 accurate).
double norm_quantile(double p);

// Two-parameter extreme value family with density
//   f(x) = (1/s) exp((x-mu)/s) exp(-exp((x-mu)/s)),
// i.e. the left-skewed (minimum) Gumbel; mean = mu - 0.5772..*s,
// std = pi*s/sqrt(6).
double ev_cdf(double x, double mu, double sigma);
double ev_quantile(double p, double mu, double sigma);
double ev_mean(double mu, double sigma);
double ev_std(double mu, double sigma);

enum class DistFamily { normal, extreme_value };

struct DistFit {
  DistFamily family;
  double p1 = 0.0; // mean (normal) or mu (extreme value)
  double p2 = 0.0; // std (normal) or sigma (extreme value)
  double ks_stat = 0.0;
  double ks_pvalue = 0.0;
  double log_likelihood = 0.0;
};

/// Maximum-likelihood fit plus a Kolmogorov-Smirnov statistic against the
/// fitted CDF. Throws ConfigError for n < 30 or degenerate (constant) input.
DistFit fit_distribution(std::span<const double> samples, DistFamily family);

/// KS statistic of samples against an arbitrary CDF.
double ks_statistic(std::span<const double> samples,
                    const std::function<double(double)>& cdf);

/// Asymptotic KS p-value for statistic d at sample size n.
double ks_pvalue(double d, std::size_t n);

double mean_of(std::span<const double> v);
double std_of(std::span<const double> v); // MLE (divides by n)

/// Pearson correlation coefficient; throws ConfigError on length mismatch,
/// n < 2 or zero variance.
double correlation(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation (mean ranks for ties).
double rank_correlation(std::span<const double> x, std::span<const double> y);

} // namespace a2g
