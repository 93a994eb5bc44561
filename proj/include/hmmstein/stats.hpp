// Copyright 2026 The hmmstein Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HMMSTEIN_STATS_HPP_
#define HMMSTEIN_STATS_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace hmmstein {

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

// Standard normal distribution function through erfc, accurate to ~1e-16.
double normal_cdf(double x);

// Exact sup_t |F_N(t) - Phi(t)| for the samples standardized by (mean, sd).
// Throws EmptySample / NonPositiveSd.
double empirical_kolmogorov(std::span<const double> samples, double mean, double sd);

// Half-width eps with P(sup |F_N - F| > eps) <= delta for N samples (DKW).
double dkw_width(std::size_t count, double delta);

inline constexpr double kDkwDelta = 0.01;

// Mean of |x - mean(x)|^r.
double central_moment(std::span<const double> samples, double r);

double sample_mean(std::span<const double> samples);
// Unbiased sample variance; 0 for a single sample.
double sample_variance(std::span<const double> samples);
// Mean with sd / sqrt(N).
Estimate mean_estimate(std::span<const double> samples);
// Unbiased variance with the usual fourth-moment standard error.
Estimate variance_estimate(std::span<const double> samples);

struct EmpiricalSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  std::map<double, double> central_moments;
  // Absent when the samples are degenerate (zero variance).
  std::optional<double> d_kolmogorov;

  bool degenerate() const noexcept { return !d_kolmogorov.has_value(); }
};

EmpiricalSummary summarize(std::span<const double> samples,
                           std::span<const double> moment_orders = {});

struct TailPoint {
  double threshold = 0.0;
  double probability = 0.0;
  double standard_error = 0.0;
};

// Empirical P(X >= x) for each (increasing) threshold x.
std::vector<TailPoint> tail_curve(std::span<const double> samples,
                                  std::span<const double> thresholds);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_standard_error = 0.0;
};

// Ordinary least squares y = intercept + slope * x (at least 3 points).
LineFit fit_line(std::span<const double> x, std::span<const double> y);
// Fit of log y on log x; every coordinate must be positive.
LineFit fit_log_slope(std::span<const double> x, std::span<const double> y);
// Fit of log y on x; every y must be positive.
LineFit fit_semilog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace hmmstein

#endif  // HMMSTEIN_STATS_HPP_
