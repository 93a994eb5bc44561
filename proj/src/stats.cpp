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

#include "hmmstein/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hmmstein/error.hpp"

namespace hmmstein {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double empirical_kolmogorov(std::span<const double> samples, double mean, double sd) {
  if (samples.empty()) fail(ErrorCode::EmptySample, "Kolmogorov distance of an empty sample");
  if (!(sd > 0.0)) fail(ErrorCode::NonPositiveSd, "standard deviation must be positive");
  std::vector<double> w(samples.begin(), samples.end());
  for (double& v : w) v = (v - mean) / sd;
  std::sort(w.begin(), w.end());
  const auto count = static_cast<double>(w.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double phi = normal_cdf(w[i]);
    const double above = static_cast<double>(i + 1) / count - phi;
    const double below = phi - static_cast<double>(i) / count;
    sup = std::max({sup, std::abs(above), std::abs(below)});
  }
  return std::min(sup, 1.0);
}

double dkw_width(std::size_t count, double delta) {
  if (count == 0) fail(ErrorCode::EmptySample, "DKW width for zero samples");
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::InvalidArgument, "delta must be in (0,1)");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(count)));
}

double sample_mean(std::span<const double> samples) {
  if (samples.empty()) fail(ErrorCode::EmptySample, "mean of an empty sample");
  return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

double sample_variance(std::span<const double> samples) {
  const double m = sample_mean(samples);
  if (samples.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : samples) ss += (v - m) * (v - m);
  return ss / static_cast<double>(samples.size() - 1);
}

double central_moment(std::span<const double> samples, double r) {
  if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "moment order must be positive");
  const double m = sample_mean(samples);
  double acc = 0.0;
  if (r == 2.0) {
    for (double v : samples) acc += (v - m) * (v - m);
  } else {
    for (double v : samples) acc += std::pow(std::abs(v - m), r);
  }
  return acc / static_cast<double>(samples.size());
}

Estimate mean_estimate(std::span<const double> samples) {
  const double m = sample_mean(samples);
  const double var = sample_variance(samples);
  return {m, std::sqrt(var / static_cast<double>(samples.size()))};
}

Estimate variance_estimate(std::span<const double> samples) {
  const std::size_t count = samples.size();
  const double var = sample_variance(samples);
  // Too few points for a fourth moment: normal-theory value.
  if (count < 4) return {var, count > 1 ? var * std::sqrt(2.0 / static_cast<double>(count - 1)) : 0.0};
  const double m4 = central_moment(samples, 4.0);
  const double m2 = central_moment(samples, 2.0);
  const auto n = static_cast<double>(count);
  // Var(s^2) ~ (mu4 - (n-3)/(n-1) sigma^4) / n
  const double v = (m4 - (n - 3.0) / (n - 1.0) * m2 * m2) / n;
  return {var, std::sqrt(std::max(v, 0.0))};
}

EmpiricalSummary summarize(std::span<const double> samples, std::span<const double> moment_orders) {
  EmpiricalSummary s;
  s.count = samples.size();
  s.mean = sample_mean(samples);
  s.variance = sample_variance(samples);
  for (double r : moment_orders) s.central_moments[r] = central_moment(samples, r);
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  const bool constant = samples.empty() || *lo == *hi;
  if (constant) s.variance = 0.0;
  const double sd = std::sqrt(s.variance);
  if (!constant && sd > 0.0 && std::isfinite(sd)) s.d_kolmogorov = empirical_kolmogorov(samples, s.mean, sd);
  return s;
}

std::vector<TailPoint> tail_curve(std::span<const double> samples,
                                  std::span<const double> thresholds) {
  if (samples.empty()) fail(ErrorCode::EmptySample, "tail curve of an empty sample");
  for (std::size_t k = 1; k < thresholds.size(); ++k)
    if (!(thresholds[k] > thresholds[k - 1]))
      fail(ErrorCode::InvalidArgument, "tail thresholds must be increasing");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  std::vector<TailPoint> out;
  out.reserve(thresholds.size());
  for (double x : thresholds) {
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), x);
    const double p = static_cast<double>(sorted.end() - first) / n;
    out.push_back({x, p, std::sqrt(p * (1.0 - p) / n)});
  }
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorCode::InvalidArgument, "fit inputs differ in length");
  if (x.size() < 3) fail(ErrorCode::TooFewPoints, "line fit needs at least 3 points");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorCode::InvalidArgument, "fit abscissae are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - fit.intercept - fit.slope * x[k];
    rss += r * r;
  }
  fit.slope_standard_error = std::sqrt(rss / (n - 2.0) / sxx);
  return fit;
}

namespace {

std::vector<double> logs(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!(v[k] > 0.0)) fail(ErrorCode::NonPositiveValue, "log fit needs positive values");
    out[k] = std::log(v[k]);
  }
  return out;
}

}  // namespace

LineFit fit_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 3) fail(ErrorCode::TooFewPoints, "line fit needs at least 3 points");
  return fit_line(logs(x), logs(y));
}

LineFit fit_semilog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 3) fail(ErrorCode::TooFewPoints, "line fit needs at least 3 points");
  return fit_line(x, logs(y));
}

}  // namespace hmmstein
