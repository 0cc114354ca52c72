/*
 * Copyright 2026 The fuzentra Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fuzentra/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "fuzentra/error.hpp"
#include "fuzentra/signal.hpp"

namespace fuzentra::stats {

TestKind parse_test_kind(std::string_view text) {
  if (text == "paired") return TestKind::Paired;
  if (text == "independent") return TestKind::Independent;
  throw Error(ErrorKind::InvalidArgument, "unknown t-test kind '" + std::string(text) + "'");
}

VarianceModel parse_variance_model(std::string_view text) {
  if (text == "welch") return VarianceModel::Welch;
  if (text == "pooled") return VarianceModel::Pooled;
  throw Error(ErrorKind::InvalidArgument, "unknown variance model '" + std::string(text) + "'");
}

FdrMethod parse_fdr_method(std::string_view text) {
  if (text == "bh") return FdrMethod::BenjaminiHochberg;
  if (text == "by") return FdrMethod::BenjaminiYekutieli;
  throw Error(ErrorKind::InvalidArgument, "unknown FDR method '" + std::string(text) + "'");
}

double student_t_two_tailed_p(double t, double df) {
  if (!(df > 0.0)) throw Error(ErrorKind::InvalidArgument, "degrees of freedom must be > 0");
  if (t == 0.0) return 1.0;
  // P(|T| >= |t|) = I_{df / (df + t^2)}(df / 2, 1 / 2)
  const double x = df / (df + t * t);
  return std::clamp(boost::math::ibeta(0.5 * df, 0.5, x), 0.0, 1.0);
}

TestResult t_test(std::span<const double> a, std::span<const double> b, TestKind kind,
                  VarianceModel variance) {
  TestResult r;
  if (kind == TestKind::Paired) {
    if (a.size() != b.size()) {
      throw Error(ErrorKind::LengthMismatch, "paired t-test needs equal sample sizes");
    }
    if (a.size() < 2) throw Error(ErrorKind::TooFewExamples, "paired t-test needs n >= 2");
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    const double mean = signal::mean(diff);
    const double sd = signal::sample_sd(diff);
    const auto n = static_cast<double>(diff.size());
    r.degrees_of_freedom = n - 1.0;
    if (!(sd > 0.0)) {
      if (std::all_of(diff.begin(), diff.end(), [](double d) { return d == 0.0; })) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
      }
      throw Error(ErrorKind::DegenerateVariance, "paired differences have zero variance");
    }
    r.statistic = mean / (sd / std::sqrt(n));
  } else {
    if (a.size() < 2 || b.size() < 2) {
      throw Error(ErrorKind::TooFewExamples, "independent t-test needs >= 2 per group");
    }
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    const double va = std::pow(signal::sample_sd(a), 2);
    const double vb = std::pow(signal::sample_sd(b), 2);
    const double diff = signal::mean(a) - signal::mean(b);
    if (variance == VarianceModel::Welch) {
      const double qa = va / na, qb = vb / nb;
      const double se2 = qa + qb;
      if (!(se2 > 0.0)) throw Error(ErrorKind::DegenerateVariance, "both groups have zero variance");
      r.statistic = diff / std::sqrt(se2);
      r.degrees_of_freedom = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    } else {
      const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
      if (!(pooled > 0.0)) throw Error(ErrorKind::DegenerateVariance, "pooled variance is zero");
      r.statistic = diff / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
      r.degrees_of_freedom = na + nb - 2.0;
    }
  }
  r.p_value = student_t_two_tailed_p(r.statistic, r.degrees_of_freedom);
  return r;
}

std::size_t FdrOutcome::rejections() const noexcept {
  return static_cast<std::size_t>(std::count(rejected.begin(), rejected.end(), true));
}

FdrOutcome fdr_bh(std::span<const double> p_values, double alpha, FdrMethod method) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "FDR level alpha must lie in (0, 1)");
  }
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "p-value outside [0, 1]");
  }
  const std::size_t m = p_values.size();
  FdrOutcome out{std::vector<double>(m, 1.0), std::vector<bool>(m, false)};
  if (m == 0) return out;

  double c = 1.0;
  if (method == FdrMethod::BenjaminiYekutieli) {
    c = 0.0;
    for (std::size_t i = 1; i <= m; ++i) c += 1.0 / static_cast<double>(i);
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return p_values[i] < p_values[j]; });

  const auto md = static_cast<double>(m);
  std::size_t k_star = 0;
  for (std::size_t k = 1; k <= m; ++k) {
    if (p_values[order[k - 1]] <= static_cast<double>(k) * alpha / (md * c)) k_star = k;
  }
  double running = 1.0;
  for (std::size_t k = m; k >= 1; --k) {
    const double scaled = md * c / static_cast<double>(k) * p_values[order[k - 1]];
    running = std::min(running, scaled);
    out.adjusted_p[order[k - 1]] = std::min(running, 1.0);
    out.rejected[order[k - 1]] = k <= k_star;
  }
  return out;
}

double icc_oneway(const Eigen::MatrixXd& ratings) {
  const auto n = ratings.rows();
  const auto k = ratings.cols();
  if (n < 2 || k < 2) {
    throw Error(ErrorKind::InvalidArgument, "ICC needs >= 2 subjects and >= 2 sessions");
  }
  const double grand = ratings.mean();
  const Eigen::VectorXd row_mean = ratings.rowwise().mean();
  const double ssb = static_cast<double>(k) * (row_mean.array() - grand).square().sum();
  const double ssw = (ratings.colwise() - row_mean).array().square().sum();
  const double msb = ssb / static_cast<double>(n - 1);
  const double msw = ssw / static_cast<double>(n * (k - 1));
  const double denom = msb + static_cast<double>(k - 1) * msw;
  if (!(denom > 0.0)) throw Error(ErrorKind::DegenerateVariance, "ICC denominator is zero");
  return (msb - msw) / denom;
}

}  // namespace fuzentra::stats
