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

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace fuzentra::stats {

struct TestResult {
  double statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;  // two-tailed
  bool two_tailed = true;
};

enum class TestKind { Paired, Independent };

// Welch is the default for independent samples; Pooled uses the classic
// equal-variance statistic with n_a + n_b - 2 degrees of freedom.
enum class VarianceModel { Welch, Pooled };

TestKind parse_test_kind(std::string_view text);        // paired|independent
VarianceModel parse_variance_model(std::string_view text);  // welch|pooled

// Paired: equal lengths >= 2 (LengthMismatch). Zero differences give t = 0
// and p = 1; constant nonzero differences throw DegenerateVariance.
// Independent: each side >= 2 samples and a nonzero standard error.
TestResult t_test(std::span<const double> a, std::span<const double> b, TestKind kind,
                  VarianceModel variance = VarianceModel::Welch);

// Two-tailed P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_tailed_p(double t, double df);

enum class FdrMethod { BenjaminiHochberg, BenjaminiYekutieli };
FdrMethod parse_fdr_method(std::string_view text);  // bh|by

struct FdrOutcome {
  std::vector<double> adjusted_p;
  std::vector<bool> rejected;

  std::size_t rejections() const noexcept;
};

// Step-up procedure: reject ranks <= k* = max{k : p_(k) <= k alpha / (m c)}
// with c = 1 (BH) or c = sum_{i<=m} 1/i (BY). Adjusted p_(k) =
// min_{j >= k} (m c / j) p_(j), capped at 1.
FdrOutcome fdr_bh(std::span<const double> p_values, double alpha = 0.05,
                  FdrMethod method = FdrMethod::BenjaminiHochberg);

// ICC(1,1) from one-way ANOVA mean squares; rows are subjects, columns are
// sessions. Throws DegenerateVariance when MSB + (k-1) MSW is zero.
double icc_oneway(const Eigen::MatrixXd& ratings);

}  // namespace fuzentra::stats
