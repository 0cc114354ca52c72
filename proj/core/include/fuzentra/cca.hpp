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
#include <vector>

#include <Eigen/Dense>

#include "fuzentra/time_series.hpp"

// Canonical correlation between the EEG channels and sin/cos references at
// the stimulus frequency and its second harmonic, and the projection that
// keeps only the most stimulus-like canonical components.
namespace fuzentra::cca {

// Rows: sin(2 pi f1 t), cos(2 pi f1 t), sin(2 pi f2 t), cos(2 pi f2 t) with
// f2 = 2 f1 and t = k / rate.
struct TemplateBank {
  Eigen::MatrixXd rows;  // 4 x length
  double f1 = 0.0;
  double rate = 0.0;

  double f2() const noexcept { return 2.0 * f1; }
};

TemplateBank make_template(double f1, std::size_t length, double rate);

struct CcaSolution {
  std::vector<double> correlations;  // descending, within [0, 1]
  // Column k is the data-side weight vector for correlations[k], expressed in
  // the units of the raw channels (canonical variate = w^T x).
  Eigen::MatrixXd data_weights;
};

inline constexpr double kDefaultRidge = 1e-8;

// Each channel and template row is mean-centered and scaled to unit variance,
// so the covariances are correlation matrices; ridge * trace / dim is added
// to both diagonals before solving
//
//   C_xy C_yy^-1 C_yx w = rho^2 C_xx w
//
// as a symmetric-definite generalized eigenproblem. Requires >= 2 channels
// and length > channels + 4. Throws SingularCovariance when C_xx or C_yy is
// not positive definite after regularization.
CcaSolution cca_solve(const MultiChannelEpoch& data, const TemplateBank& tmpl,
                      double ridge = kDefaultRidge);

// Same solve on a plain (channels x samples) matrix.
CcaSolution cca_solve(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                      double ridge = kDefaultRidge);

// A = first `keep` weight columns; Y' = A^T S; S' = pinv(A^T) Y'. Throws
// InsufficientComponents when keep exceeds the number of components.
MultiChannelEpoch denoise(const MultiChannelEpoch& data, const CcaSolution& sol,
                          std::size_t keep = 2);

Eigen::MatrixXd to_matrix(const MultiChannelEpoch& epoch);  // channels x samples

}  // namespace fuzentra::cca
