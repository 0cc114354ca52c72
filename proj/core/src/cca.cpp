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

#include "fuzentra/cca.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "fuzentra/error.hpp"

namespace fuzentra::cca {

namespace {

struct Standardized {
  Eigen::MatrixXd z;        // rows centered and scaled to unit variance
  Eigen::VectorXd sd;
};

Standardized standardize(const Eigen::MatrixXd& m, const char* side) {
  const auto len = static_cast<double>(m.cols());
  Standardized s;
  const Eigen::VectorXd mu = m.rowwise().mean();
  s.z = m.colwise() - mu;
  s.sd = (s.z.rowwise().squaredNorm() / (len - 1.0)).cwiseSqrt();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (!(s.sd(r) > 0.0)) {
      throw Error(ErrorKind::SingularCovariance,
                  std::string(side) + " row " + std::to_string(r) + " has zero variance");
    }
    s.z.row(r) /= s.sd(r);
  }
  return s;
}

void regularize(Eigen::MatrixXd& c, double ridge) {
  const double bump = ridge * c.trace() / static_cast<double>(c.rows());
  c.diagonal().array() += bump;
}

void require_definite(const Eigen::MatrixXd& c, const char* name) {
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularCovariance, std::string(name) + " is not positive definite");
  }
  const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
  const double ratio = diag.minCoeff() / diag.maxCoeff();
  if (ratio * ratio < 1e-14) {
    throw Error(ErrorKind::SingularCovariance, std::string(name) + " is ill-conditioned");
  }
}

}  // namespace

TemplateBank make_template(double f1, std::size_t length, double rate) {
  if (!(f1 > 0.0) || !std::isfinite(f1)) {
    throw Error(ErrorKind::InvalidArgument, "stimulus frequency must be positive");
  }
  if (!(rate > 0.0)) throw Error(ErrorKind::InvalidArgument, "sample rate must be positive");
  if (!(f1 < rate / 4.0)) {
    throw Error(ErrorKind::HarmonicAboveNyquist, "second harmonic 2*f1 must stay below rate/2");
  }
  if (length < 2) throw Error(ErrorKind::InvalidArgument, "template length must be >= 2");
  TemplateBank bank;
  bank.f1 = f1;
  bank.rate = rate;
  bank.rows.resize(4, static_cast<Eigen::Index>(length));
  const double w1 = 2.0 * std::numbers::pi * f1;
  const double w2 = 2.0 * w1;
  for (std::size_t k = 0; k < length; ++k) {
    const double t = static_cast<double>(k) / rate;
    const auto c = static_cast<Eigen::Index>(k);
    bank.rows(0, c) = std::sin(w1 * t);
    bank.rows(1, c) = std::cos(w1 * t);
    bank.rows(2, c) = std::sin(w2 * t);
    bank.rows(3, c) = std::cos(w2 * t);
  }
  return bank;
}

Eigen::MatrixXd to_matrix(const MultiChannelEpoch& epoch) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(epoch.channel_count()),
                    static_cast<Eigen::Index>(epoch.length()));
  for (std::size_t c = 0; c < epoch.channel_count(); ++c) {
    const auto s = epoch.channels()[c].second.samples();
    m.row(static_cast<Eigen::Index>(c)) =
        Eigen::Map<const Eigen::RowVectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
  }
  return m;
}

CcaSolution cca_solve(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double ridge) {
  if (x.rows() < 2) throw Error(ErrorKind::InvalidArgument, "CCA needs at least two channels");
  if (y.rows() < 1 || y.cols() != x.cols()) {
    throw Error(ErrorKind::LengthMismatch, "template length differs from the data length");
  }
  if (x.cols() <= x.rows() + y.rows()) {
    throw Error(ErrorKind::TooShort, "CCA needs more samples than channels + template rows");
  }
  if (!(ridge >= 0.0)) throw Error(ErrorKind::InvalidArgument, "ridge must be >= 0");

  const auto sx = standardize(x, "data");
  const auto sy = standardize(y, "template");
  const double denom = static_cast<double>(x.cols()) - 1.0;
  Eigen::MatrixXd cxx = sx.z * sx.z.transpose() / denom;
  Eigen::MatrixXd cyy = sy.z * sy.z.transpose() / denom;
  const Eigen::MatrixXd cxy = sx.z * sy.z.transpose() / denom;
  regularize(cxx, ridge);
  regularize(cyy, ridge);
  require_definite(cxx, "data covariance");
  require_definite(cyy, "template covariance");

  const Eigen::MatrixXd cyy_inv_cyx = cyy.llt().solve(cxy.transpose());
  Eigen::MatrixXd lhs = cxy * cyy_inv_cyx;
  lhs = 0.5 * (lhs + lhs.transpose());

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(lhs, cxx);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularCovariance, "generalized eigen solve failed");
  }
  const auto components = static_cast<Eigen::Index>(std::min(x.rows(), y.rows()));
  const Eigen::Index dim = x.rows();
  CcaSolution sol;
  sol.data_weights.resize(dim, components);
  // eigenvalues come back ascending
  for (Eigen::Index k = 0; k < components; ++k) {
    const Eigen::Index src = dim - 1 - k;
    const double rho2 = std::clamp(solver.eigenvalues()(src), 0.0, 1.0);
    sol.correlations.push_back(std::sqrt(rho2));
    sol.data_weights.col(k) = solver.eigenvectors().col(src).cwiseQuotient(sx.sd);
  }
  return sol;
}

CcaSolution cca_solve(const MultiChannelEpoch& data, const TemplateBank& tmpl, double ridge) {
  if (static_cast<Eigen::Index>(data.length()) != tmpl.rows.cols()) {
    throw Error(ErrorKind::LengthMismatch, "template length differs from the epoch length");
  }
  return cca_solve(to_matrix(data), tmpl.rows, ridge);
}

MultiChannelEpoch denoise(const MultiChannelEpoch& data, const CcaSolution& sol,
                          std::size_t keep) {
  if (keep < 1) throw Error(ErrorKind::InvalidArgument, "keep must be >= 1");
  if (keep > sol.correlations.size()) {
    throw Error(ErrorKind::InsufficientComponents,
                "keep=" + std::to_string(keep) + " but only " +
                    std::to_string(sol.correlations.size()) + " components exist");
  }
  if (sol.data_weights.rows() != static_cast<Eigen::Index>(data.channel_count())) {
    throw Error(ErrorKind::DimensionMismatch, "weights do not match the epoch's channels");
  }
  const Eigen::MatrixXd s = to_matrix(data);
  const Eigen::MatrixXd a = sol.data_weights.leftCols(static_cast<Eigen::Index>(keep));
  const Eigen::MatrixXd y = a.transpose() * s;
  const Eigen::MatrixXd at = a.transpose();
  const Eigen::MatrixXd back = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(at)
                                   .pseudoInverse();
  const Eigen::MatrixXd cleaned = back * y;

  std::vector<MultiChannelEpoch::Channel> channels;
  channels.reserve(data.channel_count());
  for (std::size_t c = 0; c < data.channel_count(); ++c) {
    const auto row = cleaned.row(static_cast<Eigen::Index>(c));
    channels.emplace_back(data.channels()[c].first,
                          TimeSeries(std::vector<double>(row.begin(), row.end()),
                                     data.sample_rate()));
  }
  return MultiChannelEpoch(std::move(channels), data.condition());
}

}  // namespace fuzentra::cca
