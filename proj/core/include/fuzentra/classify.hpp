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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

// Binary migraine-phase classification: LDA, kNN and discrete AdaBoost over
// {LDA, kNN, decision stump}, plus subject-grouped stratified repeated k-fold
// cross-validation, confusion metrics and ROC/AUC.
//
// Scores are oriented so that larger means PreIctal. A score of exactly zero
// is classified InterIctal.
namespace fuzentra::classify {

enum class Label { InterIctal, PreIctal };

std::string_view to_string(Label label);
Label parse_label(std::string_view text);  // inter|pre

struct SubjectFeatures {
  std::string subject_id;
  Label label = Label::InterIctal;
  std::vector<double> features;
};

// Scales whose transitional variance forms the default feature vector.
inline constexpr std::size_t kDefaultFeatureScales[] = {1, 2, 11, 12, 13, 14, 17, 18, 19, 20};

enum class ModelKind { LDA, KNN, AdaBoost };
std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);  // lda|knn|adaboost

struct Hyperparameters {
  std::size_t knn_k = 3;
  std::size_t boosting_rounds = 8;
  double lda_ridge = 1e-6;  // multiplied by trace(pooled covariance) / d
};

struct LdaModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double score(const Eigen::VectorXd& x) const { return weights.dot(x) + bias; }
};

struct KnnModel {
  Eigen::MatrixXd points;            // one row per stored example
  std::vector<int> targets;          // +1 PreIctal, -1 InterIctal
  std::vector<std::size_t> origin;   // source example index, for resampled sets
  std::size_t k = 3;

  // Vote margin (#pre - #inter) / k among the k nearest stored points.
  // Points whose origin equals `exclude` are skipped.
  double score(const Eigen::VectorXd& x,
               std::optional<std::size_t> exclude = std::nullopt) const;
};

struct StumpModel {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;  // +1: x > threshold votes PreIctal
  double score(const Eigen::VectorXd& x) const {
    return x(static_cast<Eigen::Index>(feature)) > threshold ? polarity : -polarity;
  }
};

using WeakLearner = std::variant<LdaModel, KnnModel, StumpModel>;

struct AdaBoostModel {
  std::vector<WeakLearner> learners;
  std::vector<double> alphas;
  // sum alpha_t h_t(x) / sum alpha_t, with h_t in {-1, +1}
  double score(const Eigen::VectorXd& x) const;
};

class TrainedModel {
 public:
  using State = std::variant<LdaModel, KnnModel, AdaBoostModel>;

  TrainedModel(ModelKind kind, State state, std::size_t dimension, Hyperparameters hp)
      : kind_(kind), state_(std::move(state)), dimension_(dimension), hp_(hp) {}

  ModelKind kind() const noexcept { return kind_; }
  const State& state() const noexcept { return state_; }
  std::size_t dimension() const noexcept { return dimension_; }
  const Hyperparameters& hyperparameters() const noexcept { return hp_; }

  double score(std::span<const double> x) const;  // throws DimensionMismatch

 private:
  ModelKind kind_;
  State state_;
  std::size_t dimension_;
  Hyperparameters hp_;
};

// Throws SingleClass, TooFewExamples (kNN needs k + 1 examples) or
// DimensionMismatch for ragged features.
TrainedModel train(ModelKind kind, std::span<const SubjectFeatures> data, std::uint64_t seed,
                   const Hyperparameters& hp = {});

struct Prediction {
  Label label = Label::InterIctal;
  double score = 0.0;
};

Prediction predict(const TrainedModel& model, std::span<const double> x);

struct Metrics {
  double accuracy = 0.0;
  std::optional<double> recall;
  std::optional<double> precision;
  std::optional<double> f_measure;
};

// Positive class is PreIctal. Division by zero leaves the metric undefined.
Metrics compute_metrics(std::span<const Label> predictions, std::span<const Label> labels);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  std::vector<RocPoint> points;  // from (0,0) to (1,1)
  double auc = 0.0;
};

// Thresholds sweep the unique scores in descending order; tied scores move
// diagonally. AUC by the trapezoid rule. Throws SingleClass.
RocCurve roc_auc(std::span<const double> scores, std::span<const Label> labels);

struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;         // sample SD across repeats
  std::size_t defined = 0; // repeats where the metric was defined
};

struct CvOptions {
  std::size_t folds = 3;
  std::size_t repeats = 100;
  bool tune = true;  // inner-fold grid search, see below
  Hyperparameters base{};
};

struct CvSummary {
  MetricSummary accuracy, recall, precision, f_measure, auc;
  std::vector<RocPoint> roc_points;  // held-out scores pooled over all repeats
  std::size_t repeats = 0;
};

// Per repeat: subject-grouped, class-stratified random partition into
// `folds` clusters; each cluster is held out once and the pooled held-out
// predictions give that repeat's metrics and AUC. With `tune`, each training
// split picks kNN k in {3, 1, 5} and AdaBoost rounds in {8, 4, 16} by inner
// 3-fold accuracy (first best in that order wins).
CvSummary cross_validate(ModelKind kind, std::span<const SubjectFeatures> data,
                         std::uint64_t seed, const CvOptions& options = {});

// Fold index per example. Examples sharing a subject_id land in the same fold.
std::vector<std::size_t> stratified_group_folds(std::span<const SubjectFeatures> data,
                                                std::size_t folds, std::uint64_t seed);

}  // namespace fuzentra::classify
