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

#include <algorithm>
#include <functional>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "fuzentra/classify.hpp"
#include "fuzentra/error.hpp"
#include "fuzentra/synth.hpp"
#include "oracles.hpp"

using namespace fuzentra;
using classify::Label;
using classify::ModelKind;
using classify::SubjectFeatures;

namespace {

std::vector<SubjectFeatures> two_clusters(std::size_t per_class, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<SubjectFeatures> out;
  for (std::size_t i = 0; i < per_class; ++i) {
    out.push_back({"a" + std::to_string(i), Label::InterIctal, {-1.0 + g(rng)}});
    out.push_back({"b" + std::to_string(i), Label::PreIctal, {1.0 + g(rng)}});
  }
  return out;
}

double training_accuracy(const classify::TrainedModel& model, const std::vector<SubjectFeatures>& data) {
  std::size_t correct = 0;
  for (const auto& s : data) {
    if (classify::predict(model, s.features).label == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Train, LdaSeparatesTightClusters) {
  const auto data = two_clusters(10, 0.01, 1);
  EXPECT_EQ(training_accuracy(classify::train(ModelKind::LDA, data, 1), data), 1.0);
}

TEST(Train, KnnSeparatesClusters) {
  const auto data = two_clusters(10, 0.1, 2);
  EXPECT_EQ(training_accuracy(classify::train(ModelKind::KNN, data, 1), data), 1.0);
}

TEST(Train, AdaBoostSeparatesClusters) {
  const auto data = two_clusters(15, 0.2, 3);
  EXPECT_EQ(training_accuracy(classify::train(ModelKind::AdaBoost, data, 1), data), 1.0);
}

TEST(Train, SingleClass) {
  std::vector<SubjectFeatures> data{{"a", Label::PreIctal, {1.0}}, {"b", Label::PreIctal, {2.0}}};
  for (auto kind : {ModelKind::LDA, ModelKind::KNN, ModelKind::AdaBoost}) {
    EXPECT_EQ(kind_of([&] { classify::train(kind, data, 1); }), ErrorKind::SingleClass);
  }
}

TEST(Train, KnnNeedsMoreThanK) {
  std::vector<SubjectFeatures> data{{"a", Label::PreIctal, {1.0}}, {"b", Label::InterIctal, {2.0}}};
  EXPECT_EQ(kind_of([&] { classify::train(ModelKind::KNN, data, 1); }), ErrorKind::TooFewExamples);
}

TEST(Predict, LdaMidpointTiesToInterIctal) {
  std::vector<SubjectFeatures> data{{"a", Label::InterIctal, {-1.0, 0.5}},
                                    {"b", Label::InterIctal, {-1.0, -0.5}},
                                    {"c", Label::PreIctal, {1.0, 0.5}},
                                    {"d", Label::PreIctal, {1.0, -0.5}}};
  const auto model = classify::train(ModelKind::LDA, data, 1);
  const std::vector<double> mid{0.0, 0.0};
  const auto p = classify::predict(model, mid);
  EXPECT_NEAR(p.score, 0.0, 1e-10);
  if (p.score == 0.0) {
    EXPECT_EQ(p.label, Label::InterIctal);
  }
  EXPECT_EQ(classify::predict(model, std::vector<double>{0.5, 0.0}).label, Label::PreIctal);
}

TEST(Predict, ExactZeroScoreIsInterIctal) {
  classify::LdaModel lda{Eigen::VectorXd::Ones(1), 0.0};
  const classify::TrainedModel model(ModelKind::LDA, lda, 1, {});
  const auto p = classify::predict(model, std::vector<double>{0.0});
  EXPECT_EQ(p.score, 0.0);
  EXPECT_EQ(p.label, Label::InterIctal);
}

TEST(Predict, KnnQueryOnTrainingPoint) {
  const auto data = two_clusters(10, 0.1, 4);
  const auto model = classify::train(ModelKind::KNN, data, 1);
  for (const auto& s : data) EXPECT_EQ(classify::predict(model, s.features).label, s.label);
}

TEST(Predict, WrongDimension) {
  const auto model = classify::train(ModelKind::LDA, two_clusters(5, 0.1, 5), 1);
  EXPECT_EQ(kind_of([&] { classify::predict(model, std::vector<double>{1.0, 2.0}); }),
            ErrorKind::DimensionMismatch);
}

TEST(Lda, AffineInvariantWithoutRidge) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<SubjectFeatures> data;
  for (int i = 0; i < 30; ++i) {
    const Label l = i % 2 ? Label::PreIctal : Label::InterIctal;
    const double shift = l == Label::PreIctal ? 0.8 : -0.8;
    data.push_back({"s" + std::to_string(i), l, {shift + g(rng), g(rng), 0.5 * shift + g(rng)}});
  }
  Eigen::Matrix3d a;
  a << 2.0, 0.3, -1.0, 0.1, -3.0, 0.2, 0.5, 0.5, 1.5;
  const Eigen::Vector3d b(4.0, -2.0, 7.0);
  auto moved = data;
  for (auto& s : moved) {
    const Eigen::Vector3d x = a * Eigen::Map<const Eigen::Vector3d>(s.features.data()) + b;
    s.features.assign(x.data(), x.data() + 3);
  }
  classify::Hyperparameters hp;
  hp.lda_ridge = 0.0;
  const auto m1 = classify::train(ModelKind::LDA, data, 1, hp);
  const auto m2 = classify::train(ModelKind::LDA, moved, 1, hp);
  std::normal_distribution<double> q(0.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d x(q(rng), q(rng), q(rng));
    const Eigen::Vector3d y = a * x + b;
    EXPECT_EQ(classify::predict(m1, std::vector<double>(x.data(), x.data() + 3)).label,
              classify::predict(m2, std::vector<double>(y.data(), y.data() + 3)).label);
  }
}

TEST(AdaBoost, CommonAlphaScalingKeepsDecisions) {
  const auto data = two_clusters(15, 0.8, 7);
  const auto model = classify::train(ModelKind::AdaBoost, data, 3);
  const auto& boost = std::get<classify::AdaBoostModel>(model.state());
  auto scaled = boost;
  for (auto& a : scaled.alphas) a *= 3.7;
  for (const auto& s : data) {
    const Eigen::Map<const Eigen::VectorXd> x(s.features.data(), 1);
    EXPECT_EQ(boost.score(x) > 0.0, scaled.score(x) > 0.0);
  }
}

TEST(Metrics, ConfusionExample) {
  std::vector<Label> pred;
  std::vector<Label> truth;
  auto add = [&](Label p, Label t, int n) {
    for (int i = 0; i < n; ++i) {
      pred.push_back(p);
      truth.push_back(t);
    }
  };
  add(Label::PreIctal, Label::PreIctal, 8);
  add(Label::PreIctal, Label::InterIctal, 2);
  add(Label::InterIctal, Label::PreIctal, 2);
  add(Label::InterIctal, Label::InterIctal, 8);
  const auto m = classify::compute_metrics(pred, truth);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.8);
  EXPECT_DOUBLE_EQ(*m.precision, 0.8);
  EXPECT_DOUBLE_EQ(*m.recall, 0.8);
  EXPECT_NEAR(*m.f_measure, 0.8, 1e-15);
}

TEST(Metrics, AllCorrectAndNoPositives) {
  const std::vector<Label> truth{Label::PreIctal, Label::InterIctal};
  const auto all = classify::compute_metrics(truth, truth);
  EXPECT_EQ(all.accuracy, 1.0);
  EXPECT_EQ(*all.recall, 1.0);
  EXPECT_EQ(*all.precision, 1.0);
  EXPECT_EQ(*all.f_measure, 1.0);
  const std::vector<Label> none{Label::InterIctal, Label::InterIctal};
  const auto m = classify::compute_metrics(none, truth);
  EXPECT_FALSE(m.precision.has_value());
  EXPECT_EQ(*m.recall, 0.0);
  EXPECT_EQ(kind_of([&] { classify::compute_metrics(none, std::vector<Label>{Label::PreIctal}); }),
            ErrorKind::LengthMismatch);
}

TEST(Roc, Examples) {
  const std::vector<Label> l{Label::PreIctal, Label::PreIctal, Label::InterIctal, Label::InterIctal};
  EXPECT_EQ(classify::roc_auc(std::vector<double>{0.9, 0.8, 0.4, 0.3}, l).auc, 1.0);
  EXPECT_EQ(classify::roc_auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, l).auc, 0.5);
  EXPECT_EQ(classify::roc_auc(std::vector<double>{0.9, 0.4, 0.8, 0.3}, l).auc, 0.75);
  const auto curve = classify::roc_auc(std::vector<double>{0.9, 0.4, 0.8, 0.3}, l);
  EXPECT_EQ(curve.points.front(), (classify::RocPoint{0.0, 0.0}));
  EXPECT_EQ(curve.points.back(), (classify::RocPoint{1.0, 1.0}));
  EXPECT_EQ(kind_of([&] {
              classify::roc_auc(std::vector<double>{0.1, 0.2},
                                std::vector<Label>{Label::PreIctal, Label::PreIctal});
            }),
            ErrorKind::SingleClass);
}

TEST(Roc, AucEqualsPairStatistic) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> len(2, 50);
  std::uniform_int_distribution<int> coarse(0, 6);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = len(rng);
    std::vector<double> scores(static_cast<std::size_t>(n));
    std::vector<Label> labels(scores.size());
    std::vector<bool> pos(scores.size());
    for (int i = 0; i < n; ++i) {
      scores[static_cast<std::size_t>(i)] = 0.25 * coarse(rng);
      pos[static_cast<std::size_t>(i)] = (i == 0) || (i != 1 && rng() % 2 == 0);
      labels[static_cast<std::size_t>(i)] = pos[static_cast<std::size_t>(i)] ? Label::PreIctal : Label::InterIctal;
    }
    EXPECT_NEAR(classify::roc_auc(scores, labels).auc, oracle::pair_auc(scores, pos), 1e-12);
  }
}

TEST(Folds, GroupedAndStratified) {
  const auto data = synth::gen_feature_cohort(40, 3, 1.0, 11);
  const auto folds = classify::stratified_group_folds(data, 3, 5);
  std::map<std::string, std::size_t> fold_of;
  std::vector<std::map<Label, std::size_t>> counts(3);
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto [it, fresh] = fold_of.emplace(data[i].subject_id, folds[i]);
    if (!fresh) {
      EXPECT_EQ(it->second, folds[i]);
    }
    ++counts[folds[i]][data[i].label];
  }
  for (const auto& c : counts) {
    for (auto l : {Label::InterIctal, Label::PreIctal}) {
      const double ideal = 40.0 / 3.0;
      EXPECT_LE(std::abs(static_cast<double>(c.at(l)) - ideal), 1.0);
    }
  }
}

TEST(CrossValidate, FoldsExceedClassCount) {
  const auto data = synth::gen_feature_cohort(2, 2, 1.0, 1);
  classify::CvOptions opt;
  opt.repeats = 2;
  EXPECT_EQ(kind_of([&] { classify::cross_validate(ModelKind::LDA, data, 1, opt); }),
            ErrorKind::TooFewExamples);
}

TEST(CrossValidate, Reproducible) {
  const auto data = synth::gen_feature_cohort(12, 4, 1.5, 3);
  classify::CvOptions opt;
  opt.repeats = 4;
  const auto a = classify::cross_validate(ModelKind::AdaBoost, data, 42, opt);
  const auto b = classify::cross_validate(ModelKind::AdaBoost, data, 42, opt);
  EXPECT_EQ(a.accuracy.mean, b.accuracy.mean);
  EXPECT_EQ(a.accuracy.sd, b.accuracy.sd);
  EXPECT_EQ(a.auc.mean, b.auc.mean);
  EXPECT_EQ(a.roc_points, b.roc_points);
  EXPECT_EQ(a.repeats, 4u);
}

TEST(CrossValidate, SeparableCohort) {
  const auto data = synth::gen_feature_cohort(20, 10, 3.0, 8);
  classify::CvOptions opt;
  opt.repeats = 5;
  for (auto kind : {ModelKind::LDA, ModelKind::KNN, ModelKind::AdaBoost}) {
    EXPECT_GE(classify::cross_validate(kind, data, 1, opt).accuracy.mean, 0.9)
        << classify::to_string(kind);
  }
}

TEST(Labels, Parse) {
  EXPECT_EQ(classify::parse_label("pre"), Label::PreIctal);
  EXPECT_EQ(classify::parse_label("inter"), Label::InterIctal);
  EXPECT_EQ(classify::parse_model_kind("adaboost"), ModelKind::AdaBoost);
  EXPECT_THROW(classify::parse_model_kind("svm"), Error);
}
