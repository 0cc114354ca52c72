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

#include "fuzentra/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <type_traits>
#include <utility>

#include "fuzentra/error.hpp"
#include "fuzentra/seed.hpp"

namespace fuzentra::classify {

std::string_view to_string(Label label) {
  return label == Label::PreIctal ? "pre" : "inter";
}

Label parse_label(std::string_view text) {
  if (text == "pre" || text == "preictal" || text == "PreIctal") return Label::PreIctal;
  if (text == "inter" || text == "interictal" || text == "InterIctal") return Label::InterIctal;
  throw Error(ErrorKind::ParseError, "unknown label '" + std::string(text) + "'");
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::LDA: return "lda";
    case ModelKind::KNN: return "knn";
    case ModelKind::AdaBoost: return "adaboost";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "lda") return ModelKind::LDA;
  if (text == "knn") return ModelKind::KNN;
  if (text == "adaboost") return ModelKind::AdaBoost;
  throw Error(ErrorKind::InvalidArgument, "unknown model '" + std::string(text) + "'");
}

namespace {

struct Dataset {
  Eigen::MatrixXd x;       // n x d
  std::vector<int> y;      // +1 / -1
};

int target(Label l) { return l == Label::PreIctal ? 1 : -1; }

Dataset to_dataset(std::span<const SubjectFeatures> data) {
  if (data.empty()) throw Error(ErrorKind::EmptySet, "no training examples");
  const std::size_t d = data.front().features.size();
  if (d == 0) throw Error(ErrorKind::DimensionMismatch, "feature vectors are empty");
  Dataset ds{Eigen::MatrixXd(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(d)),
             std::vector<int>(data.size())};
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].features.size() != d) {
      throw Error(ErrorKind::DimensionMismatch,
                  "subject '" + data[i].subject_id + "' has " +
                      std::to_string(data[i].features.size()) + " features, expected " +
                      std::to_string(d));
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double v = data[i].features[j];
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::InvalidArgument,
                    "subject '" + data[i].subject_id + "' has a non-finite feature");
      }
      ds.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
    ds.y[i] = target(data[i].label);
  }
  return ds;
}

void require_both_classes(const std::vector<int>& y) {
  const bool pos = std::find(y.begin(), y.end(), 1) != y.end();
  const bool neg = std::find(y.begin(), y.end(), -1) != y.end();
  if (!pos || !neg) throw Error(ErrorKind::SingleClass, "training data contains one class only");
}

LdaModel fit_lda(const Dataset& ds, const std::vector<double>& w, double ridge) {
  const Eigen::Index d = ds.x.cols();
  Eigen::VectorXd mu[2] = {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  double mass[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < ds.y.size(); ++i) {
    const int c = ds.y[i] > 0 ? 1 : 0;
    mu[c] += w[i] * ds.x.row(static_cast<Eigen::Index>(i)).transpose();
    mass[c] += w[i];
  }
  if (!(mass[0] > 0.0) || !(mass[1] > 0.0)) {
    throw Error(ErrorKind::SingleClass, "a class carries zero weight");
  }
  mu[0] /= mass[0];
  mu[1] /= mass[1];
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < ds.y.size(); ++i) {
    const int c = ds.y[i] > 0 ? 1 : 0;
    const Eigen::VectorXd r = ds.x.row(static_cast<Eigen::Index>(i)).transpose() - mu[c];
    cov.noalias() += w[i] * r * r.transpose();
  }
  cov /= mass[0] + mass[1];
  cov.diagonal().array() += ridge * cov.trace() / static_cast<double>(d);
  LdaModel m;
  m.weights = cov.completeOrthogonalDecomposition().solve(mu[1] - mu[0]);
  m.bias = -0.5 * m.weights.dot(mu[0] + mu[1]);
  return m;
}

StumpModel fit_stump(const Dataset& ds, const std::vector<double>& w) {
  const auto n = static_cast<std::size_t>(ds.x.rows());
  StumpModel best;
  double best_err = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(n);
  for (Eigen::Index f = 0; f < ds.x.cols(); ++f) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return ds.x(static_cast<Eigen::Index>(a), f) < ds.x(static_cast<Eigen::Index>(b), f);
    });
    // Threshold below everything: all predicted +1 for polarity +1.
    double err_pos = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (ds.y[i] < 0) err_pos += w[i];
    }
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    auto consider = [&](double err, double thr) {
      if (err < best_err) {
        best_err = err;
        best = StumpModel{static_cast<std::size_t>(f), thr, 1};
      }
      if (total - err < best_err) {
        best_err = total - err;
        best = StumpModel{static_cast<std::size_t>(f), thr, -1};
      }
    };
    const double lo = ds.x(static_cast<Eigen::Index>(order.front()), f);
    consider(err_pos, lo - 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = order[k];
      // Move example i to the "<= threshold" side, where polarity +1 predicts -1.
      err_pos += ds.y[i] > 0 ? w[i] : -w[i];
      const double v = ds.x(static_cast<Eigen::Index>(i), f);
      if (k + 1 < n) {
        const double next = ds.x(static_cast<Eigen::Index>(order[k + 1]), f);
        if (next == v) continue;
        consider(err_pos, 0.5 * (v + next));
      } else {
        consider(err_pos, v);
      }
    }
  }
  return best;
}

KnnModel fit_knn(const Dataset& ds, std::size_t k, const std::vector<std::size_t>& rows) {
  KnnModel m;
  m.k = k;
  m.points.resize(static_cast<Eigen::Index>(rows.size()), ds.x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.points.row(static_cast<Eigen::Index>(i)) = ds.x.row(static_cast<Eigen::Index>(rows[i]));
    m.targets.push_back(ds.y[rows[i]]);
  }
  m.origin = rows;
  return m;
}

double sign_of(double score) { return score > 0.0 ? 1.0 : -1.0; }

double weak_score(const WeakLearner& h, const Eigen::VectorXd& x,
                  std::optional<std::size_t> self = std::nullopt) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, KnnModel>) {
          return sign_of(m.score(x, self));
        } else {
          return sign_of(m.score(x));
        }
      },
      h);
}

AdaBoostModel fit_adaboost(const Dataset& ds, const Hyperparameters& hp, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(ds.x.rows());
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::mt19937_64 rng(seed);
  AdaBoostModel model;
  constexpr double kMinError = 1e-10;

  for (std::size_t round = 0; round < hp.boosting_rounds; ++round) {
    std::vector<WeakLearner> candidates;
    candidates.emplace_back(fit_lda(ds, w, hp.lda_ridge));
    {
      std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
      std::vector<std::size_t> rows(n);
      for (auto& r : rows) r = pick(rng);
      std::sort(rows.begin(), rows.end());
      bool pos = false, neg = false;
      for (auto r : rows) (ds.y[r] > 0 ? pos : neg) = true;
      if (pos && neg && rows.size() >= hp.knn_k) candidates.emplace_back(fit_knn(ds, hp.knn_k, rows));
    }
    candidates.emplace_back(fit_stump(ds, w));

    // kNN is scored leave-one-out so its own copies do not vote.
    std::size_t best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> preds(candidates.size(), std::vector<double>(n));
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const Eigen::VectorXd xi = ds.x.row(static_cast<Eigen::Index>(i)).transpose();
        preds[c][i] = weak_score(candidates[c], xi, i);
        if (preds[c][i] != static_cast<double>(ds.y[i])) err += w[i];
      }
      if (err < best_err) {
        best_err = err;
        best = c;
      }
    }
    if (best_err >= 0.5) {
      if (model.learners.empty()) {
        model.learners.push_back(std::move(candidates[best]));
        model.alphas.push_back(1.0);
      }
      break;
    }
    const double e = std::max(best_err, kMinError);
    const double alpha = std::log((1.0 - e) / e);
    model.learners.push_back(std::move(candidates[best]));
    model.alphas.push_back(alpha);
    if (best_err <= kMinError) break;

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (preds[best][i] != static_cast<double>(ds.y[i])) w[i] *= std::exp(alpha);
      total += w[i];
    }
    for (auto& v : w) v /= total;
  }
  return model;
}

TrainedModel fit(ModelKind kind, const Dataset& ds, std::uint64_t seed, const Hyperparameters& hp) {
  require_both_classes(ds.y);
  const auto n = static_cast<std::size_t>(ds.x.rows());
  const auto d = static_cast<std::size_t>(ds.x.cols());
  switch (kind) {
    case ModelKind::LDA: {
      const std::vector<double> w(n, 1.0);
      return TrainedModel(kind, fit_lda(ds, w, hp.lda_ridge), d, hp);
    }
    case ModelKind::KNN: {
      if (hp.knn_k == 0) throw Error(ErrorKind::InvalidArgument, "kNN needs k >= 1");
      if (n < hp.knn_k + 1) {
        throw Error(ErrorKind::TooFewExamples,
                    "kNN with k=" + std::to_string(hp.knn_k) + " needs at least " +
                        std::to_string(hp.knn_k + 1) + " examples");
      }
      std::vector<std::size_t> rows(n);
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      return TrainedModel(kind, fit_knn(ds, hp.knn_k, rows), d, hp);
    }
    case ModelKind::AdaBoost: {
      if (hp.boosting_rounds == 0) throw Error(ErrorKind::InvalidArgument, "AdaBoost needs >= 1 round");
      if (n < hp.knn_k + 1) {
        throw Error(ErrorKind::TooFewExamples, "AdaBoost kNN base learner needs k + 1 examples");
      }
      return TrainedModel(kind, fit_adaboost(ds, hp, seed), d, hp);
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown model kind");
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Dataset out{Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), ds.x.cols()),
              std::vector<int>(rows.size())};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = ds.x.row(static_cast<Eigen::Index>(rows[i]));
    out.y[i] = ds.y[rows[i]];
  }
  return out;
}

MetricSummary summarize(const std::vector<std::optional<double>>& values) {
  MetricSummary s;
  std::vector<double> v;
  for (const auto& x : values) {
    if (x) v.push_back(*x);
  }
  s.defined = v.size();
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

}  // namespace

double KnnModel::score(const Eigen::VectorXd& x, std::optional<std::size_t> exclude) const {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (exclude && !origin.empty() && origin[ui] == *exclude) continue;
    dist.emplace_back((points.row(i).transpose() - x).squaredNorm(), ui);
  }
  const std::size_t kk = std::min(k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
  int votes = 0;
  for (std::size_t i = 0; i < kk; ++i) votes += targets[dist[i].second];
  return static_cast<double>(votes) / static_cast<double>(k);
}

double AdaBoostModel::score(const Eigen::VectorXd& x) const {
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < learners.size(); ++t) {
    num += alphas[t] * weak_score(learners[t], x);
    den += alphas[t];
  }
  return den > 0.0 ? num / den : 0.0;
}

double TrainedModel::score(std::span<const double> x) const {
  if (x.size() != dimension_) {
    throw Error(ErrorKind::DimensionMismatch, "model expects " + std::to_string(dimension_) +
                                                  " features, got " + std::to_string(x.size()));
  }
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  return std::visit([&](const auto& m) { return m.score(v); }, state_);
}

TrainedModel train(ModelKind kind, std::span<const SubjectFeatures> data, std::uint64_t seed,
                   const Hyperparameters& hp) {
  return fit(kind, to_dataset(data), seed, hp);
}

Prediction predict(const TrainedModel& model, std::span<const double> x) {
  const double s = model.score(x);
  return {s > 0.0 ? Label::PreIctal : Label::InterIctal, s};
}

Metrics compute_metrics(std::span<const Label> predictions, std::span<const Label> labels) {
  if (predictions.size() != labels.size()) {
    throw Error(ErrorKind::LengthMismatch, "predictions and labels differ in length");
  }
  if (labels.empty()) throw Error(ErrorKind::EmptySet, "no predictions");
  double tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] == Label::PreIctal;
    const bool t = labels[i] == Label::PreIctal;
    if (p && t) ++tp;
    else if (p) ++fp;
    else if (t) ++fn;
    else ++tn;
  }
  Metrics m;
  m.accuracy = (tp + tn) / static_cast<double>(labels.size());
  if (tp + fn > 0) m.recall = tp / (tp + fn);
  if (tp + fp > 0) m.precision = tp / (tp + fp);
  if (m.recall && m.precision && *m.recall + *m.precision > 0) {
    m.f_measure = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  return m;
}

RocCurve roc_auc(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::LengthMismatch, "scores and labels differ in length");
  }
  double pos = 0, neg = 0;
  for (auto l : labels) (l == Label::PreIctal ? pos : neg) += 1;
  if (pos == 0 || neg == 0) throw Error(ErrorKind::SingleClass, "ROC needs both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  RocCurve roc;
  roc.points.push_back({0.0, 0.0});
  double tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    double dtp = 0, dfp = 0;
    while (i < order.size() && scores[order[i]] == s) {
      (labels[order[i]] == Label::PreIctal ? dtp : dfp) += 1;
      ++i;
    }
    roc.auc += (dfp / neg) * ((tp + 0.5 * dtp) / pos);
    tp += dtp;
    fp += dfp;
    roc.points.push_back({fp / neg, tp / pos});
  }
  return roc;
}

std::vector<std::size_t> stratified_group_folds(std::span<const SubjectFeatures> data,
                                                std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorKind::InvalidArgument, "cross-validation needs >= 2 folds");
  std::size_t counts[2] = {0, 0};
  for (const auto& s : data) ++counts[s.label == Label::PreIctal ? 1 : 0];
  if (counts[0] < folds || counts[1] < folds) {
    throw Error(ErrorKind::TooFewExamples,
                std::to_string(folds) + " folds need at least " + std::to_string(folds) +
                    " examples per class (have " + std::to_string(counts[0]) + " inter, " +
                    std::to_string(counts[1]) + " pre)");
  }
  // Subjects in order of first appearance, bucketed by (inter, pre) counts.
  std::vector<std::string> ids;
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto [it, inserted] = members.try_emplace(data[i].subject_id);
    if (inserted) ids.push_back(data[i].subject_id);
    it->second.push_back(i);
  }
  if (ids.size() < folds) {
    throw Error(ErrorKind::TooFewExamples, "fewer subjects than folds");
  }
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::string>> buckets;
  for (const auto& id : ids) {
    std::size_t c[2] = {0, 0};
    for (auto i : members[id]) ++c[data[i].label == Label::PreIctal ? 1 : 0];
    buckets[{c[0], c[1]}].push_back(id);
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> fold_of(data.size(), 0);
  std::size_t next = 0;
  for (auto& [signature, group] : buckets) {
    std::shuffle(group.begin(), group.end(), rng);
    for (const auto& id : group) {
      for (auto i : members[id]) fold_of[i] = next % folds;
      ++next;
    }
  }
  return fold_of;
}

namespace {

double inner_accuracy(ModelKind kind, std::span<const SubjectFeatures> data,
                      const Hyperparameters& hp, std::uint64_t seed) {
  constexpr std::size_t kInnerFolds = 3;
  const auto fold_of = stratified_group_folds(data, kInnerFolds, seed);
  const Dataset ds = to_dataset(data);
  std::size_t correct = 0;
  for (std::size_t f = 0; f < kInnerFolds; ++f) {
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < data.size(); ++i) (fold_of[i] == f ? te : tr).push_back(i);
    const Dataset train_ds = subset(ds, tr);
    const TrainedModel model = fit(kind, train_ds, derive_seed(seed, "inner-fit", f), hp);
    for (auto i : te) {
      const Label p = predict(model, data[i].features).label;
      if (p == data[i].label) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

Hyperparameters tune(ModelKind kind, std::span<const SubjectFeatures> data,
                     const Hyperparameters& base, std::uint64_t seed) {
  if (kind == ModelKind::LDA) return base;
  std::vector<Hyperparameters> grid;
  for (std::size_t k : {std::size_t{3}, std::size_t{1}, std::size_t{5}}) {
    if (kind == ModelKind::KNN) {
      grid.push_back(base);
      grid.back().knn_k = k;
      continue;
    }
    for (std::size_t rounds : {std::size_t{8}, std::size_t{4}, std::size_t{16}}) {
      grid.push_back(base);
      grid.back().knn_k = k;
      grid.back().boosting_rounds = rounds;
    }
  }
  Hyperparameters best = base;
  double best_acc = -1.0;
  for (const auto& hp : grid) {
    double acc;
    try {
      acc = inner_accuracy(kind, data, hp, seed);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::TooFewExamples || e.kind() == ErrorKind::SingleClass) continue;
      throw;
    }
    if (acc > best_acc) {
      best_acc = acc;
      best = hp;
    }
  }
  return best;
}

}  // namespace

CvSummary cross_validate(ModelKind kind, std::span<const SubjectFeatures> data, std::uint64_t seed,
                         const CvOptions& options) {
  if (options.repeats == 0) throw Error(ErrorKind::InvalidArgument, "repeats must be >= 1");
  const Dataset ds = to_dataset(data);
  require_both_classes(ds.y);

  std::vector<std::optional<double>> acc, rec, prec, f1, auc;
  std::vector<double> pooled_scores;
  std::vector<Label> pooled_labels;
  std::vector<Label> truth(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) truth[i] = data[i].label;

  for (std::size_t r = 0; r < options.repeats; ++r) {
    const std::uint64_t rs = derive_seed(seed, "cv-repeat", r);
    const auto fold_of = stratified_group_folds(data, options.folds, rs);
    std::vector<double> scores(data.size(), 0.0);
    for (std::size_t f = 0; f < options.folds; ++f) {
      std::vector<std::size_t> tr;
      std::vector<SubjectFeatures> train_data;
      for (std::size_t i = 0; i < data.size(); ++i) {
        if (fold_of[i] != f) {
          tr.push_back(i);
          train_data.push_back(data[i]);
        }
      }
      const std::uint64_t fs = derive_seed(rs, "fold", f);
      const Hyperparameters hp =
          options.tune ? tune(kind, train_data, options.base, derive_seed(fs, "tune")) : options.base;
      const TrainedModel model = fit(kind, subset(ds, tr), derive_seed(fs, "fit"), hp);
      for (std::size_t i = 0; i < data.size(); ++i) {
        if (fold_of[i] == f) scores[i] = model.score(data[i].features);
      }
    }
    std::vector<Label> pred(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      pred[i] = scores[i] > 0.0 ? Label::PreIctal : Label::InterIctal;
    }
    const Metrics m = compute_metrics(pred, truth);
    acc.emplace_back(m.accuracy);
    rec.push_back(m.recall);
    prec.push_back(m.precision);
    f1.push_back(m.f_measure);
    auc.emplace_back(roc_auc(scores, truth).auc);
    pooled_scores.insert(pooled_scores.end(), scores.begin(), scores.end());
    pooled_labels.insert(pooled_labels.end(), truth.begin(), truth.end());
  }

  CvSummary s;
  s.accuracy = summarize(acc);
  s.recall = summarize(rec);
  s.precision = summarize(prec);
  s.f_measure = summarize(f1);
  s.auc = summarize(auc);
  s.roc_points = roc_auc(pooled_scores, pooled_labels).points;
  s.repeats = options.repeats;
  return s;
}

}  // namespace fuzentra::classify
