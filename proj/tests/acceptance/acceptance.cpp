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

// Acceptance run: one PASS/FAIL line per criterion, details underneath.
// Exit status is the number of failed criteria.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fuzentra/cca.hpp"
#include "fuzentra/classify.hpp"
#include "fuzentra/emd.hpp"
#include "fuzentra/entropy.hpp"
#include "fuzentra/error.hpp"
#include "fuzentra/pipeline.hpp"
#include "fuzentra/seed.hpp"
#include "fuzentra/stats.hpp"
#include "fuzentra/synth.hpp"
#include "oracles.hpp"

using namespace fuzentra;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::vector<std::string> details;
};

class Stopwatch {
 public:
  Stopwatch() : wall_(std::chrono::steady_clock::now()), cpu_(std::clock()) {}
  double wall() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_).count();
  }
  double cpu() const { return static_cast<double>(std::clock() - cpu_) / CLOCKS_PER_SEC; }

 private:
  std::chrono::steady_clock::time_point wall_;
  std::clock_t cpu_;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << v;
  return ss.str();
}

const fs::path kWork = fs::temp_directory_path() / "fuzentra_acceptance";

// Signals for the estimator suite: noise, random walks, tones and
// quantised sequences, 16 to 128 samples.
std::vector<std::vector<double>> entropy_suite() {
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<std::size_t> len(16, 128);
  std::vector<std::vector<double>> out;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = len(rng);
    std::vector<double> x;
    switch (i % 4) {
      case 0: x = oracle::gaussian_noise(n, rng); break;
      case 1: x = oracle::uniform_noise(n, rng); break;
      case 2: {
        x = oracle::gaussian_noise(n, rng);
        for (std::size_t k = 1; k < n; ++k) x[k] += x[k - 1];
        break;
      }
      default: {
        x = oracle::gaussian_noise(n, rng);
        for (std::size_t k = 0; k < n; ++k) {
          x[k] = std::round(2.0 * x[k]) + std::sin(0.7 * static_cast<double>(k));
        }
      }
    }
    out.push_back(std::move(x));
  }
  return out;
}

Outcome criterion_1_and_2(Outcome& nonneg) {
  Outcome o;
  const auto suite = entropy_suite();
  Stopwatch sw;
  double worst_fuzzy = 0.0;
  double worst_ap = 0.0;
  double worst_samp = 0.0;
  std::size_t definedness_mismatch = 0;
  std::size_t comparisons = 0;
  double min_fuzzy = INFINITY;
  std::size_t negative = 0;
  for (const auto& x : suite) {
    for (std::size_t m : {1u, 2u, 3u}) {
      for (double r : {0.1, 0.2, 0.3}) {
        entropy::EntropyParams p;
        p.m = m;
        p.r = r;
        const double fz = entropy::fuzzy_entropy(x, p);
        worst_fuzzy = std::max(worst_fuzzy, std::fabs(fz - oracle::fuzzy_entropy(x, m, 2.0, r)));
        min_fuzzy = std::min(min_fuzzy, fz);
        if (fz < -1e-12) ++negative;
        worst_ap = std::max(worst_ap, std::fabs(entropy::approximate_entropy(x, m, r) -
                                                oracle::approximate_entropy(x, m, r)));
        const auto se = entropy::sample_entropy(x, m, r);
        const auto so = oracle::sample_entropy(x, m, r);
        if (se.has_value() != so.has_value()) {
          ++definedness_mismatch;
        } else if (se) {
          worst_samp = std::max(worst_samp, std::fabs(*se - *so));
        }
        comparisons += 3;
      }
    }
  }
  const double elapsed = sw.wall();
  const double worst = std::max({worst_fuzzy, worst_ap, worst_samp});
  o.pass = worst <= 1e-10 && definedness_mismatch == 0 && elapsed < 30.0;
  o.details.push_back(std::to_string(suite.size()) + " signals, " + std::to_string(comparisons) +
                      " comparisons in " + fmt(elapsed, 3) + " s (limit 30 s)");
  o.details.push_back("max |diff|: fuzzy " + fmt(worst_fuzzy) + ", approximate " +
                      fmt(worst_ap) + ", sample " + fmt(worst_samp) + " (limit 1e-10)");
  o.details.push_back("sample entropy definedness mismatches: " + std::to_string(definedness_mismatch));

  nonneg.pass = negative == 0;
  nonneg.details.push_back("minimum fuzzy entropy over " + std::to_string(comparisons / 3) +
                           " evaluations: " + fmt(min_fuzzy, 6) + " (limit -1e-12)");
  nonneg.details.push_back("evaluations below the limit: " + std::to_string(negative));
  return o;
}

std::vector<double> tone(double hz, std::size_t n, double rate) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / rate);
  }
  return x;
}

std::vector<double> values(const TimeSeries& t) { return {t.samples().begin(), t.samples().end()}; }

Outcome criterion_3() {
  Outcome o;
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<std::size_t> len(200, 3000);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_ratio = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = len(rng);
    auto x = oracle::gaussian_noise(n, rng);
    if (i % 3 == 1) {
      for (std::size_t k = 1; k < n; ++k) x[k] += 0.9 * x[k - 1];
    } else if (i % 3 == 2) {
      const double f = 1.0 + 20.0 * u(rng);
      const auto t = tone(f, n, 250.0);
      for (std::size_t k = 0; k < n; ++k) x[k] = 3.0 * t[k] + 0.5 * x[k] + 0.002 * static_cast<double>(k);
    }
    const auto d = emd::decompose(TimeSeries(x, 250.0));
    const auto back = d.reconstruct();
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    double err = 0.0;
    for (std::size_t k = 0; k < n; ++k) err = std::max(err, std::fabs(back[k] - x[k]));
    worst_ratio = std::max(worst_ratio, err / (*hi - *lo));
  }
  o.details.push_back("100 signals, max reconstruction error / peak-to-peak: " + fmt(worst_ratio) +
                      " (limit 1e-8)");

  const auto slow = tone(1.0, 1000, 250.0);
  const auto fast = tone(10.0, 1000, 250.0);
  std::vector<double> x(1000);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = slow[k] + fast[k];
  const auto d = emd::decompose(TimeSeries(x, 250.0));
  double fast_corr = d.imf_count() > 0 ? oracle::pearson(values(d.imfs[0]), fast) : 0.0;
  double slow_corr = -1.0;
  for (std::size_t k = 1; k < d.imf_count(); ++k) {
    slow_corr = std::max(slow_corr, oracle::pearson(values(d.imfs[k]), slow));
  }
  const double detrended = oracle::pearson(values(emd::detrend_reconstruct(d, 5.0)), fast);
  o.details.push_back("two-tone: IMF 1 vs 10 Hz r = " + fmt(fast_corr, 6) +
                      ", best later IMF vs 1 Hz r = " + fmt(slow_corr, 6) +
                      ", 5 Hz cutoff reconstruction vs 10 Hz r = " + fmt(detrended, 6) +
                      " (limit 0.95)");
  o.pass = worst_ratio <= 1e-8 && fast_corr >= 0.95 && slow_corr >= 0.95 && detrended >= 0.95;
  return o;
}

Outcome criterion_4() {
  Outcome o;
  std::mt19937_64 rng(404);
  std::size_t checked = 0;
  std::size_t wrong = 0;
  std::size_t short_ok = 0;
  std::size_t short_wrong = 0;
  bool identity = true;
  for (std::size_t n = 1; n <= 1000; ++n) {
    const TimeSeries x(oracle::gaussian_noise(n, rng), 250.0);
    if (!(entropy::coarse_grain(x, 1) == x)) identity = false;
    for (std::size_t tau = 1; tau <= 20; ++tau) {
      if (n < tau) {
        // floor(N / tau) = 0: an empty series cannot be represented.
        try {
          entropy::coarse_grain(x, tau);
          ++short_wrong;
        } catch (const Error& e) {
          (e.kind() == ErrorKind::TooShort ? short_ok : short_wrong) += 1;
        }
        continue;
      }
      ++checked;
      if (entropy::coarse_grain(x, tau).size() != n / tau) ++wrong;
    }
  }
  o.pass = wrong == 0 && identity && short_wrong == 0;
  o.details.push_back(std::to_string(checked) + " (N, tau) pairs with N >= tau, length mismatches: " +
                      std::to_string(wrong));
  o.details.push_back(std::to_string(short_ok) +
                      " pairs with N < tau (floor = 0) raise TooShort; unexpected: " +
                      std::to_string(short_wrong));
  o.details.push_back(std::string("tau = 1 identity exact for N = 1..1000: ") + (identity ? "yes" : "no"));
  return o;
}

double ratio_at_15(const MultiChannelEpoch& e) {
  double peak = 0.0;
  double total = 0.0;
  for (const auto& [name, ts] : e.channels()) {
    const auto x = values(ts);
    peak += oracle::dft_power(x, ts.sample_rate(), 15.0);
    for (double v : x) total += v * v;
  }
  return peak / total;
}

MultiChannelEpoch epoch_from(const Eigen::MatrixXd& m, double rate) {
  std::vector<MultiChannelEpoch::Channel> ch;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> x(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) x[static_cast<std::size_t>(c)] = m(r, c);
    ch.emplace_back("ch" + std::to_string(r + 1), TimeSeries(std::move(x), rate));
  }
  return MultiChannelEpoch(std::move(ch), Condition::ssvep(1));
}

Outcome criterion_5() {
  Outcome o;
  std::mt19937_64 rng(505);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> channels(2, 6);
  std::uniform_int_distribution<int> length(100, 1000);
  std::uniform_real_distribution<double> freq(5.0, 40.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int c = channels(rng);
    const int n = length(rng);
    const auto t = cca::make_template(freq(rng), static_cast<std::size_t>(n), 250.0);
    Eigen::MatrixXd x(c, n);
    for (int r = 0; r < c; ++r) {
      for (int k = 0; k < n; ++k) x(r, k) = g(rng);
      for (int q = 0; q < 4; ++q) x.row(r) += 0.3 * g(rng) * t.rows.row(q);
      x.row(r) = x.row(r) * std::exp(g(rng)) + Eigen::RowVectorXd::Constant(n, 3.0 * g(rng));
    }
    const auto sol = cca::cca_solve(x, t.rows);
    const auto want = oracle::cca_correlations(x, t.rows, cca::kDefaultRidge);
    for (std::size_t k = 0; k < sol.correlations.size(); ++k) {
      worst = std::max(worst, std::fabs(sol.correlations[k] - want[k]));
    }
  }
  o.details.push_back("100 random epochs (2-6 channels), max |rho - oracle rho|: " + fmt(worst) +
                      " (limit 1e-8)");

  const auto tmpl = cca::make_template(15.0, 2500, 250.0);
  std::size_t increased = 0;
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < 100; ++i) {
    const double ph = phase(rng);
    Eigen::MatrixXd x(4, 2500);
    for (int r = 0; r < 4; ++r) {
      const double w = 0.3 * g(rng);
      for (int k = 0; k < 2500; ++k) {
        const double s = std::sin(2.0 * std::numbers::pi * 15.0 * k / 250.0 + ph);
        x(r, k) = g(rng) + w * s;
      }
    }
    const auto e = epoch_from(x, 250.0);
    const auto cleaned = cca::denoise(e, cca::cca_solve(e, tmpl), 2);
    if (ratio_at_15(cleaned) > ratio_at_15(e)) ++increased;
  }
  o.details.push_back("planted 15 Hz epochs with a higher 15 Hz power fraction after keep=2: " +
                      std::to_string(increased) + " of 100 (limit 95)");
  o.pass = worst <= 1e-8 && increased >= 95;
  return o;
}

Outcome criterion_6() {
  Outcome o;
  double worst_p = 0.0;
  std::size_t cases = 0;
  for (double t : {0.2, 1.0, 2.1, 3.674, 6.0}) {
    for (double df : {1.0, 3.0, 4.0, 12.7, 39.0}) {
      worst_p = std::max(worst_p, std::fabs(stats::student_t_two_tailed_p(t, df) -
                                            oracle::t_two_tailed_p(t, df)));
      ++cases;
    }
  }
  std::mt19937_64 rng(606);
  for (int i = 0; i < 25; ++i) {
    auto a = oracle::gaussian_noise(4 + static_cast<std::size_t>(i % 9), rng);
    auto b = oracle::gaussian_noise(i % 3 == 0 ? a.size() : 3 + static_cast<std::size_t>(i % 11), rng);
    for (auto& v : b) v = v * (1.0 + 0.2 * i) + 0.1 * i;
    const auto kind = i % 3 == 0 ? stats::TestKind::Paired : stats::TestKind::Independent;
    const auto var = i % 2 ? stats::VarianceModel::Pooled : stats::VarianceModel::Welch;
    const auto r = stats::t_test(a, b, kind, var);
    worst_p = std::max(worst_p, std::fabs(r.p_value -
                                          oracle::t_two_tailed_p(r.statistic, r.degrees_of_freedom)));
    ++cases;
  }
  o.details.push_back(std::to_string(cases) + " t-test cases, max |p - integrated p|: " +
                      fmt(worst_p) + " (limit 1e-6)");

  std::uniform_int_distribution<std::size_t> len(1, 50);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t set_mismatch = 0;
  double worst_adj = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> p(len(rng));
    const double power = 1.0 + 4.0 * u(rng);
    for (auto& v : p) v = std::pow(u(rng), power);
    const auto got = stats::fdr_bh(p, 0.05);
    const auto want = oracle::benjamini_hochberg(p, 0.05);
    if (got.rejected != want.rejected) ++set_mismatch;
    for (std::size_t k = 0; k < p.size(); ++k) {
      worst_adj = std::max(worst_adj, std::fabs(got.adjusted_p[k] - want.adjusted[k]));
    }
  }
  o.details.push_back("1000 p-vectors, rejection-set mismatches: " + std::to_string(set_mismatch) +
                      ", max adjusted-p difference: " + fmt(worst_adj));

  double worst_icc = 0.0;
  std::uniform_int_distribution<int> subjects(3, 20);
  std::uniform_int_distribution<int> sessions(2, 4);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const int n = subjects(rng);
    const int k = sessions(rng);
    Eigen::MatrixXd m(n, k);
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
      const double level = g(rng);
      for (int c = 0; c < k; ++c) {
        m(s, c) = level + 0.7 * g(rng);
        rows[static_cast<std::size_t>(s)].push_back(m(s, c));
      }
    }
    worst_icc = std::max(worst_icc, std::fabs(stats::icc_oneway(m) - oracle::icc_oneway(rows)));
  }
  o.details.push_back("100 rating matrices, max |ICC - sums-of-squares ICC|: " + fmt(worst_icc) +
                      " (limit 1e-10)");
  o.pass = worst_p <= 1e-6 && set_mismatch == 0 && worst_adj <= 1e-15 && worst_icc <= 1e-10;
  return o;
}

Outcome criterion_7() {
  Outcome o;
  std::mt19937_64 rng(707);
  std::uniform_int_distribution<int> len(2, 50);
  std::uniform_int_distribution<int> level(0, 9);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto n = static_cast<std::size_t>(len(rng));
    std::vector<double> scores(n);
    std::vector<bool> pos(n);
    std::vector<classify::Label> labels(n);
    for (std::size_t k = 0; k < n; ++k) {
      scores[k] = i % 2 ? 0.1 * level(rng) : oracle::gaussian_noise(1, rng)[0];
      pos[k] = k == 0 || (k != 1 && (rng() & 1u));
      labels[k] = pos[k] ? classify::Label::PreIctal : classify::Label::InterIctal;
    }
    worst = std::max(worst, std::fabs(classify::roc_auc(scores, labels).auc - oracle::pair_auc(scores, pos)));
  }
  o.details.push_back("1000 score sets (2-50 points), max |AUC - pair statistic|: " + fmt(worst) +
                      " (limit 1e-12)");

  const auto cohort = synth::gen_feature_cohort(40, 10, 2.0, 7007);
  classify::CvOptions opt;  // 3 folds x 100 repeats, tuned
  Stopwatch sw;
  const auto sep = classify::cross_validate(classify::ModelKind::AdaBoost, cohort, 70, opt);
  const double elapsed = sw.wall();
  o.details.push_back("separable cohort (40 subjects x 2 phases, margin 2 SD, 10 features): AdaBoost "
                      "3-fold x 100 accuracy " + fmt(sep.accuracy.mean) + " (SD " +
                      fmt(sep.accuracy.sd) + "), AUC " + fmt(sep.auc.mean) + ", " +
                      fmt(elapsed, 3) + " s (limits >= 0.90, < 60 s)");

  auto shuffled = cohort;
  std::vector<classify::Label> labels;
  for (const auto& s : shuffled) labels.push_back(s.label);
  std::mt19937_64 shuffle_rng(7008);
  std::shuffle(labels.begin(), labels.end(), shuffle_rng);
  for (std::size_t k = 0; k < shuffled.size(); ++k) shuffled[k].label = labels[k];
  const auto null = classify::cross_validate(classify::ModelKind::AdaBoost, shuffled, 71, opt);
  o.details.push_back("label-shuffled cohort: accuracy " + fmt(null.accuracy.mean) + " (SD " +
                      fmt(null.accuracy.sd) + ") (limit [0.40, 0.60])");
  o.pass = worst <= 1e-12 && sep.accuracy.mean >= 0.90 && null.accuracy.mean >= 0.40 &&
           null.accuracy.mean <= 0.60 && elapsed < 60.0;
  return o;
}

Outcome criterion_8() {
  Outcome o;
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());

  // Trending cohort at the default spec: 40 controls, 40 patients, 60 s
  // resting blocks, 10 s SSVEP trials.
  synth::CohortSpec spec;
  const auto data = kWork / "trend_data";
  synth::gen_cohort(spec, data, cores);
  pipeline::PipelineConfig cfg;
  cfg.workers = cores;
  Stopwatch sw;
  const auto report = pipeline::run_pipeline(cfg, data, kWork / "trend_out");
  const double wall = sw.wall();
  const double cpu = sw.cpu();

  Stopwatch cv_sw;
  classify::CvOptions cv_opt;
  cv_opt.folds = cfg.folds;
  cv_opt.repeats = cfg.repeats;
  cv_opt.tune = cfg.tune;
  if (!report.features.empty()) {
    classify::cross_validate(cfg.model, report.features, derive_seed(cfg.seed, "classify"), cv_opt);
  }
  const double serial = std::min(cv_sw.cpu(), cpu);
  const double projected = serial + (cpu - serial) / 8.0;

  const auto& means = report.mean_tv.at("occipital");
  bool pattern = true;
  std::string hc_line = "HC:";
  std::string inter_line = "inter:";
  std::string pre_line = "pre:";
  for (std::size_t tau = 11; tau <= cfg.scales; ++tau) {
    const auto& h = means.at("hc")[tau - 1];
    const auto& i = means.at("inter")[tau - 1];
    const auto& p = means.at("pre")[tau - 1];
    pattern = pattern && h && i && p && *h > 0.0 && *i > 0.0 && *p < 0.0;
    hc_line += " " + (h ? fmt(*h, 3) : std::string("NA"));
    inter_line += " " + (i ? fmt(*i, 3) : std::string("NA"));
    pre_line += " " + (p ? fmt(*p, 3) : std::string("NA"));
  }
  const auto sig = report.panel(pipeline::kHeadlinePanel).significant_scales();
  std::string sig_list;
  for (auto s : sig) sig_list += (sig_list.empty() ? "" : ",") + std::to_string(s);
  o.details.push_back("trending cohort, mean occipital TV at tau 11..20");
  o.details.push_back("  " + hc_line);
  o.details.push_back("  " + inter_line);
  o.details.push_back("  " + pre_line);
  o.details.push_back("sign pattern (HC > 0, inter > 0, pre < 0 at every tau >= 11): " +
                      std::string(pattern ? "yes" : "no"));
  o.details.push_back(std::string(pipeline::kHeadlinePanel) + " FDR-significant scales: " +
                      (sig.empty() ? std::string("none") : sig_list));
  if (auto it = report.negative_tv_at_top_scale.find("occipital_pre");
      it != report.negative_tv_at_top_scale.end()) {
    o.details.push_back("pre-ictal subjects with negative TV at tau 20: " +
                        std::to_string(it->second.first) + " of " + std::to_string(it->second.second));
  }
  if (report.cv) {
    o.details.push_back("AdaBoost CV on the occipital TV features: accuracy " +
                        fmt(report.cv->accuracy.mean) + ", AUC " + fmt(report.cv->auc.mean));
  }
  o.details.push_back("pipeline over " + std::to_string(report.sessions.size()) + " sessions: wall " +
                      fmt(wall, 4) + " s on " + std::to_string(cores) + " core(s), CPU " +
                      fmt(cpu, 4) + " s, classification (serial) " + fmt(serial, 4) + " s");
  o.details.push_back("projected wall time on 8 cores: " + fmt(projected, 4) + " s (limit 600 s)");
  const bool fast_enough = std::min(wall, projected) < 600.0;

  // Null cohorts: zero trend in every group, 20 seeds fixed in advance.
  std::size_t clean = 0;
  std::string per_run;
  double mean_sum = 0.0;
  for (std::uint64_t seed = 1001; seed <= 1020; ++seed) {
    synth::CohortSpec null_spec;
    null_spec.n_hc = 2;
    null_spec.n_patients = 12;
    null_spec.trend_hc = null_spec.trend_inter = null_spec.trend_pre = 0.0;
    null_spec.rest_seconds = 10.0;
    null_spec.seed = seed;
    const auto dir = kWork / ("null_" + std::to_string(seed));
    synth::gen_cohort(null_spec, dir / "data", cores);
    pipeline::PipelineConfig null_cfg;
    null_cfg.workers = cores;
    null_cfg.run_classification = false;
    const auto r = pipeline::run_pipeline(null_cfg, dir / "data", dir / "out");
    const auto n_sig = r.panel(pipeline::kHeadlinePanel).significant_scales().size();
    if (n_sig == 0) ++clean;
    per_run += (per_run.empty() ? "" : " ") + std::to_string(n_sig);
    const auto& pre20 = r.mean_tv.at("occipital").at("pre")[cfg.scales - 1];
    if (pre20) mean_sum += *pre20;
    fs::remove_all(dir);
  }
  o.details.push_back("null cohorts (12 patients, 2 controls, seeds 1001..1020): runs with zero "
                      "rejections in " + std::string(pipeline::kHeadlinePanel) + ": " +
                      std::to_string(clean) + " of 20 (limit 19)");
  o.details.push_back("  rejections per run: " + per_run);
  o.details.push_back("  average pre-ictal mean TV at tau 20 across null runs: " + fmt(mean_sum / 20.0, 3));

  o.pass = pattern && !sig.empty() && clean >= 19 && fast_enough;
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FUZENTRA_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  if (fs::is_regular_file(root)) {
    std::ifstream in(root, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[""] = ss.str();
    return files;
  }
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[fs::relative(e.path(), root).string()] = ss.str();
  }
  return files;
}

Outcome criterion_9() {
  Outcome o;
  const auto dir = kWork / "determinism";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "spec.txt") << "n_hc = 3\nn_patients = 6\nrest_seconds = 6\nssvep_seconds = 4\n"
                                       "hc_sessions = 2\n";
    std::ofstream(dir / "run.cfg") << "repeats = 5\npersist_signals = true\n";
  }
  const std::string global = "--seed 77 --workers 2 --config " + (dir / "run.cfg").string() + " ";
  const std::string subject = (dir / "cohort_1" / "P02" / "session_1").string();
  struct Case {
    std::string name;
    std::function<std::string(int)> args;  // run index -> arguments
    std::function<fs::path(int)> output;
  };
  auto out = [&](const std::string& stem, int run) { return dir / (stem + "_" + std::to_string(run)); };
  std::vector<Case> cases{
      {"synth", [&](int r) { return "synth --spec " + (dir / "spec.txt").string() + " --out " + out("cohort", r).string(); },
       [&](int r) { return out("cohort", r); }},
      {"pipeline", [&](int r) { return "pipeline --data " + (dir / "cohort_1").string() + " --out " + out("pipeline", r).string(); },
       [&](int r) { return out("pipeline", r); }},
      {"decompose", [&](int r) { return "decompose --input " + subject + "/rest_2.csv --channel Oz --out " + out("imfs", r).string(); },
       [&](int r) { return out("imfs", r); }},
      {"entropy", [&](int r) { return "entropy --input " + subject + "/ssvep_1.csv --channel O2 --out " + out("entropy", r).string() + ".csv"; },
       [&](int r) { return fs::path(out("entropy", r).string() + ".csv"); }},
      {"denoise", [&](int r) { return "denoise --input " + subject + "/ssvep_5.csv --out " + out("denoised", r).string() + ".csv"; },
       [&](int r) { return fs::path(out("denoised", r).string() + ".csv"); }},
      {"stats", [&](int r) { return "stats --input " + (dir / "pipeline_1" / "tv_occipital.csv").string() +
                                    " --group-a hc --group-b pre --test independent --out " + out("stats", r).string() + ".csv"; },
       [&](int r) { return fs::path(out("stats", r).string() + ".csv"); }},
      {"classify", [&](int r) { return "classify --input " + (dir / "pipeline_1" / "features.csv").string() + " --out-dir " + out("cv", r).string(); },
       [&](int r) { return out("cv", r); }},
  };
  bool all = true;
  for (const auto& c : cases) {
    const int rc1 = run_cli(global + c.args(1));
    const int rc2 = run_cli(global + c.args(2));
    bool same = rc1 == 0 && rc2 == 0;
    std::size_t files = 0;
    if (same) {
      const auto a = snapshot(c.output(1));
      const auto b = snapshot(c.output(2));
      files = a.size();
      same = !a.empty() && a == b;
    }
    all = all && same;
    o.details.push_back(c.name + ": exit codes " + std::to_string(rc1) + "/" + std::to_string(rc2) +
                        ", " + std::to_string(files) + " file(s), byte-identical: " + (same ? "yes" : "no"));
  }
  o.pass = all;
  return o;
}

}  // namespace

int main() {
  fs::remove_all(kWork);
  fs::create_directories(kWork);
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
  Outcome nonneg;
  Outcome first;
  bool first_done = false;
  auto ensure_first = [&] {
    if (!first_done) {
      first = criterion_1_and_2(nonneg);
      first_done = true;
    }
  };
  criteria.emplace_back("entropy estimators match naive oracles", [&] { ensure_first(); return first; });
  criteria.emplace_back("raw fuzzy entropy is nonnegative", [&] { ensure_first(); return nonneg; });
  criteria.emplace_back("EMD reconstruction and two-tone separation", criterion_3);
  criteria.emplace_back("coarse-graining lengths and identity", criterion_4);
  criteria.emplace_back("CCA oracle and planted 15 Hz denoising", criterion_5);
  criteria.emplace_back("t-test, FDR and ICC oracles", criterion_6);
  criteria.emplace_back("classification harness", criterion_7);
  criteria.emplace_back("end-to-end synthetic reproduction", criterion_8);
  criteria.emplace_back("determinism of every subcommand", criterion_9);

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.details.push_back(std::string("error: ") + e.what());
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << (i + 1) << " " << (o.pass ? "PASS" : "FAIL") << ": "
              << criteria[i].first << '\n';
    for (const auto& d : o.details) std::cout << "    " << d << '\n';
    std::cout.flush();
  }
  fs::remove_all(kWork);
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << " of " << criteria.size()
            << " criteria passed\n";
  return failed;
}
