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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fuzentra/classify.hpp"
#include "fuzentra/entropy.hpp"
#include "fuzentra/signal.hpp"
#include "fuzentra/stats.hpp"

// End-to-end run from a cohort directory to statistics and classification.
//
// Per session: decimate to target_rate -> FIR band-pass -> amplitude
// rejection -> CCA denoise (SSVEP epochs) -> per-channel multiscale entropy
// -> region average -> baseline = mean over resting blocks -> RE_k per trial
// -> transitional variance RE_5 - RE_1.
namespace fuzentra::pipeline {

enum class Phase { HealthyControl, InterIctal, PreIctal };
std::string_view to_string(Phase phase);  // hc|inter|pre
Phase parse_phase(std::string_view text);

enum class CcaApply { Ssvep, None };

struct PipelineConfig {
  double target_rate = 250.0;
  double band_low_hz = 1.0;
  double band_high_hz = 30.0;
  std::size_t fir_taps = signal::kDefaultBandpassTaps;
  double artifact_limit_uv = signal::kDefaultArtifactLimitUv;

  entropy::Method method = entropy::Method::InherentFuzzEn;
  entropy::EntropyParams params{};
  std::size_t scales = entropy::kDefaultScales;

  CcaApply cca_apply = CcaApply::Ssvep;
  double cca_f1 = 15.0;
  std::size_t cca_keep = 2;

  std::vector<std::string> occipital_channels = {"O1", "Oz", "O2"};
  std::vector<std::string> prefrontal_channels = {"Fpz"};

  double alpha = 0.05;
  stats::FdrMethod fdr = stats::FdrMethod::BenjaminiHochberg;
  stats::VarianceModel variance = stats::VarianceModel::Welch;

  bool run_classification = true;
  classify::ModelKind model = classify::ModelKind::AdaBoost;
  std::size_t folds = 3;
  std::size_t repeats = 100;
  bool tune = true;
  std::vector<std::size_t> feature_scales{std::begin(classify::kDefaultFeatureScales),
                                          std::end(classify::kDefaultFeatureScales)};

  std::uint64_t seed = 1;
  std::size_t workers = 1;
  bool persist_signals = false;

  void validate() const;  // throws ConfigError
};

// Keys match the field names, plus m, n and r for the entropy parameters.
// Enumerations use the CLI spellings; channel and scale lists are comma
// separated. Unknown keys throw ConfigError.
PipelineConfig parse_config(std::istream& in, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});
void write_config(std::ostream& out, const PipelineConfig& cfg);

struct SessionEntry {
  std::string subject_id;
  std::size_t session = 1;  // 1-based
  Phase phase = Phase::HealthyControl;
  std::filesystem::path directory;
};

// Reads labels.csv and resolves session directories. Throws LayoutError.
std::vector<SessionEntry> load_layout(const std::filesystem::path& data_dir);

struct EpochRejection {
  std::string epoch;
  signal::Rejection rejection;
};

struct RegionResult {
  entropy::Region region = entropy::Region::Occipital;
  entropy::EntropyProfile baseline;
  std::vector<entropy::RelativeProfile> relative;  // trials 1..5
  std::vector<std::optional<double>> transitional;
};

struct SessionResult {
  SessionEntry entry;
  std::vector<RegionResult> regions;  // occipital, prefrontal
  std::vector<EpochRejection> rejections;

  const RegionResult& region(entropy::Region r) const;
};

// One session. Module errors are rethrown with subject, session and epoch
// in the message. Intermediate CSVs go to `out_dir` when it is non-empty.
SessionResult process_session(const PipelineConfig& cfg, const SessionEntry& entry,
                              const std::filesystem::path& data_dir,
                              const std::filesystem::path& out_dir = {});

// Per-subject per-scale values, the `subject_id,group,tau_1..tau_T` format.
struct ScaleRow {
  std::string subject_id;
  std::string group;
  std::vector<std::optional<double>> values;
};
using ScaleTable = std::vector<ScaleRow>;

ScaleTable read_scale_table(const std::filesystem::path& path);
void write_scale_table(const std::filesystem::path& path, const ScaleTable& table);

struct PanelResult {
  std::string name;
  std::vector<std::optional<stats::TestResult>> tests;  // per scale
  std::vector<std::optional<double>> adjusted_p;
  std::vector<bool> rejected;
  std::vector<std::size_t> n;  // pairs or a_n + b_n used per scale

  std::vector<std::size_t> significant_scales() const;  // 1-based
};

// Per scale, compares rows of group_a in `a` with rows of group_b in `b`.
// Paired tests match rows by subject_id. Undefined values drop the row or
// pair at that scale; a scale whose test cannot run stays undefined and is
// left out of the FDR family.
PanelResult compare_groups(std::string name, const ScaleTable& a, std::string_view group_a,
                           const ScaleTable& b, std::string_view group_b, stats::TestKind kind,
                           stats::VarianceModel variance, double alpha, stats::FdrMethod fdr);

void write_panel(std::ostream& out, const PanelResult& panel);
void write_panel(const std::filesystem::path& path, const PanelResult& panel);

// Name of the panel the headline criteria use: inter-ictal vs pre-ictal
// transitional variance, occipital region, paired.
inline constexpr std::string_view kHeadlinePanel = "occipital_tv_inter_vs_pre";

struct RunReport {
  std::vector<SessionResult> sessions;  // sorted by subject_id, then session
  std::vector<PanelResult> panels;
  // region -> group -> per-scale mean transitional variance
  std::map<std::string, std::map<std::string, std::vector<std::optional<double>>>> mean_tv;
  std::map<std::string, std::pair<std::size_t, std::size_t>> negative_tv_at_top_scale;
  std::map<std::string, std::vector<std::optional<double>>> icc;  // region -> per scale
  std::vector<classify::SubjectFeatures> features;
  std::optional<classify::CvSummary> cv;
  std::vector<std::string> notes;

  const PanelResult& panel(std::string_view name) const;
};

RunReport run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& data_dir,
                       const std::filesystem::path& out_dir);

// Feature CSV: subject_id,label,f1..fK
std::vector<classify::SubjectFeatures> read_features(const std::filesystem::path& path);
void write_features(const std::filesystem::path& path,
                    const std::vector<classify::SubjectFeatures>& features);

void write_cv_summary(const std::filesystem::path& path, const classify::CvSummary& summary);
void write_roc_points(const std::filesystem::path& path, const std::vector<classify::RocPoint>& points);

}  // namespace fuzentra::pipeline
