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
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fuzentra/classify.hpp"
#include "fuzentra/time_series.hpp"

// Synthetic SSVEP/EEG cohorts. Broadband activity is Gaussian noise with a
// 1/f^beta power spectrum, low-passed at 45 Hz and scaled to a fixed RMS
// within 1-30 Hz. Within a session, SSVEP trial k uses
// beta0 - trend * (k - 1) and resting blocks use beta0. After band-limiting
// and CCA denoising, fuzzy entropy at scales 11..20 falls monotonically as
// beta rises over [0.5, 3.5], so a positive trend means coarse-scale entropy
// rises across trials. The defaults keep every trial in that range.
namespace fuzentra::synth {

enum class Group { HealthyControl, InterIctal, PreIctal };

std::string_view to_string(Group group);  // hc|inter|pre

inline const std::vector<std::string> kChannels = {"O1", "Oz", "O2", "Fpz"};

// Spec file: flat `key = value` lines, '#' starts a comment.
//   n_hc, n_patients          subject counts (>= 1)
//   trend_hc, trend_inter, trend_pre   per-trial entropy drift (beta falls by trend)
//   beta0                     resting and first-trial spectral exponent
//   seed                      top-level seed
// Optional keys:
//   rest_seconds (60), ssvep_seconds (10), sample_rate (250),
//   noise_rms_uv (6, RMS within 1-30 Hz), ssvep_amplitude_uv (2), subject_beta_sd (0.05),
//   hc_sessions (1; 2 records a retest session per control)
struct CohortSpec {
  std::size_t n_hc = 40;
  std::size_t n_patients = 40;
  double trend_hc = 0.25;
  double trend_inter = 0.125;
  double trend_pre = -0.125;
  double beta0 = 2.5;
  std::uint64_t seed = 1;

  double rest_seconds = 60.0;
  double ssvep_seconds = 10.0;
  double sample_rate = 250.0;
  double noise_rms_uv = 6.0;
  double ssvep_amplitude_uv = 2.0;
  double subject_beta_sd = 0.05;
  std::size_t hc_sessions = 1;

  void validate() const;  // throws ConfigError
  double trend(Group group) const;
};

CohortSpec parse_spec(std::istream& in);                   // ConfigError on bad/unknown keys
CohortSpec load_spec(const std::filesystem::path& path);

inline constexpr double kStimulusHz = 15.0;

// Zero-mean Gaussian noise with power spectrum proportional to 1/f^beta,
// scaled to unit sample SD. The DC bin is zeroed, and so is every bin above
// max_fraction of the Nyquist frequency.
std::vector<double> colored_noise(std::size_t n, double beta, std::mt19937_64& rng,
                                  double max_fraction = 1.0);

// Synthetic recordings carry no broadband power above this frequency.
inline constexpr double kAcquisitionLowpassHz = 45.0;

// 3 resting epochs followed by 5 SSVEP epochs for one recording session.
std::vector<MultiChannelEpoch> gen_subject(const CohortSpec& spec, Group group,
                                           std::uint64_t subject_seed);

struct SessionRecord {
  Group group = Group::HealthyControl;
  std::filesystem::path directory;  // relative to the cohort root
};

struct SubjectRecord {
  std::string subject_id;
  bool patient = false;
  std::vector<SessionRecord> sessions;
};

// Writes the cohort in the pipeline layout and returns what was written:
//
//   <out>/labels.csv                 subject_id,group,phase_per_session
//   <out>/<id>/{rest_1..3,ssvep_1..5}.csv          one-session subjects
//   <out>/<id>/session_<k>/{...}.csv              multi-session subjects
//
// group is hc or patient; phase_per_session lists one of hc|inter|pre per
// session, separated by ';'. Patients record an inter-ictal session and a
// pre-ictal session. Subjects are generated in parallel on `workers` threads.
std::vector<SubjectRecord> gen_cohort(const CohortSpec& spec, const std::filesystem::path& out,
                                      std::size_t workers = 1);

// Feature-level cohort: n_subjects patients with one inter-ictal and one
// pre-ictal vector each. Class means differ by `margin` per-feature SDs.
std::vector<classify::SubjectFeatures> gen_feature_cohort(std::size_t n_subjects,
                                                          std::size_t dimension, double margin,
                                                          std::uint64_t seed);

}  // namespace fuzentra::synth
