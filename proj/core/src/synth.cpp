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

#include "fuzentra/synth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <thread>

#include <unsupported/Eigen/FFT>

#include "fuzentra/config.hpp"
#include "fuzentra/csv_io.hpp"
#include "fuzentra/error.hpp"
#include "fuzentra/seed.hpp"

namespace fuzentra::synth {

std::string_view to_string(Group group) {
  switch (group) {
    case Group::HealthyControl: return "hc";
    case Group::InterIctal: return "inter";
    case Group::PreIctal: return "pre";
  }
  return "?";
}

void CohortSpec::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); };
  if (n_hc < 1 || n_patients < 1) fail("n_hc and n_patients must be >= 1");
  for (double v : {trend_hc, trend_inter, trend_pre, beta0}) {
    if (!std::isfinite(v)) fail("trends and beta0 must be finite");
  }
  if (!(sample_rate > 0.0)) fail("sample_rate must be > 0");
  if (!(sample_rate > 4.0 * kStimulusHz)) fail("sample_rate must exceed four times the 15 Hz stimulus");
  if (!(rest_seconds > 0.0) || !(ssvep_seconds > 0.0)) fail("epoch durations must be > 0");
  if (!(noise_rms_uv > 0.0)) fail("noise_rms_uv must be > 0");
  if (!(ssvep_amplitude_uv >= 0.0)) fail("ssvep_amplitude_uv must be >= 0");
  if (!(subject_beta_sd >= 0.0)) fail("subject_beta_sd must be >= 0");
  if (hc_sessions < 1 || hc_sessions > 2) fail("hc_sessions must be 1 or 2");
}

double CohortSpec::trend(Group group) const {
  switch (group) {
    case Group::HealthyControl: return trend_hc;
    case Group::InterIctal: return trend_inter;
    case Group::PreIctal: return trend_pre;
  }
  return 0.0;
}

CohortSpec parse_spec(std::istream& in) {
  CohortSpec s;
  for (const auto& e : config::parse(in)) {
    if (e.key == "n_hc") s.n_hc = config::to_size(e);
    else if (e.key == "n_patients") s.n_patients = config::to_size(e);
    else if (e.key == "trend_hc") s.trend_hc = config::to_double(e);
    else if (e.key == "trend_inter") s.trend_inter = config::to_double(e);
    else if (e.key == "trend_pre") s.trend_pre = config::to_double(e);
    else if (e.key == "beta0") s.beta0 = config::to_double(e);
    else if (e.key == "seed") s.seed = config::to_u64(e);
    else if (e.key == "rest_seconds") s.rest_seconds = config::to_double(e);
    else if (e.key == "ssvep_seconds") s.ssvep_seconds = config::to_double(e);
    else if (e.key == "sample_rate") s.sample_rate = config::to_double(e);
    else if (e.key == "noise_rms_uv") s.noise_rms_uv = config::to_double(e);
    else if (e.key == "ssvep_amplitude_uv") s.ssvep_amplitude_uv = config::to_double(e);
    else if (e.key == "subject_beta_sd") s.subject_beta_sd = config::to_double(e);
    else if (e.key == "hc_sessions") s.hc_sessions = config::to_size(e);
    else config::unknown_key(e);
  }
  s.validate();
  return s;
}

CohortSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open spec file " + path.string());
  return parse_spec(in);
}

std::vector<double> colored_noise(std::size_t n, double beta, std::mt19937_64& rng,
                                  double max_fraction) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "colored noise needs n >= 2");
  if (!(max_fraction > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "colored noise cutoff must be positive");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> white(n);
  for (auto& v : white) v = gauss(rng);

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, white);
  spec[0] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t f = std::min(k, n - k);
    if (2.0 * static_cast<double>(f) > max_fraction * static_cast<double>(n)) {
      spec[k] = 0.0;
      continue;
    }
    spec[k] *= std::pow(static_cast<double>(f), -0.5 * beta);
  }
  std::vector<double> out;
  fft.inv(out, spec);
  out.resize(n);

  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double& v : out) {
    v -= mean;
    ss += v * v;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  for (double& v : out) v /= sd;
  return out;
}

namespace {

bool is_occipital(const std::string& name) { return name.front() == 'O'; }

// Expected share of band-limited colored_noise power between 1 and 30 Hz.
double in_band_fraction(std::size_t n, double rate, double beta) {
  double band = 0.0;
  double total = 0.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double p = std::pow(static_cast<double>(k), -beta);
    const double f = static_cast<double>(k) * rate / static_cast<double>(n);
    if (f > kAcquisitionLowpassHz) break;
    total += p;
    if (f >= 1.0 && f <= 30.0) band += p;
  }
  return band / total;
}

MultiChannelEpoch make_epoch(const CohortSpec& spec, double seconds, double beta, bool ssvep,
                             Condition condition, std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * spec.sample_rate));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const double phi1 = phase(rng);
  const double phi2 = phase(rng);
  std::vector<MultiChannelEpoch::Channel> channels;
  for (const auto& name : kChannels) {
    std::vector<double> x =
        colored_noise(n, beta, rng, kAcquisitionLowpassHz / (0.5 * spec.sample_rate));
    const double scale = spec.noise_rms_uv / std::sqrt(in_band_fraction(n, spec.sample_rate, beta));
    for (auto& v : x) v *= scale;
    // one stimulus-locked source, seen by each occipital channel with its own gain
    const double gain = 0.8 + 0.4 * phase(rng) / (2.0 * std::numbers::pi);
    if (ssvep && is_occipital(name)) {
      const double a = spec.ssvep_amplitude_uv * gain;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / spec.sample_rate;
        const double w = 2.0 * std::numbers::pi * kStimulusHz * t;
        x[i] += a * std::sin(w + phi1) + 0.5 * a * std::sin(2.0 * w + phi2);
      }
    }
    channels.emplace_back(name, TimeSeries(std::move(x), spec.sample_rate));
  }
  return MultiChannelEpoch(std::move(channels), condition);
}

std::string subject_id(const char* prefix, std::size_t index, std::size_t count) {
  const std::size_t width = std::max<std::size_t>(2, std::to_string(count).size());
  std::string digits = std::to_string(index);
  digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

}  // namespace

std::vector<MultiChannelEpoch> gen_subject(const CohortSpec& spec, Group group,
                                           std::uint64_t subject_seed) {
  spec.validate();
  std::mt19937_64 rng(subject_seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  const double beta_subject = spec.beta0 + spec.subject_beta_sd * jitter(rng);
  const double trend = spec.trend(group);

  std::vector<MultiChannelEpoch> epochs;
  for (int k = 1; k <= 3; ++k) {
    epochs.push_back(make_epoch(spec, spec.rest_seconds, beta_subject, false,
                                Condition::resting(k), rng));
  }
  for (int k = 1; k <= 5; ++k) {
    const double beta = beta_subject - trend * static_cast<double>(k - 1);
    epochs.push_back(make_epoch(spec, spec.ssvep_seconds, beta, true, Condition::ssvep(k), rng));
  }
  return epochs;
}

std::vector<SubjectRecord> gen_cohort(const CohortSpec& spec, const std::filesystem::path& out,
                                      std::size_t workers) {
  spec.validate();
  std::vector<SubjectRecord> subjects;
  for (std::size_t i = 1; i <= spec.n_hc; ++i) {
    SubjectRecord r{subject_id("HC", i, spec.n_hc), false, {}};
    for (std::size_t s = 0; s < spec.hc_sessions; ++s) {
      r.sessions.push_back({Group::HealthyControl, {}});
    }
    subjects.push_back(std::move(r));
  }
  for (std::size_t i = 1; i <= spec.n_patients; ++i) {
    subjects.push_back({subject_id("P", i, spec.n_patients), true,
                        {{Group::InterIctal, {}}, {Group::PreIctal, {}}}});
  }
  for (auto& s : subjects) {
    for (std::size_t k = 0; k < s.sessions.size(); ++k) {
      s.sessions[k].directory = s.sessions.size() == 1
                                    ? std::filesystem::path(s.subject_id)
                                    : std::filesystem::path(s.subject_id) /
                                          ("session_" + std::to_string(k + 1));
    }
  }

  std::filesystem::create_directories(out);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= subjects.size()) return;
      try {
        const auto& s = subjects[i];
        for (std::size_t k = 0; k < s.sessions.size(); ++k) {
          const auto seed = derive_seed(derive_seed(spec.seed, "synth/" + s.subject_id), "session", k);
          const auto dir = out / s.sessions[k].directory;
          std::filesystem::create_directories(dir);
          for (const auto& epoch : gen_subject(spec, s.sessions[k].group, seed)) {
            csv::write_epoch(dir / (to_string(epoch.condition()) + ".csv"), epoch);
          }
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(workers, 1, subjects.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  csv::Table labels{{"subject_id", "group", "phase_per_session"}, {}};
  for (const auto& s : subjects) {
    std::string phases;
    for (const auto& session : s.sessions) {
      if (!phases.empty()) phases += ';';
      phases += to_string(session.group);
    }
    labels.rows.push_back({s.subject_id, s.patient ? "patient" : "hc", phases});
  }
  csv::write_table(out / "labels.csv", labels);
  return subjects;
}

std::vector<classify::SubjectFeatures> gen_feature_cohort(std::size_t n_subjects,
                                                          std::size_t dimension, double margin,
                                                          std::uint64_t seed) {
  if (n_subjects < 1 || dimension < 1) {
    throw Error(ErrorKind::InvalidArgument, "feature cohort needs >= 1 subject and feature");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<classify::SubjectFeatures> out;
  for (std::size_t i = 1; i <= n_subjects; ++i) {
    const std::string id = subject_id("P", i, n_subjects);
    for (auto label : {classify::Label::InterIctal, classify::Label::PreIctal}) {
      const double centre = (label == classify::Label::PreIctal ? 0.5 : -0.5) * margin;
      classify::SubjectFeatures s{id, label, std::vector<double>(dimension)};
      for (auto& v : s.features) v = centre + gauss(rng);
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace fuzentra::synth
