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

#include "fuzentra/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "fuzentra/cca.hpp"
#include "fuzentra/config.hpp"
#include "fuzentra/csv_io.hpp"
#include "fuzentra/error.hpp"
#include "fuzentra/seed.hpp"

namespace fuzentra::pipeline {

namespace fs = std::filesystem;

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::HealthyControl: return "hc";
    case Phase::InterIctal: return "inter";
    case Phase::PreIctal: return "pre";
  }
  return "?";
}

Phase parse_phase(std::string_view text) {
  if (text == "hc") return Phase::HealthyControl;
  if (text == "inter") return Phase::InterIctal;
  if (text == "pre") return Phase::PreIctal;
  throw Error(ErrorKind::LayoutError, "unknown phase '" + std::string(text) + "'");
}

// ---------------------------------------------------------------- config

void PipelineConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); };
  if (!(target_rate > 0.0)) fail("target_rate must be > 0");
  if (!(band_low_hz > 0.0 && band_low_hz < band_high_hz && band_high_hz < target_rate / 2.0)) {
    fail("band must satisfy 0 < band_low_hz < band_high_hz < target_rate / 2");
  }
  if (fir_taps < 31 || fir_taps % 2 == 0) fail("fir_taps must be odd and >= 31");
  if (!(artifact_limit_uv > 0.0)) fail("artifact_limit_uv must be > 0");
  try {
    params.validate();
  } catch (const Error& e) {
    fail(e.detail());
  }
  if (scales < 1) fail("scales must be >= 1");
  if (!(cca_f1 > 0.0)) fail("cca_f1 must be > 0");
  if (!(2.0 * cca_f1 < target_rate / 2.0)) fail("cca_f1 harmonic must lie below Nyquist");
  if (cca_keep < 1) fail("cca_keep must be >= 1");
  if (occipital_channels.empty() || prefrontal_channels.empty()) {
    fail("occipital_channels and prefrontal_channels must be non-empty");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must lie in (0, 1)");
  if (folds < 2) fail("folds must be >= 2");
  if (repeats < 1) fail("repeats must be >= 1");
  if (feature_scales.empty()) fail("feature_scales must be non-empty");
  for (auto s : feature_scales) {
    if (s < 1 || s > scales) fail("feature_scales must lie within 1..scales");
  }
  if (workers < 1) fail("workers must be >= 1");
}

namespace {

std::vector<std::string> to_name_list(const config::Entry& e) {
  std::vector<std::string> out;
  for (auto& s : csv::split(e.value)) {
    const auto b = s.find_first_not_of(' ');
    const auto t = s.find_last_not_of(' ');
    if (b == std::string::npos) {
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(e.line) + ": empty name in '" +
                                              e.key + "'");
    }
    out.push_back(s.substr(b, t - b + 1));
  }
  return out;
}

template <typename F>
auto as_config_error(const config::Entry& e, F&& parse) {
  try {
    return parse(e.value);
  } catch (const Error& err) {
    throw Error(ErrorKind::ConfigError,
                "line " + std::to_string(e.line) + ": " + e.key + ": " + err.detail());
  }
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

}  // namespace

PipelineConfig parse_config(std::istream& in, PipelineConfig c) {
  for (const auto& e : config::parse(in)) {
    const auto& k = e.key;
    if (k == "target_rate") c.target_rate = config::to_double(e);
    else if (k == "band_low_hz") c.band_low_hz = config::to_double(e);
    else if (k == "band_high_hz") c.band_high_hz = config::to_double(e);
    else if (k == "fir_taps") c.fir_taps = config::to_size(e);
    else if (k == "artifact_limit_uv") c.artifact_limit_uv = config::to_double(e);
    else if (k == "method") c.method = as_config_error(e, entropy::parse_method);
    else if (k == "m") c.params.m = config::to_size(e);
    else if (k == "n") c.params.n = config::to_double(e);
    else if (k == "r") c.params.r = config::to_double(e);
    else if (k == "scales") c.scales = config::to_size(e);
    else if (k == "cca_apply") {
      if (e.value == "ssvep") c.cca_apply = CcaApply::Ssvep;
      else if (e.value == "none") c.cca_apply = CcaApply::None;
      else throw Error(ErrorKind::ConfigError, "line " + std::to_string(e.line) +
                                                   ": cca_apply expects ssvep or none");
    }
    else if (k == "cca_f1") c.cca_f1 = config::to_double(e);
    else if (k == "cca_keep") c.cca_keep = config::to_size(e);
    else if (k == "occipital_channels") c.occipital_channels = to_name_list(e);
    else if (k == "prefrontal_channels") c.prefrontal_channels = to_name_list(e);
    else if (k == "alpha") c.alpha = config::to_double(e);
    else if (k == "fdr") c.fdr = as_config_error(e, stats::parse_fdr_method);
    else if (k == "variance") c.variance = as_config_error(e, stats::parse_variance_model);
    else if (k == "run_classification") c.run_classification = config::to_bool(e);
    else if (k == "model") c.model = as_config_error(e, classify::parse_model_kind);
    else if (k == "folds") c.folds = config::to_size(e);
    else if (k == "repeats") c.repeats = config::to_size(e);
    else if (k == "tune") c.tune = config::to_bool(e);
    else if (k == "feature_scales") c.feature_scales = config::to_size_list(e);
    else if (k == "seed") c.seed = config::to_u64(e);
    else if (k == "workers") c.workers = config::to_size(e);
    else if (k == "persist_signals") c.persist_signals = config::to_bool(e);
    else config::unknown_key(e);
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const fs::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config file " + path.string());
  return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const PipelineConfig& c) {
  auto num = [](double v) { return csv::format_number(v); };
  std::string scales;
  for (auto s : c.feature_scales) scales += (scales.empty() ? "" : ",") + std::to_string(s);
  out << "target_rate = " << num(c.target_rate) << '\n'
      << "band_low_hz = " << num(c.band_low_hz) << '\n'
      << "band_high_hz = " << num(c.band_high_hz) << '\n'
      << "fir_taps = " << c.fir_taps << '\n'
      << "artifact_limit_uv = " << num(c.artifact_limit_uv) << '\n'
      << "method = " << entropy::to_string(c.method) << '\n'
      << "m = " << c.params.m << '\n'
      << "n = " << num(c.params.n) << '\n'
      << "r = " << num(c.params.r) << '\n'
      << "scales = " << c.scales << '\n'
      << "cca_apply = " << (c.cca_apply == CcaApply::Ssvep ? "ssvep" : "none") << '\n'
      << "cca_f1 = " << num(c.cca_f1) << '\n'
      << "cca_keep = " << c.cca_keep << '\n'
      << "occipital_channels = " << join(c.occipital_channels) << '\n'
      << "prefrontal_channels = " << join(c.prefrontal_channels) << '\n'
      << "alpha = " << num(c.alpha) << '\n'
      << "fdr = " << (c.fdr == stats::FdrMethod::BenjaminiHochberg ? "bh" : "by") << '\n'
      << "variance = " << (c.variance == stats::VarianceModel::Welch ? "welch" : "pooled") << '\n'
      << "run_classification = " << (c.run_classification ? "true" : "false") << '\n'
      << "model = " << classify::to_string(c.model) << '\n'
      << "folds = " << c.folds << '\n'
      << "repeats = " << c.repeats << '\n'
      << "tune = " << (c.tune ? "true" : "false") << '\n'
      << "feature_scales = " << scales << '\n'
      << "seed = " << c.seed << '\n'
      << "persist_signals = " << (c.persist_signals ? "true" : "false") << '\n';
}

// ---------------------------------------------------------------- layout

std::vector<SessionEntry> load_layout(const fs::path& data_dir) {
  const fs::path labels = data_dir / "labels.csv";
  if (!fs::exists(labels)) {
    throw Error(ErrorKind::LayoutError, "missing " + labels.string());
  }
  const csv::Table t = csv::read_table(labels);
  std::size_t c_id, c_group, c_phase;
  try {
    c_id = t.column("subject_id");
    c_group = t.column("group");
    c_phase = t.column("phase_per_session");
  } catch (const Error& e) {
    throw Error(ErrorKind::LayoutError, "labels.csv: " + e.detail());
  }
  std::vector<SessionEntry> out;
  std::set<std::string> seen;
  for (const auto& row : t.rows) {
    const std::string& id = row[c_id];
    if (id.empty() || !seen.insert(id).second) {
      throw Error(ErrorKind::LayoutError, "labels.csv: empty or duplicate subject_id '" + id + "'");
    }
    const std::string& group = row[c_group];
    if (group != "hc" && group != "patient") {
      throw Error(ErrorKind::LayoutError,
                  "labels.csv: subject " + id + " has unknown group '" + group + "'");
    }
    const auto phases = csv::split(row[c_phase], ';');
    for (std::size_t k = 0; k < phases.size(); ++k) {
      Phase p;
      try {
        p = parse_phase(phases[k]);
      } catch (const Error& e) {
        throw Error(ErrorKind::LayoutError, "labels.csv: subject " + id + ": " + e.detail());
      }
      if ((group == "hc") != (p == Phase::HealthyControl)) {
        throw Error(ErrorKind::LayoutError,
                    "labels.csv: subject " + id + " phase '" + phases[k] +
                        "' does not match group '" + group + "'");
      }
      SessionEntry s{id, k + 1, p,
                     phases.size() == 1 ? fs::path(id)
                                        : fs::path(id) / ("session_" + std::to_string(k + 1))};
      if (!fs::is_directory(data_dir / s.directory)) {
        throw Error(ErrorKind::LayoutError, "subject " + id + ": missing directory " +
                                                (data_dir / s.directory).string());
      }
      out.push_back(std::move(s));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const SessionEntry& a, const SessionEntry& b) {
    return std::tie(a.subject_id, a.session) < std::tie(b.subject_id, b.session);
  });
  return out;
}

// ---------------------------------------------------------------- session

const RegionResult& SessionResult::region(entropy::Region r) const {
  for (const auto& x : regions) {
    if (x.region == r) return x;
  }
  throw Error(ErrorKind::InvalidArgument, "region not present");
}

namespace {

std::vector<std::string> profile_header(const std::vector<std::string>& lead, std::size_t scales) {
  std::vector<std::string> h = lead;
  for (std::size_t s = 1; s <= scales; ++s) h.push_back("tau_" + std::to_string(s));
  return h;
}

void append_values(std::vector<std::string>& row, const std::vector<std::optional<double>>& v) {
  for (const auto& x : v) row.push_back(csv::format_optional(x));
}

std::size_t decimation_factor(double rate, double target) {
  const double ratio = rate / target;
  const auto f = static_cast<std::size_t>(std::llround(ratio));
  if (f < 1 || std::abs(ratio - static_cast<double>(f)) > 1e-9 * ratio) {
    throw Error(ErrorKind::InvalidArgument, "sample rate " + csv::format_number(rate) +
                                                " Hz is not an integer multiple of target rate " +
                                                csv::format_number(target) + " Hz");
  }
  return f;
}

MultiChannelEpoch preprocess(const PipelineConfig& cfg, const MultiChannelEpoch& raw) {
  const std::size_t factor = decimation_factor(raw.sample_rate(), cfg.target_rate);
  std::vector<MultiChannelEpoch::Channel> channels;
  for (const auto& [name, ts] : raw.channels()) {
    TimeSeries x = factor > 1 ? signal::decimate(ts, factor) : ts;
    channels.emplace_back(name,
                          signal::fir_bandpass(x, cfg.band_low_hz, cfg.band_high_hz, cfg.fir_taps));
  }
  return MultiChannelEpoch(std::move(channels), raw.condition());
}

entropy::EntropyProfile undefined_profile(std::size_t scales) {
  return entropy::EntropyProfile{std::vector<std::optional<double>>(scales)};
}

}  // namespace

SessionResult process_session(const PipelineConfig& cfg, const SessionEntry& entry,
                              const fs::path& data_dir, const fs::path& out_dir) {
  const std::string context = "subject " + entry.subject_id + " session " +
                              std::to_string(entry.session);
  const fs::path session_out = out_dir.empty() ? fs::path{} : out_dir / "subjects" / entry.directory;
  if (!session_out.empty()) fs::create_directories(session_out);

  std::vector<Condition> conditions;
  for (int k = 1; k <= 3; ++k) conditions.push_back(Condition::resting(k));
  for (int k = 1; k <= 5; ++k) conditions.push_back(Condition::ssvep(k));
  for (const auto& c : conditions) {
    const fs::path p = data_dir / entry.directory / (to_string(c) + ".csv");
    if (!fs::exists(p)) {
      throw Error(ErrorKind::MissingEpoch, context + ": missing epoch " + to_string(c) + " (" +
                                               p.string() + ")");
    }
  }

  std::vector<std::string> channels = cfg.occipital_channels;
  channels.insert(channels.end(), cfg.prefrontal_channels.begin(), cfg.prefrontal_channels.end());

  entropy::MultiscaleOptions opt;
  opt.method = cfg.method;
  opt.params = cfg.params;
  opt.scales = cfg.scales;

  SessionResult result;
  result.entry = entry;
  // epoch index -> region index -> profile; nullopt when the epoch was rejected
  std::vector<std::optional<std::vector<entropy::EntropyProfile>>> region_profiles;
  csv::Table channel_table{profile_header({"epoch", "channel"}, cfg.scales), {}};

  for (const auto& c : conditions) {
    const std::string name = to_string(c);
    try {
      const MultiChannelEpoch raw = csv::read_epoch(data_dir / entry.directory / (name + ".csv"), c);
      for (const auto& ch : channels) {
        if (!raw.has_channel(ch)) {
          throw Error(ErrorKind::LayoutError, "missing channel '" + ch + "'");
        }
      }
      MultiChannelEpoch epoch = preprocess(cfg, raw);
      if (cfg.persist_signals && !session_out.empty()) {
        fs::create_directories(session_out / "filtered");
        csv::write_epoch(session_out / "filtered" / (name + ".csv"), epoch);
      }
      auto screened = signal::reject_artifacts(epoch, cfg.artifact_limit_uv);
      if (auto* rej = std::get_if<signal::Rejection>(&screened)) {
        result.rejections.push_back({name, *rej});
        region_profiles.emplace_back(std::nullopt);
        continue;
      }
      if (c.is_ssvep() && cfg.cca_apply == CcaApply::Ssvep) {
        const auto tmpl = cca::make_template(cfg.cca_f1, epoch.length(), epoch.sample_rate());
        const auto sol = cca::cca_solve(epoch, tmpl);
        epoch = cca::denoise(epoch, sol, cfg.cca_keep);
        if (cfg.persist_signals && !session_out.empty()) {
          fs::create_directories(session_out / "denoised");
          csv::write_epoch(session_out / "denoised" / (name + ".csv"), epoch);
        }
      }
      std::map<std::string, entropy::EntropyProfile> per_channel;
      for (const auto& ch : channels) {
        auto p = entropy::multiscale_profile(epoch.channel(ch), opt);
        std::vector<std::string> row{name, ch};
        append_values(row, p.values);
        channel_table.rows.push_back(std::move(row));
        per_channel.emplace(ch, std::move(p));
      }
      std::vector<entropy::EntropyProfile> regions;
      for (const auto* list : {&cfg.occipital_channels, &cfg.prefrontal_channels}) {
        std::vector<entropy::EntropyProfile> members;
        for (const auto& ch : *list) members.push_back(per_channel.at(ch));
        regions.push_back(entropy::aggregate_sessions(members));
      }
      region_profiles.emplace_back(std::move(regions));
    } catch (const Error& e) {
      throw Error(e.kind(), context + " epoch " + name + ": " + e.detail());
    }
  }

  csv::Table region_table{profile_header({"region", "quantity"}, cfg.scales), {}};
  for (std::size_t r = 0; r < 2; ++r) {
    const auto region = r == 0 ? entropy::Region::Occipital : entropy::Region::Prefrontal;
    RegionResult rr;
    rr.region = region;
    std::vector<entropy::EntropyProfile> rest;
    for (std::size_t k = 0; k < 3; ++k) {
      if (region_profiles[k]) rest.push_back((*region_profiles[k])[r]);
    }
    rr.baseline = rest.empty() ? undefined_profile(cfg.scales) : entropy::aggregate_sessions(rest);
    for (int k = 1; k <= 5; ++k) {
      const auto& p = region_profiles[static_cast<std::size_t>(2 + k)];
      rr.relative.push_back(entropy::relative_profile(p ? (*p)[r] : undefined_profile(cfg.scales),
                                                      rr.baseline, k, region));
    }
    rr.transitional = entropy::transitional_variance(rr.relative.front(), rr.relative.back());

    const std::string rname(entropy::to_string(region));
    std::vector<std::string> row{rname, "baseline"};
    append_values(row, rr.baseline.values);
    region_table.rows.push_back(std::move(row));
    for (const auto& re : rr.relative) {
      row = {rname, "re_" + std::to_string(re.stimulus_index)};
      append_values(row, re.values);
      region_table.rows.push_back(std::move(row));
    }
    row = {rname, "tv"};
    append_values(row, rr.transitional);
    region_table.rows.push_back(std::move(row));
    result.regions.push_back(std::move(rr));
  }

  if (!session_out.empty()) {
    csv::write_table(session_out / "channel_profiles.csv", channel_table);
    csv::write_table(session_out / "region_profiles.csv", region_table);
  }
  return result;
}

// ---------------------------------------------------------------- tables

ScaleTable read_scale_table(const fs::path& path) {
  const csv::Table t = csv::read_table(path);
  const std::size_t c_id = t.column("subject_id");
  const std::size_t c_group = t.column("group");
  std::vector<std::size_t> scale_cols;
  for (std::size_t s = 1;; ++s) {
    const auto it = std::find(t.header.begin(), t.header.end(), "tau_" + std::to_string(s));
    if (it == t.header.end()) break;
    scale_cols.push_back(static_cast<std::size_t>(it - t.header.begin()));
  }
  if (scale_cols.empty()) {
    throw Error(ErrorKind::ParseError, path.string() + ": no tau_1.. columns");
  }
  ScaleTable out;
  for (const auto& row : t.rows) {
    ScaleRow r{row[c_id], row[c_group], {}};
    for (auto c : scale_cols) r.values.push_back(csv::parse_optional(row[c]));
    out.push_back(std::move(r));
  }
  return out;
}

void write_scale_table(const fs::path& path, const ScaleTable& table) {
  const std::size_t scales = table.empty() ? 0 : table.front().values.size();
  csv::Table t{profile_header({"subject_id", "group"}, scales), {}};
  for (const auto& r : table) {
    std::vector<std::string> row{r.subject_id, r.group};
    append_values(row, r.values);
    t.rows.push_back(std::move(row));
  }
  csv::write_table(path, t);
}

std::vector<std::size_t> PanelResult::significant_scales() const {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < rejected.size(); ++s) {
    if (rejected[s]) out.push_back(s + 1);
  }
  return out;
}

PanelResult compare_groups(std::string name, const ScaleTable& a, std::string_view group_a,
                           const ScaleTable& b, std::string_view group_b, stats::TestKind kind,
                           stats::VarianceModel variance, double alpha, stats::FdrMethod fdr) {
  std::vector<const ScaleRow*> rows_a, rows_b;
  for (const auto& r : a) {
    if (r.group == group_a) rows_a.push_back(&r);
  }
  for (const auto& r : b) {
    if (r.group == group_b) rows_b.push_back(&r);
  }
  std::size_t scales = 0;
  for (const auto* r : rows_a) scales = std::max(scales, r->values.size());
  for (const auto* r : rows_b) scales = std::max(scales, r->values.size());
  for (const auto* r : rows_a) {
    if (r->values.size() != scales) throw Error(ErrorKind::ScaleMismatch, "rows differ in scales");
  }
  for (const auto* r : rows_b) {
    if (r->values.size() != scales) throw Error(ErrorKind::ScaleMismatch, "rows differ in scales");
  }

  std::vector<std::pair<const ScaleRow*, const ScaleRow*>> pairs;
  if (kind == stats::TestKind::Paired) {
    std::map<std::string, const ScaleRow*> by_id;
    for (const auto* r : rows_b) {
      if (!by_id.emplace(r->subject_id, r).second) {
        throw Error(ErrorKind::InvalidArgument,
                    "subject " + r->subject_id + " appears twice in group " + std::string(group_b));
      }
    }
    std::set<std::string> seen_a;
    for (const auto* r : rows_a) {
      if (!seen_a.insert(r->subject_id).second) {
        throw Error(ErrorKind::InvalidArgument,
                    "subject " + r->subject_id + " appears twice in group " + std::string(group_a));
      }
      if (auto it = by_id.find(r->subject_id); it != by_id.end()) pairs.emplace_back(r, it->second);
    }
  }

  PanelResult out;
  out.name = std::move(name);
  out.tests.resize(scales);
  out.adjusted_p.resize(scales);
  out.rejected.assign(scales, false);
  out.n.assign(scales, 0);
  std::vector<double> p_defined;
  std::vector<std::size_t> p_index;
  for (std::size_t s = 0; s < scales; ++s) {
    std::vector<double> xa, xb;
    if (kind == stats::TestKind::Paired) {
      for (const auto& [ra, rb] : pairs) {
        if (ra->values[s] && rb->values[s]) {
          xa.push_back(*ra->values[s]);
          xb.push_back(*rb->values[s]);
        }
      }
      out.n[s] = xa.size();
    } else {
      for (const auto* r : rows_a) {
        if (r->values[s]) xa.push_back(*r->values[s]);
      }
      for (const auto* r : rows_b) {
        if (r->values[s]) xb.push_back(*r->values[s]);
      }
      out.n[s] = xa.size() + xb.size();
    }
    try {
      out.tests[s] = stats::t_test(xa, xb, kind, variance);
      p_defined.push_back(out.tests[s]->p_value);
      p_index.push_back(s);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::TooFewExamples && e.kind() != ErrorKind::DegenerateVariance) throw;
    }
  }
  const auto fdr_out = stats::fdr_bh(p_defined, alpha, fdr);
  for (std::size_t i = 0; i < p_index.size(); ++i) {
    out.adjusted_p[p_index[i]] = fdr_out.adjusted_p[i];
    out.rejected[p_index[i]] = fdr_out.rejected[i];
  }
  return out;
}

namespace {

csv::Table panel_table(const PanelResult& panel) {
  csv::Table t{{"scale", "t", "df", "p", "adjusted_p", "rejected", "n"}, {}};
  for (std::size_t s = 0; s < panel.tests.size(); ++s) {
    const auto& r = panel.tests[s];
    t.rows.push_back({std::to_string(s + 1),
                      csv::format_optional(r ? std::optional(r->statistic) : std::nullopt),
                      csv::format_optional(r ? std::optional(r->degrees_of_freedom) : std::nullopt),
                      csv::format_optional(r ? std::optional(r->p_value) : std::nullopt),
                      csv::format_optional(panel.adjusted_p[s]), panel.rejected[s] ? "1" : "0",
                      std::to_string(panel.n[s])});
  }
  return t;
}

}  // namespace

void write_panel(std::ostream& out, const PanelResult& panel) {
  csv::write_table(out, panel_table(panel));
}

void write_panel(const fs::path& path, const PanelResult& panel) {
  csv::write_table(path, panel_table(panel));
}

const PanelResult& RunReport::panel(std::string_view name) const {
  for (const auto& p : panels) {
    if (p.name == name) return p;
  }
  throw Error(ErrorKind::InvalidArgument, "no panel named '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- features

std::vector<classify::SubjectFeatures> read_features(const fs::path& path) {
  const csv::Table t = csv::read_table(path);
  const std::size_t c_id = t.column("subject_id");
  const std::size_t c_label = t.column("label");
  std::vector<std::size_t> cols;
  for (std::size_t k = 1;; ++k) {
    const auto it = std::find(t.header.begin(), t.header.end(), "f" + std::to_string(k));
    if (it == t.header.end()) break;
    cols.push_back(static_cast<std::size_t>(it - t.header.begin()));
  }
  if (cols.empty()) throw Error(ErrorKind::ParseError, path.string() + ": no f1.. columns");
  std::vector<classify::SubjectFeatures> out;
  for (const auto& row : t.rows) {
    classify::SubjectFeatures s{row[c_id], classify::parse_label(row[c_label]), {}};
    for (auto c : cols) s.features.push_back(csv::parse_number(row[c]));
    out.push_back(std::move(s));
  }
  return out;
}

void write_features(const fs::path& path, const std::vector<classify::SubjectFeatures>& features) {
  const std::size_t d = features.empty() ? 0 : features.front().features.size();
  csv::Table t{{"subject_id", "label"}, {}};
  for (std::size_t k = 1; k <= d; ++k) t.header.push_back("f" + std::to_string(k));
  for (const auto& s : features) {
    std::vector<std::string> row{s.subject_id, std::string(classify::to_string(s.label))};
    for (double v : s.features) row.push_back(csv::format_number(v));
    t.rows.push_back(std::move(row));
  }
  csv::write_table(path, t);
}

void write_cv_summary(const fs::path& path, const classify::CvSummary& s) {
  csv::Table t{{"metric", "mean", "sd", "defined_repeats"}, {}};
  auto add = [&](const char* name, const classify::MetricSummary& m) {
    t.rows.push_back({name, csv::format_number(m.mean), csv::format_number(m.sd),
                      std::to_string(m.defined)});
  };
  add("accuracy", s.accuracy);
  add("recall", s.recall);
  add("precision", s.precision);
  add("f_measure", s.f_measure);
  add("auc", s.auc);
  csv::write_table(path, t);
}

void write_roc_points(const fs::path& path, const std::vector<classify::RocPoint>& points) {
  csv::Table t{{"fpr", "tpr"}, {}};
  for (const auto& p : points) t.rows.push_back({csv::format_number(p.fpr), csv::format_number(p.tpr)});
  csv::write_table(path, t);
}

// ---------------------------------------------------------------- run

namespace {

std::vector<std::optional<double>> mean_defined(
    const std::vector<const std::vector<std::optional<double>>*>& rows, std::size_t scales) {
  std::vector<std::optional<double>> out(scales);
  for (std::size_t s = 0; s < scales; ++s) {
    double acc = 0.0;
    std::size_t n = 0;
    for (const auto* r : rows) {
      if ((*r)[s]) {
        acc += *(*r)[s];
        ++n;
      }
    }
    if (n > 0) out[s] = acc / static_cast<double>(n);
  }
  return out;
}

std::vector<SessionResult> process_all(const PipelineConfig& cfg,
                                       const std::vector<SessionEntry>& layout,
                                       const fs::path& data_dir, const fs::path& out_dir) {
  std::vector<std::optional<SessionResult>> slots(layout.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::size_t failure_index = layout.size();
  std::mutex mutex;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= layout.size()) return;
      {
        std::lock_guard lock(mutex);
        if (failure) return;
      }
      try {
        slots[i] = process_session(cfg, layout[i], data_dir, out_dir);
      } catch (...) {
        std::lock_guard lock(mutex);
        // Report the first failing session in layout order, whatever the schedule.
        if (!failure || i < failure_index) {
          failure = std::current_exception();
          failure_index = i;
        }
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(cfg.workers, 1, std::max<std::size_t>(layout.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  std::vector<SessionResult> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace

RunReport run_pipeline(const PipelineConfig& cfg, const fs::path& data_dir, const fs::path& out_dir) {
  cfg.validate();
  const auto layout = load_layout(data_dir);
  if (layout.empty()) throw Error(ErrorKind::LayoutError, "labels.csv lists no subjects");
  fs::create_directories(out_dir);
  {
    std::ofstream cfg_out(out_dir / "config_used.txt");
    write_config(cfg_out, cfg);
  }

  RunReport report;
  report.sessions = process_all(cfg, layout, data_dir, out_dir);

  {
    csv::Table t{{"subject_id", "session", "epoch", "channel", "sample_index", "value"}, {}};
    for (const auto& s : report.sessions) {
      for (const auto& r : s.rejections) {
        t.rows.push_back({s.entry.subject_id, std::to_string(s.entry.session), r.epoch,
                          r.rejection.channel, std::to_string(r.rejection.sample_index),
                          csv::format_number(r.rejection.value)});
      }
    }
    csv::write_table(out_dir / "rejections.csv", t);
    if (!t.rows.empty()) {
      report.notes.push_back(std::to_string(t.rows.size()) + " epoch(s) rejected by the " +
                             csv::format_number(cfg.artifact_limit_uv) + " uV amplitude screen");
    }
  }

  const std::vector<std::string> groups = {"hc", "inter", "pre"};
  for (const auto region : {entropy::Region::Occipital, entropy::Region::Prefrontal}) {
    const std::string rname(entropy::to_string(region));
    // Sessions sharing subject and phase are averaged into one row.
    std::map<std::pair<std::string, std::string>, std::vector<const RegionResult*>> cells;
    for (const auto& s : report.sessions) {
      cells[{s.entry.subject_id, std::string(to_string(s.entry.phase))}].push_back(&s.region(region));
    }
    ScaleTable tv, re1, re5;
    for (const auto& [key, members] : cells) {
      std::vector<const std::vector<std::optional<double>>*> v_tv, v_re1, v_re5;
      for (const auto* m : members) {
        v_tv.push_back(&m->transitional);
        v_re1.push_back(&m->relative.front().values);
        v_re5.push_back(&m->relative.back().values);
      }
      tv.push_back({key.first, key.second, mean_defined(v_tv, cfg.scales)});
      re1.push_back({key.first, key.second, mean_defined(v_re1, cfg.scales)});
      re5.push_back({key.first, key.second, mean_defined(v_re5, cfg.scales)});
    }
    write_scale_table(out_dir / ("tv_" + rname + ".csv"), tv);
    write_scale_table(out_dir / ("re1_" + rname + ".csv"), re1);
    write_scale_table(out_dir / ("re5_" + rname + ".csv"), re5);

    using stats::TestKind;
    auto add_panel = [&](std::string name, const ScaleTable& a, const char* ga, const ScaleTable& b,
                         const char* gb, TestKind kind) {
      auto p = compare_groups(rname + "_" + name, a, ga, b, gb, kind, cfg.variance, cfg.alpha,
                              cfg.fdr);
      write_panel(out_dir / ("stats_" + p.name + ".csv"), p);
      report.panels.push_back(std::move(p));
    };
    for (const auto& g : groups) {
      add_panel("re_first_vs_fifth_" + g, re1, g.c_str(), re5, g.c_str(), TestKind::Paired);
    }
    add_panel("re1_inter_vs_pre", re1, "inter", re1, "pre", TestKind::Paired);
    add_panel("re5_inter_vs_pre", re5, "inter", re5, "pre", TestKind::Paired);
    add_panel("tv_inter_vs_pre", tv, "inter", tv, "pre", TestKind::Paired);
    add_panel("tv_hc_vs_inter", tv, "hc", tv, "inter", TestKind::Independent);
    add_panel("tv_hc_vs_pre", tv, "hc", tv, "pre", TestKind::Independent);

    csv::Table means{profile_header({"group", "n"}, cfg.scales), {}};
    for (const auto& g : groups) {
      std::vector<const std::vector<std::optional<double>>*> rows;
      std::size_t negative = 0, defined = 0;
      for (const auto& r : tv) {
        if (r.group != g) continue;
        rows.push_back(&r.values);
        if (r.values.back()) {
          ++defined;
          if (*r.values.back() < 0.0) ++negative;
        }
      }
      if (rows.empty()) continue;
      auto m = mean_defined(rows, cfg.scales);
      std::vector<std::string> row{g, std::to_string(rows.size())};
      append_values(row, m);
      means.rows.push_back(std::move(row));
      report.mean_tv[rname][g] = std::move(m);
      report.negative_tv_at_top_scale[rname + "_" + g] = {negative, defined};
    }
    csv::write_table(out_dir / ("mean_tv_" + rname + ".csv"), means);

    // Patients whose top-scale TV fell from the inter-ictal to the pre-ictal phase.
    {
      std::map<std::string, std::optional<double>> inter;
      for (const auto& r : tv) {
        if (r.group == "inter") inter[r.subject_id] = r.values.back();
      }
      std::size_t decreased = 0, paired = 0;
      for (const auto& r : tv) {
        if (r.group != "pre" || !r.values.back()) continue;
        const auto it = inter.find(r.subject_id);
        if (it == inter.end() || !it->second) continue;
        ++paired;
        if (*r.values.back() < *it->second) ++decreased;
      }
      report.negative_tv_at_top_scale[rname + "_inter_to_pre_decrease"] = {decreased, paired};
    }

    // Test-retest: subjects with two or more sessions in the same phase.
    std::vector<std::pair<const std::vector<std::optional<double>>*,
                          const std::vector<std::optional<double>>*>> retest;
    for (const auto& [key, members] : cells) {
      if (members.size() >= 2) retest.emplace_back(&members[0]->transitional, &members[1]->transitional);
    }
    if (retest.size() >= 2) {
      std::vector<std::optional<double>> icc(cfg.scales);
      for (std::size_t s = 0; s < cfg.scales; ++s) {
        std::vector<std::pair<double, double>> v;
        for (const auto& [a, b] : retest) {
          if ((*a)[s] && (*b)[s]) v.emplace_back(*(*a)[s], *(*b)[s]);
        }
        if (v.size() < 2) continue;
        Eigen::MatrixXd ratings(static_cast<Eigen::Index>(v.size()), 2);
        for (std::size_t i = 0; i < v.size(); ++i) {
          ratings(static_cast<Eigen::Index>(i), 0) = v[i].first;
          ratings(static_cast<Eigen::Index>(i), 1) = v[i].second;
        }
        try {
          icc[s] = stats::icc_oneway(ratings);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::DegenerateVariance) throw;
        }
      }
      csv::Table t{{"scale", "icc", "subjects"}, {}};
      for (std::size_t s = 0; s < cfg.scales; ++s) {
        t.rows.push_back({std::to_string(s + 1), csv::format_optional(icc[s]),
                          std::to_string(retest.size())});
      }
      csv::write_table(out_dir / ("icc_" + rname + ".csv"), t);
      report.icc[rname] = std::move(icc);
    }

    if (region == entropy::Region::Occipital) {
      for (const auto& r : tv) {
        if (r.group == "hc") continue;
        classify::SubjectFeatures f{r.subject_id, classify::parse_label(r.group), {}};
        bool complete = true;
        for (auto s : cfg.feature_scales) {
          if (!r.values[s - 1]) complete = false;
          else f.features.push_back(*r.values[s - 1]);
        }
        if (complete) report.features.push_back(std::move(f));
        else report.notes.push_back("subject " + r.subject_id + " (" + r.group +
                                    ") has undefined features and is left out of classification");
      }
    }
  }

  write_features(out_dir / "features.csv", report.features);
  if (cfg.run_classification) {
    try {
      classify::CvOptions opt;
      opt.folds = cfg.folds;
      opt.repeats = cfg.repeats;
      opt.tune = cfg.tune;
      report.cv = classify::cross_validate(cfg.model, report.features,
                                           derive_seed(cfg.seed, "classify"), opt);
      write_cv_summary(out_dir / "cv_summary.csv", *report.cv);
      write_roc_points(out_dir / "roc_points.csv", report.cv->roc_points);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::TooFewExamples && e.kind() != ErrorKind::SingleClass &&
          e.kind() != ErrorKind::EmptySet) {
        throw;
      }
      report.notes.push_back("classification skipped: " + e.detail());
    }
  }

  std::ofstream out(out_dir / "report.txt");
  out << "fuzentra pipeline report\n\n";
  out << "sessions processed: " << report.sessions.size() << '\n';
  out << "entropy: " << entropy::to_string(cfg.method) << " m=" << cfg.params.m
      << " n=" << csv::format_number(cfg.params.n) << " r=" << csv::format_number(cfg.params.r)
      << " scales=1.." << cfg.scales << '\n';
  out << "FDR: " << (cfg.fdr == stats::FdrMethod::BenjaminiHochberg ? "BH" : "BY")
      << " alpha=" << csv::format_number(cfg.alpha) << ", one family per panel\n\n";
  out << "FDR-significant scales per panel\n";
  for (const auto& p : report.panels) {
    const auto sig = p.significant_scales();
    out << "  " << p.name << ": ";
    if (sig.empty()) out << "none";
    for (std::size_t i = 0; i < sig.size(); ++i) out << (i ? "," : "") << sig[i];
    out << '\n';
  }
  out << "\nmean transitional variance (occipital)\n";
  for (const auto& [g, v] : report.mean_tv["occipital"]) {
    out << "  " << g << ":";
    for (const auto& x : v) out << ' ' << csv::format_optional(x);
    out << '\n';
  }
  out << "\ncounts at scale " << cfg.scales << '\n';
  for (const auto& [k, v] : report.negative_tv_at_top_scale) {
    out << "  " << k << ": " << v.first << " of " << v.second << '\n';
  }
  if (!report.icc.empty()) {
    out << "\ntest-retest ICC(1,1) of transitional variance\n";
    for (const auto& [region, v] : report.icc) {
      out << "  " << region << ":";
      for (const auto& x : v) out << ' ' << csv::format_optional(x);
      out << '\n';
    }
  }
  if (report.cv) {
    const auto& cv = *report.cv;
    out << "\nclassification: " << classify::to_string(cfg.model) << ", " << cfg.folds
        << "-fold x " << cfg.repeats << " repeats, " << report.features.size() << " examples\n";
    auto line = [&](const char* name, const classify::MetricSummary& m) {
      out << "  " << name << ": " << csv::format_number(m.mean) << " (SD "
          << csv::format_number(m.sd) << ", defined in " << m.defined << " repeats)\n";
    };
    line("accuracy", cv.accuracy);
    line("recall", cv.recall);
    line("precision", cv.precision);
    line("f_measure", cv.f_measure);
    line("auc", cv.auc);
  }
  if (!report.notes.empty()) {
    out << "\nnotes\n";
    for (const auto& n : report.notes) out << "  " << n << '\n';
  }
  return report;
}

}  // namespace fuzentra::pipeline
