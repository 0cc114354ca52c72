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

// fuzentra command-line tool. Exit codes: 0 success, 1 data error,
// 2 configuration or usage error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fuzentra/cca.hpp"
#include "fuzentra/classify.hpp"
#include "fuzentra/csv_io.hpp"
#include "fuzentra/emd.hpp"
#include "fuzentra/entropy.hpp"
#include "fuzentra/error.hpp"
#include "fuzentra/pipeline.hpp"
#include "fuzentra/seed.hpp"
#include "fuzentra/stats.hpp"
#include "fuzentra/synth.hpp"

namespace fs = std::filesystem;
using namespace fuzentra;

namespace {

constexpr int kExitData = 1;
constexpr int kExitConfig = 2;

struct Globals {
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string config;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
};

// Shared defaults: the pipeline config file (if any) with explicit global
// flags layered on top, so standalone subcommands see the same parameters as
// a pipeline run.
pipeline::PipelineConfig base_config(const Globals& g) {
  pipeline::PipelineConfig cfg;
  if (!g.config.empty()) cfg = pipeline::load_config(g.config);
  if (g.seed_opt->count() > 0) cfg.seed = g.seed;
  if (g.workers_opt->count() > 0) cfg.workers = g.workers;
  cfg.validate();
  return cfg;
}

TimeSeries pick_channel(const csv::Channels& channels, const std::string& name,
                        const std::string& path) {
  if (name.empty()) {
    if (channels.size() != 1) {
      throw Error(ErrorKind::InvalidArgument,
                  path + " has " + std::to_string(channels.size()) + " channels; pass --channel");
    }
    return channels.front().second;
  }
  for (const auto& [n, ts] : channels) {
    if (n == name) return ts;
  }
  throw Error(ErrorKind::LayoutError, path + " has no channel '" + name + "'");
}

void write_or_print(const std::string& out, const csv::Table& t) {
  if (out.empty() || out == "-") {
    csv::write_table(std::cout, t);
  } else {
    csv::write_table(fs::path(out), t);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fuzentra: multiscale inherent fuzzy entropy for SSVEP EEG"};
  app.require_subcommand(1);
  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed, "Top-level random seed");
  g.workers_opt = app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "Pipeline config file (key = value)");

  // decompose
  auto* dec = app.add_subcommand("decompose", "EMD of one channel into IMFs and residue");
  std::string dec_in, dec_channel, dec_out;
  emd::SiftConfig sift;
  dec->add_option("--input", dec_in, "Signal CSV")->required();
  dec->add_option("--channel", dec_channel, "Channel name (required for multi-channel input)");
  dec->add_option("--out", dec_out, "Output directory")->required();
  dec->add_option("--sd-threshold", sift.sd_threshold, "Sifting SD criterion");
  dec->add_option("--max-sift", sift.max_sift_iterations, "Sifting iteration cap");
  dec->add_option("--max-imfs", sift.max_imfs, "IMF cap");

  // entropy
  auto* ent = app.add_subcommand("entropy", "Multiscale entropy profile of one channel");
  std::string ent_in, ent_channel, ent_out, ent_method;
  std::optional<std::size_t> ent_m, ent_scales;
  std::optional<double> ent_n, ent_r;
  ent->add_option("--input", ent_in, "Signal CSV")->required();
  ent->add_option("--channel", ent_channel, "Channel name (required for multi-channel input)");
  ent->add_option("--method", ent_method, "apen|sampen|fuzzen|inherent")
      ->check(CLI::IsMember({"apen", "sampen", "fuzzen", "inherent"}));
  ent->add_option("--m", ent_m, "Template length");
  ent->add_option("--n", ent_n, "Fuzzy membership gradient");
  ent->add_option("--r", ent_r, "Tolerance relative to SD");
  ent->add_option("--scales", ent_scales, "Largest time scale T");
  ent->add_option("--out", ent_out, "Output CSV (stdout when omitted)");

  // denoise
  auto* den = app.add_subcommand("denoise", "CCA artifact removal of one SSVEP epoch");
  std::string den_in, den_out;
  std::optional<double> den_f1;
  std::optional<std::size_t> den_keep;
  den->add_option("--input", den_in, "Epoch CSV")->required();
  den->add_option("--out", den_out, "Cleaned epoch CSV")->required();
  den->add_option("--f1", den_f1, "Stimulus frequency in Hz");
  den->add_option("--keep", den_keep, "Canonical components kept");

  // stats
  auto* st = app.add_subcommand("stats", "Per-scale t-tests with FDR correction");
  std::string st_in, st_in_b, st_a, st_b, st_test = "paired", st_var, st_fdr, st_out;
  std::optional<double> st_alpha;
  st->add_option("--input", st_in, "Table subject_id,group,tau_1..tau_T")->required();
  st->add_option("--input-b", st_in_b, "Table for group B (defaults to --input)");
  st->add_option("--group-a", st_a, "Group A label")->required();
  st->add_option("--group-b", st_b, "Group B label")->required();
  st->add_option("--test", st_test, "paired|independent")
      ->check(CLI::IsMember({"paired", "independent"}));
  st->add_option("--variance", st_var, "welch|pooled")->check(CLI::IsMember({"welch", "pooled"}));
  st->add_option("--alpha", st_alpha, "FDR level");
  st->add_option("--fdr", st_fdr, "bh|by")->check(CLI::IsMember({"bh", "by"}));
  st->add_option("--out", st_out, "Output CSV (stdout when omitted)");

  // classify
  auto* cl = app.add_subcommand("classify", "Repeated k-fold cross-validation");
  std::string cl_in, cl_out, cl_model;
  std::optional<std::size_t> cl_folds, cl_repeats;
  bool cl_no_tune = false;
  cl->add_option("--input", cl_in, "Features subject_id,label,f1..fK")->required();
  cl->add_option("--model", cl_model, "lda|knn|adaboost")
      ->check(CLI::IsMember({"lda", "knn", "adaboost"}));
  cl->add_option("--folds", cl_folds, "Folds per repeat");
  cl->add_option("--repeats", cl_repeats, "Repeats");
  cl->add_flag("--no-tune", cl_no_tune, "Skip the inner-fold grid search");
  cl->add_option("--out-dir", cl_out, "Directory for cv_summary.csv and roc_points.csv")->required();

  // synth
  auto* sy = app.add_subcommand("synth", "Generate a synthetic cohort");
  std::string sy_spec, sy_out;
  sy->add_option("--spec", sy_spec, "Cohort spec file (key = value)");
  sy->add_option("--out", sy_out, "Output directory")->required();

  // pipeline
  auto* pl = app.add_subcommand("pipeline", "End-to-end run over a cohort directory");
  std::string pl_data, pl_out;
  pl->add_option("--data", pl_data, "Cohort directory with labels.csv")->required();
  pl->add_option("--out", pl_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    const pipeline::PipelineConfig cfg = base_config(g);

    if (*dec) {
      const auto channels = csv::read_signal(fs::path(dec_in));
      const TimeSeries x = pick_channel(channels, dec_channel, dec_in);
      const std::string name = dec_channel.empty() ? channels.front().first : dec_channel;
      sift.validate();
      const auto d = emd::decompose(x, sift);
      fs::create_directories(dec_out);
      csv::Table manifest{{"component", "mean_frequency_hz", "sift_iterations", "extrema",
                           "zero_crossings"}, {}};
      for (std::size_t k = 0; k < d.imf_count(); ++k) {
        const std::string comp = "imf_" + std::to_string(k + 1);
        csv::write_signal(fs::path(dec_out) / (comp + ".csv"), {{name, d.imfs[k]}});
        const auto& info = d.info[k];
        manifest.rows.push_back({comp, csv::format_number(info.mean_frequency_hz),
                                 std::to_string(info.sift_iterations), std::to_string(info.extrema),
                                 std::to_string(info.zero_crossings)});
      }
      csv::write_signal(fs::path(dec_out) / "residue.csv", {{name, d.residue}});
      const auto ex = emd::count_extrema(d.residue.samples());
      manifest.rows.push_back({"residue", csv::format_number(emd::mean_frequency_hz(d.residue)), "0",
                               std::to_string(ex.total()),
                               std::to_string(emd::count_zero_crossings(d.residue.samples()))});
      csv::write_table(fs::path(dec_out) / "manifest.csv", manifest);
    } else if (*ent) {
      entropy::MultiscaleOptions opt;
      opt.method = ent_method.empty() ? cfg.method : entropy::parse_method(ent_method);
      opt.params = cfg.params;
      if (ent_m) opt.params.m = *ent_m;
      if (ent_n) opt.params.n = *ent_n;
      if (ent_r) opt.params.r = *ent_r;
      opt.scales = ent_scales.value_or(cfg.scales);
      opt.params.validate();
      const auto channels = csv::read_signal(fs::path(ent_in));
      const auto profile = entropy::multiscale_profile(pick_channel(channels, ent_channel, ent_in), opt);
      csv::Table t{{"scale", "value"}, {}};
      for (std::size_t s = 0; s < profile.scales(); ++s) {
        t.rows.push_back({std::to_string(s + 1), csv::format_optional(profile.values[s])});
      }
      write_or_print(ent_out, t);
    } else if (*den) {
      const auto epoch = csv::read_epoch(fs::path(den_in), Condition::ssvep(1));
      const auto tmpl = cca::make_template(den_f1.value_or(cfg.cca_f1), epoch.length(),
                                           epoch.sample_rate());
      const auto sol = cca::cca_solve(epoch, tmpl);
      csv::write_epoch(fs::path(den_out), cca::denoise(epoch, sol, den_keep.value_or(cfg.cca_keep)));
      fs::path side(den_out);
      side.replace_extension(".correlations.csv");
      csv::Table t{{"component", "correlation"}, {}};
      for (std::size_t k = 0; k < sol.correlations.size(); ++k) {
        t.rows.push_back({std::to_string(k + 1), csv::format_number(sol.correlations[k])});
      }
      csv::write_table(side, t);
    } else if (*st) {
      const auto a = pipeline::read_scale_table(fs::path(st_in));
      const auto b = st_in_b.empty() ? a : pipeline::read_scale_table(fs::path(st_in_b));
      const auto panel = pipeline::compare_groups(
          "cli", a, st_a, b, st_b, stats::parse_test_kind(st_test),
          st_var.empty() ? cfg.variance : stats::parse_variance_model(st_var),
          st_alpha.value_or(cfg.alpha), st_fdr.empty() ? cfg.fdr : stats::parse_fdr_method(st_fdr));
      if (st_out.empty() || st_out == "-") {
        pipeline::write_panel(std::cout, panel);
      } else {
        pipeline::write_panel(fs::path(st_out), panel);
      }
    } else if (*cl) {
      const auto data = pipeline::read_features(fs::path(cl_in));
      classify::CvOptions opt;
      opt.folds = cl_folds.value_or(cfg.folds);
      opt.repeats = cl_repeats.value_or(cfg.repeats);
      opt.tune = cfg.tune && !cl_no_tune;
      const auto model = cl_model.empty() ? cfg.model : classify::parse_model_kind(cl_model);
      const auto summary =
          classify::cross_validate(model, data, derive_seed(cfg.seed, "classify"), opt);
      fs::create_directories(cl_out);
      pipeline::write_cv_summary(fs::path(cl_out) / "cv_summary.csv", summary);
      pipeline::write_roc_points(fs::path(cl_out) / "roc_points.csv", summary.roc_points);
      std::cout << "accuracy " << csv::format_number(summary.accuracy.mean) << " (SD "
                << csv::format_number(summary.accuracy.sd) << "), auc "
                << csv::format_number(summary.auc.mean) << '\n';
    } else if (*sy) {
      synth::CohortSpec spec = sy_spec.empty() ? synth::CohortSpec{} : synth::load_spec(sy_spec);
      if (g.seed_opt->count() > 0) spec.seed = g.seed;
      const auto subjects = synth::gen_cohort(spec, fs::path(sy_out), cfg.workers);
      std::cout << "wrote " << subjects.size() << " subjects to " << sy_out << '\n';
    } else if (*pl) {
      const auto report = pipeline::run_pipeline(cfg, fs::path(pl_data), fs::path(pl_out));
      std::cout << "processed " << report.sessions.size() << " sessions; report at "
                << (fs::path(pl_out) / "report.txt").string() << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "fuzentra: " << e.what() << '\n';
    return e.kind() == ErrorKind::ConfigError ? kExitConfig : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "fuzentra: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
