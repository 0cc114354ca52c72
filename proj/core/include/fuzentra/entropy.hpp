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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fuzentra/emd.hpp"
#include "fuzentra/time_series.hpp"

namespace fuzentra::entropy {

// m: template length. n: gradient of the fuzzy membership boundary.
// r: membership width, relative to the sample SD of the estimator input.
struct EntropyParams {
  std::size_t m = 2;
  double n = 2.0;
  double r = 0.2;

  void validate() const;
};

enum class Method { ApEn, SampEn, FuzzEn, InherentFuzzEn };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);  // apen|sampen|fuzzen|inherent

// Entropy per time scale 1..T. Undefined (nullopt) only for SampEn
// zero-match cases.
struct EntropyProfile {
  std::vector<std::optional<double>> values;

  std::size_t scales() const noexcept { return values.size(); }
  std::size_t undefined_count() const noexcept;
  friend bool operator==(const EntropyProfile&, const EntropyProfile&) = default;
};

enum class Region { Occipital, Prefrontal };
std::string_view to_string(Region region);

// Stimulus-minus-baseline profile for one SSVEP trial and one region.
struct RelativeProfile {
  std::vector<std::optional<double>> values;
  int stimulus_index = 0;  // 1..5; 0 when not tied to one trial
  Region region = Region::Occipital;

  std::size_t scales() const noexcept { return values.size(); }
};

// Mean over non-overlapping windows of length tau; trailing partial window
// dropped, so the output length is floor(N / tau).
TimeSeries coarse_grain(const TimeSeries& x, std::size_t tau);

// ln(phi^m) - ln(phi^{m+1}) over N - m baseline-removed templates of each
// length, with membership exp(-(d / SD)^n / r) and Chebyshev distance d.
// Requires N >= m + 2 (TooShort).
double fuzzy_entropy(std::span<const double> x, const EntropyParams& p);
double fuzzy_entropy(const TimeSeries& x, const EntropyParams& p);

// Pincus ApEn with self-matches, tolerance r * SD, match when d <= tol.
double approximate_entropy(std::span<const double> x, std::size_t m, double r);
double approximate_entropy(const TimeSeries& x, std::size_t m, double r);

// Richman-Moorman SampEn, -ln(A / B) without self-matches over the first
// N - m templates; nullopt when A or B is zero.
std::optional<double> sample_entropy(std::span<const double> x, std::size_t m, double r);
std::optional<double> sample_entropy(const TimeSeries& x, std::size_t m, double r);

inline constexpr std::size_t kDefaultScales = 20;

struct MultiscaleOptions {
  Method method = Method::InherentFuzzEn;
  EntropyParams params{};
  std::size_t scales = kDefaultScales;
  emd::SiftConfig sift{};
  double trend_cutoff_hz = emd::kDefaultTrendCutoffHz;
};

// InherentFuzzEn: EMD de-trend -> z-score -> coarse-grain -> fuzzy entropy.
// The other methods skip the de-trending stage. Requires floor(N / T) >=
// m + 2; the TooShort message names the largest feasible T.
EntropyProfile multiscale_profile(const TimeSeries& x, const MultiscaleOptions& opt);

// The de-trended and normalized series the scale loop runs on.
TimeSeries prepare_for_scales(const TimeSeries& x, const MultiscaleOptions& opt);

// Elementwise stim - baseline. Undefined on either side stays undefined.
RelativeProfile relative_profile(const EntropyProfile& stim, const EntropyProfile& baseline,
                                 int stimulus_index = 0, Region region = Region::Occipital);

// Per-scale RE_5 - RE_1.
std::vector<std::optional<double>> transitional_variance(const RelativeProfile& re_first,
                                                         const RelativeProfile& re_fifth);

// Per-scale arithmetic mean over the defined entries. A scale with no
// defined entry stays undefined. Throws EmptySet or ScaleMismatch.
EntropyProfile aggregate_sessions(std::span<const EntropyProfile> profiles);

namespace detail {
// Pairwise membership sums over N - m templates of lengths m and m + 1:
// returns {sum_{i != j} D^m_ij, sum_{i != j} D^{m+1}_ij}.
struct MembershipSums {
  double phi_m = 0.0;
  double phi_m1 = 0.0;
};
MembershipSums fuzzy_membership_sums(std::span<const double> x, std::size_t m, double n,
                                     double tolerance);
}  // namespace detail

}  // namespace fuzentra::entropy
