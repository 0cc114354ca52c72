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
#include <span>
#include <vector>

#include "fuzentra/time_series.hpp"

// Empirical mode decomposition used as the de-trending stage of inherent
// fuzzy entropy.
//
// Sifting: extrema are located, the two extrema nearest each edge are
// mirrored across that edge, and natural cubic splines through the maxima
// and minima give the upper and lower envelopes. Their mean is subtracted
// until the Huang SD criterion
//
//   sum (h_prev - h)^2 / sum h_prev^2 < sd_threshold
//
// holds together with |#extrema - #zero crossings| <= 1, or until
// max_sift_iterations. Past that cap sifting goes on only until the count
// condition holds, at most 10 * max_sift_iterations in total; if it never
// does, decomposition stops and the remainder is the residue. Each accepted
// IMF is subtracted from the running residue, so sum(imfs) + residue
// reproduces the input up to rounding.
namespace fuzentra::emd {

struct SiftConfig {
  double sd_threshold = 0.2;
  std::size_t max_sift_iterations = 100;
  std::size_t max_imfs = 12;

  void validate() const;
};

// Criterion bookkeeping recorded when an IMF is accepted.
struct ImfInfo {
  std::size_t sift_iterations = 0;
  std::size_t extrema = 0;
  std::size_t zero_crossings = 0;
  double mean_frequency_hz = 0.0;  // zero crossings / (2 * duration)
};

struct ImfDecomposition {
  std::vector<TimeSeries> imfs;  // index 0 is the fastest oscillation
  std::vector<ImfInfo> info;     // parallel to imfs
  TimeSeries residue;
  std::size_t source_length = 0;

  std::size_t imf_count() const noexcept { return imfs.size(); }
  // sum of every IMF plus the residue
  std::vector<double> reconstruct() const;
};

struct ExtremaCount {
  std::size_t maxima = 0;
  std::size_t minima = 0;
  std::size_t total() const noexcept { return maxima + minima; }
};

ExtremaCount count_extrema(std::span<const double> x);
std::size_t count_zero_crossings(std::span<const double> x);
double mean_frequency_hz(const TimeSeries& x);

// Throws TooShort (length < 8) or ConstantSignal. A signal with fewer than
// three extrema decomposes into a residue only.
ImfDecomposition decompose(const TimeSeries& x, const SiftConfig& cfg = {});

inline constexpr double kDefaultTrendCutoffHz = 1.0;

// Sum of IMFs 1..m where m is the largest index whose mean oscillation
// frequency is >= cutoff_hz. The residue is never included. Throws
// AllComponentsRejected when no IMF reaches the cutoff.
TimeSeries detrend_reconstruct(const ImfDecomposition& d,
                               double cutoff_hz = kDefaultTrendCutoffHz);

// Natural cubic spline through (knots_x, knots_y) evaluated at 0..n-1.
// Exposed for testing.
std::vector<double> natural_spline(std::span<const double> knots_x,
                                   std::span<const double> knots_y, std::size_t n);

}  // namespace fuzentra::emd
