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
#include <string>
#include <variant>
#include <vector>

#include "fuzentra/time_series.hpp"

namespace fuzentra::signal {

// Arithmetic mean (two-pass compensated).
double mean(std::span<const double> x);

// Sample standard deviation with the N-1 denominator. This convention is used
// everywhere in the library: z-scoring, entropy tolerance scaling, t-tests.
double sample_sd(std::span<const double> x);

// Subtract the mean and divide by the sample SD. Throws DegenerateSignal when
// the length is below 2 or the SD is zero.
TimeSeries zscore(const TimeSeries& x);

// Linear-phase FIR filter. Tap count is always odd so the group delay is an
// integer number of samples.
struct FirFilter {
  std::vector<double> taps;
  double low_hz = 0.0;   // 0 for a pure low-pass
  double high_hz = 0.0;

  std::size_t group_delay() const noexcept { return (taps.size() - 1) / 2; }
};

inline constexpr std::size_t kDefaultBandpassTaps = 251;

// Hamming-windowed sinc designs. Both have unit gain at DC (low-pass) or zero
// gain at DC (band-pass) by construction.
FirFilter design_lowpass(double cutoff_hz, double sample_rate, std::size_t taps);
FirFilter design_bandpass(double low_hz, double high_hz, double sample_rate,
                          std::size_t taps);

// Magnitude response |H(f)| of a single forward pass.
double magnitude_response(const FirFilter& filter, double freq_hz, double sample_rate);

// Forward-backward application (zero phase, squared magnitude response).
// Edges are extended by mirror reflection, end samples not repeated.
std::vector<double> filtfilt(const FirFilter& filter, std::span<const double> x);

// Band-pass with the default windowed-sinc design applied forward-backward.
// Requires 0 < low < high < rate/2 (InvalidBand) and odd taps >= 31.
TimeSeries fir_bandpass(const TimeSeries& x, double low_hz, double high_hz,
                        std::size_t taps = kDefaultBandpassTaps);

// Anti-aliased down-sampling. For factor > 1 a zero-phase low-pass at 0.4 of
// the new Nyquist is applied before keeping every factor-th sample starting
// at index 0. Output length is floor(size / factor).
TimeSeries decimate(const TimeSeries& x, std::size_t factor);

struct Rejection {
  std::string channel;
  std::size_t sample_index = 0;
  double value = 0.0;

  friend bool operator==(const Rejection&, const Rejection&) = default;
};

inline constexpr double kDefaultArtifactLimitUv = 100.0;

// Amplitude-threshold screening. Returns the epoch unchanged when every
// |sample| <= amp_limit on every channel, otherwise the first offending
// channel/sample in channel order.
std::variant<MultiChannelEpoch, Rejection> reject_artifacts(
    const MultiChannelEpoch& epoch, double amp_limit = kDefaultArtifactLimitUv);

}  // namespace fuzentra::signal
