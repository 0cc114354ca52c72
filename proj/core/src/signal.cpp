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

#include "fuzentra/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fuzentra/error.hpp"

namespace fuzentra::signal {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

void check_taps(std::size_t taps) {
  if (taps < 3 || taps % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument, "FIR tap count must be odd and >= 3");
  }
}

// Centered convolution of a symmetric kernel; output[i] aligns with input[i].
std::vector<double> convolve_centered(std::span<const double> taps,
                                      std::span<const double> x) {
  const std::size_t n = x.size();
  const auto half = static_cast<std::ptrdiff_t>(taps.size() / 2);
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto center = static_cast<std::ptrdiff_t>(i);
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, center - half);
    const std::ptrdiff_t hi =
        std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1, center + half);
    double acc = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      acc += taps[static_cast<std::size_t>(j - center + half)] * x[static_cast<std::size_t>(j)];
    }
    y[i] = acc;
  }
  return y;
}

}  // namespace

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double sum = 0.0;
  for (double v : x) sum += v;
  const double first = sum / static_cast<double>(x.size());
  // second pass removes the rounding bias of the naive sum
  double corr = 0.0;
  for (double v : x) corr += v - first;
  return first + corr / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double mu = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

TimeSeries zscore(const TimeSeries& x) {
  if (x.size() < 2) {
    throw Error(ErrorKind::DegenerateSignal, "z-score needs at least two samples");
  }
  const double mu = mean(x.samples());
  const double sd = sample_sd(x.samples());
  if (!(sd > 0.0)) {
    throw Error(ErrorKind::DegenerateSignal, "z-score of a zero-variance signal");
  }
  std::vector<double> out(x.size());
  std::transform(x.samples().begin(), x.samples().end(), out.begin(),
                 [&](double v) { return (v - mu) / sd; });
  return TimeSeries(std::move(out), x.sample_rate());
}

FirFilter design_lowpass(double cutoff_hz, double sample_rate, std::size_t taps) {
  check_taps(taps);
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate / 2.0)) {
    throw Error(ErrorKind::InvalidBand, "low-pass cutoff must lie in (0, rate/2)");
  }
  const double fc = cutoff_hz / sample_rate;
  const auto center = static_cast<double>(taps - 1) / 2.0;
  std::vector<double> h(taps);
  for (std::size_t k = 0; k < taps; ++k) {
    const double offset = static_cast<double>(k) - center;
    const double window =
        0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(taps - 1));
    h[k] = 2.0 * fc * sinc(2.0 * fc * offset) * window;
  }
  double sum = 0.0;
  for (double v : h) sum += v;
  for (double& v : h) v /= sum;
  return FirFilter{std::move(h), 0.0, cutoff_hz};
}

FirFilter design_bandpass(double low_hz, double high_hz, double sample_rate,
                          std::size_t taps) {
  if (!(low_hz > 0.0) || !(low_hz < high_hz) || !(high_hz < sample_rate / 2.0)) {
    throw Error(ErrorKind::InvalidBand,
                "band-pass requires 0 < low_hz < high_hz < sample_rate / 2");
  }
  auto wide = design_lowpass(high_hz, sample_rate, taps);
  const auto narrow = design_lowpass(low_hz, sample_rate, taps);
  for (std::size_t k = 0; k < taps; ++k) wide.taps[k] -= narrow.taps[k];
  wide.low_hz = low_hz;
  wide.high_hz = high_hz;
  return wide;
}

double magnitude_response(const FirFilter& filter, double freq_hz, double sample_rate) {
  const double w = 2.0 * kPi * freq_hz / sample_rate;
  const auto center = static_cast<double>(filter.group_delay());
  // linear phase: H(w) = e^{-i w D} * sum h[k] cos(w (k - D))
  double amp = 0.0;
  for (std::size_t k = 0; k < filter.taps.size(); ++k) {
    amp += filter.taps[k] * std::cos(w * (static_cast<double>(k) - center));
  }
  return std::abs(amp);
}

std::vector<double> filtfilt(const FirFilter& filter, std::span<const double> x) {
  check_taps(filter.taps.size());
  const std::size_t n = x.size();
  if (n == 0) return {};
  const std::size_t pad = std::min(filter.taps.size() - 1, n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t k = pad; k >= 1; --k) ext.push_back(x[k]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t k = 1; k <= pad; ++k) ext.push_back(x[n - 1 - k]);

  // A causal pass followed by a reversed causal pass with a symmetric kernel
  // equals two centered passes; the delays cancel exactly.
  auto forward = convolve_centered(filter.taps, ext);
  auto both = convolve_centered(filter.taps, forward);
  return {both.begin() + static_cast<std::ptrdiff_t>(pad),
          both.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

TimeSeries fir_bandpass(const TimeSeries& x, double low_hz, double high_hz,
                        std::size_t taps) {
  if (!(low_hz > 0.0) || !(low_hz < high_hz) || !(high_hz < x.sample_rate() / 2.0)) {
    throw Error(ErrorKind::InvalidBand,
                "band-pass requires 0 < low_hz < high_hz < sample_rate / 2");
  }
  if (taps < 31 || taps % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument, "band-pass tap count must be odd and >= 31");
  }
  const auto filter = design_bandpass(low_hz, high_hz, x.sample_rate(), taps);
  return TimeSeries(filtfilt(filter, x.samples()), x.sample_rate());
}

TimeSeries decimate(const TimeSeries& x, std::size_t factor) {
  if (factor == 0) {
    throw Error(ErrorKind::InvalidArgument, "decimation factor must be >= 1");
  }
  if (factor == 1) return x;
  if (x.size() < factor) {
    throw Error(ErrorKind::TooShort, "signal shorter than the decimation factor");
  }
  const double new_rate = x.sample_rate() / static_cast<double>(factor);
  const double cutoff = 0.4 * new_rate / 2.0;
  const auto filter = design_lowpass(cutoff, x.sample_rate(), 20 * factor + 1);
  const auto smoothed = filtfilt(filter, x.samples());
  std::vector<double> out(x.size() / factor);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = smoothed[i * factor];
  return TimeSeries(std::move(out), new_rate);
}

std::variant<MultiChannelEpoch, Rejection> reject_artifacts(const MultiChannelEpoch& epoch,
                                                            double amp_limit) {
  if (!(amp_limit > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "artifact amplitude limit must be positive");
  }
  for (const auto& [name, ts] : epoch.channels()) {
    const auto s = ts.samples();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (std::abs(s[i]) > amp_limit) return Rejection{name, i, s[i]};
    }
  }
  return epoch;
}

}  // namespace fuzentra::signal
