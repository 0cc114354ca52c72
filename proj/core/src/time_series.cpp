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

#include "fuzentra/time_series.hpp"

#include <algorithm>
#include <cmath>

#include "fuzentra/error.hpp"

namespace fuzentra {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegenerateSignal: return "DegenerateSignal";
    case ErrorKind::InvalidBand: return "InvalidBand";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::ConstantSignal: return "ConstantSignal";
    case ErrorKind::AllComponentsRejected: return "AllComponentsRejected";
    case ErrorKind::ScaleMismatch: return "ScaleMismatch";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::HarmonicAboveNyquist: return "HarmonicAboveNyquist";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::InsufficientComponents: return "InsufficientComponents";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::TooFewExamples: return "TooFewExamples";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MissingEpoch: return "MissingEpoch";
    case ErrorKind::LayoutError: return "LayoutError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

TimeSeries::TimeSeries(std::vector<double> samples, double sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
    throw Error(ErrorKind::InvalidArgument, "sample rate must be positive and finite");
  }
  if (samples_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "time series needs at least one sample");
  }
  if (!std::all_of(samples_.begin(), samples_.end(),
                   [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorKind::InvalidArgument, "time series contains non-finite samples");
  }
}

Condition Condition::ssvep(int trial) {
  if (trial < 1 || trial > 5) {
    throw Error(ErrorKind::InvalidArgument, "SSVEP trial index must be in 1..5");
  }
  return {Kind::SsvepTrial, trial};
}

std::string to_string(const Condition& c) {
  return (c.is_ssvep() ? "ssvep_" : "rest_") + std::to_string(c.index);
}

MultiChannelEpoch::MultiChannelEpoch(std::vector<Channel> channels, Condition condition)
    : channels_(std::move(channels)), condition_(condition) {
  if (channels_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "epoch needs at least one channel");
  }
  if (condition_.is_ssvep() && (condition_.index < 1 || condition_.index > 5)) {
    throw Error(ErrorKind::InvalidArgument, "SSVEP trial index must be in 1..5");
  }
  const auto& first = channels_.front().second;
  for (const auto& [name, ts] : channels_) {
    if (ts.size() != first.size() || ts.sample_rate() != first.sample_rate()) {
      throw Error(ErrorKind::LengthMismatch,
                  "channel '" + name + "' differs in length or rate from '" +
                      channels_.front().first + "'");
    }
  }
}

std::vector<std::string> MultiChannelEpoch::channel_names() const {
  std::vector<std::string> names;
  names.reserve(channels_.size());
  for (const auto& ch : channels_) names.push_back(ch.first);
  return names;
}

bool MultiChannelEpoch::has_channel(std::string_view name) const noexcept {
  return std::any_of(channels_.begin(), channels_.end(),
                     [&](const Channel& ch) { return ch.first == name; });
}

const TimeSeries& MultiChannelEpoch::channel(std::string_view name) const {
  for (const auto& ch : channels_) {
    if (ch.first == name) return ch.second;
  }
  throw Error(ErrorKind::LayoutError, "no channel named '" + std::string(name) + "'");
}

}  // namespace fuzentra
