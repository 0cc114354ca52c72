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
#include <utility>
#include <vector>

namespace fuzentra {

// Uniformly sampled scalar signal. Always holds at least one finite sample
// and a positive sample rate (Hz).
class TimeSeries {
 public:
  TimeSeries(std::vector<double> samples, double sample_rate);

  std::span<const double> samples() const noexcept { return samples_; }
  const std::vector<double>& values() const noexcept { return samples_; }
  double sample_rate() const noexcept { return sample_rate_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }

  // Seconds spanned by the samples (size / rate).
  double duration() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_;
  }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<double> samples_;
  double sample_rate_;
};

struct Condition {
  enum class Kind { RestingEyesClosed, SsvepTrial };

  Kind kind = Kind::RestingEyesClosed;
  int index = 1;  // resting block 1..3 or SSVEP trial 1..5

  static Condition resting(int block = 1) { return {Kind::RestingEyesClosed, block}; }
  static Condition ssvep(int trial);

  bool is_ssvep() const noexcept { return kind == Kind::SsvepTrial; }

  friend bool operator==(const Condition&, const Condition&) = default;
};

std::string to_string(const Condition& c);

// Synchronized channels of one resting block or one SSVEP trial. Channel
// order is preserved as given (O1, Oz, O2, Fpz for headband recordings).
class MultiChannelEpoch {
 public:
  using Channel = std::pair<std::string, TimeSeries>;

  MultiChannelEpoch(std::vector<Channel> channels, Condition condition);

  const std::vector<Channel>& channels() const noexcept { return channels_; }
  std::size_t channel_count() const noexcept { return channels_.size(); }
  std::size_t length() const noexcept { return channels_.front().second.size(); }
  double sample_rate() const noexcept { return channels_.front().second.sample_rate(); }
  const Condition& condition() const noexcept { return condition_; }

  std::vector<std::string> channel_names() const;
  const TimeSeries& channel(std::string_view name) const;
  bool has_channel(std::string_view name) const noexcept;

  friend bool operator==(const MultiChannelEpoch&, const MultiChannelEpoch&) = default;

 private:
  std::vector<Channel> channels_;
  Condition condition_;
};

}  // namespace fuzentra
