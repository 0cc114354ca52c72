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

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fuzentra/csv_io.hpp"
#include "fuzentra/error.hpp"
#include "fuzentra/seed.hpp"
#include "fuzentra/signal.hpp"
#include "oracles.hpp"

using namespace fuzentra;

namespace {

TimeSeries tone(double freq, double seconds, double rate, double amplitude = 1.0) {
  const auto n = static_cast<std::size_t>(seconds * rate);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate);
  }
  return TimeSeries(std::move(x), rate);
}

double rms(std::span<const double> x, std::size_t from, std::size_t to) {
  double ss = 0.0;
  for (std::size_t i = from; i < to; ++i) ss += x[i] * x[i];
  return std::sqrt(ss / static_cast<double>(to - from));
}

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(ZScore, AlreadyStandard) {
  const auto z = signal::zscore(TimeSeries({-1.0, 0.0, 1.0}, 1.0));
  EXPECT_NEAR(z[0], -1.0, 1e-15);
  EXPECT_NEAR(z[1], 0.0, 1e-15);
  EXPECT_NEAR(z[2], 1.0, 1e-15);
}

TEST(ZScore, TwoPoints) {
  const auto z = signal::zscore(TimeSeries({0.0, 2.0}, 1.0));
  EXPECT_NEAR(z[0], -0.70710678, 1e-8);
  EXPECT_NEAR(z[1], 0.70710678, 1e-8);
}

TEST(ZScore, ConstantIsDegenerate) {
  EXPECT_EQ(kind_of([] { signal::zscore(TimeSeries({5.0, 5.0, 5.0}, 1.0)); }),
            ErrorKind::DegenerateSignal);
}

TEST(SampleSd, UsesNMinusOne) {
  const std::vector<double> x{1.0, 2.0, 4.0, 7.0};
  EXPECT_NEAR(signal::sample_sd(x), oracle::sample_sd(x), 1e-14);
}

TEST(Bandpass, RemovesDc) {
  const TimeSeries dc(std::vector<double>(2500, 3.0), 250.0);
  const auto y = signal::fir_bandpass(dc, 1.0, 30.0);
  EXPECT_LE(rms(y.samples(), 0, y.size()), 1e-2 * 3.0);
}

TEST(Bandpass, PassesTenHertz) {
  const auto x = tone(10.0, 10.0, 250.0);
  const auto y = signal::fir_bandpass(x, 1.0, 30.0);
  ASSERT_EQ(y.size(), x.size());
  const double ratio = rms(y.samples(), 500, 2000) / rms(x.samples(), 500, 2000);
  EXPECT_NEAR(ratio, 1.0, 0.05);
}

TEST(Bandpass, StopBandAboveHighEdge) {
  const auto f = signal::design_bandpass(1.0, 30.0, 250.0, signal::kDefaultBandpassTaps);
  EXPECT_EQ(f.taps.size() % 2, 1u);
  EXPECT_NEAR(signal::magnitude_response(f, 0.0, 250.0), 0.0, 1e-12);
  EXPECT_LE(signal::magnitude_response(f, 45.0, 250.0), 1e-2);
  for (double hz : {5.0, 10.0, 15.0, 20.0}) {
    EXPECT_NEAR(signal::magnitude_response(f, hz, 250.0), 1.0, 0.02) << hz;
  }
}

TEST(Bandpass, InvertedBand) {
  EXPECT_EQ(kind_of([] { signal::fir_bandpass(tone(10.0, 2.0, 250.0), 30.0, 1.0); }),
            ErrorKind::InvalidBand);
}

TEST(Decimate, LengthAndRate) {
  const auto y = signal::decimate(tone(5.0, 2.0, 500.0), 2);
  EXPECT_EQ(y.size(), 500u);
  EXPECT_DOUBLE_EQ(y.sample_rate(), 250.0);
}

TEST(Decimate, FactorOneIsIdentity) {
  const auto x = tone(7.0, 1.0, 250.0);
  EXPECT_EQ(signal::decimate(x, 1), x);
}

TEST(Decimate, KeepsLowTone) {
  const auto x = tone(5.0, 4.0, 500.0);
  const auto y = signal::decimate(x, 2);
  std::vector<double> v(y.samples().begin(), y.samples().end());
  EXPECT_GT(oracle::dft_power(v, 250.0, 5.0), 100.0 * oracle::dft_power(v, 250.0, 20.0));
  EXPECT_NEAR(rms(y.samples(), 100, 900), std::sqrt(0.5), 0.05 * std::sqrt(0.5));
}

TEST(RejectArtifacts, CleanEpochUnchanged) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::vector<MultiChannelEpoch::Channel> ch;
  for (const char* name : {"O1", "Fpz"}) {
    std::vector<double> x(200);
    for (auto& v : x) v = u(rng);
    ch.emplace_back(name, TimeSeries(std::move(x), 250.0));
  }
  const MultiChannelEpoch e(ch, Condition::resting(1));
  const auto out = signal::reject_artifacts(e, 100.0);
  ASSERT_TRUE(std::holds_alternative<MultiChannelEpoch>(out));
  EXPECT_EQ(std::get<MultiChannelEpoch>(out), e);
}

TEST(RejectArtifacts, ReportsFirstOffender) {
  std::vector<double> a(100, 1.0);
  std::vector<double> b(100, 1.0);
  b[42] = 150.0;
  const MultiChannelEpoch e({{"O1", TimeSeries(a, 250.0)}, {"Oz", TimeSeries(b, 250.0)}},
                            Condition::ssvep(2));
  const auto out = signal::reject_artifacts(e, 100.0);
  ASSERT_TRUE(std::holds_alternative<signal::Rejection>(out));
  const auto& r = std::get<signal::Rejection>(out);
  EXPECT_EQ(r.channel, "Oz");
  EXPECT_EQ(r.sample_index, 42u);
  EXPECT_EQ(r.value, 150.0);
}

TEST(RejectArtifacts, ZeroLimitIsPreconditionViolation) {
  const MultiChannelEpoch e({{"O1", TimeSeries(std::vector<double>(10, 0.0), 250.0)}},
                            Condition::resting(1));
  EXPECT_THROW(signal::reject_artifacts(e, 0.0), Error);
}

TEST(Csv, SignalRoundTripIsBitExact) {
  std::mt19937_64 rng(9);
  csv::Channels ch;
  for (const char* name : {"O1", "Oz"}) {
    auto x = oracle::gaussian_noise(300, rng);
    for (auto& v : x) v *= 1e3 / 7.0;
    ch.emplace_back(name, TimeSeries(std::move(x), 250.0));
  }
  std::stringstream ss;
  csv::write_signal(ss, ch);
  const auto back = csv::read_signal(ss);
  ASSERT_EQ(back.size(), ch.size());
  for (std::size_t c = 0; c < ch.size(); ++c) {
    EXPECT_EQ(back[c].first, ch[c].first);
    EXPECT_EQ(back[c].second.values(), ch[c].second.values());
    EXPECT_NEAR(back[c].second.sample_rate(), 250.0, 1e-9);
  }
}

TEST(Csv, RejectsNonUniformTime) {
  std::stringstream ss("time,O1\n0,1\n0.004,2\n0.009,3\n");
  EXPECT_THROW(csv::read_signal(ss), Error);
}

TEST(Csv, NumberFormatRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678901234567}) {
    EXPECT_EQ(csv::parse_number(csv::format_number(v)), v);
  }
  EXPECT_EQ(csv::format_optional(std::nullopt), "NA");
  EXPECT_FALSE(csv::parse_optional("NA").has_value());
}

TEST(Seed, StagesAreIndependentAndStable) {
  EXPECT_EQ(derive_seed(7, "classify"), derive_seed(7, "classify"));
  EXPECT_NE(derive_seed(7, "classify"), derive_seed(7, "synth"));
  EXPECT_NE(derive_seed(7, "classify"), derive_seed(8, "classify"));
  EXPECT_NE(derive_seed(7, "fold", 0), derive_seed(7, "fold", 1));
}
