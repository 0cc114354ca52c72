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

#include "fuzentra/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fuzentra/error.hpp"
#include "fuzentra/signal.hpp"

namespace fuzentra::entropy {

namespace {

void require_length(std::size_t n, std::size_t m) {
  if (n < m + 2) {
    throw Error(ErrorKind::TooShort, "entropy needs N >= m + 2 (N=" + std::to_string(n) +
                                         ", m=" + std::to_string(m) + ")");
  }
}

double chebyshev(std::span<const double> x, std::size_t i, std::size_t j, std::size_t len) {
  double d = 0.0;
  for (std::size_t k = 0; k < len; ++k) d = std::max(d, std::abs(x[i + k] - x[j + k]));
  return d;
}

// log of sum_{i != j} exp(-d_ij^n / tol), evaluated relative to the largest
// term. Only used when the fast kernel's plain sum underflows to zero.
double log_membership_sum(std::span<const double> x, std::size_t len, std::size_t count,
                          double n, double tolerance) {
  std::vector<double> centered(count * len);
  for (std::size_t i = 0; i < count; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < len; ++k) s += x[i + k];
    const double mu = s / static_cast<double>(len);
    for (std::size_t k = 0; k < len; ++k) centered[i * len + k] = x[i + k] - mu;
  }
  std::vector<double> expo;
  expo.reserve(count * (count - 1) / 2);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < len; ++k) {
        d = std::max(d, std::abs(centered[i * len + k] - centered[j * len + k]));
      }
      expo.push_back(-std::pow(d, n) / tolerance);
    }
  }
  const double top = *std::max_element(expo.begin(), expo.end());
  double acc = 0.0;
  for (double e : expo) acc += std::exp(e - top);
  return top + std::log(2.0 * acc);
}

}  // namespace

void EntropyParams::validate() const {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "template length m must be >= 1");
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorKind::InvalidArgument, "fuzzy exponent n must be positive");
  }
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorKind::InvalidArgument, "tolerance r must be positive");
  }
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::ApEn: return "apen";
    case Method::SampEn: return "sampen";
    case Method::FuzzEn: return "fuzzen";
    case Method::InherentFuzzEn: return "inherent";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "apen") return Method::ApEn;
  if (text == "sampen") return Method::SampEn;
  if (text == "fuzzen") return Method::FuzzEn;
  if (text == "inherent") return Method::InherentFuzzEn;
  throw Error(ErrorKind::InvalidArgument, "unknown entropy method '" + std::string(text) + "'");
}

std::string_view to_string(Region region) {
  return region == Region::Occipital ? "occipital" : "prefrontal";
}

std::size_t EntropyProfile::undefined_count() const noexcept {
  return static_cast<std::size_t>(std::count(values.begin(), values.end(), std::nullopt));
}

TimeSeries coarse_grain(const TimeSeries& x, std::size_t tau) {
  if (tau < 1) throw Error(ErrorKind::InvalidArgument, "scale factor must be >= 1");
  if (x.size() < tau) throw Error(ErrorKind::TooShort, "series shorter than the scale factor");
  if (tau == 1) return x;
  const auto s = x.samples();
  std::vector<double> out(x.size() / tau);
  for (std::size_t j = 0; j < out.size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = j * tau; i < (j + 1) * tau; ++i) acc += s[i];
    out[j] = acc / static_cast<double>(tau);
  }
  return TimeSeries(std::move(out), x.sample_rate() / static_cast<double>(tau));
}

double fuzzy_entropy(std::span<const double> x, const EntropyParams& p) {
  p.validate();
  require_length(x.size(), p.m);
  const double sd = signal::sample_sd(x);
  // zero spread: every baseline-removed template is the zero vector
  if (!(sd > 0.0)) return 0.0;
  const double tol = p.r * std::pow(sd, p.n);
  const std::size_t count = x.size() - p.m;
  const double pairs = static_cast<double>(count) * static_cast<double>(count - 1);

  const auto sums = detail::fuzzy_membership_sums(x, p.m, p.n, tol);
  double log_m = std::log(sums.phi_m / pairs);
  double log_m1 = std::log(sums.phi_m1 / pairs);
  if (!(sums.phi_m > 0.0)) log_m = log_membership_sum(x, p.m, count, p.n, tol) - std::log(pairs);
  if (!(sums.phi_m1 > 0.0)) {
    log_m1 = log_membership_sum(x, p.m + 1, count, p.n, tol) - std::log(pairs);
  }
  return log_m - log_m1;
}

double fuzzy_entropy(const TimeSeries& x, const EntropyParams& p) {
  return fuzzy_entropy(x.samples(), p);
}

double approximate_entropy(std::span<const double> x, std::size_t m, double r) {
  EntropyParams{m, 2.0, r}.validate();
  require_length(x.size(), m);
  const double tol = r * signal::sample_sd(x);
  const std::size_t n = x.size();

  auto phi = [&](std::size_t len) {
    const std::size_t count = n - len + 1;
    std::vector<std::size_t> matches(count, 1);  // self-match
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = i + 1; j < count; ++j) {
        if (chebyshev(x, i, j, len) <= tol) {
          ++matches[i];
          ++matches[j];
        }
      }
    }
    double acc = 0.0;
    for (std::size_t c : matches) {
      acc += std::log(static_cast<double>(c) / static_cast<double>(count));
    }
    return acc / static_cast<double>(count);
  };
  return phi(m) - phi(m + 1);
}

double approximate_entropy(const TimeSeries& x, std::size_t m, double r) {
  return approximate_entropy(x.samples(), m, r);
}

std::optional<double> sample_entropy(std::span<const double> x, std::size_t m, double r) {
  EntropyParams{m, 2.0, r}.validate();
  require_length(x.size(), m);
  const double tol = r * signal::sample_sd(x);
  const std::size_t count = x.size() - m;
  std::size_t b = 0, a = 0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      if (chebyshev(x, i, j, m) <= tol) {
        ++b;
        if (std::abs(x[i + m] - x[j + m]) <= tol) ++a;
      }
    }
  }
  if (a == 0 || b == 0) return std::nullopt;
  return -std::log(static_cast<double>(a) / static_cast<double>(b));
}

std::optional<double> sample_entropy(const TimeSeries& x, std::size_t m, double r) {
  return sample_entropy(x.samples(), m, r);
}

TimeSeries prepare_for_scales(const TimeSeries& x, const MultiscaleOptions& opt) {
  if (opt.method == Method::InherentFuzzEn) {
    const auto parts = emd::decompose(x, opt.sift);
    return signal::zscore(emd::detrend_reconstruct(parts, opt.trend_cutoff_hz));
  }
  return signal::zscore(x);
}

EntropyProfile multiscale_profile(const TimeSeries& x, const MultiscaleOptions& opt) {
  opt.params.validate();
  if (opt.scales < 1) throw Error(ErrorKind::InvalidArgument, "scale count must be >= 1");
  const std::size_t min_len = opt.params.m + 2;
  if (x.size() / opt.scales < min_len) {
    const std::size_t feasible = x.size() / min_len;
    throw Error(ErrorKind::TooShort,
                "N=" + std::to_string(x.size()) + " supports at most T=" +
                    std::to_string(feasible) + " scales for m=" + std::to_string(opt.params.m));
  }
  const auto prepared = prepare_for_scales(x, opt);

  EntropyProfile profile;
  profile.values.reserve(opt.scales);
  for (std::size_t tau = 1; tau <= opt.scales; ++tau) {
    const auto cg = coarse_grain(prepared, tau);
    switch (opt.method) {
      case Method::FuzzEn:
      case Method::InherentFuzzEn:
        profile.values.emplace_back(fuzzy_entropy(cg, opt.params));
        break;
      case Method::ApEn:
        profile.values.emplace_back(approximate_entropy(cg, opt.params.m, opt.params.r));
        break;
      case Method::SampEn:
        profile.values.push_back(sample_entropy(cg, opt.params.m, opt.params.r));
        break;
    }
  }
  return profile;
}

RelativeProfile relative_profile(const EntropyProfile& stim, const EntropyProfile& baseline,
                                 int stimulus_index, Region region) {
  if (stim.scales() != baseline.scales()) {
    throw Error(ErrorKind::ScaleMismatch, "stimulus and baseline profiles differ in scales");
  }
  RelativeProfile out;
  out.stimulus_index = stimulus_index;
  out.region = region;
  out.values.reserve(stim.scales());
  for (std::size_t i = 0; i < stim.scales(); ++i) {
    if (stim.values[i] && baseline.values[i]) {
      out.values.emplace_back(*stim.values[i] - *baseline.values[i]);
    } else {
      out.values.emplace_back(std::nullopt);
    }
  }
  return out;
}

std::vector<std::optional<double>> transitional_variance(const RelativeProfile& re_first,
                                                         const RelativeProfile& re_fifth) {
  if (re_first.scales() != re_fifth.scales()) {
    throw Error(ErrorKind::ScaleMismatch, "relative profiles differ in scales");
  }
  std::vector<std::optional<double>> out;
  out.reserve(re_first.scales());
  for (std::size_t i = 0; i < re_first.scales(); ++i) {
    if (re_first.values[i] && re_fifth.values[i]) {
      out.emplace_back(*re_fifth.values[i] - *re_first.values[i]);
    } else {
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

EntropyProfile aggregate_sessions(std::span<const EntropyProfile> profiles) {
  if (profiles.empty()) throw Error(ErrorKind::EmptySet, "no profiles to aggregate");
  const std::size_t scales = profiles.front().scales();
  for (const auto& p : profiles) {
    if (p.scales() != scales) {
      throw Error(ErrorKind::ScaleMismatch, "profiles to aggregate differ in scales");
    }
  }
  EntropyProfile out;
  out.values.reserve(scales);
  for (std::size_t s = 0; s < scales; ++s) {
    double acc = 0.0;
    std::size_t defined = 0;
    for (const auto& p : profiles) {
      if (p.values[s]) {
        acc += *p.values[s];
        ++defined;
      }
    }
    if (defined == 0) {
      out.values.emplace_back(std::nullopt);
    } else {
      out.values.emplace_back(acc / static_cast<double>(defined));
    }
  }
  return out;
}

}  // namespace fuzentra::entropy
