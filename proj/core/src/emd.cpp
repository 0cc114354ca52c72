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

#include "fuzentra/emd.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "fuzentra/error.hpp"

namespace fuzentra::emd {

namespace {

struct Extrema {
  std::vector<double> max_pos, max_val, min_pos, min_val;
};

// Interior local extrema. A flat run counts once, at its midpoint, and only
// if the signal turns around across it.
Extrema find_extrema(std::span<const double> x) {
  Extrema e;
  const std::size_t n = x.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (x[i] == x[i - 1]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && x[j + 1] == x[i]) ++j;
    if (j + 1 >= n) break;
    const bool rising_in = x[i] > x[i - 1];
    const bool falling_out = x[j + 1] < x[j];
    const double mid = 0.5 * static_cast<double>(i + j);
    if (rising_in && falling_out) {
      e.max_pos.push_back(mid);
      e.max_val.push_back(x[i]);
    } else if (!rising_in && !falling_out) {
      e.min_pos.push_back(mid);
      e.min_val.push_back(x[i]);
    }
    i = j + 1;
  }
  return e;
}

// Mirror the two extrema nearest each edge across that edge.
void mirror_edges(std::span<const double> pos, std::span<const double> val,
                  std::size_t n, std::vector<double>& kx, std::vector<double>& ky) {
  const std::size_t count = pos.size();
  const std::size_t take = std::min<std::size_t>(2, count);
  const double right_edge = static_cast<double>(n - 1);
  kx.clear();
  ky.clear();
  for (std::size_t k = take; k-- > 0;) {
    kx.push_back(-pos[k]);
    ky.push_back(val[k]);
  }
  kx.insert(kx.end(), pos.begin(), pos.end());
  ky.insert(ky.end(), val.begin(), val.end());
  for (std::size_t k = 0; k < take; ++k) {
    kx.push_back(2.0 * right_edge - pos[count - 1 - k]);
    ky.push_back(val[count - 1 - k]);
  }
}

bool is_imf(std::span<const double> h) {
  const auto ext = count_extrema(h);
  const auto zc = count_zero_crossings(h);
  const auto diff = ext.total() > zc ? ext.total() - zc : zc - ext.total();
  return diff <= 1;
}

struct SiftResult {
  std::vector<double> imf;
  std::size_t iterations = 0;
};

std::optional<SiftResult> sift(std::span<const double> input, std::size_t n,
                               const SiftConfig& cfg) {
  std::vector<double> h(input.begin(), input.end());
  std::vector<double> kx, ky;
  std::size_t it = 0;
  bool accepted = false;
  const std::size_t hard_cap = 10 * cfg.max_sift_iterations;
  while (it < hard_cap) {
    const auto ext = find_extrema(h);
    if (ext.max_pos.empty() || ext.min_pos.empty()) break;
    mirror_edges(ext.max_pos, ext.max_val, n, kx, ky);
    const auto upper = natural_spline(kx, ky, n);
    mirror_edges(ext.min_pos, ext.min_val, n, kx, ky);
    const auto lower = natural_spline(kx, ky, n);

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double mean = 0.5 * (upper[i] + lower[i]);
      num += mean * mean;
      den += h[i] * h[i];
      h[i] -= mean;
    }
    ++it;
    if (den == 0.0) break;
    const bool settled = num / den < cfg.sd_threshold || it >= cfg.max_sift_iterations;
    if (settled && is_imf(h)) {
      accepted = true;
      break;
    }
  }
  if (!accepted && !(it > 0 && is_imf(h))) return std::nullopt;
  return SiftResult{std::move(h), it};
}

}  // namespace

void SiftConfig::validate() const {
  if (!(sd_threshold > 0.0 && sd_threshold < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "sd_threshold must lie in (0, 1)");
  }
  if (max_sift_iterations < 1 || max_imfs < 1) {
    throw Error(ErrorKind::InvalidArgument, "sift iteration and IMF limits must be >= 1");
  }
}

std::vector<double> ImfDecomposition::reconstruct() const {
  std::vector<double> out(residue.values());
  for (const auto& imf : imfs) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += imf[i];
  }
  return out;
}

ExtremaCount count_extrema(std::span<const double> x) {
  const auto e = find_extrema(x);
  return {e.max_pos.size(), e.min_pos.size()};
}

std::size_t count_zero_crossings(std::span<const double> x) {
  std::size_t crossings = 0;
  int last_sign = 0;
  for (double v : x) {
    const int s = (v > 0.0) - (v < 0.0);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) ++crossings;
    last_sign = s;
  }
  return crossings;
}

double mean_frequency_hz(const TimeSeries& x) {
  return static_cast<double>(count_zero_crossings(x.samples())) / (2.0 * x.duration());
}

std::vector<double> natural_spline(std::span<const double> kx, std::span<const double> ky,
                                   std::size_t n) {
  const std::size_t k = kx.size();
  if (k < 2 || ky.size() != k) {
    throw Error(ErrorKind::InvalidArgument, "spline needs at least two knots");
  }
  // Second derivatives via the tridiagonal system (Thomas algorithm); the
  // natural end conditions pin M[0] = M[k-1] = 0.
  std::vector<double> m(k, 0.0);
  if (k > 2) {
    const std::size_t inner = k - 2;
    std::vector<double> diag(inner), upper(inner), rhs(inner);
    for (std::size_t i = 1; i + 1 < k; ++i) {
      const double h0 = kx[i] - kx[i - 1];
      const double h1 = kx[i + 1] - kx[i];
      diag[i - 1] = 2.0 * (h0 + h1);
      upper[i - 1] = h1;
      rhs[i - 1] = 6.0 * ((ky[i + 1] - ky[i]) / h1 - (ky[i] - ky[i - 1]) / h0);
    }
    for (std::size_t i = 1; i < inner; ++i) {
      const double lower = kx[i + 1] - kx[i];  // h of row i, equals upper[i-1]
      const double w = lower / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m[inner] = rhs[inner - 1] / diag[inner - 1];
    for (std::size_t i = inner - 1; i-- > 0;) {
      m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
    }
  }

  std::vector<double> out(n);
  std::size_t seg = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double x = static_cast<double>(t);
    while (seg + 2 < k && x > kx[seg + 1]) ++seg;
    const double h = kx[seg + 1] - kx[seg];
    const double a = (kx[seg + 1] - x) / h;
    const double b = (x - kx[seg]) / h;
    out[t] = a * ky[seg] + b * ky[seg + 1] +
             ((a * a * a - a) * m[seg] + (b * b * b - b) * m[seg + 1]) * h * h / 6.0;
  }
  return out;
}

ImfDecomposition decompose(const TimeSeries& x, const SiftConfig& cfg) {
  cfg.validate();
  const std::size_t n = x.size();
  if (n < 8) throw Error(ErrorKind::TooShort, "EMD needs at least 8 samples");
  const auto s = x.samples();
  if (std::all_of(s.begin(), s.end(), [&](double v) { return v == s[0]; })) {
    throw Error(ErrorKind::ConstantSignal, "EMD of a constant signal");
  }

  std::vector<double> residue(s.begin(), s.end());
  std::vector<TimeSeries> imfs;
  std::vector<ImfInfo> info;
  while (imfs.size() < cfg.max_imfs) {
    const auto ext = count_extrema(residue);
    if (ext.total() < 3 || ext.maxima == 0 || ext.minima == 0) break;
    auto result = sift(residue, n, cfg);
    if (!result) break;
    for (std::size_t i = 0; i < n; ++i) residue[i] -= result->imf[i];
    const auto imf_ext = count_extrema(result->imf);
    const auto zc = count_zero_crossings(result->imf);
    TimeSeries imf(std::move(result->imf), x.sample_rate());
    info.push_back({result->iterations, imf_ext.total(), zc, mean_frequency_hz(imf)});
    imfs.push_back(std::move(imf));
  }
  return ImfDecomposition{std::move(imfs), std::move(info),
                          TimeSeries(std::move(residue), x.sample_rate()), n};
}

TimeSeries detrend_reconstruct(const ImfDecomposition& d, double cutoff_hz) {
  if (!(cutoff_hz >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "trend cutoff must be >= 0");
  }
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < d.imfs.size(); ++i) {
    if (d.info[i].mean_frequency_hz >= cutoff_hz) last = i;
  }
  if (!last) {
    throw Error(ErrorKind::AllComponentsRejected,
                "no IMF oscillates at or above the trend cutoff");
  }
  std::vector<double> out(d.source_length, 0.0);
  for (std::size_t i = 0; i <= *last; ++i) {
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += d.imfs[i][t];
  }
  return TimeSeries(std::move(out), d.residue.sample_rate());
}

}  // namespace fuzentra::emd
