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

// Built with -ffast-math (see core/CMakeLists.txt). Inputs reaching this file
// are finite and the tolerance is strictly positive; d == 0 is special-cased
// before any pow so no log(0) is ever formed.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "fuzentra/entropy.hpp"

namespace fuzentra::entropy::detail {

namespace {

// Templates stored component-major: comp[k][i] = x[i + k] - mean_i, so the
// inner loop over j reads contiguous memory.
struct Templates {
  std::vector<std::vector<double>> comp;
};

Templates centered_templates(std::span<const double> x, std::size_t len, std::size_t count) {
  Templates t;
  t.comp.assign(len, std::vector<double>(count));
  for (std::size_t i = 0; i < count; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < len; ++k) s += x[i + k];
    const double mu = s / static_cast<double>(len);
    for (std::size_t k = 0; k < len; ++k) t.comp[k][i] = x[i + k] - mu;
  }
  return t;
}

template <std::size_t M, bool Squared>
__attribute__((target_clones("avx2", "default")))
MembershipSums pair_sums_fixed(const Templates& a, const Templates& b, std::size_t count,
                               double n, double tolerance) {
  const double neg_inv = -1.0 / tolerance;
  std::array<const double*, M> ac{};
  std::array<const double*, M + 1> bc{};
  for (std::size_t k = 0; k < M; ++k) ac[k] = a.comp[k].data();
  for (std::size_t k = 0; k <= M; ++k) bc[k] = b.comp[k].data();

  double sum_m = 0.0, sum_m1 = 0.0;
  for (std::size_t i = 0; i + 1 < count; ++i) {
    std::array<double, M> ai{};
    std::array<double, M + 1> bi{};
    for (std::size_t k = 0; k < M; ++k) ai[k] = ac[k][i];
    for (std::size_t k = 0; k <= M; ++k) bi[k] = bc[k][i];
    double row_m = 0.0, row_m1 = 0.0;
    for (std::size_t j = i + 1; j < count; ++j) {
      double d = 0.0, e = 0.0;
      for (std::size_t k = 0; k < M; ++k) d = std::max(d, std::fabs(ai[k] - ac[k][j]));
      for (std::size_t k = 0; k <= M; ++k) e = std::max(e, std::fabs(bi[k] - bc[k][j]));
      if constexpr (Squared) {
        row_m += std::exp(d * d * neg_inv);
        row_m1 += std::exp(e * e * neg_inv);
      } else {
        const double dn = d > 0.0 ? std::pow(d, n) : 0.0;
        const double en = e > 0.0 ? std::pow(e, n) : 0.0;
        row_m += std::exp(dn * neg_inv);
        row_m1 += std::exp(en * neg_inv);
      }
    }
    sum_m += row_m;
    sum_m1 += row_m1;
  }
  // each unordered pair stands for (i, j) and (j, i)
  return {2.0 * sum_m, 2.0 * sum_m1};
}

MembershipSums pair_sums_generic(const Templates& a, const Templates& b, std::size_t m,
                                 std::size_t count, double n, double tolerance) {
  const double neg_inv = -1.0 / tolerance;
  double sum_m = 0.0, sum_m1 = 0.0;
  for (std::size_t i = 0; i + 1 < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      double d = 0.0, e = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        d = std::max(d, std::fabs(a.comp[k][i] - a.comp[k][j]));
      }
      for (std::size_t k = 0; k <= m; ++k) {
        e = std::max(e, std::fabs(b.comp[k][i] - b.comp[k][j]));
      }
      const double dn = d > 0.0 ? std::pow(d, n) : 0.0;
      const double en = e > 0.0 ? std::pow(e, n) : 0.0;
      sum_m += std::exp(dn * neg_inv);
      sum_m1 += std::exp(en * neg_inv);
    }
  }
  return {2.0 * sum_m, 2.0 * sum_m1};
}

template <std::size_t M>
MembershipSums dispatch_n(const Templates& a, const Templates& b, std::size_t count, double n,
                          double tolerance) {
  if (n == 2.0) return pair_sums_fixed<M, true>(a, b, count, n, tolerance);
  return pair_sums_fixed<M, false>(a, b, count, n, tolerance);
}

}  // namespace

MembershipSums fuzzy_membership_sums(std::span<const double> x, std::size_t m, double n,
                                     double tolerance) {
  const std::size_t count = x.size() - m;
  const auto a = centered_templates(x, m, count);
  const auto b = centered_templates(x, m + 1, count);
  switch (m) {
    case 1: return dispatch_n<1>(a, b, count, n, tolerance);
    case 2: return dispatch_n<2>(a, b, count, n, tolerance);
    case 3: return dispatch_n<3>(a, b, count, n, tolerance);
    case 4: return dispatch_n<4>(a, b, count, n, tolerance);
    default: return pair_sums_generic(a, b, m, count, n, tolerance);
  }
}

}  // namespace fuzentra::entropy::detail
