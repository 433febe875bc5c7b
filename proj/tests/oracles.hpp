// Copyright 2026 The dbqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Brute-force reference implementations used only by tests. They work on
// explicit digit expansions and never call into the library's kernels.

#include <complex>
#include <cstddef>
#include <vector>

#include "dbqc/matrix.hpp"

namespace oracle {

using dbqc::Complex;
using dbqc::Matrix;

inline std::vector<std::size_t> digits(std::size_t index, const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> out(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    out[k] = index % dims[k];
    index /= dims[k];
  }
  return out;
}

inline std::size_t flatten(const std::vector<std::size_t>& dig, const std::vector<std::size_t>& dims) {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + dig[k];
  return idx;
}

inline std::size_t product(const std::vector<std::size_t>& dims) {
  std::size_t p = 1;
  for (auto d : dims) p *= d;
  return p;
}

inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  return out;
}

inline Matrix naive_kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      out(i, j) = a(i / b.rows(), j / b.cols()) * b(i % b.rows(), j % b.cols());
  return out;
}

// op acting on register positions `targets` (in op's order) of a register
// system with dimensions `dims`; identity elsewhere.
inline Matrix naive_embed(const Matrix& op, const std::vector<std::size_t>& targets,
                          const std::vector<std::size_t>& dims) {
  const std::size_t n = product(dims);
  std::vector<std::size_t> tdims;
  for (auto t : targets) tdims.push_back(dims[t]);
  Matrix out(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const auto dr = digits(r, dims);
      const auto dc = digits(c, dims);
      bool same = true;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        bool is_target = false;
        for (auto t : targets) is_target = is_target || t == k;
        if (!is_target && dr[k] != dc[k]) same = false;
      }
      if (!same) continue;
      std::vector<std::size_t> tr, tc;
      for (auto t : targets) {
        tr.push_back(dr[t]);
        tc.push_back(dc[t]);
      }
      out(r, c) = op(flatten(tr, tdims), flatten(tc, tdims));
    }
  return out;
}

// Reduced state keeping positions in `keep` (result ordered by position).
inline Matrix naive_partial_trace(const Matrix& rho, const std::vector<std::size_t>& keep,
                                  const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> kdims;
  for (std::size_t k = 0; k < dims.size(); ++k)
    for (auto q : keep)
      if (q == k) kdims.push_back(dims[k]);
  const std::size_t m = product(kdims);
  Matrix out(m, m);
  const std::size_t n = product(dims);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const auto dr = digits(r, dims);
      const auto dc = digits(c, dims);
      bool match = true;
      std::vector<std::size_t> kr, kc;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        bool kept = false;
        for (auto q : keep) kept = kept || q == k;
        if (kept) {
          kr.push_back(dr[k]);
          kc.push_back(dc[k]);
        } else if (dr[k] != dc[k]) {
          match = false;
        }
      }
      if (match) out(flatten(kr, kdims), flatten(kc, kdims)) += rho(r, c);
    }
  return out;
}

// Reorders registers: register i of the result is register perm[i] of m.
inline Matrix naive_permute(const Matrix& m, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& perm) {
  std::vector<std::size_t> ndims;
  for (auto p : perm) ndims.push_back(dims[p]);
  const std::size_t n = product(dims);
  Matrix out(n, n);
  auto map = [&](std::size_t idx) {
    const auto d = digits(idx, dims);
    std::vector<std::size_t> nd;
    for (auto p : perm) nd.push_back(d[p]);
    return flatten(nd, ndims);
  };
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out(map(r), map(c)) = m(r, c);
  return out;
}

inline double max_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return 1e300;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline Matrix dagger(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

inline Complex naive_trace(const Matrix& a) {
  Complex t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

}  // namespace oracle
