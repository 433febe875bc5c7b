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

#include "dbqc/kernels.hpp"

#include <algorithm>

#include "dbqc/error.hpp"

namespace dbqc::kernels {

namespace {

std::vector<std::size_t> offsets_for(const RegisterLayout& layout, const std::vector<std::size_t>& positions) {
  std::size_t count = 1;
  for (auto p : positions) count *= layout.registers()[p].dim;
  std::vector<std::size_t> out(count);
  std::vector<std::size_t> digits(positions.size(), 0);
  for (std::size_t n = 0; n < count; ++n) {
    std::size_t off = 0;
    for (std::size_t j = 0; j < positions.size(); ++j) off += digits[j] * layout.stride(positions[j]);
    out[n] = off;
    // Increment the mixed-radix counter, last position fastest.
    for (std::size_t j = positions.size(); j-- > 0;) {
      if (++digits[j] < layout.registers()[positions[j]].dim) break;
      digits[j] = 0;
    }
  }
  return out;
}

void check_square(const Matrix& m, const char* what) {
  if (!m.is_square()) throw DimensionError(std::string(what) + ": expected a square matrix");
}

}  // namespace

Split make_split(const RegisterLayout& layout, const std::vector<std::size_t>& target_positions) {
  std::vector<std::size_t> rest;
  for (std::size_t p = 0; p < layout.count(); ++p)
    if (std::find(target_positions.begin(), target_positions.end(), p) == target_positions.end()) rest.push_back(p);
  for (auto p : target_positions)
    if (p >= layout.count()) throw DimensionError("split target position out of range");
  return Split{offsets_for(layout, target_positions), offsets_for(layout, rest)};
}

// ---------------------------------------------------------------------------
// Serial reference.

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar)
    for (std::size_t br = 0; br < b.rows(); ++br)
      for (std::size_t ac = 0; ac < a.cols(); ++ac)
        for (std::size_t bc = 0; bc < b.cols(); ++bc)
          c(ar * b.rows() + br, ac * b.cols() + bc) = a(ar, ac) * b(br, bc);
  return c;
}

void apply_left(const Matrix& op, const Split& split, Matrix& m) {
  const std::size_t k = split.target_dim();
  if (op.rows() != k || op.cols() != k) throw DimensionError("apply_left: operator does not match targets");
  if (m.rows() != k * split.rest_dim()) throw DimensionError("apply_left: matrix does not match layout");
  std::vector<Complex> v(k);
  for (std::size_t r = 0; r < split.rest_dim(); ++r) {
    const std::size_t base = split.rest_offsets[r];
    for (std::size_t c = 0; c < m.cols(); ++c) {
      for (std::size_t t = 0; t < k; ++t) v[t] = m(base + split.target_offsets[t], c);
      for (std::size_t t = 0; t < k; ++t) {
        Complex acc = 0.0;
        for (std::size_t u = 0; u < k; ++u) acc += op(t, u) * v[u];
        m(base + split.target_offsets[t], c) = acc;
      }
    }
  }
}

void apply_right_adjoint(const Matrix& op, const Split& split, Matrix& m) {
  const std::size_t k = split.target_dim();
  if (op.rows() != k || op.cols() != k) throw DimensionError("apply_right_adjoint: operator does not match targets");
  if (m.cols() != k * split.rest_dim()) throw DimensionError("apply_right_adjoint: matrix does not match layout");
  std::vector<Complex> v(k);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t r = 0; r < split.rest_dim(); ++r) {
      const std::size_t base = split.rest_offsets[r];
      for (std::size_t t = 0; t < k; ++t) v[t] = m(i, base + split.target_offsets[t]);
      for (std::size_t t = 0; t < k; ++t) {
        Complex acc = 0.0;
        for (std::size_t u = 0; u < k; ++u) acc += v[u] * std::conj(op(t, u));
        m(i, base + split.target_offsets[t]) = acc;
      }
    }
  }
}

Matrix partial_trace(const Matrix& rho, const Split& traced) {
  check_square(rho, "partial_trace");
  const std::size_t keep = traced.rest_dim();
  Matrix out(keep, keep);
  for (std::size_t r = 0; r < keep; ++r)
    for (std::size_t s = 0; s < keep; ++s) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < traced.target_dim(); ++t)
        acc += rho(traced.rest_offsets[r] + traced.target_offsets[t], traced.rest_offsets[s] + traced.target_offsets[t]);
      out(r, s) = acc;
    }
  return out;
}

Matrix project_reduce(const Matrix& rho, const Split& measured, const Matrix& ket) {
  check_square(rho, "project_reduce");
  const std::size_t k = measured.target_dim();
  const std::size_t rest = measured.rest_dim();
  if (ket.size() != k) throw DimensionError("project_reduce: ket does not match measured registers");
  Matrix w(rho.rows(), rest);
  for (std::size_t i = 0; i < rho.rows(); ++i)
    for (std::size_t s = 0; s < rest; ++s) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += rho(i, measured.rest_offsets[s] + measured.target_offsets[t]) * ket[t];
      w(i, s) = acc;
    }
  Matrix out(rest, rest);
  for (std::size_t r = 0; r < rest; ++r)
    for (std::size_t s = 0; s < rest; ++s) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += std::conj(ket[t]) * w(measured.rest_offsets[r] + measured.target_offsets[t], s);
      out(r, s) = acc;
    }
  return out;
}

}  // namespace serial

// ---------------------------------------------------------------------------
// OpenMP. Same per-entry arithmetic as the serial reference; only the
// outermost independent loop is distributed.

namespace omp {

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul shape mismatch");
  Matrix c(a.rows(), b.cols());
  const auto n = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows() * b.rows(), a.cols() * b.cols());
  const auto n = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t arr = 0; arr < n; ++arr) {
    const auto ar = static_cast<std::size_t>(arr);
    for (std::size_t br = 0; br < b.rows(); ++br)
      for (std::size_t ac = 0; ac < a.cols(); ++ac)
        for (std::size_t bc = 0; bc < b.cols(); ++bc)
          c(ar * b.rows() + br, ac * b.cols() + bc) = a(ar, ac) * b(br, bc);
  }
  return c;
}

void apply_left(const Matrix& op, const Split& split, Matrix& m) {
  const std::size_t k = split.target_dim();
  if (op.rows() != k || op.cols() != k) throw DimensionError("apply_left: operator does not match targets");
  if (m.rows() != k * split.rest_dim()) throw DimensionError("apply_left: matrix does not match layout");
  const auto n = static_cast<std::ptrdiff_t>(split.rest_dim());
#pragma omp parallel
  {
    std::vector<Complex> v(k);
#pragma omp for schedule(static)
    for (std::ptrdiff_t rr = 0; rr < n; ++rr) {
      const std::size_t base = split.rest_offsets[static_cast<std::size_t>(rr)];
      for (std::size_t c = 0; c < m.cols(); ++c) {
        for (std::size_t t = 0; t < k; ++t) v[t] = m(base + split.target_offsets[t], c);
        for (std::size_t t = 0; t < k; ++t) {
          Complex acc = 0.0;
          for (std::size_t u = 0; u < k; ++u) acc += op(t, u) * v[u];
          m(base + split.target_offsets[t], c) = acc;
        }
      }
    }
  }
}

void apply_right_adjoint(const Matrix& op, const Split& split, Matrix& m) {
  const std::size_t k = split.target_dim();
  if (op.rows() != k || op.cols() != k) throw DimensionError("apply_right_adjoint: operator does not match targets");
  if (m.cols() != k * split.rest_dim()) throw DimensionError("apply_right_adjoint: matrix does not match layout");
  const auto n = static_cast<std::ptrdiff_t>(m.rows());
#pragma omp parallel
  {
    std::vector<Complex> v(k);
#pragma omp for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      for (std::size_t r = 0; r < split.rest_dim(); ++r) {
        const std::size_t base = split.rest_offsets[r];
        for (std::size_t t = 0; t < k; ++t) v[t] = m(i, base + split.target_offsets[t]);
        for (std::size_t t = 0; t < k; ++t) {
          Complex acc = 0.0;
          for (std::size_t u = 0; u < k; ++u) acc += v[u] * std::conj(op(t, u));
          m(i, base + split.target_offsets[t]) = acc;
        }
      }
    }
  }
}

Matrix partial_trace(const Matrix& rho, const Split& traced) {
  check_square(rho, "partial_trace");
  const std::size_t keep = traced.rest_dim();
  Matrix out(keep, keep);
  const auto n = static_cast<std::ptrdiff_t>(keep);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t rr = 0; rr < n; ++rr) {
    const auto r = static_cast<std::size_t>(rr);
    for (std::size_t s = 0; s < keep; ++s) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < traced.target_dim(); ++t)
        acc += rho(traced.rest_offsets[r] + traced.target_offsets[t], traced.rest_offsets[s] + traced.target_offsets[t]);
      out(r, s) = acc;
    }
  }
  return out;
}

Matrix project_reduce(const Matrix& rho, const Split& measured, const Matrix& ket) {
  check_square(rho, "project_reduce");
  const std::size_t k = measured.target_dim();
  const std::size_t rest = measured.rest_dim();
  if (ket.size() != k) throw DimensionError("project_reduce: ket does not match measured registers");
  Matrix w(rho.rows(), rest);
  const auto rows = static_cast<std::ptrdiff_t>(rho.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t s = 0; s < rest; ++s) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += rho(i, measured.rest_offsets[s] + measured.target_offsets[t]) * ket[t];
      w(i, s) = acc;
    }
  }
  Matrix out(rest, rest);
  const auto n = static_cast<std::ptrdiff_t>(rest);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t rr = 0; rr < n; ++rr) {
    const auto r = static_cast<std::size_t>(rr);
    for (std::size_t s = 0; s < rest; ++s) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += std::conj(ket[t]) * w(measured.rest_offsets[r] + measured.target_offsets[t], s);
      out(r, s) = acc;
    }
  }
  return out;
}

}  // namespace omp

// ---------------------------------------------------------------------------
// Dispatch.

Matrix matmul(const Matrix& a, const Matrix& b) {
  return a.rows() * a.cols() * b.cols() >= kParallelThreshold ? omp::matmul(a, b) : serial::matmul(a, b);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  return a.size() * b.size() >= kParallelThreshold ? omp::kron(a, b) : serial::kron(a, b);
}

void apply_left(const Matrix& op, const Split& split, Matrix& m) {
  if (m.size() * split.target_dim() >= kParallelThreshold) {
    omp::apply_left(op, split, m);
  } else {
    serial::apply_left(op, split, m);
  }
}

void apply_right_adjoint(const Matrix& op, const Split& split, Matrix& m) {
  if (m.size() * split.target_dim() >= kParallelThreshold) {
    omp::apply_right_adjoint(op, split, m);
  } else {
    serial::apply_right_adjoint(op, split, m);
  }
}

Matrix partial_trace(const Matrix& rho, const Split& traced) {
  const std::size_t work = traced.rest_dim() * traced.rest_dim() * traced.target_dim();
  return work >= kParallelThreshold ? omp::partial_trace(rho, traced) : serial::partial_trace(rho, traced);
}

Matrix project_reduce(const Matrix& rho, const Split& measured, const Matrix& ket) {
  const std::size_t work = rho.size() * measured.target_dim();
  return work >= kParallelThreshold ? omp::project_reduce(rho, measured, ket)
                                    : serial::project_reduce(rho, measured, ket);
}

}  // namespace dbqc::kernels
