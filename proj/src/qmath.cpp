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

#include "dbqc/qmath.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "dbqc/kernels.hpp"

namespace dbqc {

namespace {

std::vector<std::size_t> positions_of(const std::vector<std::string>& labels, const RegisterLayout& layout) {
  std::vector<std::size_t> pos;
  pos.reserve(labels.size());
  for (const auto& l : labels) {
    const std::size_t p = layout.index_of(l);
    if (std::find(pos.begin(), pos.end(), p) != pos.end())
      throw DimensionError("register '" + l + "' listed twice");
    pos.push_back(p);
  }
  return pos;
}

void require_layout(const Matrix& m, const RegisterLayout& layout, const char* what) {
  if (m.rows() != layout.dim())
    throw DimensionError(std::string(what) + ": matrix dimension " + std::to_string(m.rows()) +
                         " does not match layout dimension " + std::to_string(layout.dim()));
}

void check_cap(std::size_t entries, std::size_t cap) {
  if (entries > cap)
    throw CapacityError("matrix of " + std::to_string(entries) + " entries exceeds the cap of " + std::to_string(cap));
}

}  // namespace

Matrix tensor_product(const Matrix& a, const Matrix& b, std::size_t entry_cap) {
  if (a.empty() || b.empty()) throw DimensionError("tensor_product of an empty matrix");
  check_cap(a.size() * b.size(), entry_cap);
  return kernels::kron(a, b);
}

Matrix tensor_product(std::initializer_list<Matrix> factors, std::size_t entry_cap) {
  if (factors.size() == 0) throw DimensionError("tensor_product of no factors");
  auto it = factors.begin();
  Matrix out = *it++;
  for (; it != factors.end(); ++it) out = tensor_product(out, *it, entry_cap);
  return out;
}

Matrix embed_operator(const Matrix& op, const std::vector<std::string>& targets, const RegisterLayout& layout,
                      std::size_t entry_cap) {
  const auto pos = positions_of(targets, layout);
  const std::size_t d = layout.dim_of(targets);
  if (op.rows() != d || op.cols() != d)
    throw DimensionError("embed_operator: operator is " + std::to_string(op.rows()) + "x" +
                         std::to_string(op.cols()) + " but targets span dimension " + std::to_string(d));
  check_cap(layout.dim() * layout.dim(), entry_cap);
  Matrix out = Matrix::identity(layout.dim());
  kernels::apply_left(op, kernels::make_split(layout, pos), out);
  return out;
}

Matrix partial_trace(const Matrix& rho, const std::vector<std::string>& keep, const RegisterLayout& layout) {
  require_layout(rho, layout, "partial_trace");
  positions_of(keep, layout);
  std::vector<std::string> traced;
  for (const auto& r : layout.registers())
    if (std::find(keep.begin(), keep.end(), r.label) == keep.end()) traced.push_back(r.label);
  return trace_out(rho, traced, layout);
}

Matrix trace_out(const Matrix& rho, const std::vector<std::string>& traced, const RegisterLayout& layout) {
  require_layout(rho, layout, "trace_out");
  if (!rho.is_square()) throw DimensionError("trace_out: expected a square matrix");
  if (traced.empty()) return rho;
  return kernels::partial_trace(rho, kernels::make_split(layout, positions_of(traced, layout)));
}

Matrix project_reduce(const Matrix& rho, const std::vector<std::string>& measured, const Matrix& ket,
                      const RegisterLayout& layout) {
  require_layout(rho, layout, "project_reduce");
  return kernels::project_reduce(rho, kernels::make_split(layout, positions_of(measured, layout)), ket);
}

Matrix project_ket(const Matrix& psi, const std::vector<std::string>& measured, const Matrix& ket,
                   const RegisterLayout& layout) {
  if (psi.cols() != 1 || psi.rows() != layout.dim()) throw DimensionError("project_ket: ket does not match layout");
  const auto split = kernels::make_split(layout, positions_of(measured, layout));
  if (ket.size() != split.target_offsets.size()) throw DimensionError("project_ket: bra has wrong dimension");
  Matrix out(split.rest_offsets.size(), 1);
  for (std::size_t r = 0; r < split.rest_offsets.size(); ++r) {
    Complex acc = 0.0;
    for (std::size_t t = 0; t < split.target_offsets.size(); ++t)
      acc += std::conj(ket[t]) * psi[split.rest_offsets[r] + split.target_offsets[t]];
    out[r] = acc;
  }
  return out;
}

Matrix conjugate_by(const Matrix& rho, const Matrix& u, const std::vector<std::string>& targets,
                    const RegisterLayout& layout) {
  require_layout(rho, layout, "conjugate_by");
  const auto split = kernels::make_split(layout, positions_of(targets, layout));
  Matrix out = rho;
  kernels::apply_left(u, split, out);
  kernels::apply_right_adjoint(u, split, out);
  return out;
}

Matrix apply_to_ket(const Matrix& ket, const Matrix& u, const std::vector<std::string>& targets,
                    const RegisterLayout& layout) {
  require_layout(ket, layout, "apply_to_ket");
  Matrix out = ket;
  kernels::apply_left(u, kernels::make_split(layout, positions_of(targets, layout)), out);
  return out;
}

Matrix permute_registers(const Matrix& m, const RegisterLayout& source, const RegisterLayout& target) {
  require_layout(m, source, "permute_registers");
  if (source.count() != target.count() || source.dim() != target.dim())
    throw DimensionError("permute_registers: layouts hold different registers");
  std::vector<std::size_t> src_stride(target.count());
  for (std::size_t j = 0; j < target.count(); ++j) {
    const auto& reg = target.registers()[j];
    const std::size_t p = source.index_of(reg.label);
    if (source.registers()[p].dim != reg.dim) throw DimensionError("permute_registers: dimension mismatch");
    src_stride[j] = source.stride(p);
  }
  const std::size_t n = target.dim();
  std::vector<std::size_t> map(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rem = i;
    std::size_t src = 0;
    for (std::size_t j = target.count(); j-- > 0;) {
      const std::size_t dj = target.registers()[j].dim;
      src += (rem % dj) * src_stride[j];
      rem /= dj;
    }
    map[i] = src;
  }
  if (m.cols() == 1) {
    Matrix out(n, 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = m[map[i]];
    return out;
  }
  if (!m.is_square()) throw DimensionError("permute_registers: expected a ket or square operator");
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = m(map[i], map[j]);
  return out;
}

Matrix random_unitary(std::size_t d, Rng& rng) {
  if (d == 0) throw DimensionError("random_unitary: dimension must be positive");
  // Columns of a complex Ginibre matrix, orthonormalized by modified
  // Gram-Schmidt with one re-orthogonalization pass. MGS leaves R with a
  // real positive diagonal, which is the phase convention that makes Q Haar.
  std::vector<std::vector<Complex>> cols(d, std::vector<Complex>(d));
  for (auto& c : cols)
    for (auto& z : c) z = Complex(rng.normal(), rng.normal()) / std::numbers::sqrt2;
  for (std::size_t j = 0; j < d; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        Complex proj = 0.0;
        for (std::size_t i = 0; i < d; ++i) proj += std::conj(cols[k][i]) * cols[j][i];
        for (std::size_t i = 0; i < d; ++i) cols[j][i] -= proj * cols[k][i];
      }
    }
    double nrm = 0.0;
    for (const auto& z : cols[j]) nrm += std::norm(z);
    nrm = std::sqrt(nrm);
    for (auto& z : cols[j]) z /= nrm;
  }
  Matrix u(d, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) u(i, j) = cols[j][i];
  return u;
}

Matrix random_ket(std::size_t d, Rng& rng) {
  std::vector<Complex> amps(d);
  double nrm = 0.0;
  for (auto& z : amps) {
    z = Complex(rng.normal(), rng.normal());
    nrm += std::norm(z);
  }
  nrm = std::sqrt(nrm);
  for (auto& z : amps) z /= nrm;
  return Matrix::column(std::move(amps));
}

Matrix random_density(std::size_t d, Rng& rng, std::size_t rank) {
  if (rank == 0) rank = d;
  // Reshape a random pure state on d*rank into a d x rank matrix G; the
  // reduced state on the first factor is G G^dagger.
  const Matrix psi = random_ket(d * rank, rng);
  const Matrix g(d, rank, std::vector<Complex>(psi.entries().begin(), psi.entries().end()));
  return g * g.adjoint();
}

double distance_up_to_phase(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("distance_up_to_phase: shape mismatch");
  // The minimizing phase aligns b with a: e^{i phi} = <b,a>/|<b,a>|.
  const Complex overlap = inner(b, a);
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - phase * b[i]);
  return std::sqrt(acc);
}

EigenSystem eigh(const Matrix& hermitian) {
  if (!hermitian.is_square()) throw DimensionError("eigh: expected a square matrix");
  const auto n = static_cast<Eigen::Index>(hermitian.rows());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      m(r, c) = hermitian(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  if (solver.info() != Eigen::Success) throw ValidationError("eigh: eigendecomposition failed");
  EigenSystem out;
  out.values.resize(static_cast<std::size_t>(n));
  out.vectors = Matrix(hermitian.rows(), hermitian.rows());
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    for (Eigen::Index r = 0; r < n; ++r)
      out.vectors(static_cast<std::size_t>(r), static_cast<std::size_t>(i)) = solver.eigenvectors()(r, i);
  }
  return out;
}

Matrix complete_to_unitary(const Matrix& isometry) {
  const std::size_t n = isometry.rows();
  const std::size_t k = isometry.cols();
  if (k > n) throw DimensionError("complete_to_unitary: more columns than rows");
  if (max_abs_diff(isometry.adjoint() * isometry, Matrix::identity(k)) > 1e-9)
    throw ValidationError("complete_to_unitary: input columns are not orthonormal");
  std::vector<std::vector<Complex>> cols;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<Complex> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = isometry(i, j);
    cols.push_back(std::move(c));
  }
  for (std::size_t e = 0; e < n && cols.size() < n; ++e) {
    std::vector<Complex> v(n, 0.0);
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& c : cols) {
        Complex proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += std::conj(c[i]) * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= proj * c[i];
      }
    double nrm = 0.0;
    for (const auto& z : v) nrm += std::norm(z);
    nrm = std::sqrt(nrm);
    if (nrm < 1e-6) continue;
    for (auto& z : v) z /= nrm;
    cols.push_back(std::move(v));
  }
  Matrix u(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) u(i, j) = cols[j][i];
  return u;
}

}  // namespace dbqc
