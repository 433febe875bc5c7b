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

// Dense complex linear algebra over labeled multi-register systems.
// Register order is big-endian everywhere: the first label of a layout is
// the most significant digit of a flat index.

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "dbqc/error.hpp"
#include "dbqc/layout.hpp"
#include "dbqc/matrix.hpp"
#include "dbqc/rng.hpp"

namespace dbqc {

/// Default cap on the number of entries a single matrix may hold.
inline constexpr std::size_t kDefaultEntryCap = std::size_t{1} << 20;

/// Absolute tolerance for complex equality checks.
inline constexpr double kEps = 1e-10;

/// Kronecker product a (x) b. Throws CapacityError when the result would
/// exceed `entry_cap` entries.
Matrix tensor_product(const Matrix& a, const Matrix& b, std::size_t entry_cap = kDefaultEntryCap);
Matrix tensor_product(std::initializer_list<Matrix> factors, std::size_t entry_cap = kDefaultEntryCap);

/// `op` acting on `targets` (in the given order) tensored with the identity
/// elsewhere, expressed in `layout` order. Targets need not be adjacent.
Matrix embed_operator(const Matrix& op, const std::vector<std::string>& targets,
                      const RegisterLayout& layout, std::size_t entry_cap = kDefaultEntryCap);

/// Reduced state on `keep`. The result is ordered as the kept registers
/// appear in `layout`.
Matrix partial_trace(const Matrix& rho, const std::vector<std::string>& keep,
                     const RegisterLayout& layout);

/// Complement of partial_trace: trace out the named registers.
Matrix trace_out(const Matrix& rho, const std::vector<std::string>& traced,
                 const RegisterLayout& layout);

/// (I (x) <ket|) rho (I (x) |ket>) where ket lives on `measured` (in the
/// given order). Unnormalized; its trace is the outcome probability.
Matrix project_reduce(const Matrix& rho, const std::vector<std::string>& measured,
                      const Matrix& ket, const RegisterLayout& layout);

/// (I (x) <ket|) psi for a column vector psi; the unnormalized post-measurement
/// ket on the remaining registers.
Matrix project_ket(const Matrix& psi, const std::vector<std::string>& measured, const Matrix& ket,
                   const RegisterLayout& layout);

/// rho <- U rho U^dagger with U acting on `targets`.
Matrix conjugate_by(const Matrix& rho, const Matrix& u, const std::vector<std::string>& targets,
                    const RegisterLayout& layout);

/// ket <- U ket with U acting on `targets`.
Matrix apply_to_ket(const Matrix& ket, const Matrix& u, const std::vector<std::string>& targets,
                    const RegisterLayout& layout);

/// Reorders registers: result is expressed in `target` layout, which must
/// hold the same registers as `source` in some order. Works for kets and
/// square operators.
Matrix permute_registers(const Matrix& m, const RegisterLayout& source, const RegisterLayout& target);

/// Haar-random unitary: orthonormalized columns of a complex Gaussian matrix,
/// with R's diagonal kept real positive.
Matrix random_unitary(std::size_t d, Rng& rng);
/// Haar-random pure state (first column of a Haar unitary).
Matrix random_ket(std::size_t d, Rng& rng);
/// Random density matrix of the given rank (partial trace of a random pure state).
Matrix random_density(std::size_t d, Rng& rng, std::size_t rank = 0);

/// min over phi of || a - e^{i phi} b ||_F.
double distance_up_to_phase(const Matrix& a, const Matrix& b);

/// Hermitian eigendecomposition: eigenvalues ascending, eigenvectors as columns.
struct EigenSystem {
  std::vector<double> values;
  Matrix vectors;
};
EigenSystem eigh(const Matrix& hermitian);

/// Extends the orthonormal columns of `isometry` (n x k, k <= n) to an n x n
/// unitary whose first k columns are exactly the input columns.
Matrix complete_to_unitary(const Matrix& isometry);

/// Normalized computational-basis ket.
inline Matrix ket(std::size_t d, std::size_t index) { return Matrix::basis(d, index); }

}  // namespace dbqc
