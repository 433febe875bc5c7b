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

// Hot loops of the simulator. Every kernel exists twice: a plain serial
// reference and an OpenMP version that parallelizes the outermost
// independent loop. Both compute each output entry with the same sequence
// of floating-point operations, so their results are bit-identical; the
// unit tests assert exactly that.

#include <cstddef>
#include <vector>

#include "dbqc/layout.hpp"
#include "dbqc/matrix.hpp"

namespace dbqc::kernels {

/// Flat-index decomposition of a layout into a target part (in the order
/// the targets were given) and the remaining registers (in layout order).
struct Split {
  std::vector<std::size_t> target_offsets;
  std::vector<std::size_t> rest_offsets;

  std::size_t target_dim() const noexcept { return target_offsets.size(); }
  std::size_t rest_dim() const noexcept { return rest_offsets.size(); }
};

Split make_split(const RegisterLayout& layout, const std::vector<std::size_t>& target_positions);

namespace serial {
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix kron(const Matrix& a, const Matrix& b);
/// m <- (op on targets) * m, for any column count of m.
void apply_left(const Matrix& op, const Split& split, Matrix& m);
/// m <- m * (op on targets)^dagger; m square.
void apply_right_adjoint(const Matrix& op, const Split& split, Matrix& m);
/// Trace over the target registers; result indexed by the rest.
Matrix partial_trace(const Matrix& rho, const Split& traced);
/// (I (x) <ket|) rho (I (x) |ket>) with ket on the target registers.
Matrix project_reduce(const Matrix& rho, const Split& measured, const Matrix& ket);
}  // namespace serial

namespace omp {
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix kron(const Matrix& a, const Matrix& b);
void apply_left(const Matrix& op, const Split& split, Matrix& m);
void apply_right_adjoint(const Matrix& op, const Split& split, Matrix& m);
Matrix partial_trace(const Matrix& rho, const Split& traced);
Matrix project_reduce(const Matrix& rho, const Split& measured, const Matrix& ket);
}  // namespace omp

/// Work (in complex multiply-adds) above which the dispatchers below use
/// the OpenMP path.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 16;

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix kron(const Matrix& a, const Matrix& b);
void apply_left(const Matrix& op, const Split& split, Matrix& m);
void apply_right_adjoint(const Matrix& op, const Split& split, Matrix& m);
Matrix partial_trace(const Matrix& rho, const Split& traced);
Matrix project_reduce(const Matrix& rho, const Split& measured, const Matrix& ket);

}  // namespace dbqc::kernels
