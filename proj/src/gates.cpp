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

#include "dbqc/gates.hpp"

#include <cmath>
#include <numbers>

#include "dbqc/error.hpp"
#include "dbqc/kernels.hpp"

namespace dbqc::gates {

Matrix I(std::size_t d) { return Matrix::identity(d); }

Matrix X() { return Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}); }

Matrix Y() { return Matrix::from_rows({{0.0, Complex(0, -1)}, {Complex(0, 1), 0.0}}); }

Matrix Z() { return Matrix::from_rows({{1.0, 0.0}, {0.0, -1.0}}); }

Matrix H() {
  const double s = 1.0 / std::numbers::sqrt2;
  return Matrix::from_rows({{s, s}, {s, -s}});
}

Matrix S() { return Matrix::from_rows({{1.0, 0.0}, {0.0, Complex(0, 1)}}); }

Matrix T() { return Matrix::from_rows({{1.0, 0.0}, {0.0, std::polar(1.0, std::numbers::pi / 4)}}); }

Matrix CNOT() { return controlled(X()); }

Matrix CZ() { return controlled(Z()); }

Matrix SWAP(std::size_t d) {
  Matrix m(d * d, d * d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) m(b * d + a, a * d + b) = 1.0;
  return m;
}

Matrix RY(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return Matrix::from_rows({{c, -s}, {s, c}});
}

Matrix RZ(double theta) {
  return Matrix::from_rows({{std::polar(1.0, -theta / 2), 0.0}, {0.0, std::polar(1.0, theta / 2)}});
}

Matrix Toffoli() { return controlled(CNOT()); }

Matrix shift(std::size_t d) {
  if (d == 0) throw DimensionError("shift: dimension must be positive");
  Matrix m(d, d);
  for (std::size_t j = 0; j < d; ++j) m((j + 1) % d, j) = 1.0;
  return m;
}

Matrix clock(std::size_t d) {
  if (d == 0) throw DimensionError("clock: dimension must be positive");
  Matrix m(d, d);
  for (std::size_t j = 0; j < d; ++j)
    m(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(d));
  return m;
}

Matrix controlled(const Matrix& u) {
  if (!u.is_square()) throw DimensionError("controlled: expected a square operator");
  const std::size_t n = u.rows();
  Matrix m(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(n + i, n + j) = u(i, j);
  return m;
}

}  // namespace dbqc::gates

namespace dbqc {

Matrix circuit_unitary(const std::vector<GateOp>& ops, const RegisterLayout& layout) {
  Matrix u = Matrix::identity(layout.dim());
  for (const auto& op : ops) {
    std::vector<std::size_t> pos;
    for (const auto& t : op.targets) pos.push_back(layout.index_of(t));
    if (op.matrix.rows() != layout.dim_of(op.targets) || !op.matrix.is_square())
      throw DimensionError("circuit_unitary: gate '" + op.name + "' does not match its targets");
    kernels::apply_left(op.matrix, kernels::make_split(layout, pos), u);
  }
  return u;
}

}  // namespace dbqc
