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

#include <cstddef>
#include <string>
#include <vector>

#include "dbqc/layout.hpp"

#include "dbqc/matrix.hpp"

namespace dbqc::gates {

Matrix I(std::size_t d = 2);
Matrix X();
Matrix Y();
Matrix Z();
Matrix H();
Matrix S();
Matrix T();
/// Control is the first (most significant) qubit.
Matrix CNOT();
Matrix CZ();
Matrix SWAP(std::size_t d = 2);
Matrix RY(double theta);
Matrix RZ(double theta);
/// Three-qubit Toffoli, controls first.
Matrix Toffoli();

/// Generalized Pauli shift X|j> = |j+1 mod d>.
Matrix shift(std::size_t d);
/// Generalized Pauli clock Z|j> = w^j |j>, w = exp(2 pi i / d).
Matrix clock(std::size_t d);

/// |0><0| (x) I + |1><1| (x) u on a control qubit followed by u's space.
Matrix controlled(const Matrix& u);

}  // namespace dbqc::gates

namespace dbqc {

/// A gate acting on named registers, in the order given.
struct GateOp {
  std::string name;
  std::vector<std::string> targets;
  Matrix matrix;
};

/// Product of the gates (first gate applied first) on `layout`.
Matrix circuit_unitary(const std::vector<GateOp>& ops, const RegisterLayout& layout);

}  // namespace dbqc
