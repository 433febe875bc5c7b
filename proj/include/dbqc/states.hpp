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

// States, CPTP channels and unitary programs stored as Choi states.
//
// A program over ports (out, in) is the normalized Choi state
// (E (x) id)(|w><w|) with |w> = sum_i |ii>/sqrt(d_in). For a unitary U the
// state is pure: |U> = (U (x) I)|w>, so amplitude (o, i) equals U[o][i]/sqrt(d_in).

#include <cstddef>
#include <string>
#include <vector>

#include "dbqc/layout.hpp"
#include "dbqc/matrix.hpp"
#include "dbqc/qmath.hpp"

namespace dbqc {

struct PureState {
  RegisterLayout layout;
  Matrix amplitudes;  // column vector

  /// Validates dimension and unit norm (1e-10).
  static PureState make(RegisterLayout layout, Matrix amplitudes);
  Matrix density() const { return outer(amplitudes); }
};

struct MixedState {
  RegisterLayout layout;
  Matrix matrix;

  /// Validates Hermiticity, trace one and eigenvalues >= -1e-10.
  static MixedState make(RegisterLayout layout, Matrix matrix);
  static MixedState from_pure(const PureState& psi);
};

struct KrausChannel {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<Matrix> kraus;

  /// Validates shapes and sum_i K_i^dagger K_i = I within `tol`.
  static KrausChannel make(std::vector<Matrix> kraus, double tol = kEps);
  static KrausChannel unitary(const Matrix& u);
  bool is_unitary() const;
};

struct ChoiProgram {
  std::size_t out_dim = 0;
  std::size_t in_dim = 0;
  /// Pure programs carry their ket; `ket` is empty for mixed ones.
  Matrix ket;
  Matrix rho;

  bool pure() const { return !ket.empty(); }
  /// Ports as a two-register layout with the given labels.
  RegisterLayout layout(const std::string& out_label = "out", const std::string& in_label = "in") const;
};

struct RebitEmbedding {
  Matrix q;
  std::size_t source_dim = 0;
};

struct Dilation {
  Matrix u;  // on [system, ancilla]
  std::size_t ancilla_dim = 1;
};

PureState bell_state(std::size_t d, const std::string& a = "a", const std::string& b = "b");

ChoiProgram choi_of(const Matrix& u);
ChoiProgram choi_of(const KrausChannel& ch);
KrausChannel channel_of_choi(const ChoiProgram& c);

/// Reads U back out of a pure program: U[o][i] = sqrt(d_in) * amplitude(o, i).
/// For tests and oracles; the protocols never look inside a program.
Matrix program_unitary(const ChoiProgram& c);

Dilation stinespring_dilation(const KrausChannel& ch);
MixedState apply_channel(const KrausChannel& ch, const MixedState& rho);

ChoiProgram transpose_program(const ChoiProgram& c);
ChoiProgram conjugate_program(const ChoiProgram& c);
/// transpose then conjugate: the program of U^dagger.
ChoiProgram adjoint_program(const ChoiProgram& c);

RebitEmbedding rebit_embed(const Matrix& u);
/// |Phi> = |R>|0> + |I>|1> with the rebit appended as the least significant
/// register, labeled `rebit_label`.
PureState rebit_input(const PureState& psi, const std::string& rebit_label = "rebit");

}  // namespace dbqc
