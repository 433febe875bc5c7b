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
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dbqc/oblivious.hpp"

namespace dbqc {

enum class MeasurementAxis { kX, kY };

/// Probability of outcome 0 on the clean qubit after |+>, controlled-U on
/// rho, and a readout along `axis`. Simulated as a circuit.
double dqc1(const Matrix& u, const MixedState& rho, MeasurementAxis axis);

struct Odqc1Result {
  double p0 = 0.0;
  FlagKind flag = FlagKind::kOmega;
};

/// DQC1 with the controlled module built obliviously from two programs
/// (of U and U*), with rho on the data slot and eta on the ancilla slot.
/// The flag the control used is reported alongside the statistic.
Odqc1Result odqc1(const ChoiProgram& program, const ChoiProgram& conj_program, const MixedState& rho,
                  const MixedState& eta, MeasurementAxis axis, FlagKind flag = FlagKind::kOmega);

struct SwapTestResult {
  double p0 = 0.0;        // exact probability of outcome 0
  double estimate = 0.0;  // clip(2 p0_hat - 1, 0, 1)
  double std_error = 0.0;
  std::size_t shots = 0;
};
SwapTestResult swap_test(const PureState& psi, const PureState& phi, std::size_t shots, Rng& rng);

struct ComposeResult {
  BinaryBranch zero;  // post state on (out, in) of the composed program
  BinaryBranch one;
  ChoiProgram program;  // branch-0 program |U1^dagger U2>
};

/// Bell measurement joining two programs so that branch 0 holds the program
/// of U1^dagger U2 (probability 1/d^2).
ComposeResult compose_programs(const ChoiProgram& p1, const ChoiProgram& p2);

struct BlockEncoding {
  Matrix g;
  std::size_t control_dim = 0;
  std::size_t data_dim = 0;
  double p = 0.0;
  double theta = 0.0;
  Matrix u;  // M / sqrt(p)
};

/// Reads the top-left block M of G (control in |0>) and checks M^dagger M = p I
/// within 1e-9. Throws ValidationError("not a block encoding") otherwise.
BlockEncoding block_encoding_check(const Matrix& g, std::size_t control_dim, std::size_t data_dim);

/// Random block encoding of sqrt(p) U with a qubit control.
Matrix random_block_encoding(std::size_t d, double p, Rng& rng);

/// round(pi/(4 theta) - 1/2), lowered until (2n+1) theta <= pi/2 + theta.
std::size_t oaa_recommended_iterations(double theta);

struct OaaResult {
  double success = 0.0;
  PureState post_state;  // data register, normalized
  Matrix full_state;     // (control, data) before post-selection
  std::size_t recommended_n = 0;
};
OaaResult oaa_amplify(const BlockEncoding& be, std::size_t n, const PureState& psi);

/// W = -G R G^dagger R with R = 2 (|0><0| (x) I) - I.
Matrix oaa_walk(const BlockEncoding& be);

struct OaaOqtResult {
  OqtRecord record;
  std::size_t program_count = 0;
};
/// Runs W^n G as 2n+1 teleported programs G, R G^dagger R, -G, ...
OaaOqtResult oaa_via_oqt(const BlockEncoding& be, std::size_t n, const MixedState& data_input, Rng* rng,
                         std::span<const int> forced_bits = {});

struct LCUPlan {
  std::vector<double> coefficients;
  std::vector<Matrix> unitaries;                        // explicit terms
  std::vector<std::pair<BlackBox, BlackBox>> programs;  // black-box terms (U, U*)
  std::vector<double> alpha;
  std::vector<double> beta;
  Matrix prepare;    // A, first column alpha
  Matrix unprepare;  // B = A^dagger
  std::size_t data_dim = 0;
  double l1 = 0.0;

  std::size_t terms() const { return coefficients.size(); }
  /// Sum_i c_i U_i / ||c||_1 for explicit plans.
  Matrix combined() const;
};

LCUPlan make_lcu_plan(std::vector<double> coefficients, std::vector<Matrix> unitaries);
LCUPlan make_lcu_plan(std::vector<double> coefficients, std::vector<std::pair<BlackBox, BlackBox>> programs,
                      std::size_t d);

/// The LCU circuit (B (x) I) SELECT (A (x) I) on (ancilla, data).
Matrix lcu_circuit(const LCUPlan& plan);

struct LcuResult {
  double success = 0.0;
  PureState post_state;
};
LcuResult lcu_apply(const LCUPlan& plan, const PureState& psi);

/// Black-box plan: SELECT is a multiplexer over (U_i, U_i*), so the circuit
/// realizes sum_i c_i U_i (x) U_i* / ||c||_1 on (data, eta).
LcuResult lcu_apply_oblivious(const LCUPlan& plan, const PureState& psi, const PureState& eta);

enum class OqsMode { kGenerate, kApply };

struct OqsResult {
  double initial_success = 0.0;
  double success = 0.0;
  std::size_t iterations = 0;
  PureState state;
};

/// Oblivious superposition. Generate mode prepares C|0>/||C|0>|| by amplitude
/// amplification with reflections about the known initial state. Apply mode
/// requires the LCU circuit to be a block encoding and applies C/sqrt(p) to
/// `input` with oblivious amplitude amplification. Both lower the initial
/// amplitude with one extra rotated qubit so the final iteration lands
/// exactly on success 1.
OqsResult oqs(OqsMode mode, const LCUPlan& plan, const std::optional<PureState>& input = std::nullopt);

}  // namespace dbqc
