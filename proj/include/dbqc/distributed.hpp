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
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dbqc/network.hpp"
#include "dbqc/oblivious.hpp"
#include "dbqc/protocol.hpp"

namespace dbqc {

struct TeleportResult {
  std::string destination;  // far end of the ebit, now holding the state
  std::size_t outcome = 0;  // Bell outcome index k; the byproduct was sigma_k^dagger
};

/// Standard teleportation of `label` through `ebit` with Pauli correction at
/// the far end. Ledger: one ebit, 2 log2(d) classical bits, one correction,
/// one depth layer.
TeleportResult teleport_state(Network& net, const std::string& label, const std::string& ebit, Rng& rng);

struct RemoteCnotResult {
  std::size_t z_outcome = 0;  // control side
  std::size_t x_outcome = 0;  // target side
};

/// CNOT between registers of two parties using one qubit ebit.
RemoteCnotResult remote_cnot(Network& net, const std::string& control, const std::string& target,
                             const std::string& ebit, Rng& rng);

/// Applies outcome k = 2 * z + x of the remote-CNOT protocol to `net` and
/// returns its conditional probability (0 leaves `net` unspecified).
double remote_cnot_outcome(Network& net, const step::RemoteCnot& spec, std::size_t k);

/// Bell basis vector (sigma_k (x) I)|omega> on two d-dimensional registers.
Matrix bell_basis_ket(std::size_t d, std::size_t k);

struct ProtocolResult {
  Estimate estimate;
  ResourceLedger ledger;
  std::vector<OutcomeRecord> records;
};

/// Bipartite oblivious protocol. Alice injects psi_in into her first program
/// and chains her programs by local links; one ebit carries the result to
/// Bob, who chains his programs and measures |psi_out><psi_out|.
struct DbqcSetup {
  Matrix psi_in;
  std::vector<ChoiProgram> alice;
  std::vector<ChoiProgram> bob;
  Matrix psi_out;
  ReadoutMode readout = ReadoutMode::kSampled;
};
ProtocolScript dbqc_script(const DbqcSetup& setup);
/// Estimates |<psi_out| U_B U_A |psi_in>|^2.
ProtocolResult run_dbqc(const DbqcSetup& setup, std::size_t shots, std::uint64_t seed);

enum class TripartyScheme {
  kI,   // nonlocal gate held as a program by a third station C
  kII,  // nonlocal gate compiled into remote CNOTs between A and B
};

/// Qubit a at A, qubit b at B, each passed through a local program; then the
/// two-qubit gate u_c acts on (a, b) and (a, b) is measured against psi_out.
/// Scheme II needs u_c = |0><0| (x) I + |1><1| (x) V (control at A).
struct TripartySetup {
  Matrix psi_a, psi_b;
  Matrix u_a, u_b;
  Matrix u_c;
  Matrix psi_out;
  ReadoutMode readout = ReadoutMode::kSampled;
};
ProtocolScript triparty_script(const TripartySetup& setup, TripartyScheme scheme);
ProtocolResult run_triparty(const TripartySetup& setup, TripartyScheme scheme, std::size_t shots,
                            std::uint64_t seed);

/// Controlled-V on (control, target) as
/// phase(alpha) on control, then A CNOT B CNOT C on target (C first),
/// with V = e^{i alpha} A X B X C and ABC = I.
struct ControlledDecomposition {
  double alpha = 0.0;
  Matrix a, b, c;
};
ControlledDecomposition controlled_decomposition(const Matrix& v);

/// Ping-pong execution: programs are teleported into alternately through two
/// register blocks, each block reset and re-prepared before reuse.
struct PingPongResult {
  OqtRecord record;
  ResourceLedger ledger;
};
PingPongResult pingpong_run(const std::vector<ChoiProgram>& programs, const MixedState& input, Rng* rng,
                            std::span<const int> forced_bits = {});

/// Objective evaluated at theta; the Rng is a fresh substream per evaluation.
using Objective = std::function<double(const std::vector<double>&, Rng&)>;

struct OptimizerConfig {
  std::vector<double> initial;
  double step = 0.5;
  double shrink = 0.5;
  std::size_t sweeps = 20;
  std::size_t grid = 2;  // candidate points per side of the current value
  std::uint64_t seed = 0;
};

struct OptimizeResult {
  std::vector<double> theta;
  double objective = 0.0;
  std::vector<double> trace;  // best objective after each sweep, starting with the initial value
  std::size_t evaluations = 0;
};

/// Cyclic coordinate descent on a shrinking grid (derivative free). Only a
/// strictly better candidate replaces the current point.
OptimizeResult hybrid_optimize(const Objective& f, const OptimizerConfig& config);

/// Objective f(estimate) where the estimate comes from running the script
/// built for theta.
Objective protocol_objective(std::function<ProtocolScript(const std::vector<double>&)> build,
                             std::function<double(double)> f, std::size_t shots);

}  // namespace dbqc
