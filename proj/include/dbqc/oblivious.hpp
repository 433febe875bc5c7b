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

#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dbqc/gates.hpp"
#include "dbqc/kernels.hpp"
#include "dbqc/rng.hpp"
#include "dbqc/states.hpp"

namespace dbqc {

/// The d*d operators X^a Z^b, indexed a*d + b. Index 0 is the identity.
class GeneralizedPauliBasis {
 public:
  explicit GeneralizedPauliBasis(std::size_t d);
  std::size_t dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return ops_.size(); }
  const Matrix& operator[](std::size_t i) const { return ops_.at(i); }
  const std::vector<Matrix>& operators() const noexcept { return ops_; }

 private:
  std::size_t d_;
  std::vector<Matrix> ops_;
};

struct BinaryBranch {
  int parity = 0;
  double probability = 0.0;
  MixedState post_state;  // normalized; zero matrix when probability is 0
};

struct BranchPair {
  BinaryBranch zero;
  BinaryBranch one;
};

/// Outcome of a run of oblivious teleportations.
///
/// The final state has the form (1 - signal) I/D + signal * target, where
/// target is the state the noiseless circuit would produce. Each nontrivial
/// parity multiplies `signal` by -1/(D^2 - 1) (or -1/(D - 1) for a failed
/// injection), with D the dimension of the measured Bell pair.
struct OqtRecord {
  std::vector<int> parity_bits;
  std::size_t s = 0;
  double signal = 1.0;
  double probability = 1.0;  // probability of this parity path
  MixedState final_state;
};

enum class FlagKind { kOmega, kOmegaPerp };

struct FlagState {
  FlagKind which = FlagKind::kOmega;
  std::size_t dim = 2;
  /// Density matrix on the flag pair (dim * dim). The complement is
  /// normalized by d^2 - 1 so that it has unit trace.
  Matrix density() const;
};

/// Opaque unitary action on a d-dimensional register. Builders may only
/// invoke it; there is deliberately no accessor for the matrix.
class BlackBox {
 public:
  using Action = std::function<Matrix(const Matrix&)>;  // d x k -> d x k

  BlackBox(std::size_t dim, Action action, std::string name = "U");
  static BlackBox from_matrix(const Matrix& u, std::string name = "U");

  std::size_t dim() const noexcept { return dim_; }
  const std::string& name() const noexcept { return name_; }
  /// Applies the box to register `target` of every column of m (layout order).
  void apply(Matrix& m, const kernels::Split& target) const;
  std::size_t calls() const noexcept { return calls_->load(); }

 private:
  std::size_t dim_;
  Action action_;
  std::string name_;
  std::shared_ptr<std::atomic<std::size_t>> calls_;
};

/// Black box that applies a pure program by post-selected gate teleportation:
/// each input column v is contracted against the in port as conj(v), which
/// leaves U v on the out port (rescaled by sqrt(d_in)).
BlackBox program_black_box(const ChoiProgram& program, std::string name = "U");

/// Injects |inject> into a program: binary measurement on the in port with
/// branch 0 projecting onto conj(inject). Branch 0 leaves U|inject> on the
/// out port with probability 1/d_in.
BranchPair isi_measure(const ChoiProgram& program, const PureState& inject);

/// One oblivious teleportation of `input` through `program`.
BranchPair oqt_step(const ChoiProgram& program, const MixedState& input);

/// General form: `state` lives on `layout`; the register `system_label` is
/// teleported through the program and the out port takes its place. Other
/// registers are carried along untouched. Branch states are normalized.
BranchPair oqt_step_on(const ChoiProgram& program, const Matrix& state, const RegisterLayout& layout,
                       const std::string& system_label);

/// Runs the programs in order. Parities are sampled from `rng`, or taken
/// from `forced_bits` when it is non-empty (the path probability is still
/// recorded).
OqtRecord oqt_sequence(const std::vector<ChoiProgram>& programs, const MixedState& input, Rng* rng,
                       std::span<const int> forced_bits = {});

/// Closed form of the final state after s nontrivial parities:
/// a I + lambda U rho U^dagger with lambda = (-1)^s / (d^2 - 1)^s.
Matrix oqt_closed_form(const Matrix& u_total, const Matrix& rho, std::size_t s);

enum class ReadoutMode {
  kExpectation,  // each record contributes its exact conditional mean tr(O rho)
  kSampled,      // each record contributes one sampled eigenvalue of O
};

enum class Weighting {
  kUniform,          // mean of per-record affine inversions
  kInverseVariance,  // least-squares fit of x = offset + signal * value
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t records = 0;
};

/// Estimates tr(O * target) from records by undoing each record's affine
/// mixing with the identity.
Estimate oqt_estimate_observable(std::span<const OqtRecord> records, const Matrix& observable,
                                 ReadoutMode mode = ReadoutMode::kExpectation, Rng* rng = nullptr,
                                 Weighting weighting = Weighting::kInverseVariance);

/// One (affine-mixed) observation: value x with E[x] = offset + signal * target.
struct AffineSample {
  double x = 0.0;
  double offset = 0.0;
  double signal = 1.0;
};
Estimate estimate_affine(std::span<const AffineSample> samples, Weighting weighting = Weighting::kInverseVariance);

/// Probability of each eigenvector of `es` in rho (clamped at 0).
std::vector<double> born_weights(const EigenSystem& es, const Matrix& rho);

/// Draws an eigenvalue of the Hermitian `observable` with Born weights in rho.
double sample_observable(const Matrix& observable, const Matrix& rho, Rng& rng);

struct Part {
  ChoiProgram program;
  MixedState input;
};

/// Joint binary Bell measurement over several parts: branch 0 iff every part
/// projects onto its Bell state. Post states are on the concatenated out ports.
BranchPair multiparty_binary_bell(const std::vector<Part>& parts);

struct ParitySampling {
  std::size_t shots = 0;
  std::size_t all_zero = 0;
  std::size_t rest = 0;
  /// Counts per local parity pattern (pattern index big-endian over parts).
  std::vector<std::size_t> pattern_counts;
  /// Expected shots per all-zero event, the product of d^2 over parts.
  double sample_cost = 1.0;
};
ParitySampling local_parity_sampling(const std::vector<Part>& parts, std::size_t shots, Rng& rng);

/// Oblivious control built from black-box U and U*.
/// Layout: (c: control dim, data: d, anc: d, f1: d, f2: d).
struct OqcCircuit {
  RegisterLayout layout;
  Matrix unitary;
  FlagState flag;
};

OqcCircuit oqc_build(const BlackBox& apply_u, const BlackBox& apply_u_conj, std::size_t d, const FlagState& flag);

/// Sum_i P_i (x) (U_i (x) U_i*) as a product of one control stage per term.
OqcCircuit multiplexer_build(const std::vector<Matrix>& projectors,
                             const std::vector<std::pair<BlackBox, BlackBox>>& programs, std::size_t d,
                             const FlagState& flag = {});

/// <w| V |w> on the flag pair: the operator induced on (c, data, anc) when the
/// flag starts and ends in the Bell state.
Matrix restrict_to_flag(const OqcCircuit& circuit);

/// Channel induced on (c, data, anc) by the circuit with the flag prepared
/// in circuit.flag and traced out afterwards.
Matrix oqc_induced_state(const OqcCircuit& circuit, const Matrix& rho);

/// Gate list over registers "c1", "c2", "t" with three CNOTs and RY(+-pi/4)
/// rotations. Agrees with the Toffoli up to a diagonal phase, so statistics
/// of a computational-basis readout of the target are unchanged.
std::vector<GateOp> toffoli_boundary_compile();

}  // namespace dbqc
