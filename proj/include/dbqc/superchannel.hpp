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

#include <complex>
#include <cstddef>
#include <vector>

#include "dbqc/algorithms.hpp"
#include "dbqc/oblivious.hpp"
#include "dbqc/states.hpp"

namespace dbqc {

/// Comb with a pre-circuit U1 on (in port, memory) and a post-circuit U2 on
/// (out port, memory). Both act on the program's Choi state; the memory
/// starts in |0> and U2 reads it and leaves the readout index mu.
struct Superchannel {
  Matrix u1;
  Matrix u2;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::size_t memory_dim = 1;

  static Superchannel make(Matrix u1, Matrix u2, std::size_t in_dim, std::size_t out_dim, std::size_t memory_dim);
  /// Superchannel taking E to W o E o V (trivial memory). U1 acts on the in
  /// port, where it realizes V^T.
  static Superchannel pre_post(const Matrix& v, const Matrix& w);
};

/// S_mu = sum_m K2_{m,mu} (x) K1_m on (out, in), with K1_m = <m|U1|0> and
/// K2_{m,mu} = <mu|U2|m> (memory index m in, readout mu out).
std::vector<Matrix> superchannel_kraus(const Superchannel& sc);

ChoiProgram apply_superchannel(const Superchannel& sc, const ChoiProgram& program);

/// PSD and input marginal I/d_in within `tol`.
bool is_valid_choi(const ChoiProgram& c, double tol = 1e-9);

/// sum_ij c_i c_j^* tr_a(U_i (rho (x) rho_a) U_j^dagger) / ||c||_1^2 with each
/// U_i a dilation on (system, ancilla). `ancilla_state` defaults to |0><0|.
Matrix controlled_channel_superpose(const std::vector<std::complex<double>>& coeffs,
                                    const std::vector<Dilation>& dilations, const MixedState& rho,
                                    const Matrix& ancilla_state = Matrix{});

/// DQC1 with the dilation on rho (x) |0><0|: p0 = (1 + Re tr(K0 rho))/2 for X.
double dqc1_channel_trace(const Dilation& dilation, const MixedState& rho, MeasurementAxis axis);

/// Teleports the out port of p1 through p2. Branch 0 holds the Choi state of
/// E2 o E1 on (out, in).
BranchPair oqt_compose_choi(const ChoiProgram& p1, const ChoiProgram& p2);

}  // namespace dbqc
