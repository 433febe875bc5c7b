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

#include "dbqc/gates.hpp"
#include "dbqc/matrix.hpp"
#include "dbqc/network.hpp"
#include "dbqc/rng.hpp"

namespace dbqc {

/// Operator-basis expansion of a two-qudit gate:
/// U = sum_ij u_ij sigma_i (x) sigma_j over generalized Paulis.
struct KnitDecomposition {
  std::size_t d = 2;
  Matrix coefficients;  // d^2 x d^2, entry (i, j) = u_ij
  double one_norm = 1.0;
  double overhead = 1.0;  // one_norm^2

  Matrix reconstruct() const;
};

KnitDecomposition knit_decompose(const Matrix& u);

struct KnitGate {
  GateOp op;
  bool cut = false;  // expanded into local terms instead of applied directly
};

struct KnitCircuit {
  RegisterLayout layout;
  Matrix initial;  // ket or density matrix on layout
  std::vector<KnitGate> gates;
};

enum class KnitMode { kExactSum, kSampled };

struct KnitResult {
  double estimate = 0.0;
  double std_error = 0.0;
  double overhead = 1.0;  // product of per-cut overheads
  std::size_t cuts = 0;
  std::size_t shots = 0;
};

/// One sampled shot: the drawn (left, right) term of every cut and the
/// reweighted value.
struct KnitShot {
  std::vector<std::size_t> terms;
  double value = 0.0;
};

/// tr(O C(rho)) with every gate applied directly.
double knit_direct(const KnitCircuit& circuit, const Matrix& observable);

/// tr(O C(rho)) with each cut gate expanded into paired local terms
/// (sigma_i (x) sigma_j) rho (sigma_k (x) sigma_l)^dagger weighted u_ij u*_kl.
/// kExactSum adds every term. kSampled draws one term pair per cut and shot
/// with probability |u_ij u_kl| / ||u||_1^2 and reweights by the sign and the
/// overhead. Sampled shots are appended to `trace` when given.
KnitResult knit_estimate(const KnitCircuit& circuit, const Matrix& observable, KnitMode mode, std::size_t shots,
                         Rng& rng, std::vector<KnitShot>* trace = nullptr);

/// Index pair (i, j) -> flat term index i * d^2 + j.
inline std::size_t knit_term_index(const KnitDecomposition& k, std::size_t i, std::size_t j) {
  return i * k.d * k.d + j;
}

/// Local operators of term `t` (flat index) for a cut between two parties.
std::vector<LocalOp> knit_local_ops(const KnitDecomposition& k, std::size_t t, const std::string& party_a,
                                    const std::string& label_a, const std::string& party_b,
                                    const std::string& label_b);

/// Every paired term of one cut, weights u_t u*_t'.
std::vector<SandwichTerm> knit_sandwich_terms(const KnitDecomposition& k, const std::string& party_a,
                                              const std::string& label_a, const std::string& party_b,
                                              const std::string& label_b);

}  // namespace dbqc
