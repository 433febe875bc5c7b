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
#include <map>
#include <string>
#include <vector>

#include "dbqc/error.hpp"
#include "dbqc/layout.hpp"
#include "dbqc/matrix.hpp"
#include "dbqc/qmath.hpp"
#include "dbqc/states.hpp"

namespace dbqc {

/// Resource counters for one protocol run.
///
/// depth counts layers whose temporal order is forced by a byproduct
/// correction or by sequential reuse of a register block. Oblivious links
/// add no forced order.
struct ResourceLedger {
  std::size_t ebits_distributed = 0;
  std::size_t ebits_consumed = 0;
  std::size_t classical_bits_sent = 0;
  std::size_t oqt_ops = 0;
  std::size_t qt_corrections = 0;
  double knit_overhead = 1.0;
  std::size_t max_live_registers = 0;
  std::size_t depth = 0;

  std::size_t ebits_unused() const noexcept { return ebits_distributed - ebits_consumed; }
  friend bool operator==(const ResourceLedger&, const ResourceLedger&) = default;
};

struct Party {
  std::string name;
  /// Free-form knowledge/capability tags (e.g. "knows:U_A"). Metadata only.
  std::vector<std::string> knowledge;
};

struct Ebit {
  std::string id;
  std::string party_a, label_a;
  std::string party_b, label_b;
  std::size_t dim = 2;
  bool consumed = false;
};

/// One factor of a projective measurement: project `labels` (held by
/// `party`) onto `ket`, or onto its complement when `complement` is set.
/// The measured registers are removed either way.
struct ProjectionItem {
  std::string party;
  std::vector<std::string> labels;
  Matrix ket;
  bool complement = false;
};

/// Operator `op` applied by `party` to its register `label`.
struct LocalOp {
  std::string party;
  std::string label;
  Matrix op;
};

/// One term w * L rho R^dagger where L and R are products of local operators.
struct SandwichTerm {
  Complex weight = 1.0;
  std::vector<LocalOp> left;
  std::vector<LocalOp> right;
};

/// Joint state of every live register, with ownership and ebit bookkeeping.
/// Operations enforce locality: a party may only touch registers it holds.
class Network {
 public:
  explicit Network(std::vector<Party> parties = {}, std::size_t entry_cap = kDefaultEntryCap);

  void add_party(Party party);
  bool has_party(const std::string& name) const;
  const std::vector<Party>& parties() const noexcept { return parties_; }

  const RegisterLayout& layout() const noexcept { return layout_; }
  /// Joint density matrix in layout order.
  const Matrix& state() const noexcept { return rho_; }
  const std::string& owner(const std::string& label) const;
  std::vector<std::string> holdings(const std::string& party) const;
  const std::map<std::string, Ebit>& ebits() const noexcept { return ebits_; }

  const ResourceLedger& ledger() const noexcept { return ledger_; }
  ResourceLedger& ledger() noexcept { return ledger_; }

  /// Adds a register holding `state` (a ket column or a density matrix).
  void prepare_state(const std::string& party, const std::string& label, const Matrix& state);
  /// Adds the program's out and in ports. The ports may be split into several
  /// registers whose dimensions multiply to out_dim / in_dim.
  void prepare_program(const std::string& party, const ChoiProgram& program, const std::vector<Register>& out,
                       const std::vector<Register>& in);
  /// Shares |omega> between two parties as resource `id`.
  void distribute_ebit(const std::string& id, const std::string& party_a, const std::string& label_a,
                       const std::string& party_b, const std::string& label_b, std::size_t dim);

  void local_gate(const std::string& party, const Matrix& u, const std::vector<std::string>& targets);
  /// rho <- sum_t w_t L_t rho R_t^dagger. The result need not be a state
  /// (quasi-probability terms); callers track the normalization.
  void sandwich_sum(const std::vector<SandwichTerm>& terms);
  /// Traces out registers (reset for reuse).
  void discard(const std::string& party, const std::vector<std::string>& labels);
  /// Renames a register the party holds (no physical action).
  void relabel(const std::string& party, const std::string& from, const std::string& to);

  /// Unnormalized joint outcome of independent local projections; returns
  /// the probability and normalizes the state in place. Measuring either end
  /// of a fresh ebit consumes it; the other end then holds ordinary data.
  double measure(const std::vector<ProjectionItem>& items);

  /// Throws LocalityError unless `party` holds every label.
  void require_held(const std::string& party, const std::vector<std::string>& labels) const;
  /// Throws ResourceError if the ebit is unknown or consumed.
  const Ebit& require_fresh_ebit(const std::string& id) const;
  /// Id of the fresh ebit with an end at `label`, or empty.
  std::string ebit_at(const std::string& label) const;

 private:
  void add_register(const std::string& party, const Register& reg, const Matrix& rho);
  void touch_live();

  std::vector<Party> parties_;
  std::size_t entry_cap_;
  RegisterLayout layout_;
  Matrix rho_ = Matrix::identity(1);
  std::map<std::string, std::string> owners_;
  std::map<std::string, Ebit> ebits_;
  std::map<std::string, std::string> ebit_of_label_;
  ResourceLedger ledger_;
};

}  // namespace dbqc
