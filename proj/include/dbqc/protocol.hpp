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
#include <string>
#include <variant>
#include <vector>

#include "dbqc/knitting.hpp"
#include "dbqc/network.hpp"
#include "dbqc/oblivious.hpp"

namespace dbqc {

namespace step {

struct PrepareState {
  std::string party, label;
  Matrix state;  // ket or density matrix
};
struct PrepareProgram {
  std::string party;
  ChoiProgram program;
  std::vector<Register> out, in;
};
struct DistributeEbit {
  std::string id, party_a, label_a, party_b, label_b;
  std::size_t dim = 2;
};
/// Initial-state injection into a program's in port. Several items form
/// one group whose parities are combined (total parity 1 iff any item's is).
struct InjectItem {
  std::string party;
  std::vector<std::string> in_port;
  Matrix ket;
};
struct IsiInject {
  std::vector<InjectItem> items;
};
/// Binary Bell measurement of (source, target) held by one party. Items in
/// one step are measured locally and their parities concatenated.
struct LinkItem {
  std::string party, source, target;
};
struct OqtLink {
  std::vector<LinkItem> items;
};
/// Full Bell measurement of standard teleportation; the outcome is stored
/// under `tag` for a later PauliCorrect.
struct BellMeasureQT {
  std::string party, source, ebit_end, tag;
};
struct PauliCorrect {
  std::string party, label, tag;
};
struct RemoteCnot {
  std::string ebit, control_party, control, target_party, target;
};
struct LocalGate {
  std::string party;
  std::vector<std::string> targets;
  Matrix u;
  std::string name;
};
/// Nonlocal two-qudit gate replaced by its local operator-basis terms.
struct KnitCut {
  std::string party_a, label_a, party_b, label_b;
  Matrix u;
};
struct Broadcast {
  std::string party;
  std::size_t bits = 1;
};
struct Discard {
  std::string party;
  std::vector<std::string> labels;
};
/// Must be the last step.
struct FinalMeasure {
  std::string party;
  std::vector<std::string> labels;
  Matrix observable;
  ReadoutMode readout = ReadoutMode::kSampled;
};

}  // namespace step

using Step = std::variant<step::PrepareState, step::PrepareProgram, step::DistributeEbit, step::IsiInject,
                          step::OqtLink, step::BellMeasureQT, step::PauliCorrect, step::RemoteCnot, step::LocalGate,
                          step::KnitCut, step::Broadcast, step::Discard, step::FinalMeasure>;

std::string step_name(const Step& s);

struct ProtocolScript {
  std::vector<Party> parties;
  std::vector<Step> steps;
  KnitMode knit_mode = KnitMode::kExactSum;
  std::size_t entry_cap = kDefaultEntryCap;
};

struct ScriptIssue {
  std::size_t step = 0;
  Error::Kind kind = Error::Kind::kValidation;  // kValidation: malformed literal; others: semantic
  std::string message;
};

/// Static checks: literal validity (unitary gates, normalized kets, Hermitian
/// observables) and semantics (locality, ebit lifecycle, tags, dimensions).
std::vector<ScriptIssue> validate_script(const ProtocolScript& script);

struct OutcomeRecord {
  std::size_t shot = 0;
  std::vector<int> parity_bits;       // every binary outcome, in order
  std::vector<int> group_parities;    // one per inject/link step
  std::vector<std::size_t> outcomes;  // Bell and remote-CNOT outcome indices
  std::vector<std::size_t> knit_terms;
  double signal = 1.0;  // coefficient of the target state
  double offset = 0.0;  // E[value] = offset + signal * target
  double value = 0.0;
  double path_probability = 1.0;
};

struct ScriptRun {
  std::vector<OutcomeRecord> records;
  ResourceLedger ledger;
  Estimate estimate;
};

/// Executes the script for `shots` shots; shot k draws from Rng(seed, k).
/// Branch states are computed once per distinct outcome path.
ScriptRun run_script(const ProtocolScript& script, std::size_t shots, std::uint64_t seed,
                     Weighting weighting = Weighting::kInverseVariance);

/// Every outcome path with its probability and the state before the final
/// measurement. Not available with sampled knitting. Within a group, single
/// local parity patterns need not give the affine form; the mixture over all
/// patterns with the same group parities does.
struct ScriptLeaf {
  double probability = 1.0;
  double signal = 1.0;
  std::vector<int> parity_bits;
  std::vector<int> group_parities;
  Network network;
};
std::vector<ScriptLeaf> enumerate_script(const ProtocolScript& script);

}  // namespace dbqc
