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

// Scenario document model shared by the parser and the runner.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dbqc/distributed.hpp"
#include "dbqc/knitting.hpp"
#include "dbqc/protocol.hpp"
#include "dbqc/scenario.hpp"
#include "dbqc/states.hpp"
#include "json.hpp"

namespace dbqc::scenario {

using nlohmann::json;

enum class Kind { kScript, kDbqc, kTriparty, kKnitting, kChannelComposition, kPingPong };

struct Model {
  json resolved;
  Kind kind = Kind::kScript;
  std::string name;
  std::uint64_t seed = 0;
  std::size_t shots = 1;
  double tolerance = 1e-10;
  std::size_t entry_cap = kDefaultEntryCap;
  std::string output;

  ProtocolScript script;  // kScript; built from the setups for kDbqc, kTriparty
  DbqcSetup dbqc;
  TripartySetup triparty;
  TripartyScheme scheme = TripartyScheme::kI;

  KnitCircuit circuit;  // kKnitting
  KnitMode knit_mode = KnitMode::kExactSum;

  std::vector<KrausChannel> channels;  // kChannelComposition, kPingPong
  Matrix input;                        // kPingPong: ket or density
  Matrix observable;                   // kKnitting, kPingPong
  std::vector<std::string> observable_targets;  // kKnitting; empty means the whole layout
  ReadoutMode readout = ReadoutMode::kSampled;
};

/// Fills `model` from the document; every problem lands in `report`.
void parse(const json& doc, const ScenarioOverrides& overrides, Model& model, ScenarioReport& report);

/// Semantic checks on a schema-valid model.
void check(Model& model, ScenarioReport& report);

}  // namespace dbqc::scenario
