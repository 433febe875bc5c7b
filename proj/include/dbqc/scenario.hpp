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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dbqc/error.hpp"

namespace dbqc {

/// Process exit codes of the command-line front end.
enum class ExitCode : int {
  kOk = 0,
  kParse = 2,
  kSchema = 3,
  kSemantic = 4,
  kCapacity = 5,
  kRuntime = 6,
};

/// Malformed literals are schema errors; locality, resource, dimension and
/// structural problems are semantic.
ExitCode exit_code_of(Error::Kind kind);

struct ScenarioIssue {
  std::string where;  // JSON path such as "steps[3].gate"
  ExitCode code = ExitCode::kSchema;
  std::string message;
};

struct ScenarioReport {
  std::vector<ScenarioIssue> issues;

  bool ok() const { return issues.empty(); }
  /// Lowest non-zero code among the issues: parse before schema before
  /// semantic, since each stage is only reached when the previous is clean.
  ExitCode exit_code() const;
};

struct ScenarioOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> shots;
  std::optional<double> tolerance;
  std::optional<std::string> output;
};

/// Rendered run outputs. Identical (scenario, overrides) give identical
/// strings.
struct ScenarioArtifacts {
  std::string records;   // one JSON object per line, one line per shot
  std::string summary;   // two-column CSV
  std::string resolved;  // scenario with overrides applied
  std::string output;    // output directory requested by the scenario or overrides
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Raised by run_scenario for a scenario that fails validation.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(ScenarioReport report);
  const ScenarioReport& report() const noexcept { return report_; }

 private:
  ScenarioReport report_;
};

/// Parses and checks a scenario document, reporting every violation found.
/// Semantic checks run only when the document is schema-valid.
ScenarioReport validate_scenario(const std::string& text, const ScenarioOverrides& overrides = {});

/// Validates, then runs. Library errors during the run (capacity and so on)
/// propagate as dbqc::Error.
ScenarioArtifacts run_scenario(const std::string& text, const ScenarioOverrides& overrides = {});

}  // namespace dbqc
