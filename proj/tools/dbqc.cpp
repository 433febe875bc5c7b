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

// dbqc: validate and run scenario files.
//
//   dbqc validate scenario.json
//   dbqc run scenario.json --seed 7 --shots 10000 --out runs/dbqc
//
// Exit codes: 0 ok, 2 parse, 3 schema, 4 semantic, 5 capacity, 6 runtime.
// Environment variables are never consulted.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dbqc/scenario.hpp"

namespace fs = std::filesystem;

namespace {

int code(dbqc::ExitCode c) { return static_cast<int>(c); }

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  return static_cast<bool>(out);
}

void print_report(const std::string& file, const dbqc::ScenarioReport& report) {
  for (const auto& i : report.issues) {
    std::cerr << file << ": error[" << code(i.code) << "]";
    if (!i.where.empty()) std::cerr << " " << i.where;
    std::cerr << ": " << i.message << "\n";
  }
}

int validate(const std::string& file, const dbqc::ScenarioOverrides& overrides) {
  const auto text = read_file(file);
  if (!text) {
    std::cerr << file << ": cannot read file\n";
    return code(dbqc::ExitCode::kRuntime);
  }
  const auto report = dbqc::validate_scenario(*text, overrides);
  if (report.ok()) {
    std::cout << file << ": valid\n";
    return 0;
  }
  print_report(file, report);
  return code(report.exit_code());
}

int run(const std::string& file, const dbqc::ScenarioOverrides& overrides) {
  const auto text = read_file(file);
  if (!text) {
    std::cerr << file << ": cannot read file\n";
    return code(dbqc::ExitCode::kRuntime);
  }
  dbqc::ScenarioArtifacts art;
  try {
    art = dbqc::run_scenario(*text, overrides);
  } catch (const dbqc::ScenarioError& e) {
    print_report(file, e.report());
    return code(e.report().exit_code());
  } catch (const dbqc::Error& e) {
    std::cerr << file << ": " << e.what() << "\n";
    return code(dbqc::exit_code_of(e.kind()));
  } catch (const std::exception& e) {
    std::cerr << file << ": " << e.what() << "\n";
    return code(dbqc::ExitCode::kRuntime);
  }

  const fs::path dir(art.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !write_file(dir / "records.jsonl", art.records) || !write_file(dir / "summary.csv", art.summary) ||
      !write_file(dir / "resolved-scenario.json", art.resolved)) {
    std::cerr << file << ": cannot write outputs to " << dir << "\n";
    return code(dbqc::ExitCode::kRuntime);
  }
  std::cout << "estimate " << art.estimate << " +- " << art.std_error << "  (" << dir.string() << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oblivious distributed quantum computing simulator"};
  app.require_subcommand(1);

  std::string file;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> shots;
  std::optional<double> tolerance;
  std::optional<std::string> out;
  bool validate_only = false;

  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file and report every violation");
  validate_cmd->add_option("file", file, "Scenario file")->required();
  validate_cmd->add_option("--tolerance", tolerance, "Literal validation tolerance")->check(CLI::PositiveNumber);

  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write records, summary and resolved scenario");
  run_cmd->add_option("file", file, "Scenario file")->required();
  run_cmd->add_option("--seed", seed, "Override the scenario seed");
  run_cmd->add_option("--shots", shots, "Override the shot count")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", out, "Output directory");
  run_cmd->add_option("--tolerance", tolerance, "Literal validation tolerance")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--validate-only", validate_only, "Validate with the overrides applied, then stop");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help lands here too, with a zero exit code.
    return app.exit(e) == 0 ? 0 : code(dbqc::ExitCode::kParse);
  }

  const dbqc::ScenarioOverrides overrides{seed, shots, tolerance, out};
  if (validate_cmd->parsed() || validate_only) return validate(file, overrides);
  return run(file, overrides);
}
