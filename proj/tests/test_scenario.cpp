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

#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dbqc/scenario.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace dbqc;
using nlohmann::json;

namespace {

const char* kGolden[] = {"dbqc", "triparty_scheme1", "triparty_scheme2", "knitting_exact", "knitting_sampled",
                         "channel_composition", "pingpong", "teleport_script"};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string golden(const std::string& name) { return slurp(std::string(DBQC_SCENARIO_DIR) + "/" + name + ".json"); }
std::string fixture(const std::string& name) { return slurp(std::string(DBQC_TEST_DATA_DIR) + "/" + name + ".json"); }

std::size_t lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

std::map<std::string, std::string> summary_map(const std::string& csv) {
  std::map<std::string, std::string> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "metric,value");
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    out[line.substr(0, comma)] = line.substr(comma + 1);
  }
  return out;
}

double metric(const ScenarioArtifacts& a, const std::string& key) { return std::stod(summary_map(a.summary).at(key)); }

bool mentions(const ScenarioReport& r, const std::string& where, ExitCode code) {
  for (const auto& i : r.issues)
    if (i.where == where && i.code == code) return true;
  return false;
}

// Hand-written gates so the oracles do not share code with the literal parser.
const double kR = 1.0 / std::sqrt(2.0);
Matrix h() { return Matrix::from_rows({{kR, kR}, {kR, -kR}}); }
Matrix t() { return Matrix::from_rows({{1.0, 0.0}, {0.0, std::polar(1.0, M_PI / 4)}}); }
Matrix ry(double th) {
  return Matrix::from_rows({{std::cos(th / 2), -std::sin(th / 2)}, {std::sin(th / 2), std::cos(th / 2)}});
}
Matrix zero() { return Matrix::column({1.0, 0.0}); }
Matrix plus() { return Matrix::column({kR, kR}); }

double overlap2(const Matrix& a, const Matrix& b) { return std::norm(oracle::naive_matmul(oracle::dagger(a), b)(0, 0)); }

}  // namespace

TEST_CASE("every golden scenario validates and runs with one record per shot") {
  for (const char* name : kGolden) {
    CAPTURE(name);
    const std::string text = golden(name);
    const auto report = validate_scenario(text);
    for (const auto& i : report.issues) MESSAGE(i.where << ": " << i.message);
    CHECK(report.ok());
    const auto run = run_scenario(text);
    CHECK(lines(run.records) == static_cast<std::size_t>(json::parse(text)["shots"].get<std::size_t>()));
    CHECK(std::isfinite(run.estimate));
    const auto again = run_scenario(text);
    CHECK(again.records == run.records);
    CHECK(again.summary == run.summary);
    CHECK(again.resolved == run.resolved);
  }
}

TEST_CASE("overrides") {
  const std::string text = golden("dbqc");
  const auto one = run_scenario(text, ScenarioOverrides{std::nullopt, 1, std::nullopt, std::nullopt});
  CHECK(lines(one.records) == 1);
  const auto a = run_scenario(text, ScenarioOverrides{99, 200, std::nullopt, "elsewhere"});
  const auto b = run_scenario(text, ScenarioOverrides{100, 200, std::nullopt, "elsewhere"});
  CHECK(lines(a.records) == 200);
  CHECK(a.records != b.records);
  CHECK(a.output == "elsewhere");
  const json resolved = json::parse(a.resolved);
  CHECK(resolved["seed"] == 99);
  CHECK(resolved["shots"] == 200);
  CHECK(resolved["backend"] == "densitymatrix");
  CHECK(summary_map(a.summary).at("seed") == "99");

  // The tolerance tightens literal checks but never loosens them.
  json doc = json::parse(text);
  doc["bob"] = json::array({json::array({json::array({1.0 + 1e-12, 0}), json::array({0, 1})})});
  CHECK(validate_scenario(doc.dump()).ok());
  CHECK(validate_scenario(doc.dump(), ScenarioOverrides{std::nullopt, std::nullopt, 1e-13, std::nullopt}).exit_code() ==
        ExitCode::kSchema);
  doc["bob"] = json::array({json::array({json::array({1.000001, 0}), json::array({0, 1})})});
  CHECK(validate_scenario(doc.dump(), ScenarioOverrides{std::nullopt, std::nullopt, 1e-3, std::nullopt}).exit_code() ==
        ExitCode::kSchema);
}

TEST_CASE("exit codes of invalid scenarios") {
  CHECK(validate_scenario(fixture("malformed")).exit_code() == ExitCode::kParse);
  CHECK(validate_scenario("[1, 2]").exit_code() == ExitCode::kSchema);

  const auto nu = validate_scenario(fixture("non_unitary"));
  CHECK(nu.exit_code() == ExitCode::kSchema);
  CHECK(mentions(nu, "alice[0]", ExitCode::kSchema));

  const auto ue = validate_scenario(fixture("undeclared_ebit"));
  CHECK(ue.exit_code() == ExitCode::kSemantic);
  CHECK(mentions(ue, "steps[2]", ExitCode::kSemantic));

  const auto loc = validate_scenario(fixture("locality"));
  CHECK(loc.exit_code() == ExitCode::kSemantic);
  CHECK(mentions(loc, "steps[2]", ExitCode::kSemantic));

  CHECK(validate_scenario(fixture("capacity")).exit_code() == ExitCode::kCapacity);

  const auto bad = validate_scenario(fixture("bad_fields"));
  CHECK(bad.exit_code() == ExitCode::kSchema);
  CHECK(mentions(bad, "version", ExitCode::kSchema));
  CHECK(mentions(bad, "seed", ExitCode::kSchema));
  CHECK(mentions(bad, "shots", ExitCode::kSchema));
  CHECK(mentions(bad, "programs[1]", ExitCode::kSchema));
  CHECK(mentions(bad, "colour", ExitCode::kSchema));

  CHECK_THROWS_AS(run_scenario(fixture("undeclared_ebit")), ScenarioError);
  try {
    run_scenario(fixture("non_unitary"));
  } catch (const ScenarioError& e) {
    CHECK(e.report().exit_code() == ExitCode::kSchema);
  }
}

TEST_CASE("literal forms") {
  auto with_gate = [](const json& gate) {
    json doc = json::parse(golden("dbqc"));
    doc["bob"] = json::array({gate});
    return doc.dump();
  };
  CHECK(validate_scenario(with_gate("RY(pi/2)")).ok());
  CHECK(validate_scenario(with_gate("RZ(-0.5*pi/3)")).ok());
  CHECK(validate_scenario(with_gate(json::array({json::array({0, json::array({0, -1})}),
                                                 json::array({json::array({0, 1}), 0})})))
            .ok());
  CHECK(validate_scenario(with_gate({{"kraus", json::array({json::array({json::array({1, 0}), json::array({0, 0})}),
                                                            json::array({json::array({0, 0}), json::array({0, 1})})})}}))
            .ok());
  CHECK(!validate_scenario(with_gate("RY(pi/0)")).ok());
  CHECK(!validate_scenario(with_gate("Q")).ok());
  CHECK(!validate_scenario(with_gate({{"kraus", json::array({json::array({json::array({1, 0}), json::array({0, 1})}),
                                                             json::array({json::array({0, 1}), json::array({0, 0})})})}}))
             .ok());

  // RY(pi/2) and its decimal form give identical runs.
  const auto a = run_scenario(with_gate("RY(pi/2)"));
  const auto b = run_scenario(with_gate("RY(1.5707963267948966)"));
  CHECK(a.records == b.records);

  json doc = json::parse(golden("dbqc"));
  doc["psi_in"] = json::array({0.6, 0.6});
  CHECK(mentions(validate_scenario(doc.dump()), "psi_in", ExitCode::kSchema));
  doc["psi_in"] = {{"density", json::array({json::array({0.5, 0}), json::array({0, 0.5})})}};
  CHECK(mentions(validate_scenario(doc.dump()), "psi_in", ExitCode::kSchema));  // must be pure
  doc["psi_in"] = {{"basis", 1}, {"dim", 2}};
  CHECK(validate_scenario(doc.dump()).ok());
}

TEST_CASE("DBQC golden scenario matches the matrix oracle") {
  const auto run = run_scenario(golden("dbqc"), ScenarioOverrides{7, 10000, std::nullopt, std::nullopt});
  const Matrix out = oracle::naive_matmul(ry(0.7), oracle::naive_matmul(t(), oracle::naive_matmul(h(), zero())));
  const double expect = overlap2(zero(), out);
  CHECK(std::abs(run.estimate - expect) <= 3.0 * run.std_error);
  const auto s = summary_map(run.summary);
  CHECK(s.at("ebits_distributed") == "1");
  CHECK(s.at("oqt_ops") == "3");
  CHECK(s.at("depth") == "0");
}

TEST_CASE("triparty golden scenarios") {
  Matrix a = oracle::naive_matmul(ry(M_PI / 3), plus());
  Matrix b = oracle::naive_matmul(h(), zero());
  Matrix cnot(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  const Matrix psi = oracle::naive_matmul(cnot, oracle::naive_kron(a, b));
  const Matrix target = Matrix::column({0.6, 0.0, 0.0, Complex(0.0, 0.8)});
  const double expect = overlap2(target, psi);
  const auto one = run_scenario(golden("triparty_scheme1"));
  const auto two = run_scenario(golden("triparty_scheme2"));
  CHECK(std::abs(one.estimate - expect) <= 3.0 * one.std_error);
  CHECK(std::abs(two.estimate - expect) <= 3.0 * two.std_error);
  CHECK(metric(one, "qt_corrections") == 0.0);
  CHECK(metric(two, "qt_corrections") > 0.0);
  CHECK(metric(two, "depth") > metric(one, "depth"));
}

TEST_CASE("knitting golden scenarios match direct simulation") {
  // Three-qubit statevector oracle for the exact scenario.
  const std::vector<std::size_t> dims = {2, 2, 2};
  Matrix psi = oracle::naive_kron(zero(), oracle::naive_kron(plus(), zero()));
  Matrix cnot(4, 4), cz = Matrix::identity(4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  cz(3, 3) = -1.0;
  psi = oracle::naive_matmul(oracle::naive_embed(h(), {0}, dims), psi);
  psi = oracle::naive_matmul(oracle::naive_embed(cnot, {0, 1}, dims), psi);
  psi = oracle::naive_matmul(oracle::naive_embed(ry(0.4), {1}, dims), psi);
  psi = oracle::naive_matmul(oracle::naive_embed(cz, {1, 2}, dims), psi);
  psi = oracle::naive_matmul(oracle::naive_embed(ry(-1.1), {2}, dims), psi);
  const Matrix x = Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}), z = Matrix::from_rows({{1.0, 0.0}, {0.0, -1.0}});
  const Matrix o = oracle::naive_embed(oracle::naive_kron(x, z), {0, 2}, dims);
  const double expect = oracle::naive_matmul(oracle::dagger(psi), oracle::naive_matmul(o, psi))(0, 0).real();
  const auto exact = run_scenario(golden("knitting_exact"));
  CHECK(std::abs(exact.estimate - expect) < 1e-10);
  CHECK(std::abs(metric(exact, "direct") - expect) < 1e-10);
  CHECK(metric(exact, "knit_overhead") == 16.0);

  const auto sampled = run_scenario(golden("knitting_sampled"));
  CHECK(std::abs(sampled.estimate - metric(sampled, "direct")) <= 4.0 * sampled.std_error);
  CHECK(metric(sampled, "knit_overhead") == 4.0);
}

TEST_CASE("channel composition and ping-pong golden scenarios") {
  const auto comp = run_scenario(golden("channel_composition"));
  CHECK(metric(comp, "composition_error") <= 1e-9);
  CHECK(std::abs(metric(comp, "success_probability") - 1.0 / 16.0) < 1e-12);
  CHECK(std::abs(comp.estimate - 1.0 / 16.0) <= 4.0 * comp.std_error);
  CHECK(metric(comp, "ebits_consumed") == metric(comp, "ebits_distributed") - metric(comp, "ebits_unused"));

  const auto pp = run_scenario(golden("pingpong"));
  Matrix psi = zero();
  for (const Matrix& u : {h(), ry(0.3), t(), h()}) psi = oracle::naive_matmul(u, psi);
  const double expect = std::norm(psi[0]) - std::norm(psi[1]);
  CHECK(std::abs(pp.estimate - expect) <= 3.0 * pp.std_error);
  CHECK(metric(pp, "max_live_registers") == 3.0);
}
