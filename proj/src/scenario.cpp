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

#include "dbqc/scenario.hpp"

#include <charconv>
#include <cmath>
#include <utility>

#include "dbqc/qmath.hpp"
#include "dbqc/superchannel.hpp"
#include "scenario_model.hpp"

namespace dbqc {

using scenario::json;
using scenario::Kind;
using scenario::Model;

ExitCode exit_code_of(Error::Kind kind) {
  switch (kind) {
    case Error::Kind::kValidation: return ExitCode::kSchema;
    case Error::Kind::kCapacity: return ExitCode::kCapacity;
    case Error::Kind::kRuntime: return ExitCode::kRuntime;
    case Error::Kind::kDimension:
    case Error::Kind::kInvalidArgument:
    case Error::Kind::kLocality:
    case Error::Kind::kResource: break;
  }
  return ExitCode::kSemantic;
}

ExitCode ScenarioReport::exit_code() const {
  ExitCode code = ExitCode::kOk;
  for (const auto& i : issues)
    if (code == ExitCode::kOk || static_cast<int>(i.code) < static_cast<int>(code)) code = i.code;
  return code;
}

namespace {

std::string first_message(const ScenarioReport& r) {
  if (r.issues.empty()) return "scenario is invalid";
  const auto& i = r.issues.front();
  return (i.where.empty() ? "" : i.where + ": ") + i.message;
}

ScenarioReport load(const std::string& text, const ScenarioOverrides& overrides, Model& model) {
  ScenarioReport report;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    report.issues.push_back(ScenarioIssue{"", ExitCode::kParse, e.what()});
    return report;
  }
  scenario::parse(doc, overrides, model, report);
  if (report.ok()) scenario::check(model, report);
  return report;
}

std::string number(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : "nan";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class Summary {
 public:
  void add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, number(value)); }
  void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }

  void ledger(const ResourceLedger& l) {
    add("ebits_distributed", l.ebits_distributed);
    add("ebits_consumed", l.ebits_consumed);
    add("ebits_unused", l.ebits_unused());
    add("classical_bits_sent", l.classical_bits_sent);
    add("oqt_ops", l.oqt_ops);
    add("qt_corrections", l.qt_corrections);
    add("knit_overhead", l.knit_overhead);
    add("max_live_registers", l.max_live_registers);
    add("depth", l.depth);
  }

  std::string render() const {
    std::string out = "metric,value\n";
    for (const auto& [k, v] : rows_) out += csv_field(k) + "," + csv_field(v) + "\n";
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

void append(std::string& records, const json& j) {
  records += j.dump();
  records += '\n';
}

Estimate mean_estimate(const std::vector<double>& xs) {
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double delta = xs[i] - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (xs[i] - mean);
  }
  const double n = static_cast<double>(xs.size());
  const double var = xs.size() > 1 ? m2 / (n - 1.0) : 0.0;
  return Estimate{mean, std::sqrt(var / n), xs.size()};
}

ChoiProgram program_of(const KrausChannel& ch) { return ch.is_unitary() ? choi_of(ch.kraus[0]) : choi_of(ch); }

Estimate run_script_kind(const Model& m, std::string& records, Summary& summary) {
  const ScriptRun run = run_script(m.script, m.shots, m.seed);
  for (const auto& r : run.records) {
    append(records, json{{"shot", r.shot},
                         {"parity_bits", r.parity_bits},
                         {"group_parities", r.group_parities},
                         {"outcomes", r.outcomes},
                         {"knit_terms", r.knit_terms},
                         {"signal", r.signal},
                         {"offset", r.offset},
                         {"value", r.value},
                         {"path_probability", r.path_probability}});
  }
  summary.ledger(run.ledger);
  return run.estimate;
}

Estimate run_knitting(const Model& m, std::string& records, Summary& summary) {
  Rng rng(m.seed, 0);
  std::vector<KnitShot> trace;
  const KnitResult res = knit_estimate(m.circuit, m.observable, m.knit_mode, m.shots, rng, &trace);
  for (std::size_t k = 0; k < m.shots; ++k) {
    if (m.knit_mode == KnitMode::kSampled)
      append(records, json{{"shot", k}, {"knit_terms", trace[k].terms}, {"value", trace[k].value}});
    else
      append(records, json{{"shot", k}, {"knit_terms", json::array()}, {"value", res.estimate}});
  }
  ResourceLedger ledger;
  ledger.knit_overhead = res.overhead;
  ledger.max_live_registers = m.circuit.layout.count();
  summary.ledger(ledger);
  const double direct = knit_direct(m.circuit, m.observable);
  summary.add("cuts", res.cuts);
  summary.add("direct", direct);
  summary.add("abs_error_vs_direct", std::abs(res.estimate - direct));
  return Estimate{res.estimate, res.std_error, m.shots};
}

Estimate run_composition(const Model& m, std::string& records, Summary& summary) {
  const std::size_t n = m.channels.size(), d = m.channels.front().in_dim;
  // Branch-0 chain of oblivious compositions.
  ChoiProgram acc = program_of(m.channels.front());
  std::vector<double> p0;
  double success = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    const BranchPair bp = oqt_compose_choi(acc, program_of(m.channels[k]));
    p0.push_back(bp.zero.probability);
    success *= bp.zero.probability;
    acc = ChoiProgram{d, d, Matrix{}, bp.zero.post_state.matrix};
  }
  // Direct composition E_n o ... o E_1 from the Kraus operators.
  std::vector<Matrix> kraus = m.channels.front().kraus;
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<Matrix> next;
    for (const auto& b : m.channels[k].kraus)
      for (const auto& a : kraus) next.push_back(b * a);
    kraus = std::move(next);
  }
  const ChoiProgram direct = choi_of(KrausChannel::make(std::move(kraus), 1e-8));
  const double error = (acc.rho - direct.rho).frobenius_norm();

  std::vector<double> values;
  for (std::size_t s = 0; s < m.shots; ++s) {
    Rng rng(m.seed, s);
    std::vector<int> bits;
    for (double p : p0) bits.push_back(rng.bernoulli(p) ? 0 : 1);
    bool ok = true;
    for (int b : bits) ok = ok && b == 0;
    values.push_back(ok ? 1.0 : 0.0);
    append(records, json{{"shot", s}, {"parity_bits", bits}, {"value", values.back()}});
  }
  ResourceLedger ledger;
  ledger.ebits_distributed = n;
  ledger.ebits_consumed = n - 1;
  ledger.oqt_ops = n - 1;
  ledger.classical_bits_sent = n - 1;
  ledger.max_live_registers = 2 * n;
  summary.ledger(ledger);
  summary.add("success_probability", success);
  summary.add("composition_error", error);
  summary.add("composition_within_tolerance", std::string(error <= m.tolerance ? "true" : "false"));
  return mean_estimate(values);
}

Estimate run_pingpong(const Model& m, std::string& records, Summary& summary) {
  std::vector<ChoiProgram> programs;
  for (const auto& c : m.channels) programs.push_back(program_of(c));
  const std::size_t d = programs.front().in_dim;
  const Matrix rho = m.input.cols() == 1 ? outer(m.input) : m.input;
  const MixedState input = MixedState::make(RegisterLayout::single(d), rho);
  const EigenSystem es = eigh(m.observable);
  const double mixed_part = m.observable.trace().real() / static_cast<double>(d);

  std::vector<AffineSample> samples;
  ResourceLedger ledger;
  for (std::size_t s = 0; s < m.shots; ++s) {
    Rng rng(m.seed, s);
    const PingPongResult res = pingpong_run(programs, input, &rng);
    const OqtRecord& rec = res.record;
    double x = 0.0;
    if (m.readout == ReadoutMode::kSampled) {
      x = es.values[rng.categorical(born_weights(es, rec.final_state.matrix))];
    } else {
      x = hs_inner(m.observable, rec.final_state.matrix).real();
    }
    const double offset = (1.0 - rec.signal) * mixed_part;
    samples.push_back(AffineSample{x, offset, rec.signal});
    if (s == 0) ledger = res.ledger;
    append(records, json{{"shot", s},
                         {"parity_bits", rec.parity_bits},
                         {"s", rec.s},
                         {"signal", rec.signal},
                         {"offset", offset},
                         {"value", x}});
  }
  summary.ledger(ledger);
  summary.add("programs", programs.size());
  return estimate_affine(samples);
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::kScript: return "script";
    case Kind::kDbqc: return "dbqc";
    case Kind::kTriparty: return "triparty";
    case Kind::kKnitting: return "knitting";
    case Kind::kChannelComposition: return "channel_composition";
    case Kind::kPingPong: return "pingpong";
  }
  return "?";
}

}  // namespace

ScenarioError::ScenarioError(ScenarioReport report)
    : std::runtime_error(first_message(report)), report_(std::move(report)) {}

ScenarioReport validate_scenario(const std::string& text, const ScenarioOverrides& overrides) {
  Model model;
  return load(text, overrides, model);
}

ScenarioArtifacts run_scenario(const std::string& text, const ScenarioOverrides& overrides) {
  Model m;
  ScenarioReport report = load(text, overrides, m);
  if (!report.ok()) throw ScenarioError(std::move(report));

  ScenarioArtifacts out;
  Summary summary;
  summary.add("scenario", m.name);
  summary.add("kind", std::string(kind_name(m.kind)));
  summary.add("seed", std::to_string(m.seed));
  summary.add("shots", m.shots);
  Summary body;
  Estimate est;
  switch (m.kind) {
    case Kind::kScript:
    case Kind::kDbqc:
    case Kind::kTriparty: est = run_script_kind(m, out.records, body); break;
    case Kind::kKnitting: est = run_knitting(m, out.records, body); break;
    case Kind::kChannelComposition: est = run_composition(m, out.records, body); break;
    case Kind::kPingPong: est = run_pingpong(m, out.records, body); break;
  }
  summary.add("estimate", est.value);
  summary.add("std_error", est.std_error);
  out.summary = summary.render() + body.render().substr(std::string("metric,value\n").size());
  out.resolved = m.resolved.dump(2) + "\n";
  out.output = m.output;
  out.estimate = est.value;
  out.std_error = est.std_error;
  return out;
}

}  // namespace dbqc
