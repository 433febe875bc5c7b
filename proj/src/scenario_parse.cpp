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

#include <algorithm>
#include <charconv>
#include <map>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>

#include "dbqc/gates.hpp"
#include "dbqc/qmath.hpp"
#include "scenario_model.hpp"

namespace dbqc::scenario {
namespace {

std::string at(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }
std::string at(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Angle text: a number, or [sign][number*]pi[/number].
std::optional<double> parse_angle(std::string_view s) {
  if (auto v = parse_number(s)) return v;
  double sign = 1.0;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    if (s[0] == '-') sign = -1.0;
    s.remove_prefix(1);
  }
  const auto pi = s.find("pi");
  if (pi == std::string_view::npos) return std::nullopt;
  double factor = 1.0, divisor = 1.0;
  if (pi > 0) {
    if (s[pi - 1] != '*') return std::nullopt;
    const auto f = parse_number(s.substr(0, pi - 1));
    if (!f) return std::nullopt;
    factor = *f;
  }
  std::string_view rest = s.substr(pi + 2);
  if (!rest.empty()) {
    if (rest[0] != '/') return std::nullopt;
    const auto d = parse_number(rest.substr(1));
    if (!d || *d == 0.0) return std::nullopt;
    divisor = *d;
  }
  return sign * factor * std::numbers::pi / divisor;
}

Matrix qubit_ket(char c) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (c) {
    case '0': return ket(2, 0);
    case '1': return ket(2, 1);
    case '+': return Matrix::column({r, r});
    case '-': return Matrix::column({r, -r});
    default: return {};
  }
}

Matrix pauli(char c) {
  switch (c) {
    case 'I': return gates::I();
    case 'X': return gates::X();
    case 'Y': return gates::Y();
    case 'Z': return gates::Z();
    default: return {};
  }
}

std::optional<Matrix> named_gate(const std::string& name) {
  static const std::map<std::string, Matrix (*)()> fixed = {
      {"X", gates::X},       {"Y", gates::Y},   {"Z", gates::Z},       {"H", gates::H},
      {"S", gates::S},       {"T", gates::T},   {"CNOT", gates::CNOT}, {"CZ", gates::CZ},
      {"Toffoli", gates::Toffoli},
  };
  if (name == "I") return gates::I();
  if (name == "SWAP") return gates::SWAP();
  if (auto it = fixed.find(name); it != fixed.end()) return it->second();
  if (name.size() > 4 && name.back() == ')' && (name.starts_with("RY(") || name.starts_with("RZ("))) {
    const auto theta = parse_angle(std::string_view(name).substr(3, name.size() - 4));
    if (!theta) return std::nullopt;
    return name[1] == 'Y' ? gates::RY(*theta) : gates::RZ(*theta);
  }
  return std::nullopt;
}

class Parser {
 public:
  Parser(ScenarioReport& report, double tolerance) : report_(report), tol_(tolerance) {}

  void fail(const std::string& where, const std::string& message, ExitCode code = ExitCode::kSchema) {
    report_.issues.push_back(ScenarioIssue{where, code, message});
  }
  std::size_t issue_count() const { return report_.issues.size(); }

  bool object(const json& j, const std::string& where) {
    if (j.is_object()) return true;
    fail(where, "expected an object");
    return false;
  }

  void known_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> keys) {
    for (const auto& [k, v] : obj.items()) {
      bool known = false;
      for (auto key : keys) known = known || key == k;
      if (!known) fail(at(where, k), "unknown field");
    }
  }

  const json* field(const json& obj, const std::string& where, const std::string& key, bool required = true) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(at(where, key), "missing required field");
      return nullptr;
    }
    return &*it;
  }

  std::optional<std::string> text(const json& obj, const std::string& where, const std::string& key,
                                  bool required = true) {
    const json* j = field(obj, where, key, required);
    if (!j) return std::nullopt;
    if (!j->is_string() || j->get_ref<const std::string&>().empty()) {
      fail(at(where, key), "expected a non-empty string");
      return std::nullopt;
    }
    return j->get<std::string>();
  }

  std::optional<std::uint64_t> count(const json& obj, const std::string& where, const std::string& key,
                                     std::uint64_t min, bool required = true) {
    const json* j = field(obj, where, key, required);
    if (!j) return std::nullopt;
    if (!j->is_number_unsigned() || j->get<std::uint64_t>() < min) {
      fail(at(where, key), "expected an integer >= " + std::to_string(min));
      return std::nullopt;
    }
    return j->get<std::uint64_t>();
  }

  std::optional<std::vector<std::string>> labels(const json& j, const std::string& where) {
    if (j.is_string()) return std::vector<std::string>{j.get<std::string>()};
    if (!j.is_array() || j.empty()) {
      fail(where, "expected a label or a non-empty list of labels");
      return std::nullopt;
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_string()) {
        fail(at(where, i), "expected a label");
        return std::nullopt;
      }
      out.push_back(j[i].get<std::string>());
    }
    return out;
  }

  std::optional<Complex> complex(const json& j, const std::string& where) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
      return Complex(j[0].get<double>(), j[1].get<double>());
    fail(where, "expected a number or an [re, im] pair");
    return std::nullopt;
  }

  std::optional<Matrix> column(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) {
      fail(where, "expected a non-empty list of amplitudes");
      return std::nullopt;
    }
    std::vector<Complex> amps;
    for (std::size_t i = 0; i < j.size(); ++i) {
      auto c = complex(j[i], at(where, i));
      if (!c) return std::nullopt;
      amps.push_back(*c);
    }
    return Matrix::column(std::move(amps));
  }

  std::optional<Matrix> matrix(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
      fail(where, "expected a non-empty list of rows");
      return std::nullopt;
    }
    const std::size_t rows = j.size(), cols = j[0].size();
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      if (!j[r].is_array() || j[r].size() != cols) {
        fail(at(where, r), "rows must have equal length");
        return std::nullopt;
      }
      for (std::size_t c = 0; c < cols; ++c) {
        auto v = complex(j[r][c], at(at(where, r), c));
        if (!v) return std::nullopt;
        m(r, c) = *v;
      }
    }
    if (!m.all_finite()) {
      fail(where, "entries must be finite");
      return std::nullopt;
    }
    return m;
  }

  // Named gate, explicit matrix, or {"matrix": ...}; must be unitary.
  std::optional<Matrix> gate(const json& j, const std::string& where) {
    std::optional<Matrix> u;
    if (j.is_string()) {
      u = named_gate(j.get<std::string>());
      if (!u) {
        fail(where, "unknown gate '" + j.get<std::string>() + "'");
        return std::nullopt;
      }
      return u;
    }
    if (j.is_object()) {
      known_keys(j, where, {"matrix"});
      const json* m = field(j, where, "matrix");
      if (!m) return std::nullopt;
      u = matrix(*m, at(where, "matrix"));
    } else {
      u = matrix(j, where);
    }
    if (!u) return std::nullopt;
    if (!u->is_square()) {
      fail(where, "gate matrix must be square");
      return std::nullopt;
    }
    const double r = unitarity_residual(*u);
    if (r > tol_) {
      fail(where, "gate literal is not unitary (residual " + std::to_string(r) + ")");
      return std::nullopt;
    }
    return u;
  }

  // Gate literal or {"kraus": [matrix, ...]}.
  std::optional<KrausChannel> channel(const json& j, const std::string& where) {
    if (j.is_object() && j.contains("kraus")) {
      known_keys(j, where, {"kraus"});
      const json& list = j["kraus"];
      const std::string w = at(where, "kraus");
      if (!list.is_array() || list.empty()) {
        fail(w, "expected a non-empty list of Kraus operators");
        return std::nullopt;
      }
      std::vector<Matrix> ks;
      for (std::size_t i = 0; i < list.size(); ++i) {
        auto m = matrix(list[i], at(w, i));
        if (!m) return std::nullopt;
        ks.push_back(std::move(*m));
      }
      try {
        return KrausChannel::make(std::move(ks), tol_);
      } catch (const Error& e) {
        fail(w, e.what());
        return std::nullopt;
      }
    }
    auto u = gate(j, where);
    if (!u) return std::nullopt;
    return KrausChannel::make({*u}, tol_);
  }

  // Ket (column) or density matrix. Strings are products of 0, 1, +, -.
  std::optional<Matrix> state(const json& j, const std::string& where) {
    if (j.is_string()) {
      const auto& s = j.get_ref<const std::string&>();
      Matrix out;
      for (char c : s) {
        Matrix q = qubit_ket(c);
        if (q.empty()) {
          fail(where, "state strings use the characters 0, 1, + and -");
          return std::nullopt;
        }
        out = out.empty() ? q : tensor_product(out, q);
      }
      if (out.empty()) fail(where, "empty state string");
      if (out.empty()) return std::nullopt;
      return out;
    }
    if (j.is_array()) return normalized_ket(j, where);
    if (!object(j, where)) return std::nullopt;
    if (j.contains("ket")) {
      known_keys(j, where, {"ket"});
      return normalized_ket(j["ket"], at(where, "ket"));
    }
    if (j.contains("basis")) {
      known_keys(j, where, {"basis", "dim"});
      const auto k = count(j, where, "basis", 0), d = count(j, where, "dim", 2);
      if (!k || !d) return std::nullopt;
      if (*k >= *d) {
        fail(at(where, "basis"), "basis index out of range");
        return std::nullopt;
      }
      return ket(*d, *k);
    }
    if (j.contains("density")) {
      known_keys(j, where, {"density"});
      auto m = matrix(j["density"], at(where, "density"));
      if (!m) return std::nullopt;
      try {
        if (!m->is_square()) throw DimensionError("density matrix must be square");
        MixedState::make(RegisterLayout({Register{"s", m->rows()}}), *m);
      } catch (const Error& e) {
        fail(at(where, "density"), e.what());
        return std::nullopt;
      }
      return m;
    }
    if (j.contains("product")) {
      known_keys(j, where, {"product"});
      const json& list = j["product"];
      if (!list.is_array() || list.empty()) {
        fail(at(where, "product"), "expected a non-empty list of states");
        return std::nullopt;
      }
      Matrix out;
      for (std::size_t i = 0; i < list.size(); ++i) {
        auto f = state(list[i], at(at(where, "product"), i));
        if (!f) return std::nullopt;
        if (!out.empty() && (out.cols() == 1) != (f->cols() == 1)) {
          out = out.cols() == 1 ? outer(out) : out;
          *f = f->cols() == 1 ? outer(*f) : *f;
        }
        out = out.empty() ? *f : tensor_product(out, *f);
      }
      return out;
    }
    fail(where, "expected a state string, amplitude list, or one of ket/basis/density/product");
    return std::nullopt;
  }

  std::optional<Matrix> pure_state(const json& j, const std::string& where) {
    auto s = state(j, where);
    if (s && s->cols() != 1) {
      fail(where, "a pure state is required here");
      return std::nullopt;
    }
    return s;
  }

  // Pauli string, Hermitian matrix, or {"projector": state}.
  std::optional<Matrix> observable(const json& j, const std::string& where) {
    if (j.is_string()) {
      Matrix out;
      for (char c : j.get_ref<const std::string&>()) {
        Matrix p = pauli(c);
        if (p.empty()) {
          fail(where, "observable strings use the characters I, X, Y and Z");
          return std::nullopt;
        }
        out = out.empty() ? p : tensor_product(out, p);
      }
      if (out.empty()) fail(where, "empty observable string");
      if (out.empty()) return std::nullopt;
      return out;
    }
    if (j.is_object() && j.contains("projector")) {
      known_keys(j, where, {"projector"});
      auto s = state(j["projector"], at(where, "projector"));
      if (!s) return std::nullopt;
      return s->cols() == 1 ? outer(*s) : *s;
    }
    std::optional<Matrix> m;
    if (j.is_object()) {
      known_keys(j, where, {"matrix"});
      const json* mj = field(j, where, "matrix");
      if (!mj) return std::nullopt;
      m = matrix(*mj, at(where, "matrix"));
    } else {
      m = matrix(j, where);
    }
    if (!m) return std::nullopt;
    if (!m->is_square() || !is_hermitian(*m, tol_)) {
      fail(where, "observable must be a Hermitian matrix");
      return std::nullopt;
    }
    return m;
  }

  std::optional<ReadoutMode> readout(const json& obj, const std::string& where) {
    const auto r = text(obj, where, "readout", false);
    if (!r || *r == "sampled") return ReadoutMode::kSampled;
    if (*r == "expectation") return ReadoutMode::kExpectation;
    fail(at(where, "readout"), "expected 'sampled' or 'expectation'");
    return std::nullopt;
  }

 private:
  std::optional<Matrix> normalized_ket(const json& j, const std::string& where) {
    auto k = column(j, where);
    if (!k) return std::nullopt;
    if (std::abs(norm(*k) - 1.0) > tol_) {
      fail(where, "state is not normalized");
      return std::nullopt;
    }
    return k;
  }

  ScenarioReport& report_;
  double tol_;
};

ChoiProgram program_of(const KrausChannel& ch) { return ch.is_unitary() ? choi_of(ch.kraus[0]) : choi_of(ch); }

std::optional<std::vector<Register>> port(Parser& p, const json& j, const std::string& where, std::size_t dim) {
  if (j.is_string()) return std::vector<Register>{Register{j.get<std::string>(), dim}};
  if (!j.is_array() || j.empty()) {
    p.fail(where, "expected a label or a list of {label, dim}");
    return std::nullopt;
  }
  std::vector<Register> regs;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = at(where, i);
    if (!p.object(j[i], w)) return std::nullopt;
    p.known_keys(j[i], w, {"label", "dim"});
    const auto label = p.text(j[i], w, "label");
    const auto d = p.count(j[i], w, "dim", 2);
    if (!label || !d) return std::nullopt;
    regs.push_back(Register{*label, *d});
  }
  return regs;
}

std::optional<Step> parse_step(Parser& p, const json& j, const std::string& w) {
  if (!p.object(j, w)) return std::nullopt;
  const auto op = p.text(j, w, "op");
  if (!op) return std::nullopt;
  const std::size_t before = p.issue_count();
  auto ok = [&] { return p.issue_count() == before; };

  if (*op == "prepare") {
    p.known_keys(j, w, {"op", "party", "label", "state"});
    auto party = p.text(j, w, "party"), label = p.text(j, w, "label");
    const json* s = p.field(j, w, "state");
    auto st = s ? p.state(*s, at(w, "state")) : std::nullopt;
    if (!ok() || !st) return std::nullopt;
    return step::PrepareState{*party, *label, *st};
  }
  if (*op == "prepare_program") {
    p.known_keys(j, w, {"op", "party", "program", "out", "in"});
    auto party = p.text(j, w, "party");
    const json* pj = p.field(j, w, "program");
    auto ch = pj ? p.channel(*pj, at(w, "program")) : std::nullopt;
    const json* oj = p.field(j, w, "out");
    const json* ij = p.field(j, w, "in");
    if (!ok() || !ch) return std::nullopt;
    auto out = port(p, *oj, at(w, "out"), ch->out_dim);
    auto in = port(p, *ij, at(w, "in"), ch->in_dim);
    if (!out || !in) return std::nullopt;
    return step::PrepareProgram{*party, program_of(*ch), *out, *in};
  }
  if (*op == "distribute_ebit") {
    p.known_keys(j, w, {"op", "id", "party_a", "label_a", "party_b", "label_b", "dim"});
    auto id = p.text(j, w, "id"), pa = p.text(j, w, "party_a"), la = p.text(j, w, "label_a"),
         pb = p.text(j, w, "party_b"), lb = p.text(j, w, "label_b");
    auto dim = p.count(j, w, "dim", 2, false);
    if (!ok()) return std::nullopt;
    return step::DistributeEbit{*id, *pa, *la, *pb, *lb, dim.value_or(2)};
  }
  if (*op == "isi_inject") {
    p.known_keys(j, w, {"op", "items"});
    const json* items = p.field(j, w, "items");
    if (!items) return std::nullopt;
    if (!items->is_array() || items->empty()) {
      p.fail(at(w, "items"), "expected a non-empty list");
      return std::nullopt;
    }
    step::IsiInject s;
    for (std::size_t i = 0; i < items->size(); ++i) {
      const std::string iw = at(at(w, "items"), i);
      const json& it = (*items)[i];
      if (!p.object(it, iw)) continue;
      p.known_keys(it, iw, {"party", "port", "state"});
      auto party = p.text(it, iw, "party");
      const json* pj = p.field(it, iw, "port");
      auto labels = pj ? p.labels(*pj, at(iw, "port")) : std::nullopt;
      const json* sj = p.field(it, iw, "state");
      auto k = sj ? p.pure_state(*sj, at(iw, "state")) : std::nullopt;
      if (party && labels && k) s.items.push_back(step::InjectItem{*party, *labels, *k});
    }
    if (!ok()) return std::nullopt;
    return s;
  }
  if (*op == "oqt_link") {
    p.known_keys(j, w, {"op", "items"});
    const json* items = p.field(j, w, "items");
    if (!items) return std::nullopt;
    if (!items->is_array() || items->empty()) {
      p.fail(at(w, "items"), "expected a non-empty list");
      return std::nullopt;
    }
    step::OqtLink s;
    for (std::size_t i = 0; i < items->size(); ++i) {
      const std::string iw = at(at(w, "items"), i);
      const json& it = (*items)[i];
      if (!p.object(it, iw)) continue;
      p.known_keys(it, iw, {"party", "source", "target"});
      auto party = p.text(it, iw, "party"), src = p.text(it, iw, "source"), dst = p.text(it, iw, "target");
      if (party && src && dst) s.items.push_back(step::LinkItem{*party, *src, *dst});
    }
    if (!ok()) return std::nullopt;
    return s;
  }
  if (*op == "bell_measure") {
    p.known_keys(j, w, {"op", "party", "source", "ebit_end", "tag"});
    auto party = p.text(j, w, "party"), src = p.text(j, w, "source"), end = p.text(j, w, "ebit_end"),
         tag = p.text(j, w, "tag");
    if (!ok()) return std::nullopt;
    return step::BellMeasureQT{*party, *src, *end, *tag};
  }
  if (*op == "pauli_correct") {
    p.known_keys(j, w, {"op", "party", "label", "tag"});
    auto party = p.text(j, w, "party"), label = p.text(j, w, "label"), tag = p.text(j, w, "tag");
    if (!ok()) return std::nullopt;
    return step::PauliCorrect{*party, *label, *tag};
  }
  if (*op == "remote_cnot") {
    p.known_keys(j, w, {"op", "ebit", "control_party", "control", "target_party", "target"});
    auto e = p.text(j, w, "ebit"), cp = p.text(j, w, "control_party"), c = p.text(j, w, "control"),
         tp = p.text(j, w, "target_party"), t = p.text(j, w, "target");
    if (!ok()) return std::nullopt;
    return step::RemoteCnot{*e, *cp, *c, *tp, *t};
  }
  if (*op == "gate") {
    p.known_keys(j, w, {"op", "party", "targets", "gate"});
    auto party = p.text(j, w, "party");
    const json* tj = p.field(j, w, "targets");
    auto targets = tj ? p.labels(*tj, at(w, "targets")) : std::nullopt;
    const json* gj = p.field(j, w, "gate");
    auto u = gj ? p.gate(*gj, at(w, "gate")) : std::nullopt;
    if (!ok() || !targets || !u) return std::nullopt;
    return step::LocalGate{*party, *targets, *u, gj->is_string() ? gj->get<std::string>() : "matrix"};
  }
  if (*op == "knit_cut") {
    p.known_keys(j, w, {"op", "party_a", "label_a", "party_b", "label_b", "gate"});
    auto pa = p.text(j, w, "party_a"), la = p.text(j, w, "label_a"), pb = p.text(j, w, "party_b"),
         lb = p.text(j, w, "label_b");
    const json* gj = p.field(j, w, "gate");
    auto u = gj ? p.gate(*gj, at(w, "gate")) : std::nullopt;
    if (!ok() || !u) return std::nullopt;
    return step::KnitCut{*pa, *la, *pb, *lb, *u};
  }
  if (*op == "broadcast") {
    p.known_keys(j, w, {"op", "party", "bits"});
    auto party = p.text(j, w, "party");
    auto bits = p.count(j, w, "bits", 1, false);
    if (!ok()) return std::nullopt;
    return step::Broadcast{*party, bits.value_or(1)};
  }
  if (*op == "discard") {
    p.known_keys(j, w, {"op", "party", "labels"});
    auto party = p.text(j, w, "party");
    const json* lj = p.field(j, w, "labels");
    auto labels = lj ? p.labels(*lj, at(w, "labels")) : std::nullopt;
    if (!ok() || !labels) return std::nullopt;
    return step::Discard{*party, *labels};
  }
  if (*op == "measure") {
    p.known_keys(j, w, {"op", "party", "labels", "observable", "readout"});
    auto party = p.text(j, w, "party");
    const json* lj = p.field(j, w, "labels");
    auto labels = lj ? p.labels(*lj, at(w, "labels")) : std::nullopt;
    const json* oj = p.field(j, w, "observable");
    auto o = oj ? p.observable(*oj, at(w, "observable")) : std::nullopt;
    auto readout = p.readout(j, w);
    if (!ok() || !labels || !o || !readout) return std::nullopt;
    return step::FinalMeasure{*party, *labels, *o, *readout};
  }
  p.fail(at(w, "op"), "unknown step '" + *op + "'");
  return std::nullopt;
}

std::optional<KnitMode> knit_mode(Parser& p, const json& doc) {
  const auto m = p.text(doc, "", "knit_mode", false);
  if (!m || *m == "exact_sum") return KnitMode::kExactSum;
  if (*m == "sampled") return KnitMode::kSampled;
  p.fail("knit_mode", "expected 'exact_sum' or 'sampled'");
  return std::nullopt;
}

template <class T, class F>
std::vector<T> parse_list(Parser& p, const json& doc, const std::string& key, std::size_t min, F&& item) {
  std::vector<T> out;
  const json* list = p.field(doc, "", key);
  if (!list) return out;
  if (!list->is_array() || list->size() < min) {
    p.fail(key, "expected a list with at least " + std::to_string(min) + " entries");
    return out;
  }
  for (std::size_t i = 0; i < list->size(); ++i)
    if (auto v = item((*list)[i], at(key, i))) out.push_back(std::move(*v));
  return out;
}

void parse_script(Parser& p, const json& doc, Model& m) {
  p.known_keys(doc, "", {"version", "name", "kind", "seed", "shots", "backend", "tolerance", "entry_cap", "output",
                         "description", "parties", "steps", "knit_mode"});
  m.script.parties = parse_list<Party>(p, doc, "parties", 1, [&](const json& j, const std::string& w) {
    std::optional<Party> out;
    if (j.is_string()) return std::optional<Party>(Party{j.get<std::string>(), {}});
    if (!p.object(j, w)) return out;
    p.known_keys(j, w, {"name", "knowledge"});
    auto name = p.text(j, w, "name");
    std::vector<std::string> knows;
    if (const json* k = p.field(j, w, "knowledge", false)) {
      if (auto l = p.labels(*k, at(w, "knowledge"))) knows = *l;
    }
    if (name) out = Party{*name, knows};
    return out;
  });
  m.script.steps = parse_list<Step>(p, doc, "steps", 1, [&](const json& j, const std::string& w) {
    return parse_step(p, j, w);
  });
  if (auto k = knit_mode(p, doc)) m.script.knit_mode = *k;
}

std::vector<ChoiProgram> programs(Parser& p, const json& doc, const std::string& key, std::size_t min) {
  const auto chans = parse_list<KrausChannel>(p, doc, key, min, [&](const json& j, const std::string& w) {
    return p.channel(j, w);
  });
  std::vector<ChoiProgram> out;
  for (std::size_t i = 0; i < chans.size(); ++i) {
    try {
      out.push_back(program_of(chans[i]));
    } catch (const Error& e) {
      p.fail(at(key, i), e.what(), exit_code_of(e.kind()));
    }
  }
  return out;
}

template <class T>
void assign(std::optional<T>&& v, T& slot) {
  if (v) slot = std::move(*v);
}

const json* required(Parser& p, const json& doc, const std::string& key) { return p.field(doc, "", key); }

void parse_dbqc(Parser& p, const json& doc, Model& m) {
  p.known_keys(doc, "", {"version", "name", "kind", "seed", "shots", "backend", "tolerance", "entry_cap", "output",
                         "description", "psi_in", "alice", "bob", "psi_out", "readout"});
  if (const json* j = required(p, doc, "psi_in")) assign(p.pure_state(*j, "psi_in"), m.dbqc.psi_in);
  if (const json* j = required(p, doc, "psi_out")) assign(p.pure_state(*j, "psi_out"), m.dbqc.psi_out);
  m.dbqc.alice = programs(p, doc, "alice", 1);
  m.dbqc.bob = programs(p, doc, "bob", 1);
  assign(p.readout(doc, ""), m.dbqc.readout);
}

void parse_triparty(Parser& p, const json& doc, Model& m) {
  p.known_keys(doc, "", {"version", "name", "kind", "seed", "shots", "backend", "tolerance", "entry_cap", "output",
                         "description", "scheme", "psi_a", "psi_b", "u_a", "u_b", "u_c", "psi_out", "readout"});
  if (auto s = p.text(doc, "", "scheme")) {
    if (*s == "I") m.scheme = TripartyScheme::kI;
    else if (*s == "II") m.scheme = TripartyScheme::kII;
    else p.fail("scheme", "expected 'I' or 'II'");
  }
  auto& t = m.triparty;
  if (const json* j = required(p, doc, "psi_a")) assign(p.pure_state(*j, "psi_a"), t.psi_a);
  if (const json* j = required(p, doc, "psi_b")) assign(p.pure_state(*j, "psi_b"), t.psi_b);
  if (const json* j = required(p, doc, "psi_out")) assign(p.pure_state(*j, "psi_out"), t.psi_out);
  if (const json* j = required(p, doc, "u_a")) assign(p.gate(*j, "u_a"), t.u_a);
  if (const json* j = required(p, doc, "u_b")) assign(p.gate(*j, "u_b"), t.u_b);
  if (const json* j = required(p, doc, "u_c")) assign(p.gate(*j, "u_c"), t.u_c);
  assign(p.readout(doc, ""), t.readout);
}

void parse_knitting(Parser& p, const json& doc, Model& m) {
  p.known_keys(doc, "", {"version", "name", "kind", "seed", "shots", "backend", "tolerance", "entry_cap", "output",
                         "description", "registers", "initial", "gates", "observable", "knit_mode"});
  const auto regs = parse_list<Register>(p, doc, "registers", 1, [&](const json& j, const std::string& w) {
    std::optional<Register> out;
    if (j.is_string()) return std::optional<Register>(Register{j.get<std::string>(), 2});
    if (!p.object(j, w)) return out;
    p.known_keys(j, w, {"label", "dim"});
    auto label = p.text(j, w, "label");
    auto d = p.count(j, w, "dim", 2);
    if (label && d) out = Register{*label, *d};
    return out;
  });
  m.circuit.gates = parse_list<KnitGate>(p, doc, "gates", 0, [&](const json& j, const std::string& w) {
    std::optional<KnitGate> out;
    if (!p.object(j, w)) return out;
    p.known_keys(j, w, {"gate", "targets", "cut"});
    const json* gj = p.field(j, w, "gate");
    auto u = gj ? p.gate(*gj, at(w, "gate")) : std::nullopt;
    const json* tj = p.field(j, w, "targets");
    auto targets = tj ? p.labels(*tj, at(w, "targets")) : std::nullopt;
    bool cut = false;
    if (const json* c = p.field(j, w, "cut", false)) {
      if (c->is_boolean()) cut = c->get<bool>();
      else p.fail(at(w, "cut"), "expected true or false");
    }
    if (u && targets) out = KnitGate{GateOp{gj->is_string() ? gj->get<std::string>() : "matrix", *targets, *u}, cut};
    return out;
  });
  if (const json* j = required(p, doc, "initial")) assign(p.state(*j, "initial"), m.circuit.initial);
  if (const json* j = required(p, doc, "observable")) {
    if (j->is_object() && j->contains("targets")) {
      p.known_keys(*j, "observable", {"targets", "op"});
      auto targets = p.labels((*j)["targets"], "observable.targets");
      const json* oj = p.field(*j, "observable", "op");
      auto o = oj ? p.observable(*oj, "observable.op") : std::nullopt;
      if (targets && o) {
        m.observable = *o;
        m.observable_targets = *targets;
      }
    } else {
      assign(p.observable(*j, "observable"), m.observable);
    }
  }
  if (auto k = knit_mode(p, doc)) m.knit_mode = *k;
  if (p.issue_count() == 0) {
    try {
      m.circuit.layout = RegisterLayout(regs);
    } catch (const Error& e) {
      p.fail("registers", e.what(), exit_code_of(e.kind()));
    }
  }
}

void parse_channels(Parser& p, const json& doc, Model& m, std::size_t min) {
  m.channels = parse_list<KrausChannel>(p, doc, m.kind == Kind::kPingPong ? "programs" : "channels", min,
                                        [&](const json& j, const std::string& w) { return p.channel(j, w); });
}

void parse_pingpong(Parser& p, const json& doc, Model& m) {
  p.known_keys(doc, "", {"version", "name", "kind", "seed", "shots", "backend", "tolerance", "entry_cap", "output",
                         "description", "programs", "input", "observable", "readout"});
  parse_channels(p, doc, m, 1);
  if (const json* j = required(p, doc, "input")) assign(p.state(*j, "input"), m.input);
  if (const json* j = required(p, doc, "observable")) assign(p.observable(*j, "observable"), m.observable);
  assign(p.readout(doc, ""), m.readout);
}

}  // namespace

void parse(const json& doc, const ScenarioOverrides& overrides, Model& m, ScenarioReport& report) {
  Parser bootstrap(report, m.tolerance);
  if (!bootstrap.object(doc, "")) return;
  m.resolved = doc;

  if (overrides.tolerance) {
    m.tolerance = *overrides.tolerance;
  } else if (const json* t = bootstrap.field(doc, "", "tolerance", false)) {
    if (t->is_number()) m.tolerance = t->get<double>();
    else bootstrap.fail("tolerance", "expected a number");
  }
  if (!(m.tolerance > 0.0) || !std::isfinite(m.tolerance)) {
    bootstrap.fail("tolerance", "tolerance must be positive and finite");
    m.tolerance = 1e-10;
  }
  // Literal checks can only be tightened; the library re-validates at kEps.
  Parser p(report, std::min(m.tolerance, kEps));

  if (const json* v = p.field(doc, "", "version")) {
    if (!v->is_number_unsigned() || v->get<std::uint64_t>() != 1) p.fail("version", "unsupported version (expected 1)");
  }
  m.name = p.text(doc, "", "name", false).value_or("scenario");
  if (const json* d = p.field(doc, "", "description", false); d && !d->is_string())
    p.fail("description", "expected a string");

  if (overrides.seed) {
    m.seed = *overrides.seed;
  } else if (const json* s = p.field(doc, "", "seed")) {
    if (s->is_number_unsigned()) m.seed = s->get<std::uint64_t>();
    else p.fail("seed", "seed must be a 64-bit unsigned integer");
  }
  if (overrides.shots) {
    m.shots = *overrides.shots;
    if (m.shots < 1) p.fail("shots", "shots must be at least 1");
  } else if (auto n = p.count(doc, "", "shots", 1)) {
    m.shots = *n;
  }
  if (auto cap = p.count(doc, "", "entry_cap", 1, false)) m.entry_cap = *cap;
  std::string backend = p.text(doc, "", "backend", false).value_or("densitymatrix");
  if (backend != "densitymatrix" && backend != "statevector") {
    p.fail("backend", "expected 'statevector' or 'densitymatrix'");
    backend = "densitymatrix";
  }
  m.output = overrides.output.value_or(p.text(doc, "", "output", false).value_or("dbqc-out"));

  const auto kind = p.text(doc, "", "kind");
  if (!kind) return;
  static const std::map<std::string, Kind> kinds = {
      {"script", Kind::kScript},     {"dbqc", Kind::kDbqc},
      {"triparty", Kind::kTriparty}, {"knitting", Kind::kKnitting},
      {"channel_composition", Kind::kChannelComposition}, {"pingpong", Kind::kPingPong},
  };
  const auto it = kinds.find(*kind);
  if (it == kinds.end()) {
    p.fail("kind", "unknown kind '" + *kind + "'");
    return;
  }
  m.kind = it->second;
  switch (m.kind) {
    case Kind::kScript: parse_script(p, doc, m); break;
    case Kind::kDbqc: parse_dbqc(p, doc, m); break;
    case Kind::kTriparty: parse_triparty(p, doc, m); break;
    case Kind::kKnitting: parse_knitting(p, doc, m); break;
    case Kind::kChannelComposition:
      p.known_keys(doc, "", {"version", "name", "kind", "seed", "shots", "backend", "tolerance", "entry_cap", "output",
                             "description", "channels"});
      parse_channels(p, doc, m, 2);
      break;
    case Kind::kPingPong: parse_pingpong(p, doc, m); break;
  }

  json& r = m.resolved;
  r["seed"] = m.seed;
  r["shots"] = m.shots;
  r["tolerance"] = m.tolerance;
  r["entry_cap"] = m.entry_cap;
  r["backend"] = backend;
  r["output"] = m.output;
  r["name"] = m.name;
  if (m.kind == Kind::kScript || m.kind == Kind::kKnitting)
    r["knit_mode"] = (m.kind == Kind::kScript ? m.script.knit_mode : m.knit_mode) == KnitMode::kSampled ? "sampled"
                                                                                                       : "exact_sum";
}

namespace {

void semantic(ScenarioReport& report, const std::string& where, const Error& e) {
  report.issues.push_back(ScenarioIssue{where, exit_code_of(e.kind()), e.what()});
}

void semantic(ScenarioReport& report, const std::string& where, const std::string& message) {
  report.issues.push_back(ScenarioIssue{where, ExitCode::kSemantic, message});
}

void check_script(Model& m, ScenarioReport& report) {
  try {
    if (m.kind == Kind::kDbqc) m.script = dbqc_script(m.dbqc);
    if (m.kind == Kind::kTriparty) m.script = triparty_script(m.triparty, m.scheme);
  } catch (const Error& e) {
    semantic(report, m.kind == Kind::kDbqc ? "alice" : "u_c", e);
    return;
  }
  m.script.entry_cap = m.entry_cap;
  const bool generated = m.kind != Kind::kScript;
  for (const auto& issue : validate_script(m.script)) {
    std::string where = "steps[" + std::to_string(issue.step) + "]";
    if (generated) where = "generated " + where;
    report.issues.push_back(ScenarioIssue{where, exit_code_of(issue.kind), issue.message});
  }
}

void check_knitting(Model& m, ScenarioReport& report) {
  const RegisterLayout& layout = m.circuit.layout;
  if (layout.dim() > m.entry_cap || layout.dim() * layout.dim() > m.entry_cap) {
    report.issues.push_back(ScenarioIssue{"registers", ExitCode::kCapacity,
                                          "state dimension " + std::to_string(layout.dim()) + " exceeds entry cap"});
    return;
  }
  auto dims_of = [&](const std::vector<std::string>& targets, const std::string& where) -> std::optional<std::size_t> {
    std::size_t d = 1;
    std::set<std::string> seen;
    for (const auto& t : targets) {
      if (!layout.contains(t)) {
        semantic(report, where, "unknown register '" + t + "'");
        return std::nullopt;
      }
      if (!seen.insert(t).second) {
        semantic(report, where, "register '" + t + "' repeated");
        return std::nullopt;
      }
      d *= layout.dim_of(t);
    }
    return d;
  };
  for (std::size_t i = 0; i < m.circuit.gates.size(); ++i) {
    const auto& g = m.circuit.gates[i];
    const std::string w = "gates[" + std::to_string(i) + "]";
    const auto d = dims_of(g.op.targets, w + ".targets");
    if (!d) continue;
    if (*d != g.op.matrix.rows()) {
      semantic(report, w, "gate dimension does not match its targets");
      continue;
    }
    if (g.cut && (g.op.targets.size() != 2 || layout.dim_of(g.op.targets[0]) != layout.dim_of(g.op.targets[1])))
      semantic(report, w, "a cut gate must act on two registers of equal dimension");
  }
  if (m.circuit.initial.rows() != layout.dim())
    semantic(report, "initial", "initial state dimension does not match the registers");
  if (m.observable_targets.empty()) {
    if (m.observable.rows() != layout.dim())
      semantic(report, "observable", "observable dimension does not match the registers");
  } else if (const auto d = dims_of(m.observable_targets, "observable.targets")) {
    if (*d != m.observable.rows()) {
      semantic(report, "observable", "observable dimension does not match its targets");
    } else {
      m.observable = embed_operator(m.observable, m.observable_targets, layout, m.entry_cap);
      m.observable_targets.clear();
    }
  }
}

void check_channels(Model& m, ScenarioReport& report) {
  const std::string key = m.kind == Kind::kPingPong ? "programs" : "channels";
  const std::size_t d = m.channels.front().in_dim;
  for (std::size_t i = 0; i < m.channels.size(); ++i) {
    const auto& c = m.channels[i];
    if (c.in_dim != d || c.out_dim != d)
      semantic(report, key + "[" + std::to_string(i) + "]", "every channel must map dimension " + std::to_string(d) +
                                                                 " to itself");
  }
  if (d * d * d * d > m.entry_cap)
    report.issues.push_back(ScenarioIssue{key, ExitCode::kCapacity, "program dimension exceeds entry cap"});
  if (m.kind != Kind::kPingPong) return;
  if (m.input.rows() != d) semantic(report, "input", "input dimension does not match the programs");
  if (m.observable.rows() != d) semantic(report, "observable", "observable dimension does not match the programs");
}

}  // namespace

void check(Model& m, ScenarioReport& report) {
  switch (m.kind) {
    case Kind::kScript:
    case Kind::kDbqc:
    case Kind::kTriparty: check_script(m, report); break;
    case Kind::kKnitting: check_knitting(m, report); break;
    case Kind::kChannelComposition:
    case Kind::kPingPong: check_channels(m, report); break;
  }
}

}  // namespace dbqc::scenario
