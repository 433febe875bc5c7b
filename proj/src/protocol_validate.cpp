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

// Static script checks. They mirror what the interpreter enforces at run
// time so that a scenario can be rejected before any simulation.

#include <cmath>
#include <map>
#include <set>

#include "dbqc/protocol.hpp"

namespace dbqc {

namespace {

constexpr double kLiteralTol = 1e-9;

struct SymEbit {
  std::string party_a, label_a, party_b, label_b;
  std::size_t dim = 2;
  bool consumed = false;
};

class Checker {
 public:
  explicit Checker(const ProtocolScript& s) : script_(s) {
    for (const auto& p : s.parties) {
      if (!parties_.insert(p.name).second) issue(Error::Kind::kInvalidArgument, "duplicate party '" + p.name + "'");
    }
  }

  std::vector<ScriptIssue> run() {
    bool measuring = false;
    bool has_knit = false;
    for (index_ = 0; index_ < script_.steps.size(); ++index_) {
      const Step& s = script_.steps[index_];
      measuring |= std::holds_alternative<step::IsiInject>(s) || std::holds_alternative<step::OqtLink>(s) ||
                   std::holds_alternative<step::BellMeasureQT>(s) || std::holds_alternative<step::RemoteCnot>(s);
      has_knit |= std::holds_alternative<step::KnitCut>(s);
      std::visit([&](const auto& x) { check(x); }, s);
    }
    if (script_.steps.empty() || !std::holds_alternative<step::FinalMeasure>(script_.steps.back())) {
      index_ = script_.steps.size();
      issue(Error::Kind::kInvalidArgument, "script must end with a FinalMeasure step");
    }
    if (has_knit && measuring && script_.knit_mode == KnitMode::kSampled) {
      index_ = 0;
      issue(Error::Kind::kInvalidArgument, "sampled knitting cannot be combined with measurement steps");
    }
    return issues_;
  }

 private:
  void issue(Error::Kind kind, std::string msg) { issues_.push_back(ScriptIssue{index_, kind, std::move(msg)}); }

  bool party(const std::string& p) {
    if (parties_.count(p)) return true;
    issue(Error::Kind::kLocality, "unknown party '" + p + "'");
    return false;
  }

  bool held(const std::string& p, const std::string& label) {
    auto it = regs_.find(label);
    if (it == regs_.end()) {
      issue(Error::Kind::kInvalidArgument, "register '" + label + "' is not live");
      return false;
    }
    if (it->second.first != p) {
      issue(Error::Kind::kLocality,
            "party '" + p + "' touches register '" + label + "' held by '" + it->second.first + "'");
      return false;
    }
    return true;
  }

  bool all_held(const std::string& p, const std::vector<std::string>& labels) {
    bool ok = party(p);
    std::set<std::string> seen;
    for (const auto& l : labels) {
      if (!seen.insert(l).second) {
        issue(Error::Kind::kInvalidArgument, "register '" + l + "' listed twice");
        ok = false;
      }
      ok = held(p, l) && ok;
    }
    return ok;
  }

  std::size_t dim(const std::vector<std::string>& labels) const {
    std::size_t d = 1;
    for (const auto& l : labels) d *= regs_.at(l).second;
    return d;
  }

  bool fresh(const std::string& label) {
    if (!regs_.count(label)) return true;
    issue(Error::Kind::kInvalidArgument, "register '" + label + "' already exists");
    return false;
  }

  void add(const std::string& p, const std::string& label, std::size_t d) { regs_[label] = {p, d}; }

  void remove(const std::string& label) {
    regs_.erase(label);
    auto e = ebit_of_.find(label);
    if (e == ebit_of_.end()) return;
    SymEbit& eb = ebits_.at(e->second);
    eb.consumed = true;
    ebit_of_.erase(eb.label_a);
    ebit_of_.erase(eb.label_b);
  }

  void check_ket(const Matrix& ket, std::size_t expect, const std::string& what) {
    if (ket.cols() != 1 || ket.rows() != expect) {
      issue(Error::Kind::kDimension, what + " has dimension " + std::to_string(ket.rows()) + ", expected " +
                                         std::to_string(expect));
      return;
    }
    if (std::abs(norm(ket) - 1.0) > kLiteralTol) issue(Error::Kind::kValidation, what + " is not normalized");
  }

  void check_unitary(const Matrix& u, std::size_t expect, const std::string& what) {
    if (!u.is_square() || u.rows() != expect) {
      issue(Error::Kind::kDimension, what + " does not match its registers");
      return;
    }
    if (!is_unitary(u, kLiteralTol))
      issue(Error::Kind::kValidation,
            what + " is not unitary (residual " + std::to_string(unitarity_residual(u)) + ")");
  }

  void check_density(const Matrix& rho, const std::string& what) {
    if (!is_hermitian(rho, kLiteralTol) || std::abs(rho.trace() - Complex(1.0)) > kLiteralTol) {
      issue(Error::Kind::kValidation, what + " is not a unit-trace Hermitian matrix");
      return;
    }
    if (eigh(rho).values.front() < -kLiteralTol) issue(Error::Kind::kValidation, what + " is not positive");
  }

  void check(const step::PrepareState& x) {
    if (!party(x.party) || !fresh(x.label)) return;
    if (x.state.cols() == 1) {
      check_ket(x.state, x.state.rows(), "state '" + x.label + "'");
    } else if (!x.state.is_square()) {
      issue(Error::Kind::kDimension, "state '" + x.label + "' must be a ket or a square matrix");
      return;
    } else {
      check_density(x.state, "state '" + x.label + "'");
    }
    add(x.party, x.label, x.state.rows());
  }

  void check(const step::PrepareProgram& x) {
    if (!party(x.party)) return;
    std::size_t od = 1, id = 1;
    bool ok = !x.out.empty() && !x.in.empty();
    std::set<std::string> labels;
    for (const auto& r : x.out) od *= r.dim;
    for (const auto& r : x.in) id *= r.dim;
    for (const auto* v : {&x.out, &x.in})
      for (const auto& r : *v) ok = fresh(r.label) && labels.insert(r.label).second && ok;
    if (!ok || od != x.program.out_dim || id != x.program.in_dim || x.program.rho.rows() != od * id) {
      issue(Error::Kind::kDimension, "program ports do not match the program dimensions");
      return;
    }
    check_density(x.program.rho, "program");
    for (const auto* v : {&x.out, &x.in})
      for (const auto& r : *v) add(x.party, r.label, r.dim);
  }

  void check(const step::DistributeEbit& x) {
    bool ok = party(x.party_a);
    ok = party(x.party_b) && ok;
    if (ebits_.count(x.id)) {
      issue(Error::Kind::kResource, "ebit '" + x.id + "' distributed twice");
      ok = false;
    }
    if (x.label_a == x.label_b) {
      issue(Error::Kind::kInvalidArgument, "ebit ends need distinct labels");
      ok = false;
    }
    if (x.dim < 2) {
      issue(Error::Kind::kDimension, "ebit dimension must be at least 2");
      ok = false;
    }
    ok = fresh(x.label_a) && ok;
    ok = fresh(x.label_b) && ok;
    if (!ok) return;
    ebits_[x.id] = SymEbit{x.party_a, x.label_a, x.party_b, x.label_b, x.dim, false};
    ebit_of_[x.label_a] = x.id;
    ebit_of_[x.label_b] = x.id;
    add(x.party_a, x.label_a, x.dim);
    add(x.party_b, x.label_b, x.dim);
  }

  void check(const step::IsiInject& x) {
    if (x.items.empty()) issue(Error::Kind::kInvalidArgument, "injection without items");
    std::vector<std::string> measured;
    for (const auto& it : x.items) {
      if (!all_held(it.party, it.in_port)) continue;
      check_ket(it.ket, dim(it.in_port), "injected state");
      measured.insert(measured.end(), it.in_port.begin(), it.in_port.end());
    }
    for (const auto& l : measured) remove(l);
  }

  void check(const step::OqtLink& x) {
    if (x.items.empty()) issue(Error::Kind::kInvalidArgument, "link without items");
    std::vector<std::string> measured;
    for (const auto& it : x.items) {
      if (!all_held(it.party, {it.source, it.target})) continue;
      if (regs_.at(it.source).second != regs_.at(it.target).second)
        issue(Error::Kind::kDimension, "link registers '" + it.source + "' and '" + it.target + "' differ in dimension");
      measured.push_back(it.source);
      measured.push_back(it.target);
    }
    for (const auto& l : measured) remove(l);
  }

  void check(const step::BellMeasureQT& x) {
    if (tags_.count(x.tag)) issue(Error::Kind::kInvalidArgument, "tag '" + x.tag + "' reused");
    if (!all_held(x.party, {x.source, x.ebit_end})) return;
    if (!ebit_of_.count(x.ebit_end)) {
      issue(Error::Kind::kResource, "'" + x.ebit_end + "' is not an end of a fresh ebit");
      return;
    }
    const std::size_t d = regs_.at(x.source).second;
    if (regs_.at(x.ebit_end).second != d) issue(Error::Kind::kDimension, "teleported register and ebit differ in dimension");
    tags_[x.tag] = d;
    remove(x.source);
    remove(x.ebit_end);
  }

  void check(const step::PauliCorrect& x) {
    auto t = tags_.find(x.tag);
    if (t == tags_.end()) {
      issue(Error::Kind::kResource, "no Bell outcome tagged '" + x.tag + "'");
      return;
    }
    if (!all_held(x.party, {x.label})) return;
    if (regs_.at(x.label).second != t->second) issue(Error::Kind::kDimension, "correction dimension mismatch");
  }

  void check(const step::RemoteCnot& x) {
    auto e = ebits_.find(x.ebit);
    if (e == ebits_.end()) {
      issue(Error::Kind::kResource, "ebit '" + x.ebit + "' was never distributed");
      return;
    }
    if (e->second.consumed) {
      issue(Error::Kind::kResource, "ebit '" + x.ebit + "' is already consumed");
      return;
    }
    const SymEbit eb = e->second;
    const bool forward = eb.party_a == x.control_party && eb.party_b == x.target_party;
    const bool backward = eb.party_b == x.control_party && eb.party_a == x.target_party;
    if (!forward && !backward) {
      issue(Error::Kind::kLocality, "ebit '" + x.ebit + "' does not connect the two parties");
      return;
    }
    bool ok = all_held(x.control_party, {x.control});
    ok = all_held(x.target_party, {x.target}) && ok;
    if (!ok) return;
    if (eb.dim != 2 || regs_.at(x.control).second != 2 || regs_.at(x.target).second != 2)
      issue(Error::Kind::kDimension, "remote CNOT needs qubits");
    remove(eb.label_a);
    regs_.erase(eb.label_b);
  }

  void check(const step::LocalGate& x) {
    if (!all_held(x.party, x.targets)) return;
    check_unitary(x.u, dim(x.targets), "gate '" + x.name + "'");
  }

  void check(const step::KnitCut& x) {
    bool ok = all_held(x.party_a, {x.label_a});
    ok = all_held(x.party_b, {x.label_b}) && ok;
    if (!ok) return;
    if (x.label_a == x.label_b) {
      issue(Error::Kind::kInvalidArgument, "knit cut needs two registers");
      return;
    }
    const std::size_t da = regs_.at(x.label_a).second, db = regs_.at(x.label_b).second;
    if (da != db) {
      issue(Error::Kind::kDimension, "knit cut registers differ in dimension");
      return;
    }
    check_unitary(x.u, da * db, "cut gate");
  }

  void check(const step::Broadcast& x) { party(x.party); }

  void check(const step::Discard& x) {
    if (!all_held(x.party, x.labels)) return;
    for (const auto& l : x.labels) remove(l);
  }

  void check(const step::FinalMeasure& x) {
    if (index_ + 1 != script_.steps.size())
      issue(Error::Kind::kInvalidArgument, "FinalMeasure must be the last step");
    if (x.labels.empty()) issue(Error::Kind::kInvalidArgument, "FinalMeasure without registers");
    if (!all_held(x.party, x.labels)) return;
    if (!x.observable.is_square() || x.observable.rows() != dim(x.labels)) {
      issue(Error::Kind::kDimension, "observable does not match the measured registers");
      return;
    }
    if (!is_hermitian(x.observable, kLiteralTol)) issue(Error::Kind::kValidation, "observable is not Hermitian");
  }

  const ProtocolScript& script_;
  std::size_t index_ = 0;
  std::set<std::string> parties_;
  std::map<std::string, std::pair<std::string, std::size_t>> regs_;  // label -> (party, dim)
  std::map<std::string, SymEbit> ebits_;
  std::map<std::string, std::string> ebit_of_;
  std::map<std::string, std::size_t> tags_;
  std::vector<ScriptIssue> issues_;
};

}  // namespace

std::vector<ScriptIssue> validate_script(const ProtocolScript& script) { return Checker(script).run(); }

}  // namespace dbqc
