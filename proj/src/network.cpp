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

#include "dbqc/network.hpp"

#include <algorithm>

namespace dbqc {

Network::Network(std::vector<Party> parties, std::size_t entry_cap) : entry_cap_(entry_cap) {
  for (auto& p : parties) add_party(std::move(p));
}

void Network::add_party(Party party) {
  if (party.name.empty()) throw InvalidArgument("party name must not be empty");
  if (has_party(party.name)) throw InvalidArgument("duplicate party '" + party.name + "'");
  parties_.push_back(std::move(party));
}

bool Network::has_party(const std::string& name) const {
  return std::any_of(parties_.begin(), parties_.end(), [&](const Party& p) { return p.name == name; });
}

const std::string& Network::owner(const std::string& label) const {
  auto it = owners_.find(label);
  if (it == owners_.end()) throw DimensionError("no live register '" + label + "'");
  return it->second;
}

std::vector<std::string> Network::holdings(const std::string& party) const {
  std::vector<std::string> out;
  for (const auto& r : layout_.registers())
    if (owners_.at(r.label) == party) out.push_back(r.label);
  return out;
}

void Network::require_held(const std::string& party, const std::vector<std::string>& labels) const {
  if (!has_party(party)) throw LocalityError("unknown party '" + party + "'");
  for (const auto& l : labels) {
    auto it = owners_.find(l);
    if (it == owners_.end()) throw LocalityError("party '" + party + "' touches missing register '" + l + "'");
    if (it->second != party)
      throw LocalityError("party '" + party + "' touches register '" + l + "' held by '" + it->second + "'");
  }
}

const Ebit& Network::require_fresh_ebit(const std::string& id) const {
  auto it = ebits_.find(id);
  if (it == ebits_.end()) throw ResourceError("ebit '" + id + "' was never distributed");
  if (it->second.consumed) throw ResourceError("ebit '" + id + "' is already consumed");
  return it->second;
}

std::string Network::ebit_at(const std::string& label) const {
  auto it = ebit_of_label_.find(label);
  return it == ebit_of_label_.end() ? std::string() : it->second;
}

void Network::touch_live() {
  ledger_.max_live_registers = std::max(ledger_.max_live_registers, layout_.count());
}

void Network::add_register(const std::string& party, const Register& reg, const Matrix& rho) {
  if (!has_party(party)) throw LocalityError("unknown party '" + party + "'");
  if (owners_.count(reg.label)) throw InvalidArgument("register '" + reg.label + "' already exists");
  rho_ = tensor_product(rho_, rho, entry_cap_);
  layout_ = layout_.concat(RegisterLayout{reg});
  owners_[reg.label] = party;
}

void Network::prepare_state(const std::string& party, const std::string& label, const Matrix& state) {
  const Matrix rho = state.cols() == 1 ? outer(state) : state;
  if (!rho.is_square()) throw DimensionError("prepare_state: state must be a ket or a square matrix");
  add_register(party, Register{label, rho.rows()}, rho);
  touch_live();
}

void Network::prepare_program(const std::string& party, const ChoiProgram& program, const std::vector<Register>& out,
                              const std::vector<Register>& in) {
  std::size_t od = 1, id = 1;
  for (const auto& r : out) od *= r.dim;
  for (const auto& r : in) id *= r.dim;
  if (out.empty() || in.empty() || od != program.out_dim || id != program.in_dim)
    throw DimensionError("prepare_program: port registers do not match the program dimensions");
  std::vector<Register> regs = out;
  regs.insert(regs.end(), in.begin(), in.end());
  for (const auto& r : regs)
    if (owners_.count(r.label)) throw InvalidArgument("register '" + r.label + "' already exists");
  if (!has_party(party)) throw LocalityError("unknown party '" + party + "'");
  rho_ = tensor_product(rho_, program.rho, entry_cap_);
  layout_ = layout_.concat(RegisterLayout(regs));
  for (const auto& r : regs) owners_[r.label] = party;
  touch_live();
}

void Network::distribute_ebit(const std::string& id, const std::string& party_a, const std::string& label_a,
                              const std::string& party_b, const std::string& label_b, std::size_t dim) {
  if (ebits_.count(id)) throw ResourceError("ebit '" + id + "' distributed twice");
  if (label_a == label_b) throw InvalidArgument("ebit ends need distinct labels");
  if (!has_party(party_a) || !has_party(party_b)) throw LocalityError("ebit '" + id + "' names an unknown party");
  if (owners_.count(label_a) || owners_.count(label_b))
    throw InvalidArgument("ebit '" + id + "' reuses a live register label");
  rho_ = tensor_product(rho_, outer(bell_state(dim).amplitudes), entry_cap_);
  layout_ = layout_.concat(RegisterLayout{{label_a, dim}, {label_b, dim}});
  owners_[label_a] = party_a;
  owners_[label_b] = party_b;
  ebits_[id] = Ebit{id, party_a, label_a, party_b, label_b, dim, false};
  ebit_of_label_[label_a] = id;
  ebit_of_label_[label_b] = id;
  ++ledger_.ebits_distributed;
  touch_live();
}

void Network::local_gate(const std::string& party, const Matrix& u, const std::vector<std::string>& targets) {
  require_held(party, targets);
  if (u.rows() != layout_.dim_of(targets) || !u.is_square())
    throw DimensionError("local_gate: gate does not match its target registers");
  rho_ = conjugate_by(rho_, u, targets, layout_);
}

void Network::sandwich_sum(const std::vector<SandwichTerm>& terms) {
  auto product = [&](const std::vector<LocalOp>& ops) {
    Matrix m = Matrix::identity(layout_.dim());
    for (const auto& o : ops) {
      require_held(o.party, {o.label});
      m = embed_operator(o.op, {o.label}, layout_, entry_cap_) * m;
    }
    return m;
  };
  Matrix sum(rho_.rows(), rho_.cols());
  for (const auto& t : terms) sum += t.weight * (product(t.left) * rho_ * product(t.right).adjoint());
  rho_ = std::move(sum);
}

void Network::discard(const std::string& party, const std::vector<std::string>& labels) {
  require_held(party, labels);
  rho_ = trace_out(rho_, labels, layout_);
  layout_ = layout_.without(labels);
  for (const auto& l : labels) owners_.erase(l);
}

void Network::relabel(const std::string& party, const std::string& from, const std::string& to) {
  require_held(party, {from});
  if (owners_.count(to)) throw InvalidArgument("register '" + to + "' already exists");
  layout_ = layout_.renamed(from, to);
  owners_.erase(from);
  owners_[to] = party;
}

double Network::measure(const std::vector<ProjectionItem>& items) {
  for (const auto& item : items) require_held(item.party, item.labels);
  for (const auto& item : items) {
    if (item.ket.rows() != layout_.dim_of(item.labels))
      throw DimensionError("measure: projection ket does not match its registers");
    Matrix reduced = project_reduce(rho_, item.labels, item.ket, layout_);
    if (item.complement) reduced = trace_out(rho_, item.labels, layout_) - reduced;
    rho_ = std::move(reduced);
    layout_ = layout_.without(item.labels);
    for (const auto& l : item.labels) {
      owners_.erase(l);
      auto e = ebit_of_label_.find(l);
      if (e != ebit_of_label_.end()) {
        // The surviving end now carries data and is an ordinary register.
        Ebit& ebit = ebits_.at(e->second);
        ebit.consumed = true;
        ++ledger_.ebits_consumed;
        ebit_of_label_.erase(ebit.label_a);
        ebit_of_label_.erase(ebit.label_b);
      }
    }
  }
  const double p = std::max(0.0, rho_.trace().real());
  if (p > 0.0) rho_ *= 1.0 / p;
  return p;
}

}  // namespace dbqc
