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

#include "dbqc/layout.hpp"

#include <algorithm>
#include <unordered_set>

#include "dbqc/error.hpp"

namespace dbqc {

RegisterLayout::RegisterLayout(std::initializer_list<Register> regs) : regs_(regs) { check(); }

RegisterLayout::RegisterLayout(std::vector<Register> regs) : regs_(std::move(regs)) { check(); }

RegisterLayout RegisterLayout::single(std::size_t dim, std::string label) {
  return RegisterLayout({Register{std::move(label), dim}});
}

void RegisterLayout::check() {
  std::unordered_set<std::string> seen;
  total_ = 1;
  for (const auto& r : regs_) {
    if (r.dim == 0) throw DimensionError("register '" + r.label + "' has zero dimension");
    if (!seen.insert(r.label).second) throw DimensionError("duplicate register label '" + r.label + "'");
    total_ *= r.dim;
  }
}

bool RegisterLayout::contains(std::string_view label) const {
  return std::any_of(regs_.begin(), regs_.end(), [&](const Register& r) { return r.label == label; });
}

std::size_t RegisterLayout::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < regs_.size(); ++i)
    if (regs_[i].label == label) return i;
  throw DimensionError("unknown register label '" + std::string(label) + "'");
}

std::size_t RegisterLayout::dim_of(std::string_view label) const { return regs_[index_of(label)].dim; }

std::size_t RegisterLayout::dim_of(const std::vector<std::string>& labels) const {
  std::size_t d = 1;
  for (const auto& l : labels) d *= dim_of(l);
  return d;
}

std::vector<std::string> RegisterLayout::labels() const {
  std::vector<std::string> out;
  out.reserve(regs_.size());
  for (const auto& r : regs_) out.push_back(r.label);
  return out;
}

RegisterLayout RegisterLayout::restricted_to(const std::vector<std::string>& labels) const {
  for (const auto& l : labels) index_of(l);
  std::vector<Register> out;
  for (const auto& r : regs_)
    if (std::find(labels.begin(), labels.end(), r.label) != labels.end()) out.push_back(r);
  return RegisterLayout(std::move(out));
}

RegisterLayout RegisterLayout::without(const std::vector<std::string>& labels) const {
  for (const auto& l : labels) index_of(l);
  std::vector<Register> out;
  for (const auto& r : regs_)
    if (std::find(labels.begin(), labels.end(), r.label) == labels.end()) out.push_back(r);
  return RegisterLayout(std::move(out));
}

RegisterLayout RegisterLayout::concat(const RegisterLayout& other) const {
  std::vector<Register> out = regs_;
  out.insert(out.end(), other.regs_.begin(), other.regs_.end());
  return RegisterLayout(std::move(out));
}

RegisterLayout RegisterLayout::renamed(std::string_view from, std::string to) const {
  std::vector<Register> out = regs_;
  out[index_of(from)].label = std::move(to);
  return RegisterLayout(std::move(out));
}

std::size_t RegisterLayout::stride(std::size_t pos) const {
  std::size_t s = 1;
  for (std::size_t i = pos + 1; i < regs_.size(); ++i) s *= regs_[i].dim;
  return s;
}

}  // namespace dbqc
