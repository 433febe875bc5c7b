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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dbqc {

struct Register {
  std::string label;
  std::size_t dim = 0;

  friend bool operator==(const Register&, const Register&) = default;
};

/// Ordered list of labeled registers. The first register is the most
/// significant digit of a flat index (big-endian).
class RegisterLayout {
 public:
  RegisterLayout() = default;
  RegisterLayout(std::initializer_list<Register> regs);
  explicit RegisterLayout(std::vector<Register> regs);

  /// Single anonymous register.
  static RegisterLayout single(std::size_t dim, std::string label = "q");

  const std::vector<Register>& registers() const noexcept { return regs_; }
  std::size_t count() const noexcept { return regs_.size(); }
  std::size_t dim() const noexcept { return total_; }
  bool contains(std::string_view label) const;
  /// Position of `label`; throws DimensionError if absent.
  std::size_t index_of(std::string_view label) const;
  std::size_t dim_of(std::string_view label) const;
  std::vector<std::string> labels() const;

  /// Product dimension of the named registers.
  std::size_t dim_of(const std::vector<std::string>& labels) const;

  /// Registers of this layout, in order, that are (not) in `labels`.
  RegisterLayout restricted_to(const std::vector<std::string>& labels) const;
  RegisterLayout without(const std::vector<std::string>& labels) const;

  RegisterLayout concat(const RegisterLayout& other) const;
  RegisterLayout renamed(std::string_view from, std::string to) const;

  /// Stride of register `pos` in a flat index.
  std::size_t stride(std::size_t pos) const;

  friend bool operator==(const RegisterLayout&, const RegisterLayout&) = default;

 private:
  void check();

  std::vector<Register> regs_;
  std::size_t total_ = 1;
};

}  // namespace dbqc
