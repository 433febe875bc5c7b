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

#include <stdexcept>
#include <string>

namespace dbqc {

/// Base of every error raised by the library. `kind()` maps onto the CLI
/// exit-code table.
class Error : public std::runtime_error {
 public:
  enum class Kind { kDimension, kCapacity, kInvalidArgument, kValidation, kLocality, kResource, kRuntime };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(Kind::kDimension, what) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(Kind::kCapacity, what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(Kind::kInvalidArgument, what) {}
};

/// A mathematical object failed its defining invariant (non-unitary gate,
/// non-TP Kraus set, non-PSD Choi matrix, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(Kind::kValidation, what) {}
};

/// A party touched a register it does not hold.
class LocalityError : public Error {
 public:
  explicit LocalityError(const std::string& what) : Error(Kind::kLocality, what) {}
};

/// Ebit reuse, undeclared resources.
class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(Kind::kResource, what) {}
};

/// Throws the subclass that matches `kind`.
[[noreturn]] inline void raise(Error::Kind kind, const std::string& what) {
  switch (kind) {
    case Error::Kind::kDimension: throw DimensionError(what);
    case Error::Kind::kCapacity: throw CapacityError(what);
    case Error::Kind::kInvalidArgument: throw InvalidArgument(what);
    case Error::Kind::kValidation: throw ValidationError(what);
    case Error::Kind::kLocality: throw LocalityError(what);
    case Error::Kind::kResource: throw ResourceError(what);
    case Error::Kind::kRuntime: break;
  }
  throw Error(kind, what);
}

}  // namespace dbqc
