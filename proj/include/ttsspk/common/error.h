// Copyright (c) 2026 The ttsspk Authors
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

#ifndef TTSSPK_COMMON_ERROR_H_
#define TTSSPK_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace ttsspk {

// Error categories. The CLI maps them onto process exit codes:
// usage/config -> 1, input/data -> 2, numeric -> 3.
enum class ErrorKind {
  kUsage,
  kConfig,
  kInput,
  kDimension,
  kDomain,
  kNumeric,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& w) : Error(ErrorKind::kUsage, w) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& w) : Error(ErrorKind::kConfig, w) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& w) : Error(ErrorKind::kInput, w) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& w)
      : Error(ErrorKind::kDimension, w) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& w) : Error(ErrorKind::kDomain, w) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& w)
      : Error(ErrorKind::kNumeric, w) {}
};

int ExitCodeFor(ErrorKind kind);

}  // namespace ttsspk

#endif  // TTSSPK_COMMON_ERROR_H_
