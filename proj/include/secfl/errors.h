//
// Copyright 2026 The secfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef SECFL_ERRORS_H_
#define SECFL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace secfl {

// Caller violated an API contract (mismatched owners, reused triple, ...).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Argument outside the mathematical domain of a function (sigma = 0, a
// zero inverse, an unreachable delta target).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A real value does not fit the fixed-point headroom of the field.
class OverflowError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// Invalid experiment configuration. `path` names the offending field, e.g.
// "round.q".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace secfl

#endif  // SECFL_ERRORS_H_
