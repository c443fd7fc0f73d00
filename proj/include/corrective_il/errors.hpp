// Copyright 2026 The Corrective IL Authors
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

#ifndef CORRECTIVE_IL_ERRORS_HPP_
#define CORRECTIVE_IL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace corrective_il {

// Bad input: malformed tasks, configs, files, labels. The CLI maps this to
// exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke an operation's precondition (e.g. stepping a finished
// episode, degrading a non-oracle demo).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A file record failed to parse. `line` is 1-based.
class LoadError : public ValidationError {
 public:
  LoadError(std::size_t line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_ERRORS_HPP_
