//
// Copyright 2026 The fedlmm Authors
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

#ifndef FEDLMM_ERRORS_H_
#define FEDLMM_ERRORS_H_

#include <stdexcept>
#include <string>

namespace fedlmm {

// Malformed or inconsistent input. Maps to CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what)
      : std::invalid_argument(what) {}
};

// A numerical procedure could not produce a trustworthy answer. Maps to CLI
// exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

// The aggregated information matrix sum_k W_k is singular or too badly
// conditioned to invert.
class SingularDesignError : public NumericalError {
 public:
  SingularDesignError(const std::string& what, double condition)
      : NumericalError(what), condition_(condition) {}

  double condition() const { return condition_; }

 private:
  double condition_;
};

}  // namespace fedlmm

#endif  // FEDLMM_ERRORS_H_
