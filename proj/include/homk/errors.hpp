// Copyright 2026 The homkernel Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace homk {

/// Input outside the mathematical domain of an operation (bad order, off-grid
/// delay, size mismatch, probability far outside [0, 1]).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A feature vector whose weighted image has zero norm and so cannot be
/// turned into a photon state.
class DegenerateEncodingError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A class with no encodable points.
class EmptyClassError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed dataset, config or weights file.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : std::runtime_error(what), line_(0) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace homk
