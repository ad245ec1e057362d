// Copyright 2020 The Authors.
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

#ifndef VOCAB_SQUEEZE_ERRORS_H_
#define VOCAB_SQUEEZE_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vocab_squeeze {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. line() is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Input is well formed but violates a precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A quantity is undefined for the given distribution (e.g. degenerate p0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// An index or boundary lies outside the range a structure covers.
class RangeError : public Error {
 public:
  using Error::Error;
};

// A boundary that is already part of a solution was queried or inserted.
class DuplicateBoundaryError : public Error {
 public:
  using Error::Error;
};

}  // namespace vocab_squeeze

#endif  // VOCAB_SQUEEZE_ERRORS_H_
