// Copyright 2026 The recdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RECDP_ERRORS_HPP_
#define RECDP_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace recdp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (expressions, tables, graphs, queries, configs).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  explicit ParseError(const std::string& message) : Error(message), offset_(0) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// A hard size cap was exceeded (DNF clauses, participants, match counts).
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Schema mismatches and unknown attributes.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Semantically invalid data: unbound variables, bad parameter ranges,
// negative query weights, unknown participants or tables.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace recdp

#endif  // RECDP_ERRORS_HPP_
