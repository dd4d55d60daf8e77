// Copyright 2026 The Gramtrie Authors
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
#include <stdexcept>
#include <string>

namespace gramtrie {

/* Base class for every error raised by the library. */
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/* A caller supplied an argument that violates a precondition. */
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/* A key was inserted twice with conflicting values. */
class DuplicateKeyError : public Error {
 public:
  using Error::Error;
};

/* An operation was applied to a state that cannot accept it. */
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/* A vector with zero norm reached an operation that needs a direction. */
class DegenerateVectorError : public Error {
 public:
  using Error::Error;
};

/* Row counts or dimensions of two inputs do not agree. */
class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/* A query probe produced no usable vector. */
class DegenerateQueryError : public Error {
 public:
  using Error::Error;
};

/* Text input could not be parsed; carries the 1-based line number. */
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/* The operating system refused a read or write. */
class IoError : public Error {
 public:
  using Error::Error;
};

/* A serialized model failed structural validation. */
class ModelFormatError : public Error {
 public:
  enum class Kind {
    bad_magic,
    unsupported_version,
    checksum_mismatch,
    truncated,
    invalid_field,
  };

  ModelFormatError(const std::string& msg, Kind kind) : Error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace gramtrie
