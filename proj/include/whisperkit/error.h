// Copyright 2026 The whisperkit Authors.
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

#ifndef WHISPERKIT_ERROR_H_
#define WHISPERKIT_ERROR_H_

#include <stdexcept>
#include <string>

namespace whisperkit {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// File missing, unreadable, or malformed.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input row; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), detail_(what), line_(line) {}
  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string detail_;
  std::size_t line_;
};

}  // namespace whisperkit

#endif  // WHISPERKIT_ERROR_H_
