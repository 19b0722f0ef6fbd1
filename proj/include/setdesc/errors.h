// Copyright 2026 The setdesc Authors.
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

#ifndef SETDESC_ERRORS_H_
#define SETDESC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace setdesc {

// Broad failure classes. The CLI maps them onto exit codes 1/2/3.
enum class ErrorKind {
  kUser,      // bad input, config or precondition
  kExternal,  // oracle or embedding provider failure
  kInternal,  // invariant violation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string &what)
      : Error(ErrorKind::kUser, what) {}
};

class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string &what)
      : Error(ErrorKind::kInternal, what) {}
};

// Transport or provider failure talking to a model.
class ExternalError : public Error {
 public:
  explicit ExternalError(const std::string &what)
      : Error(ErrorKind::kExternal, what) {}
};

// A reply arrived but does not follow the requested schema.
class ProtocolError : public ExternalError {
 public:
  explicit ProtocolError(const std::string &what) : ExternalError(what) {}
};

// The scripted oracle has no rule for a call.
class ScriptedMissError : public ExternalError {
 public:
  explicit ScriptedMissError(const std::string &what) : ExternalError(what) {}
};

}  // namespace setdesc

#endif  // SETDESC_ERRORS_H_
