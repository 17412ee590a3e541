/* Copyright 2026 The tastream Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>

namespace tastream {

// Caller handed in something outside the operation's domain (bad token id,
// mismatched dimensions, out-of-range weight).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A file or stream did not follow its declared format. `line` is 1-based;
// 0 means the error is not tied to a specific line.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// No CTC path with nonzero probability collapses to the requested transcript.
class InfeasibleAlignment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A scorer (in-process or remote) failed or broke its contract. `payload`
// carries the offending raw message or prefix rendering, when there is one.
class ScorerError : public std::runtime_error {
 public:
  ScorerError(const std::string& what, std::string payload = {})
      : std::runtime_error(payload.empty() ? what : what + " [" + payload + "]"),
        payload_(std::move(payload)) {}

  const std::string& payload() const { return payload_; }

 private:
  std::string payload_;
};

}  // namespace tastream
