// Copyright 2026 The pillfl Authors
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

#ifndef PILLFL_COMMON_ERRORS_H_
#define PILLFL_COMMON_ERRORS_H_

#include <stdexcept>
#include <string>
#include <utility>

namespace pillfl {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched vector/matrix shapes or layer layouts.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// An operation received an empty batch, dataset, or update list.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

// Malformed input files (bad IDX magic, truncated payloads).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Parameter outside its documented domain.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration could not be parsed or validated.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A failure inside the experiment loop, tagged with where it happened.
class RoundError : public Error {
 public:
  RoundError(int round, std::string stage, const std::string& what)
      : Error("round " + std::to_string(round) + ", " + stage + ": " + what),
        round_(round),
        stage_(std::move(stage)) {}

  int round() const { return round_; }
  const std::string& stage() const { return stage_; }

 private:
  int round_;
  std::string stage_;
};

}  // namespace pillfl

#endif  // PILLFL_COMMON_ERRORS_H_
