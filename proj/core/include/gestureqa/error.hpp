// Copyright 2026 The GestureQA Authors
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

#include <stdexcept>
#include <string>

namespace gestureqa {

// Root of every error thrown by the library. The CLI maps subclasses onto
// process exit codes, so new error kinds should derive from one of these.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input could not be parsed (malformed JSON, truncated binary, bad CSV).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Input parsed but violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Media (audio, video frames, images) could not be decoded.
class MediaError : public Error {
 public:
  using Error::Error;
};

// Tensor shapes or call preconditions do not match.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Configuration is inconsistent or unsatisfiable.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A referenced entity (sample, rater, file) does not exist.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gestureqa
