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

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gestureqa/error.hpp"
#include "gestureqa/nn/parameter.hpp"

namespace gestureqa::model {

// On-disk checkpoint: a directory with `manifest.json` (format tag, one entry
// per parameter with name, shape and offset, plus free-form metadata) and
// `parameters.bin` (little-endian float64 values in manifest order).
struct CheckpointReport {
  std::vector<std::string> missing;     // expected by the model, absent on disk
  std::vector<std::string> unexpected;  // on disk, unknown to the model
  std::vector<std::string> mismatched;  // present on both sides, shapes differ
  std::size_t loaded = 0;

  bool ok() const { return missing.empty() && unexpected.empty() && mismatched.empty(); }
  std::string summary() const;
};

class CheckpointError : public Error {
 public:
  CheckpointError(const std::string& what, CheckpointReport report)
      : Error(what), report_(std::move(report)) {}
  const CheckpointReport& report() const { return report_; }

 private:
  CheckpointReport report_;
};

void save_checkpoint(const nn::ParameterStore& store, const std::filesystem::path& dir,
                     const nlohmann::json& metadata = nlohmann::json::object());

nlohmann::json read_checkpoint_metadata(const std::filesystem::path& dir);

// Copies matching entries into `store`. Parameters whose names start with one
// of `optional_prefixes` may be missing without error. Every other missing,
// unexpected or mismatched entry is collected, and a CheckpointError carrying
// the full report is thrown if any were found; the store is left untouched
// in that case.
CheckpointReport load_checkpoint(nn::ParameterStore& store, const std::filesystem::path& dir,
                                 const std::vector<std::string>& optional_prefixes = {});

}  // namespace gestureqa::model
