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

#include <cstddef>
#include <filesystem>

#include "gestureqa/types.hpp"

namespace gestureqa {

// Motion files start with three text lines (frame count, dimension, fps).
// Text files follow with one whitespace-separated row per frame; files with
// a `.bin` extension follow with frames*dim little-endian float64 values.
struct MotionHeader {
  std::size_t frames = 0;
  std::size_t dim = 0;
  double fps = 0.0;
};

MotionHeader read_motion_header(const std::filesystem::path& path);
MotionSequence read_motion(const std::filesystem::path& path);
void write_motion(const MotionSequence& motion, const std::filesystem::path& path);

// Throws ValidationError when the sequence is empty, ragged or non-finite.
void validate_motion(const MotionSequence& motion);

}  // namespace gestureqa
