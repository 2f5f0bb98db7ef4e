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
#include <vector>

#include "gestureqa/nn/tensor.hpp"

namespace gestureqa::features {

// Indices of `count` temporally uniform frames out of `total`, endpoints
// included: round(i * (total - 1) / (count - 1)). A single frame picks the
// middle one, floor((total - 1) / 2). When the video has fewer frames than
// requested, every frame is taken once and the last one repeats.
std::vector<std::size_t> uniform_frame_indices(std::size_t total, std::size_t count);

struct FrameStack {
  nn::Tensor frames;  // [count, height, width, 3], values in [0, 1]
  std::vector<std::size_t> indices;
  bool padded = false;  // true when the video was shorter than `count`
};

// Decodes the selected frames of a frame-directory video. When `size` > 0,
// frames are resized to size x size. Throws MediaError on undecodable input.
FrameStack sample_frames(const std::filesystem::path& video, std::size_t count, int size = 0);

}  // namespace gestureqa::features
