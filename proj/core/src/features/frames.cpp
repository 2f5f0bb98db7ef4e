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

#include "gestureqa/features/frames.hpp"

#include <algorithm>
#include <cmath>

#include "gestureqa/error.hpp"
#include "gestureqa/media/video.hpp"

namespace gestureqa::features {

std::vector<std::size_t> uniform_frame_indices(std::size_t total, std::size_t count) {
  if (total == 0) throw MediaError("video has no frames");
  if (count == 0) throw ContractError("frame count must be at least 1");
  std::vector<std::size_t> indices(count);
  if (total < count) {
    for (std::size_t i = 0; i < count; ++i) indices[i] = std::min(i, total - 1);
    return indices;
  }
  if (count == 1) {
    indices[0] = (total - 1) / 2;
    return indices;
  }
  const double step = static_cast<double>(total - 1) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    indices[i] = static_cast<std::size_t>(std::llround(static_cast<double>(i) * step));
  }
  return indices;
}

FrameStack sample_frames(const std::filesystem::path& video_path, std::size_t count, int size) {
  const auto video = media::FrameDirectoryVideo::open(video_path);
  FrameStack stack;
  stack.indices = uniform_frame_indices(video.frame_count(), count);
  stack.padded = video.frame_count() < count;
  std::int64_t height = 0;
  std::int64_t width = 0;
  std::vector<double> values;
  for (std::size_t i = 0; i < stack.indices.size(); ++i) {
    media::Image img = video.frame(stack.indices[i]);
    if (size > 0) img = media::resize(img, size, size);
    if (i == 0) {
      height = img.height;
      width = img.width;
      values.reserve(count * static_cast<std::size_t>(height * width * 3));
    } else if (img.height != height || img.width != width) {
      throw MediaError(video_path.string() + ": frames have inconsistent sizes");
    }
    for (std::uint8_t px : img.rgb) values.push_back(px / 255.0);
  }
  stack.frames = nn::Tensor({static_cast<std::int64_t>(count), height, width, 3}, std::move(values));
  return stack;
}

}  // namespace gestureqa::features
