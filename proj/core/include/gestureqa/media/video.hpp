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

#include "gestureqa/media/image.hpp"

namespace gestureqa::media {

// A video stored as a directory of numbered frames (frame_00000.png, ...)
// with an `fps.txt` sidecar holding the frame rate.
class FrameDirectoryVideo {
 public:
  // Throws MediaError if the path is not a readable frame directory.
  static FrameDirectoryVideo open(const std::filesystem::path& dir);

  // Writes frames and the sidecar into `dir`, creating it if needed.
  static void write(const std::filesystem::path& dir, const std::vector<Image>& frames, double fps);

  std::size_t frame_count() const { return frames_.size(); }
  double fps() const { return fps_; }
  double duration() const { return frames_.size() / fps_; }
  Image frame(std::size_t index) const;
  const std::filesystem::path& frame_path(std::size_t index) const { return frames_.at(index); }

 private:
  std::vector<std::filesystem::path> frames_;
  double fps_ = 0.0;
};

std::filesystem::path frame_filename(std::size_t index);

}  // namespace gestureqa::media
