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

#include "gestureqa/media/video.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>

#include "gestureqa/error.hpp"

namespace gestureqa::media {

std::filesystem::path frame_filename(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%05zu.png", index);
  return buf;
}

FrameDirectoryVideo FrameDirectoryVideo::open(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw MediaError(dir.string() + ": not a frame directory (container formats are not decoded)");
  }
  FrameDirectoryVideo video;
  std::ifstream sidecar(dir / "fps.txt");
  if (!(sidecar >> video.fps_) || !(video.fps_ > 0.0)) {
    throw MediaError(dir.string() + ": missing or invalid fps.txt");
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    const auto ext = entry.path().extension();
    if (name.rfind("frame_", 0) == 0 && (ext == ".png" || ext == ".ppm")) {
      video.frames_.push_back(entry.path());
    }
  }
  if (video.frames_.empty()) throw MediaError(dir.string() + ": no frames found");
  std::sort(video.frames_.begin(), video.frames_.end());
  return video;
}

void FrameDirectoryVideo::write(const std::filesystem::path& dir, const std::vector<Image>& frames,
                                double fps) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < frames.size(); ++i) write_png(frames[i], dir / frame_filename(i));
  std::ofstream sidecar(dir / "fps.txt");
  sidecar << fps << '\n';
  if (!sidecar) throw IoError("cannot write " + (dir / "fps.txt").string());
}

Image FrameDirectoryVideo::frame(std::size_t index) const {
  if (index >= frames_.size()) throw MediaError("frame index out of range");
  return read_image(frames_[index]);
}

}  // namespace gestureqa::media
