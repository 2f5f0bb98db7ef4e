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

#include "gestureqa/motion_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "gestureqa/error.hpp"

namespace gestureqa {
namespace {

bool is_binary(const std::filesystem::path& path) { return path.extension() == ".bin"; }

MotionHeader parse_header(std::istream& in, const std::filesystem::path& path) {
  MotionHeader h;
  std::string line;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) {
      throw FormatError(path.string() + ": missing header line '" + what + "'");
    }
    return line;
  };
  try {
    h.frames = std::stoull(next("frames"));
    h.dim = std::stoull(next("dim"));
    h.fps = std::stod(next("fps"));
  } catch (const std::logic_error&) {
    throw FormatError(path.string() + ": malformed header line '" + line + "'");
  }
  if (h.frames == 0 || h.dim == 0 || !(h.fps > 0.0)) {
    throw FormatError(path.string() + ": header requires frames >= 1, dim >= 1, fps > 0");
  }
  return h;
}

}  // namespace

MotionHeader read_motion_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open motion file " + path.string());
  return parse_header(in, path);
}

MotionSequence read_motion(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open motion file " + path.string());
  const MotionHeader h = parse_header(in, path);
  MotionSequence m;
  m.frames = h.frames;
  m.dim = h.dim;
  m.fps = h.fps;
  m.values.resize(h.frames * h.dim);
  if (is_binary(path)) {
    static_assert(std::endian::native == std::endian::little, "binary motion files are little-endian");
    in.read(reinterpret_cast<char*>(m.values.data()),
            static_cast<std::streamsize>(m.values.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(m.values.size() * sizeof(double))) {
      throw FormatError(path.string() + ": truncated binary payload");
    }
  } else {
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      if (!(in >> m.values[i])) {
        throw FormatError(path.string() + ": expected " + std::to_string(m.values.size()) +
                          " values, parse failed at value " + std::to_string(i) + " (row " +
                          std::to_string(i / h.dim) + ")");
      }
    }
  }
  validate_motion(m);
  return m;
}

void write_motion(const MotionSequence& motion, const std::filesystem::path& path) {
  validate_motion(motion);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write motion file " + path.string());
  out << motion.frames << '\n' << motion.dim << '\n' << std::setprecision(17) << motion.fps << '\n';
  if (is_binary(path)) {
    out.write(reinterpret_cast<const char*>(motion.values.data()),
              static_cast<std::streamsize>(motion.values.size() * sizeof(double)));
  } else {
    out << std::setprecision(17);
    for (std::size_t t = 0; t < motion.frames; ++t) {
      for (std::size_t d = 0; d < motion.dim; ++d) {
        if (d) out << ' ';
        out << motion.values[t * motion.dim + d];
      }
      out << '\n';
    }
  }
  if (!out) throw IoError("failed writing motion file " + path.string());
}

void validate_motion(const MotionSequence& motion) {
  if (motion.frames < 1 || motion.dim < 1) throw ValidationError("motion sequence is empty");
  if (motion.values.size() != motion.frames * motion.dim) {
    throw ValidationError("motion values size does not equal frames*dim");
  }
  for (std::size_t i = 0; i < motion.values.size(); ++i) {
    if (!std::isfinite(motion.values[i])) {
      throw ValidationError("non-finite motion value at frame " + std::to_string(i / motion.dim) +
                            ", dim " + std::to_string(i % motion.dim));
    }
  }
}

}  // namespace gestureqa
