// Copyright 2026 The IrisStyle Authors. All rights reserved.
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

#ifndef IRISTYLE_IO_PNG_HPP_
#define IRISTYLE_IO_PNG_HPP_

#include <string>

#include "iristyle/image.hpp"

namespace iristyle {

/// Decode a PNG file to an 8-bit grayscale raster. Accepts grayscale
/// (8/16-bit, 16-bit is truncated to the high byte) and 8-bit RGB/RGBA,
/// which is converted by integer BT.601 luma. Palette or interlaced
/// files are rejected.
ImageU8 read_png_gray(const std::string& path);

/// Encode an 8-bit grayscale raster. Output bytes are deterministic for a
/// given input (fixed filter and compression settings).
void write_png_gray(const std::string& path, const ImageU8& image);

/// Encode an 8-bit RGB raster given as three same-shaped planes.
void write_png_rgb(const std::string& path, const ImageU8& r, const ImageU8& g,
                   const ImageU8& b);

}  // namespace iristyle

#endif  // IRISTYLE_IO_PNG_HPP_
