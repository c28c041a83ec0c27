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

#ifndef IRISTYLE_IO_NPY_HPP_
#define IRISTYLE_IO_NPY_HPP_

#include <string>

#include "iristyle/image.hpp"

namespace iristyle {

/// Read a 2D numpy .npy array of small non-negative integers (any of
/// u1/i1/u2/i2/u4/i4/u8/i8, C order) as an 8-bit raster. Values above 255
/// are rejected; used for per-pixel class maps.
ImageU8 read_npy_u8(const std::string& path);

}  // namespace iristyle

#endif  // IRISTYLE_IO_NPY_HPP_
