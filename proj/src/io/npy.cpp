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

#include "iristyle/io/npy.hpp"

#include <cstring>
#include <fstream>
#include <vector>

namespace iristyle {
namespace {

std::string header_value(const std::string& header, const std::string& key,
                         const std::string& path) {
  std::size_t at = header.find("'" + key + "'");
  require(at != std::string::npos, "npy: missing '" + key + "' in " + path);
  at = header.find(':', at);
  require(at != std::string::npos, "npy: malformed header in " + path);
  ++at;
  while (at < header.size() && (header[at] == ' ')) ++at;
  std::size_t end = at;
  int depth = 0;
  while (end < header.size()) {
    char c = header[end];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) break;
    if (c == '}') break;
    ++end;
  }
  return header.substr(at, end - at);
}

}  // namespace

ImageU8 read_npy_u8(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open file: " + path);
  char magic[6];
  in.read(magic, 6);
  require(in.good() && std::memcmp(magic, "\x93NUMPY", 6) == 0,
          "not a npy file: " + path);
  unsigned char ver[2];
  in.read(reinterpret_cast<char*>(ver), 2);
  std::uint32_t header_len = 0;
  if (ver[0] == 1) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    header_len = b[0] | (std::uint32_t(b[1]) << 8);
  } else {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    header_len = b[0] | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
                 (std::uint32_t(b[3]) << 24);
  }
  std::string header(header_len, '\0');
  in.read(header.data(), header_len);
  require(in.good(), "npy: truncated header in " + path);

  std::string descr = header_value(header, "descr", path);
  std::string order = header_value(header, "fortran_order", path);
  std::string shape = header_value(header, "shape", path);
  require(order.find("False") != std::string::npos,
          "npy: fortran order is not supported: " + path);

  // descr like '<i8' or '|u1' (quoted)
  std::size_t q = descr.find('\'');
  require(q != std::string::npos && descr.size() >= q + 4, "npy: bad descr in " + path);
  const char kind = descr[q + 2];
  const int item = descr[q + 3] - '0';
  require((kind == 'u' || kind == 'i') && (item == 1 || item == 2 || item == 4 || item == 8),
          "npy: unsupported dtype " + descr + " in " + path);

  long long rows = -1, cols = -1;
  if (std::sscanf(shape.c_str(), " ( %lld , %lld", &rows, &cols) != 2)
    fail("npy: expected a 2D shape in " + path);
  require(rows > 0 && cols > 0, "npy: bad shape in " + path);

  std::vector<unsigned char> buf(static_cast<std::size_t>(rows * cols * item));
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  require(in.good(), "npy: truncated data in " + path);

  ImageU8 out(rows, cols);
  for (long long i = 0; i < rows * cols; ++i) {
    // little-endian load of one element
    std::uint64_t v = 0;
    for (int b = item - 1; b >= 0; --b) v = (v << 8) | buf[static_cast<std::size_t>(i * item + b)];
    require(v <= 255, "npy: value out of 8-bit range in " + path);
    out(static_cast<Eigen::Index>(i / cols), static_cast<Eigen::Index>(i % cols)) =
        static_cast<std::uint8_t>(v);
  }
  return out;
}

}  // namespace iristyle
