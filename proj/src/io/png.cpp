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

#include "iristyle/io/png.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <vector>

namespace iristyle {
namespace {

constexpr unsigned char kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::uint32_t read_be32(const unsigned char* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void put_be32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v >> 24));
  out.push_back(static_cast<unsigned char>(v >> 16));
  out.push_back(static_cast<unsigned char>(v >> 8));
  out.push_back(static_cast<unsigned char>(v));
}

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open file: " + path);
  in.seekg(0, std::ios::end);
  std::streamoff size = in.tellg();
  in.seekg(0);
  std::vector<unsigned char> data(static_cast<std::size_t>(size));
  in.read(reinterpret_cast<char*>(data.data()), size);
  require(in.good(), "short read: " + path);
  return data;
}

int paeth(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

void unfilter(std::vector<unsigned char>& raw, std::size_t height,
              std::size_t stride, std::size_t bpp, const std::string& path) {
  const unsigned char* prev = nullptr;
  for (std::size_t y = 0; y < height; ++y) {
    unsigned char* row = raw.data() + y * (stride + 1);
    const int filter = row[0];
    unsigned char* px = row + 1;
    switch (filter) {
      case 0:
        break;
      case 1:
        for (std::size_t i = bpp; i < stride; ++i) px[i] = static_cast<unsigned char>(px[i] + px[i - bpp]);
        break;
      case 2:
        if (prev != nullptr)
          for (std::size_t i = 0; i < stride; ++i) px[i] = static_cast<unsigned char>(px[i] + prev[i]);
        break;
      case 3:
        for (std::size_t i = 0; i < stride; ++i) {
          int left = i >= bpp ? px[i - bpp] : 0;
          int up = prev != nullptr ? prev[i] : 0;
          px[i] = static_cast<unsigned char>(px[i] + (left + up) / 2);
        }
        break;
      case 4:
        for (std::size_t i = 0; i < stride; ++i) {
          int left = i >= bpp ? px[i - bpp] : 0;
          int up = prev != nullptr ? prev[i] : 0;
          int ul = (prev != nullptr && i >= bpp) ? prev[i - bpp] : 0;
          px[i] = static_cast<unsigned char>(px[i] + paeth(left, up, ul));
        }
        break;
      default:
        fail("png: bad filter type in " + path);
    }
    prev = px;
  }
}

void write_chunk(std::vector<unsigned char>& out, const char type[4],
                 const unsigned char* data, std::size_t len) {
  put_be32(out, static_cast<std::uint32_t>(len));
  std::size_t type_at = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data, data + len);
  std::uint32_t crc = static_cast<std::uint32_t>(
      ::crc32(0, out.data() + type_at, static_cast<uInt>(4 + len)));
  put_be32(out, crc);
}

void write_png(const std::string& path, std::size_t width, std::size_t height,
               int color_type, std::size_t bpp,
               const std::vector<unsigned char>& pixels) {
  // Scanlines with filter byte 0; fixed zlib level keeps output reproducible.
  std::vector<unsigned char> raw((width * bpp + 1) * height);
  for (std::size_t y = 0; y < height; ++y) {
    raw[y * (width * bpp + 1)] = 0;
    std::memcpy(raw.data() + y * (width * bpp + 1) + 1,
                pixels.data() + y * width * bpp, width * bpp);
  }
  uLongf comp_cap = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> comp(comp_cap);
  int rc = compress2(comp.data(), &comp_cap, raw.data(),
                     static_cast<uLong>(raw.size()), 6);
  require(rc == Z_OK, "png: deflate failed for " + path);
  comp.resize(comp_cap);

  std::vector<unsigned char> out(kSignature, kSignature + 8);
  unsigned char ihdr[13];
  ihdr[0] = static_cast<unsigned char>(width >> 24);
  ihdr[1] = static_cast<unsigned char>(width >> 16);
  ihdr[2] = static_cast<unsigned char>(width >> 8);
  ihdr[3] = static_cast<unsigned char>(width);
  ihdr[4] = static_cast<unsigned char>(height >> 24);
  ihdr[5] = static_cast<unsigned char>(height >> 16);
  ihdr[6] = static_cast<unsigned char>(height >> 8);
  ihdr[7] = static_cast<unsigned char>(height);
  ihdr[8] = 8;
  ihdr[9] = static_cast<unsigned char>(color_type);
  ihdr[10] = 0;
  ihdr[11] = 0;
  ihdr[12] = 0;
  write_chunk(out, "IHDR", ihdr, sizeof(ihdr));
  write_chunk(out, "IDAT", comp.data(), comp.size());
  write_chunk(out, "IEND", nullptr, 0);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(f.good(), "cannot write file: " + path);
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  require(f.good(), "short write: " + path);
}

}  // namespace

ImageU8 read_png_gray(const std::string& path) {
  const std::vector<unsigned char> data = read_file(path);
  require(data.size() > 8 && std::memcmp(data.data(), kSignature, 8) == 0,
          "not a png file: " + path);

  std::size_t width = 0, height = 0, bit_depth = 0;
  int color_type = -1;
  std::vector<unsigned char> idat;
  std::size_t pos = 8;
  bool done = false;
  while (!done) {
    require(pos + 8 <= data.size(), "png: truncated chunk in " + path);
    const std::uint32_t len = read_be32(data.data() + pos);
    const char* type = reinterpret_cast<const char*>(data.data() + pos + 4);
    require(pos + 12 + len <= data.size(), "png: truncated chunk in " + path);
    const unsigned char* body = data.data() + pos + 8;
    if (std::memcmp(type, "IHDR", 4) == 0) {
      require(len == 13, "png: bad IHDR in " + path);
      width = read_be32(body);
      height = read_be32(body + 4);
      bit_depth = body[8];
      color_type = body[9];
      require(body[12] == 0, "png: interlaced files are not supported: " + path);
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), body, body + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      done = true;
    } else if (std::memcmp(type, "PLTE", 4) == 0) {
      fail("png: palette images are not supported: " + path);
    }
    pos += 12 + len;
  }
  require(width > 0 && height > 0, "png: missing IHDR in " + path);

  std::size_t channels = 0;
  switch (color_type) {
    case 0: channels = 1; break;
    case 2: channels = 3; break;
    case 6: channels = 4; break;
    default: fail("png: unsupported color type in " + path);
  }
  require(bit_depth == 8 || (bit_depth == 16 && color_type == 0),
          "png: unsupported bit depth in " + path);
  const std::size_t bpp = channels * bit_depth / 8;
  const std::size_t stride = width * bpp;

  std::vector<unsigned char> raw((stride + 1) * height);
  uLongf raw_len = static_cast<uLongf>(raw.size());
  int rc = uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size()));
  require(rc == Z_OK && raw_len == raw.size(), "png: inflate failed for " + path);
  unfilter(raw, height, stride, bpp, path);

  ImageU8 img(static_cast<Eigen::Index>(height), static_cast<Eigen::Index>(width));
  for (std::size_t y = 0; y < height; ++y) {
    const unsigned char* px = raw.data() + y * (stride + 1) + 1;
    for (std::size_t x = 0; x < width; ++x) {
      std::uint8_t v = 0;
      if (channels == 1) {
        v = px[x * bpp];  // high byte for 16-bit
      } else {
        const unsigned char* p = px + x * bpp;
        v = static_cast<std::uint8_t>((299 * p[0] + 587 * p[1] + 114 * p[2] + 500) / 1000);
      }
      img(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = v;
    }
  }
  return img;
}

void write_png_gray(const std::string& path, const ImageU8& image) {
  require(image.size() > 0, "png: refusing to write an empty image");
  const std::size_t h = static_cast<std::size_t>(image.rows());
  const std::size_t w = static_cast<std::size_t>(image.cols());
  std::vector<unsigned char> pixels(h * w);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      pixels[y * w + x] = image(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x));
  write_png(path, w, h, /*color_type=*/0, /*bpp=*/1, pixels);
}

void write_png_rgb(const std::string& path, const ImageU8& r, const ImageU8& g,
                   const ImageU8& b) {
  require(r.rows() == g.rows() && r.rows() == b.rows() && r.cols() == g.cols() &&
              r.cols() == b.cols() && r.size() > 0,
          "png: rgb planes must share a nonempty shape");
  const std::size_t h = static_cast<std::size_t>(r.rows());
  const std::size_t w = static_cast<std::size_t>(r.cols());
  std::vector<unsigned char> pixels(h * w * 3);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      pixels[(y * w + x) * 3 + 0] = r(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x));
      pixels[(y * w + x) * 3 + 1] = g(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x));
      pixels[(y * w + x) * 3 + 2] = b(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x));
    }
  write_png(path, w, h, /*color_type=*/2, /*bpp=*/3, pixels);
}

}  // namespace iristyle
