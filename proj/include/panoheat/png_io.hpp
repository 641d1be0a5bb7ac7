#pragma once

#include <zlib.h>

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "panoheat/errors.hpp"
#include "panoheat/image.hpp"

namespace panoheat {

namespace png_detail {

inline void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                         const std::uint8_t* data, std::size_t len) {
  put_be32(out, static_cast<std::uint32_t>(len));
  std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  if (len) out.insert(out.end(), data, data + len);
  std::uint32_t crc = static_cast<std::uint32_t>(
      ::crc32(0, out.data() + start, static_cast<uInt>(4 + len)));
  put_be32(out, crc);
}

}  // namespace png_detail

// Minimal 8-bit truecolor PNG encoder (filter type 0 rows, zlib stream).
inline void write_png(const std::filesystem::path& path,
                      const Rgb8Image& img) {
  int w = img.width(), h = img.height();
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(h) * (1 + 3 * w));
  for (int y = 0; y < h; ++y) {
    raw.push_back(0);  // no filter
    for (int x = 0; x < w; ++x) {
      const Rgb8& p = img.at(x, y);
      raw.push_back(p.r);
      raw.push_back(p.g);
      raw.push_back(p.b);
    }
  }

  uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> comp(comp_len);
  if (compress2(comp.data(), &comp_len, raw.data(),
                static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw IoError("png: zlib compression failed");
  comp.resize(comp_len);

  std::vector<std::uint8_t> out;
  const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  out.insert(out.end(), sig, sig + 8);

  std::uint8_t ihdr[13];
  ihdr[0] = static_cast<std::uint8_t>(w >> 24);
  ihdr[1] = static_cast<std::uint8_t>(w >> 16);
  ihdr[2] = static_cast<std::uint8_t>(w >> 8);
  ihdr[3] = static_cast<std::uint8_t>(w);
  ihdr[4] = static_cast<std::uint8_t>(h >> 24);
  ihdr[5] = static_cast<std::uint8_t>(h >> 16);
  ihdr[6] = static_cast<std::uint8_t>(h >> 8);
  ihdr[7] = static_cast<std::uint8_t>(h);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 2;   // truecolor
  ihdr[10] = ihdr[11] = ihdr[12] = 0;
  png_detail::append_chunk(out, "IHDR", ihdr, 13);
  png_detail::append_chunk(out, "IDAT", comp.data(), comp.size());
  png_detail::append_chunk(out, "IEND", nullptr, 0);

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os.write(reinterpret_cast<const char*>(out.data()),
           static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("write failed: " + path.string());
}

// Classic jet ramp; t in [0, 1].
inline Rgb8 jet_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto seg = [](double x) { return std::clamp(x, 0.0, 1.0); };
  double r = seg(std::min(4.0 * t - 1.5, -4.0 * t + 4.5));
  double g = seg(std::min(4.0 * t - 0.5, -4.0 * t + 3.5));
  double b = seg(std::min(4.0 * t + 0.5, -4.0 * t + 2.5));
  return {static_cast<std::uint8_t>(r * 255.0 + 0.5),
          static_cast<std::uint8_t>(g * 255.0 + 0.5),
          static_cast<std::uint8_t>(b * 255.0 + 0.5)};
}

// False-color rendering over explicit [lo, hi] bounds; values outside the
// range clamp to the ramp ends.
inline Rgb8Image false_color(const ScalarMap& map, double lo, double hi) {
  if (!(hi > lo)) throw InputError("false_color: bounds must satisfy hi > lo");
  Rgb8Image out(map.width(), map.height());
  double inv = 1.0 / (hi - lo);
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x)
      out.at(x, y) = jet_color((map.at(x, y) - lo) * inv);
  return out;
}

inline void write_false_color_png(const std::filesystem::path& path,
                                  const ScalarMap& map, double lo, double hi) {
  write_png(path, false_color(map, lo, hi));
}

}  // namespace panoheat
