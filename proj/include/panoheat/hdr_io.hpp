#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "panoheat/errors.hpp"
#include "panoheat/image.hpp"

namespace panoheat {

// ---------------------------------------------------------------------------
// Radiance picture format (RGBE, run-length encoded scanlines).
//
// The EXPOSURE header is honored as the physical scale: stored channel values
// divided by the cumulative EXPOSURE give physical radiance, so the panorama
// loads with scale = 1 / exposure.
// ---------------------------------------------------------------------------

namespace rgbe_detail {

inline std::array<std::uint8_t, 4> float_to_rgbe(float r, float g, float b) {
  float v = r;
  if (g > v) v = g;
  if (b > v) v = b;
  if (v < 1e-32f) return {0, 0, 0, 0};
  int e;
  float m = std::frexp(v, &e);
  float scale = m * 256.0f / v;
  return {static_cast<std::uint8_t>(r * scale),
          static_cast<std::uint8_t>(g * scale),
          static_cast<std::uint8_t>(b * scale),
          static_cast<std::uint8_t>(e + 128)};
}

inline Rgb rgbe_to_float(const std::uint8_t* q) {
  if (q[3] == 0) return {0.f, 0.f, 0.f};
  float f = std::ldexp(1.0f, static_cast<int>(q[3]) - (128 + 8));
  return {q[0] * f, q[1] * f, q[2] * f};
}

// Component-wise RLE used by the "new" scanline format. Runs of 4+ identical
// bytes become run records; everything else is copied in literal blocks.
inline void write_rle_component(std::ostream& os, const std::uint8_t* data,
                                int n) {
  int i = 0;
  while (i < n) {
    int run_len = 1;
    while (i + run_len < n && run_len < 127 && data[i + run_len] == data[i])
      ++run_len;
    if (run_len >= 4) {
      os.put(static_cast<char>(128 + run_len));
      os.put(static_cast<char>(data[i]));
      i += run_len;
    } else {
      // literal block: scan ahead until a worthwhile run begins
      int lit_end = i + 1;
      while (lit_end < n && lit_end - i < 128) {
        int r = 1;
        while (lit_end + r < n && r < 4 && data[lit_end + r] == data[lit_end])
          ++r;
        if (r >= 4) break;
        ++lit_end;
      }
      os.put(static_cast<char>(lit_end - i));
      os.write(reinterpret_cast<const char*>(data + i), lit_end - i);
      i = lit_end;
    }
  }
}

inline void read_rle_component(std::istream& is, std::uint8_t* out, int n) {
  int i = 0;
  while (i < n) {
    int code = is.get();
    if (code == EOF) throw IoError("RGBE: truncated scanline");
    if (code > 128) {
      int count = code - 128;
      int value = is.get();
      if (value == EOF || i + count > n)
        throw IoError("RGBE: bad run length");
      std::memset(out + i, value, count);
      i += count;
    } else {
      if (code == 0 || i + code > n) throw IoError("RGBE: bad literal length");
      is.read(reinterpret_cast<char*>(out + i), code);
      if (!is) throw IoError("RGBE: truncated literal block");
      i += code;
    }
  }
}

}  // namespace rgbe_detail

inline void write_hdr(const std::filesystem::path& path,
                      const HdrPanorama& pano) {
  const RgbImage& img = pano.pixels;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());

  os << "#?RADIANCE\n";
  os << "FORMAT=32-bit_rle_rgbe\n";
  if (pano.scale != 1.0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "EXPOSURE=%.9g\n", 1.0 / pano.scale);
    os << buf;
  }
  os << "\n-Y " << img.height() << " +X " << img.width() << "\n";

  int w = img.width();
  bool rle = w >= 8 && w <= 0x7fff;
  std::vector<std::uint8_t> comp(static_cast<std::size_t>(w) * 4);
  for (int y = 0; y < img.height(); ++y) {
    if (rle) {
      for (int x = 0; x < w; ++x) {
        auto q = rgbe_detail::float_to_rgbe(img.at(x, y).r, img.at(x, y).g,
                                            img.at(x, y).b);
        for (int c = 0; c < 4; ++c) comp[c * w + x] = q[c];
      }
      os.put(2);
      os.put(2);
      os.put(static_cast<char>(w >> 8));
      os.put(static_cast<char>(w & 0xff));
      for (int c = 0; c < 4; ++c)
        rgbe_detail::write_rle_component(os, comp.data() + c * w, w);
    } else {
      for (int x = 0; x < w; ++x) {
        auto q = rgbe_detail::float_to_rgbe(img.at(x, y).r, img.at(x, y).g,
                                            img.at(x, y).b);
        os.write(reinterpret_cast<const char*>(q.data()), 4);
      }
    }
  }
  if (!os) throw IoError("write failed: " + path.string());
}

inline HdrPanorama read_hdr(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());

  std::string line;
  if (!std::getline(is, line) || line.rfind("#?", 0) != 0)
    throw IoError("RGBE: missing #? signature in " + path.string());

  double exposure = 1.0;
  bool format_ok = false;
  while (std::getline(is, line)) {
    if (line.empty()) break;
    if (line.rfind("FORMAT=", 0) == 0) {
      if (line != "FORMAT=32-bit_rle_rgbe")
        throw IoError("RGBE: unsupported format: " + line);
      format_ok = true;
    } else if (line.rfind("EXPOSURE=", 0) == 0) {
      exposure *= std::stod(line.substr(9));
    }
    // other header variables (GAMMA, comments) are ignored
  }
  if (!format_ok) throw IoError("RGBE: FORMAT line missing");

  if (!std::getline(is, line)) throw IoError("RGBE: missing resolution line");
  int w = 0, h = 0;
  if (std::sscanf(line.c_str(), "-Y %d +X %d", &h, &w) != 2)
    throw IoError("RGBE: unsupported resolution line: " + line);
  if (w <= 0 || h <= 0) throw IoError("RGBE: bad dimensions");

  RgbImage img(w, h);
  std::vector<std::uint8_t> comp(static_cast<std::size_t>(w) * 4);
  for (int y = 0; y < h; ++y) {
    std::uint8_t head[4];
    is.read(reinterpret_cast<char*>(head), 4);
    if (!is) throw IoError("RGBE: truncated file");
    if (head[0] == 2 && head[1] == 2 && ((head[2] << 8) | head[3]) == w &&
        w >= 8 && w <= 0x7fff) {
      for (int c = 0; c < 4; ++c)
        rgbe_detail::read_rle_component(is, comp.data() + c * w, w);
      for (int x = 0; x < w; ++x) {
        std::uint8_t q[4] = {comp[0 * w + x], comp[1 * w + x], comp[2 * w + x],
                             comp[3 * w + x]};
        img.at(x, y) = rgbe_detail::rgbe_to_float(q);
      }
    } else {
      // flat scanline, with old-style (1,1,1,count) repeat records
      int x = 0;
      int shift = 0;
      std::uint8_t q[4] = {head[0], head[1], head[2], head[3]};
      while (true) {
        if (q[0] == 1 && q[1] == 1 && q[2] == 1) {
          if (x == 0) throw IoError("RGBE: repeat with no previous pixel");
          int count = q[3] << shift;
          if (x + count > w) throw IoError("RGBE: repeat overruns scanline");
          for (int k = 0; k < count; ++k, ++x) img.at(x, y) = img.at(x - 1, y);
          shift += 8;
        } else {
          img.at(x, y) = rgbe_detail::rgbe_to_float(q);
          ++x;
          shift = 0;
        }
        if (x >= w) break;
        is.read(reinterpret_cast<char*>(q), 4);
        if (!is) throw IoError("RGBE: truncated file");
      }
    }
  }

  HdrPanorama pano;
  pano.pixels = std::move(img);
  pano.scale = 1.0 / exposure;
  return pano;
}

// ---------------------------------------------------------------------------
// Raw float maps: 16-byte header (8-byte magic, u32 width, u32 height, both
// little-endian) followed by row-major float32 samples.
// ---------------------------------------------------------------------------

inline constexpr char kFloatMapMagic[8] = {'P', 'H', 'F', '3', '2', 0, 0, 0};

inline void write_float_map(const std::filesystem::path& path,
                            const ScalarMap& map) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os.write(kFloatMapMagic, 8);
  std::uint32_t wh[2] = {static_cast<std::uint32_t>(map.width()),
                         static_cast<std::uint32_t>(map.height())};
  os.write(reinterpret_cast<const char*>(wh), 8);
  std::vector<float> row(map.width());
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x)
      row[x] = static_cast<float>(map.at(x, y));
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!os) throw IoError("write failed: " + path.string());
}

inline ScalarMap read_float_map(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());
  char magic[8];
  std::uint32_t wh[2];
  is.read(magic, 8);
  is.read(reinterpret_cast<char*>(wh), 8);
  if (!is || std::memcmp(magic, kFloatMapMagic, 8) != 0)
    throw IoError("not a raw float map: " + path.string());
  if (wh[0] == 0 || wh[1] == 0 || wh[0] > (1u << 20) || wh[1] > (1u << 20))
    throw IoError("raw float map: implausible dimensions");
  ScalarMap map(static_cast<int>(wh[0]), static_cast<int>(wh[1]));
  std::vector<float> row(wh[0]);
  for (std::uint32_t y = 0; y < wh[1]; ++y) {
    is.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!is) throw IoError("raw float map: truncated: " + path.string());
    for (std::uint32_t x = 0; x < wh[0]; ++x)
      map.at(static_cast<int>(x), static_cast<int>(y)) = row[x];
  }
  return map;
}

}  // namespace panoheat
