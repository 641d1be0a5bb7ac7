#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

#include "panoheat/errors.hpp"

namespace panoheat {

struct Rgb {
  float r = 0.f;
  float g = 0.f;
  float b = 0.f;

  Rgb operator+(const Rgb& o) const { return {r + o.r, g + o.g, b + o.b}; }
  Rgb operator*(float s) const { return {r * s, g * s, b * s}; }
};

inline Rgb operator*(float s, const Rgb& c) { return c * s; }

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
};

// Row-major raster. Pixel (x, y) has continuous coordinate (x, y): integer
// coordinates are pixel centers throughout the library.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * height, fill) {
    if (width <= 0 || height <= 0)
      throw InputError("image dimensions must be positive");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  T& at(int x, int y) {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_);
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  const T& at(int x, int y) const {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_);
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool same_shape(const Image& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using ScalarMap = Image<double>;
using RgbImage = Image<Rgb>;
using Rgb8Image = Image<Rgb8>;

// Linear-radiance equirectangular panorama. `scale` converts stored channel
// values to physical units (W·sr⁻¹·m⁻² per channel); a Radiance file with
// EXPOSURE=e loads with scale = 1/e.
struct HdrPanorama {
  RgbImage pixels;
  double scale = 1.0;

  int width() const { return pixels.width(); }
  int height() const { return pixels.height(); }

  void validate() const {
    if (pixels.width() != 2 * pixels.height())
      throw InputError("panorama must be 2:1 equirectangular");
    for (const Rgb& p : pixels.data()) {
      if (!(std::isfinite(p.r) && std::isfinite(p.g) && std::isfinite(p.b)) ||
          p.r < 0.f || p.g < 0.f || p.b < 0.f)
        throw InputError("panorama channels must be finite and non-negative");
    }
    if (!(std::isfinite(scale)) || scale <= 0.0)
      throw InputError("panorama scale must be positive");
  }
};

inline constexpr double kCelsiusOffset = 273.15;

inline double kelvin_to_celsius(double k) { return k - kCelsiusOffset; }
inline double celsius_to_kelvin(double c) { return c + kCelsiusOffset; }

inline ScalarMap map_to_celsius(const ScalarMap& kelvin) {
  ScalarMap out(kelvin.width(), kelvin.height());
  for (std::size_t i = 0; i < kelvin.size(); ++i)
    out.data()[i] = kelvin.data()[i] - kCelsiusOffset;
  return out;
}

}  // namespace panoheat
