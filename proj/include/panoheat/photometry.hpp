#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "panoheat/errors.hpp"
#include "panoheat/image.hpp"
#include "panoheat/projection.hpp"

namespace panoheat {

// Defaults: photometric channel weights with the 179 lm/W luminous efficacy
// convention for linear-radiance imagery. Both are configurable.
inline constexpr double kDefaultEfficacy = 179.0;
inline constexpr std::array<double, 3> kDefaultLuminanceWeights = {
    0.2126, 0.7152, 0.0722};

// Circular probe in panorama pixel coordinates. Membership is tested at
// pixel centers (integer coordinates), matching a brute-force oracle.
struct PatchSpec {
  double u = 0.0;
  double v = 0.0;
  double radius = 0.0;

  void validate() const {
    if (!(radius > 0.0)) throw InputError("patch radius must be positive");
  }
};

struct PatchStats {
  double mean = 0.0;
  std::size_t count = 0;
};

// L = efficacy * (w_r R + w_g G + w_b B) * scale, per pixel [cd/m^2].
inline ScalarMap luminance_from_hdr(
    const HdrPanorama& pano, double efficacy = kDefaultEfficacy,
    const std::array<double, 3>& weights = kDefaultLuminanceWeights) {
  if (!(efficacy > 0.0)) throw InputError("efficacy must be positive");
  if (weights[0] < 0.0 || weights[1] < 0.0 || weights[2] < 0.0)
    throw InputError("luminance weights must be non-negative");
  const RgbImage& img = pano.pixels;
  ScalarMap out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const Rgb& p = img.at(x, y);
      out.at(x, y) = efficacy *
                     (weights[0] * p.r + weights[1] * p.g + weights[2] * p.b) *
                     pano.scale;
    }
  }
  return out;
}

inline void check_reflectance(double r) {
  if (!(r > 0.0 && r <= 1.0))
    throw InputError("reflectance must be in (0, 1]");
}

// E = L pi / R for a Lambertian surface of reflectance R [lux].
inline ScalarMap illuminance_from_luminance(const ScalarMap& lum,
                                            double reflectance) {
  check_reflectance(reflectance);
  ScalarMap out(lum.width(), lum.height());
  double f = kPi / reflectance;
  for (std::size_t i = 0; i < lum.size(); ++i)
    out.data()[i] = lum.data()[i] * f;
  return out;
}

// Per-pixel reflectance variant (e.g. baked from per-surface values).
inline ScalarMap illuminance_from_luminance(const ScalarMap& lum,
                                            const ScalarMap& reflectance) {
  if (!lum.same_shape(reflectance))
    throw InputError("reflectance map dimensions must match");
  ScalarMap out(lum.width(), lum.height());
  for (std::size_t i = 0; i < lum.size(); ++i) {
    check_reflectance(reflectance.data()[i]);
    out.data()[i] = lum.data()[i] * kPi / reflectance.data()[i];
  }
  return out;
}

// The sunlight approximation: 120 lux per W/m^2 by default. Kept as a config
// constant rather than a hard-coded divisor.
inline constexpr double kDefaultLuxPerWatt = 120.0;

inline ScalarMap flux_from_illuminance(const ScalarMap& illum,
                                       double lux_per_watt = kDefaultLuxPerWatt) {
  if (!(lux_per_watt > 0.0))
    throw InputError("lux-per-watt conversion must be positive");
  ScalarMap out(illum.width(), illum.height());
  for (std::size_t i = 0; i < illum.size(); ++i)
    out.data()[i] = illum.data()[i] / lux_per_watt;
  return out;
}

// Arithmetic mean over pixels whose centers lie inside the circle, summed in
// row-major order.
inline PatchStats patch_mean(const ScalarMap& map, const PatchSpec& patch) {
  patch.validate();
  double r2 = patch.radius * patch.radius;
  double sum = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      double du = x - patch.u;
      double dv = y - patch.v;
      if (du * du + dv * dv <= r2) {
        sum += map.at(x, y);
        ++count;
      }
    }
  }
  if (count == 0)
    throw InputError("patch does not cover any pixel center");
  return {sum / static_cast<double>(count), count};
}

}  // namespace panoheat
