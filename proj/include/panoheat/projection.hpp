#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "panoheat/errors.hpp"
#include "panoheat/image.hpp"

namespace panoheat {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) {
  double n = norm(a);
  if (n == 0.0) throw InputError("cannot normalize zero-length vector");
  return a * (1.0 / n);
}

// Unit-sphere direction: azimuth in [0, 2pi), polar in [0, pi] measured from
// +z (up). Azimuth pi is the camera forward axis (+x world) and lands on the
// panorama center column.
struct Direction {
  double azimuth = 0.0;
  double polar = 0.0;
};

inline double wrap_azimuth(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

inline Vec3 direction_to_vec(const Direction& d) {
  double s = std::sin(d.polar);
  return {s * std::cos(d.azimuth - kPi), s * std::sin(d.azimuth - kPi),
          std::cos(d.polar)};
}

inline Direction vec_to_direction(const Vec3& v) {
  Vec3 u = normalized(v);
  double polar = std::acos(std::clamp(u.z, -1.0, 1.0));
  double azimuth = wrap_azimuth(std::atan2(u.y, u.x) + kPi);
  return {azimuth, polar};
}

// Pixel centers map to directions: theta = 2pi(u+0.5)/w, phi = pi(v+0.5)/h.
// Accepts continuous coordinates; [-0.5, w-0.5) x [-0.5, h-0.5] covers the
// full sphere.
inline Direction pixel_to_direction(double u, double v, int w, int h) {
  if (!(u >= -0.5 && u < w) || !(v >= -0.5 && v < h))
    throw InputError("pixel out of range");
  return {kTwoPi * (u + 0.5) / w, kPi * (v + 0.5) / h};
}

// Exact inverse up to azimuth wrap; u in [-0.5, w-0.5), v in [-0.5, h-0.5].
inline std::array<double, 2> direction_to_pixel(const Direction& d, int w,
                                                int h) {
  double u = wrap_azimuth(d.azimuth) * w / kTwoPi - 0.5;
  double v = d.polar * h / kPi - 0.5;
  return {u, v};
}

// Rounding convention: half toward +infinity, column wraps, row clamps.
inline int nearest_column(double u, int w) {
  long c = static_cast<long>(std::floor(u + 0.5));
  c %= w;
  if (c < 0) c += w;
  return static_cast<int>(c);
}

inline int nearest_row(double v, int h) {
  long r = static_cast<long>(std::floor(v + 0.5));
  if (r < 0) r = 0;
  if (r >= h) r = h - 1;
  return static_cast<int>(r);
}

// Exact solid angle of the pixel cell in row v: the cell integrates to
// (2pi/w)(cos(pi v/h) - cos(pi (v+1)/h)), so the full image sums to 4pi.
inline double pixel_solid_angle(int v, int w, int h) {
  return (kTwoPi / w) *
         (std::cos(kPi * v / h) - std::cos(kPi * (v + 1) / h));
}

enum class Sampling { kNearest, kBilinear };

template <typename T>
T sample_nearest(const Image<T>& img, double u, double v) {
  return img.at(nearest_column(u, img.width()), nearest_row(v, img.height()));
}

template <typename T>
T sample_bilinear(const Image<T>& img, double u, double v) {
  int w = img.width(), h = img.height();
  double fu = std::floor(u), fv = std::floor(v);
  double au = u - fu, av = v - fv;
  long c0 = static_cast<long>(fu) % w;
  if (c0 < 0) c0 += w;
  long c1 = (c0 + 1) % w;
  long r0 = std::clamp(static_cast<long>(fv), 0L, static_cast<long>(h - 1));
  long r1 = std::clamp(static_cast<long>(fv) + 1, 0L, static_cast<long>(h - 1));
  const T& p00 = img.at(static_cast<int>(c0), static_cast<int>(r0));
  const T& p10 = img.at(static_cast<int>(c1), static_cast<int>(r0));
  const T& p01 = img.at(static_cast<int>(c0), static_cast<int>(r1));
  const T& p11 = img.at(static_cast<int>(c1), static_cast<int>(r1));
  return p00 * ((1 - au) * (1 - av)) + p10 * (au * (1 - av)) +
         p01 * ((1 - au) * av) + p11 * (au * av);
}

// Pinhole reprojection of the panorama. yaw rotates about +z, pitch about the
// yawed right axis (positive looks up); yaw = pitch = 0 faces the panorama
// center. Vertical FOV follows from the horizontal FOV and output aspect.
struct PerspectiveSpec {
  double yaw = 0.0;
  double pitch = 0.0;
  double hfov = kPi / 2;
  int out_width = 640;
  int out_height = 512;

  void validate() const {
    if (!(hfov > 0.0 && hfov < kPi))
      throw InputError("horizontal FOV must be in (0, pi)");
    if (out_width <= 0 || out_height <= 0)
      throw InputError("output dimensions must be positive");
  }
};

struct CameraBasis {
  Vec3 forward, right, up;
};

inline CameraBasis perspective_basis(double yaw, double pitch) {
  double cy = std::cos(yaw), sy = std::sin(yaw);
  double cp = std::cos(pitch), sp = std::sin(pitch);
  // forward0 = +x, right0 = +y, up0 = +z; yaw about z, then pitch about right
  Vec3 right{-sy, cy, 0.0};
  Vec3 forward{cy * cp, sy * cp, sp};
  Vec3 up = cross(forward, right);
  return {forward, right, up};
}

inline Vec3 perspective_ray(const PerspectiveSpec& spec,
                            const CameraBasis& basis, int ox, int oy) {
  double tan_h = std::tan(spec.hfov / 2.0);
  double tan_v = tan_h * spec.out_height / spec.out_width;
  double cx = (2.0 * (ox + 0.5) / spec.out_width - 1.0) * tan_h;
  double cz = (1.0 - 2.0 * (oy + 0.5) / spec.out_height) * tan_v;
  return basis.forward + basis.right * cx + basis.up * cz;
}

template <typename T>
Image<T> crop_perspective(const Image<T>& pano, const PerspectiveSpec& spec,
                          Sampling sampling) {
  spec.validate();
  CameraBasis basis = perspective_basis(spec.yaw, spec.pitch);
  Image<T> out(spec.out_width, spec.out_height);
  for (int oy = 0; oy < spec.out_height; ++oy) {
    for (int ox = 0; ox < spec.out_width; ++ox) {
      Direction d = vec_to_direction(perspective_ray(spec, basis, ox, oy));
      auto [u, v] = direction_to_pixel(d, pano.width(), pano.height());
      out.at(ox, oy) = sampling == Sampling::kNearest
                           ? sample_nearest(pano, u, v)
                           : sample_bilinear(pano, u, v);
    }
  }
  return out;
}

}  // namespace panoheat
