#pragma once

// Synthetic scenes shared by the unit tests and the acceptance suite.

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "panoheat/panoheat.hpp"

namespace testscenes {

using namespace panoheat;

inline MaterialDb default_materials() {
  MaterialDb db;
  db.add({"plaster_dense", 0.5, 1300.0, 1000.0, 0.91});
  db.add({"copper", 390.0, 8900.0, 390.0, 0.05});
  db.add({"concrete", 1.4, 2100.0, 840.0, 0.91});
  return db;
}

// 4 x 3 x 2.5 m room, camera near the middle. All surfaces plaster at
// reflectance 0.5 so beta = 0.5 everywhere.
inline RoomLayout cuboid_layout(double wall_x = 4.0) {
  RoomLayout l;
  l.footprint = {{0, 0}, {wall_x, 0}, {wall_x, 3.0}, {0, 3.0}};
  l.floor_z = 0.0;
  l.ceiling_z = 2.5;
  l.camera = {2.0, 1.5, 1.2};
  l.surfaces["default"] = {"plaster_dense", 0.5};
  return l;
}

// Equirectangular HDR with a bright circular spot around a given direction
// over a dim background. The spot lands on whatever surface lies that way.
inline HdrPanorama spot_pano(int w, int h, const Direction& center,
                             double angular_radius, float spot_value,
                             float background = 0.05f) {
  HdrPanorama pano;
  pano.pixels = RgbImage(w, h, Rgb{background, background, background});
  pano.scale = 1.0;
  Vec3 c = direction_to_vec(center);
  double cos_r = std::cos(angular_radius);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      Vec3 d = direction_to_vec(pixel_to_direction(x, y, w, h));
      if (dot(d, c) >= cos_r)
        pano.pixels.at(x, y) = {spot_value, spot_value, spot_value};
    }
  }
  return pano;
}

// Desk-scale scene: the spot shines on the +x wall (panorama center). With
// reflectance 0.5 the peak flux is spot_value * 179 * pi / (0.5 * 120).
inline Scene desk_scene(int pano_w = 128, double grid_h = 0.25,
                        float spot_value = 16.0f) {
  Scene s;
  s.layout = cuboid_layout();
  s.pano = spot_pano(pano_w, pano_w / 2, {kPi, kPi / 2}, 0.35, spot_value);
  s.materials = default_materials();
  s.cfg.grid_h_m = grid_h;
  s.cfg.record_every_s = 0.0;  // no intermediate snapshots
  return s;
}

inline PatchSpec center_patch(const Scene& s, double radius = 6.0) {
  return {s.pano.width() / 2.0 - 0.5, s.pano.height() / 2.0 - 0.5, radius};
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("panoheat_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline FlirCalibration synthetic_cal() {
  FlirCalibration cal;
  cal.R = 366545.0;
  cal.B = 1428.0;
  cal.F = 1.0;
  cal.O = -342.0;
  cal.eps_hat = 0.95;
  cal.t_back_k = 293.15;
  return cal;
}

}  // namespace testscenes
