#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "panoheat/errors.hpp"
#include "panoheat/projection.hpp"

namespace panoheat {

struct Vec2 {
  double x = 0, y = 0;
};

// Axis-aligned rectangle in plane-local (u, v) meters, used to mark window
// openings on a wall. Mesh vertices inside an aperture receive no solar flux.
struct Aperture {
  std::string surface;
  Vec2 lo, hi;
};

// Finite rectangle in 3D: origin + u*basis_u + v*basis_v for
// (u, v) in [0, extent_u] x [0, extent_v]. Normal points into the room.
struct Plane {
  std::string id;
  Vec3 origin;
  Vec3 basis_u;
  Vec3 basis_v;
  double extent_u = 0.0;
  double extent_v = 0.0;
  Vec3 normal;
  std::string material = "plaster_dense";
  double reflectance = 0.5;

  double area() const { return extent_u * extent_v; }
  Vec3 point(double u, double v) const {
    return origin + basis_u * u + basis_v * v;
  }
};

struct SurfaceConfig {
  std::string material;
  double reflectance = 0.5;
};

struct RoomLayout {
  std::vector<Vec2> footprint;  // ordered polygon, meters
  double floor_z = 0.0;
  double ceiling_z = 0.0;
  Vec3 camera;
  std::map<std::string, SurfaceConfig> surfaces;  // by plane id; "default" ok
  std::vector<Aperture> apertures;
};

namespace layout_detail {

inline double signed_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

inline bool point_in_polygon(const std::vector<Vec2>& poly, double x,
                             double y) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    if ((poly[i].y > y) != (poly[j].y > y) &&
        x < (poly[j].x - poly[i].x) * (y - poly[i].y) /
                (poly[j].y - poly[i].y) +
                poly[i].x)
      inside = !inside;
  }
  return inside;
}

inline bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c,
                               const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    if (v > 1e-12) return 1;
    if (v < -1e-12) return -1;
    return 0;
  };
  int o1 = orient(a, b, c), o2 = orient(a, b, d);
  int o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 != o2 && o3 != o4;
}

inline bool polygon_simple(const std::vector<Vec2>& poly) {
  std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // skip edges sharing a vertex
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j],
                             poly[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

}  // namespace layout_detail

inline void validate_layout(const RoomLayout& l) {
  if (l.footprint.size() < 3)
    throw InputError("footprint needs at least 3 vertices");
  if (!layout_detail::polygon_simple(l.footprint))
    throw InputError("footprint polygon self-intersects");
  if (!(l.floor_z < l.camera.z && l.camera.z < l.ceiling_z))
    throw InputError("camera height must lie between floor_z and ceiling_z");
  if (!layout_detail::point_in_polygon(l.footprint, l.camera.x, l.camera.y))
    throw InputError("camera must be inside the footprint");
  for (const auto& [id, cfg] : l.surfaces) {
    if (!(cfg.reflectance > 0.0 && cfg.reflectance <= 1.0))
      throw InputError("surface reflectance must be in (0, 1]: " + id);
  }
}

// Derives the room's planar surfaces: floor, ceiling (footprint bounding
// box), and one wall per footprint edge. Wall ids are wall_<edge index>.
// All normals point into the room. For concave footprints the bake step's
// nearest-hit rule hides the bbox area outside the polygon.
inline std::vector<Plane> build_surfaces(const RoomLayout& layout) {
  validate_layout(layout);

  std::vector<Vec2> poly = layout.footprint;
  if (layout_detail::signed_area(poly) < 0.0)
    std::reverse(poly.begin(), poly.end());  // normalize to CCW

  auto config_for = [&](const std::string& id) -> SurfaceConfig {
    auto it = layout.surfaces.find(id);
    if (it != layout.surfaces.end()) return it->second;
    it = layout.surfaces.find("default");
    if (it != layout.surfaces.end()) return it->second;
    return SurfaceConfig{};
  };

  double min_x = poly[0].x, max_x = poly[0].x;
  double min_y = poly[0].y, max_y = poly[0].y;
  for (const Vec2& p : poly) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }

  std::vector<Plane> planes;
  double height = layout.ceiling_z - layout.floor_z;

  Plane floor;
  floor.id = "floor";
  floor.origin = {min_x, min_y, layout.floor_z};
  floor.basis_u = {1, 0, 0};
  floor.basis_v = {0, 1, 0};
  floor.extent_u = max_x - min_x;
  floor.extent_v = max_y - min_y;
  floor.normal = {0, 0, 1};
  planes.push_back(floor);

  Plane ceiling = floor;
  ceiling.id = "ceiling";
  ceiling.origin.z = layout.ceiling_z;
  ceiling.normal = {0, 0, -1};
  planes.push_back(ceiling);

  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    double len = std::hypot(b.x - a.x, b.y - a.y);
    if (!(len > 0.0)) throw InputError("degenerate footprint edge");
    Vec3 dir{(b.x - a.x) / len, (b.y - a.y) / len, 0.0};
    Plane wall;
    wall.id = "wall_" + std::to_string(i);
    wall.origin = {a.x, a.y, layout.floor_z};
    wall.basis_u = dir;
    wall.basis_v = {0, 0, 1};
    wall.extent_u = len;
    wall.extent_v = height;
    // interior is to the left of a CCW edge
    wall.normal = cross(Vec3{0, 0, 1}, dir);
    planes.push_back(wall);
  }

  for (Plane& p : planes) {
    SurfaceConfig cfg = config_for(p.id);
    if (!cfg.material.empty()) p.material = cfg.material;
    p.reflectance = cfg.reflectance;
  }
  return planes;
}

inline RoomLayout layout_from_json(const nlohmann::json& j) {
  RoomLayout l;
  try {
    for (const auto& v : j.at("footprint"))
      l.footprint.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    l.floor_z = j.at("floor_z").get<double>();
    l.ceiling_z = j.at("ceiling_z").get<double>();
    const auto& cam = j.at("camera");
    l.camera = {cam.at(0).get<double>(), cam.at(1).get<double>(),
                cam.at(2).get<double>()};
    if (j.contains("surfaces")) {
      for (const auto& s : j.at("surfaces")) {
        SurfaceConfig cfg;
        cfg.material = s.value("material", std::string{});
        cfg.reflectance = s.at("reflectance").get<double>();
        l.surfaces[s.at("id").get<std::string>()] = cfg;
      }
    }
    if (j.contains("apertures")) {
      for (const auto& a : j.at("apertures")) {
        Aperture ap;
        ap.surface = a.at("surface").get<std::string>();
        ap.lo = {a.at("min").at(0).get<double>(),
                 a.at("min").at(1).get<double>()};
        ap.hi = {a.at("max").at(0).get<double>(),
                 a.at("max").at(1).get<double>()};
        l.apertures.push_back(ap);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("layout JSON: ") + e.what());
  }
  validate_layout(l);
  return l;
}

inline RoomLayout load_layout(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("layout JSON parse error in " + path.string() + ": " +
                     e.what());
  }
  return layout_from_json(j);
}

}  // namespace panoheat
