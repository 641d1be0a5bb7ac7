#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "panoheat/errors.hpp"
#include "panoheat/image.hpp"
#include "panoheat/layout.hpp"
#include "panoheat/photometry.hpp"
#include "panoheat/projection.hpp"

namespace panoheat {

// Vertex lattice over one plane. Vertices run u-major within a row:
// index = j * nu + i, position = plane.point(i * su, j * sv).
struct PlaneMesh {
  Plane plane;
  int nu = 0, nv = 0;      // vertex counts
  double su = 0.0, sv = 0.0;  // lattice spacing, <= requested h
  std::vector<double> cell_area;          // per vertex, boundary cells clipped
  std::vector<std::array<double, 2>> pixel;  // per vertex, set by project_vertices
  std::vector<std::uint8_t> aperture;        // 1 = inside a window opening

  std::size_t vertex_count() const {
    return static_cast<std::size_t>(nu) * nv;
  }
  Vec3 vertex(int i, int j) const { return plane.point(i * su, j * sv); }
  double min_spacing() const { return std::min(su, sv); }
};

struct SurfaceMesh {
  std::vector<PlaneMesh> planes;
  double grid_h = 0.0;
};

// ceil that forgives float noise when the extent is an exact multiple of h
inline int grid_cells(double extent, double h) {
  return std::max(1, static_cast<int>(std::ceil(extent / h - 1e-9)));
}

inline SurfaceMesh mesh_surfaces(const std::vector<Plane>& planes, double h,
                                 const std::vector<Aperture>& apertures = {}) {
  if (!(h > 0.0)) throw InputError("grid spacing must be positive");
  SurfaceMesh mesh;
  mesh.grid_h = h;
  for (const Plane& p : planes) {
    if (h > p.extent_u || h > p.extent_v)
      throw InputError("grid spacing exceeds extent of plane " + p.id);
    PlaneMesh pm;
    pm.plane = p;
    int cu = grid_cells(p.extent_u, h);
    int cv = grid_cells(p.extent_v, h);
    pm.nu = cu + 1;
    pm.nv = cv + 1;
    pm.su = p.extent_u / cu;
    pm.sv = p.extent_v / cv;
    pm.cell_area.resize(pm.vertex_count());
    pm.aperture.assign(pm.vertex_count(), 0);
    for (int j = 0; j < pm.nv; ++j) {
      double wv = (j == 0 || j == pm.nv - 1) ? pm.sv * 0.5 : pm.sv;
      for (int i = 0; i < pm.nu; ++i) {
        double wu = (i == 0 || i == pm.nu - 1) ? pm.su * 0.5 : pm.su;
        pm.cell_area[static_cast<std::size_t>(j) * pm.nu + i] = wu * wv;
      }
    }
    for (const Aperture& ap : apertures) {
      if (ap.surface != p.id) continue;
      for (int j = 0; j < pm.nv; ++j) {
        for (int i = 0; i < pm.nu; ++i) {
          double u = i * pm.su, v = j * pm.sv;
          if (u >= ap.lo.x && u <= ap.hi.x && v >= ap.lo.y && v <= ap.hi.y)
            pm.aperture[static_cast<std::size_t>(j) * pm.nu + i] = 1;
        }
      }
    }
    mesh.planes.push_back(std::move(pm));
  }
  return mesh;
}

// Fills each vertex's continuous panorama coordinate as seen from the
// camera. Star-shaped rooms give an occlusion-free correspondence.
inline void project_vertices(SurfaceMesh& mesh, const Vec3& camera, int pano_w,
                             int pano_h) {
  for (PlaneMesh& pm : mesh.planes) {
    pm.pixel.resize(pm.vertex_count());
    for (int j = 0; j < pm.nv; ++j) {
      for (int i = 0; i < pm.nu; ++i) {
        Vec3 d = pm.vertex(i, j) - camera;
        if (norm(d) < 1e-12)
          throw InputError("mesh vertex coincides with the camera");
        Direction dir = vec_to_direction(d);
        pm.pixel[static_cast<std::size_t>(j) * pm.nu + i] =
            direction_to_pixel(dir, pano_w, pano_h);
      }
    }
  }
}

using PlaneValues = std::vector<std::vector<double>>;  // [plane][vertex]

// Nearest-pixel sample of a panorama-space scalar map at every vertex.
// Aperture vertices read as zero.
inline PlaneValues sample_at_vertices(const SurfaceMesh& mesh,
                                      const ScalarMap& map) {
  PlaneValues out;
  for (const PlaneMesh& pm : mesh.planes) {
    if (pm.pixel.size() != pm.vertex_count())
      throw InputError("mesh vertices not projected yet");
    std::vector<double> vals(pm.vertex_count());
    for (std::size_t k = 0; k < pm.vertex_count(); ++k) {
      if (pm.aperture[k]) {
        vals[k] = 0.0;
        continue;
      }
      vals[k] = sample_nearest(map, pm.pixel[k][0], pm.pixel[k][1]);
    }
    out.push_back(std::move(vals));
  }
  return out;
}

// Per-vertex energy influx from a luminance panorama: E = L*pi/R with the
// vertex plane's reflectance, then the lux-per-watt conversion.
inline PlaneValues flux_at_vertices(const SurfaceMesh& mesh,
                                    const ScalarMap& luminance,
                                    double lux_per_watt = kDefaultLuxPerWatt) {
  if (!(lux_per_watt > 0.0))
    throw InputError("lux-per-watt conversion must be positive");
  PlaneValues out;
  for (const PlaneMesh& pm : mesh.planes) {
    if (pm.pixel.size() != pm.vertex_count())
      throw InputError("mesh vertices not projected yet");
    check_reflectance(pm.plane.reflectance);
    double f = kPi / (pm.plane.reflectance * lux_per_watt);
    std::vector<double> vals(pm.vertex_count());
    for (std::size_t k = 0; k < pm.vertex_count(); ++k) {
      if (pm.aperture[k]) {
        vals[k] = 0.0;
        continue;
      }
      vals[k] = sample_nearest(luminance, pm.pixel[k][0], pm.pixel[k][1]) * f;
    }
    out.push_back(std::move(vals));
  }
  return out;
}

struct RayHit {
  std::size_t plane = 0;
  double a = 0.0, b = 0.0;  // plane-local coordinates of the hit
  double t = 0.0;
};

// Nearest in-bounds ray-plane intersection; depth sorting resolves concave
// footprints and self-occlusion.
inline std::optional<RayHit> trace_ray(const SurfaceMesh& mesh,
                                       const Vec3& origin, const Vec3& dir) {
  constexpr double kEdgeTol = 1e-7;  // meters
  std::optional<RayHit> best;
  for (std::size_t p = 0; p < mesh.planes.size(); ++p) {
    const Plane& pl = mesh.planes[p].plane;
    double denom = dot(dir, pl.normal);
    if (std::abs(denom) < 1e-12) continue;
    double t = dot(pl.origin - origin, pl.normal) / denom;
    if (t <= 1e-9) continue;
    if (best && t >= best->t) continue;
    Vec3 rel = origin + dir * t - pl.origin;
    double a = dot(rel, pl.basis_u);
    double b = dot(rel, pl.basis_v);
    if (a < -kEdgeTol || a > pl.extent_u + kEdgeTol || b < -kEdgeTol ||
        b > pl.extent_v + kEdgeTol)
      continue;
    best = RayHit{p, std::clamp(a, 0.0, pl.extent_u),
                  std::clamp(b, 0.0, pl.extent_v), t};
  }
  return best;
}

struct BakeResult {
  ScalarMap map;
  std::size_t unassigned = 0;
};

// Projects per-vertex values back onto the panorama grid: each pixel's ray
// is intersected with the room and takes the nearest lattice vertex's value.
// Throws when more than 0.1% of pixels see no surface (open room).
inline BakeResult bake_to_panorama(const SurfaceMesh& mesh,
                                   const PlaneValues& values,
                                   const Vec3& camera, int pano_w,
                                   int pano_h) {
  if (values.size() != mesh.planes.size())
    throw InputError("per-plane value count does not match the mesh");
  for (std::size_t p = 0; p < values.size(); ++p)
    if (values[p].size() != mesh.planes[p].vertex_count())
      throw InputError("per-vertex value count does not match plane " +
                       mesh.planes[p].plane.id);

  BakeResult res{ScalarMap(pano_w, pano_h), 0};
  for (int y = 0; y < pano_h; ++y) {
    for (int x = 0; x < pano_w; ++x) {
      Vec3 d = direction_to_vec(pixel_to_direction(x, y, pano_w, pano_h));
      std::optional<RayHit> hit = trace_ray(mesh, camera, d);
      if (!hit) {
        ++res.unassigned;
        continue;
      }
      const PlaneMesh& pm = mesh.planes[hit->plane];
      int i = std::clamp(static_cast<int>(std::floor(hit->a / pm.su + 0.5)), 0,
                         pm.nu - 1);
      int j = std::clamp(static_cast<int>(std::floor(hit->b / pm.sv + 0.5)), 0,
                         pm.nv - 1);
      res.map.at(x, y) =
          values[hit->plane][static_cast<std::size_t>(j) * pm.nu + i];
    }
  }
  double frac = static_cast<double>(res.unassigned) /
                (static_cast<double>(pano_w) * pano_h);
  if (frac > 0.001)
    throw InputError("room is not closed: " + std::to_string(res.unassigned) +
                     " panorama pixels hit no surface");
  return res;
}

// Constant per-plane value bake (plane ids, reflectance, material indices).
inline BakeResult bake_plane_constants(const SurfaceMesh& mesh,
                                       const std::vector<double>& per_plane,
                                       const Vec3& camera, int pano_w,
                                       int pano_h) {
  PlaneValues values;
  for (std::size_t p = 0; p < mesh.planes.size(); ++p)
    values.emplace_back(mesh.planes[p].vertex_count(), per_plane.at(p));
  return bake_to_panorama(mesh, values, camera, pano_w, pano_h);
}

}  // namespace panoheat
