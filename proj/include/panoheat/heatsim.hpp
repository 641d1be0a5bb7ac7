#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "panoheat/errors.hpp"
#include "panoheat/image.hpp"
#include "panoheat/mesh.hpp"

namespace panoheat {

inline constexpr double kStefanBoltzmann = 5.670374419e-8;  // W/(m^2 K^4)

struct MaterialProps {
  std::string name;
  double k = 0.0;           // thermal conductivity, W/(m K)
  double rho = 0.0;         // density, kg/m^3
  double c_p = 0.0;         // specific heat capacity, J/(kg K)
  double emissivity = 0.9;  // in [0, 1]

  void validate() const {
    if (!(k > 0.0 && rho > 0.0 && c_p > 0.0))
      throw InputError("material " + name + ": k, rho, c_p must be positive");
    if (!(emissivity > 0.0 && emissivity <= 1.0))
      throw InputError("material " + name + ": emissivity must be in (0, 1]");
  }
};

// alpha = k / (rho c_p), m^2/s
inline double thermal_diffusivity(const MaterialProps& m) {
  m.validate();
  return m.k / (m.rho * m.c_p);
}

class MaterialDb {
 public:
  void add(MaterialProps m) {
    m.validate();
    by_name_[m.name] = std::move(m);
  }

  const MaterialProps& get(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end())
      throw InputError("unknown material: " + name);
    return it->second;
  }

  bool contains(const std::string& name) const {
    return by_name_.count(name) != 0;
  }

  static MaterialDb from_json(const nlohmann::json& j) {
    MaterialDb db;
    try {
      for (const auto& m : j.at("materials")) {
        MaterialProps p;
        p.name = m.at("name").get<std::string>();
        p.k = m.at("k").get<double>();
        p.rho = m.at("rho").get<double>();
        p.c_p = m.at("c_p").get<double>();
        p.emissivity = m.at("emissivity").get<double>();
        db.add(std::move(p));
      }
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("materials JSON: ") + e.what());
    }
    return db;
  }

  static MaterialDb load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open: " + path.string());
    nlohmann::json j;
    try {
      is >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InputError("materials JSON parse error in " + path.string() +
                       ": " + e.what());
    }
    return from_json(j);
  }

 private:
  std::map<std::string, MaterialProps> by_name_;
};

struct Toggles {
  bool conduction = true;
  bool radiation = true;
  bool convection = true;
  bool exchange = false;
};

// Solver controls. Temperatures are Kelvin throughout; 294.26 K is the
// 21.11 degC default ambient.
struct SimConfig {
  double duration_s = 600.0;
  std::optional<double> dt_s;  // explicit step; must satisfy the bound
  double thickness_m = 0.001;
  double t_ambient_k = 294.26;
  std::optional<double> t_surround_k;  // defaults to ambient
  std::optional<double> t_out_k;
  double h_convection = 10.0;  // W/(m^2 K)
  double h_exchange = 1.0;     // W/(m^2 K), supplies the missing factor of
                               // the printed indoor-outdoor term
  std::optional<double> beta;  // absent: 1 - surface reflectance
  Toggles toggles;
  double record_every_s = 30.0;
  double grid_h_m = 0.05;
  // Reproduces the published sign of the indoor-outdoor term, under which a
  // hotter outdoors cools the room. Off by default.
  bool paper_literal_exchange = false;
  double safety = 0.5;
  double sigma = kStefanBoltzmann;
  double lux_per_watt = kDefaultLuxPerWatt;
  double efficacy = kDefaultEfficacy;
  std::array<double, 3> luminance_weights = kDefaultLuminanceWeights;

  double t_surround() const { return t_surround_k.value_or(t_ambient_k); }

  void validate() const {
    if (!(duration_s > 0.0)) throw InputError("duration must be positive");
    if (!(thickness_m > 0.0)) throw InputError("thickness must be positive");
    if (!(t_ambient_k > 0.0) || (t_surround_k && !(*t_surround_k > 0.0)) ||
        (t_out_k && !(*t_out_k > 0.0)))
      throw InputError("temperatures must be positive Kelvin");
    if (!(h_convection >= 0.0) || !(h_exchange >= 0.0))
      throw InputError("transfer coefficients must be non-negative");
    if (beta && !(*beta >= 0.0 && *beta <= 1.0))
      throw InputError("beta must be in [0, 1]");
    if (toggles.exchange && !t_out_k)
      throw InputError("exchange toggle requires t_out_k");
    if (!(safety > 0.0 && safety <= 1.0))
      throw InputError("safety factor must be in (0, 1]");
  }
};

// 5-point stencil with zero-flux boundaries: a missing neighbor mirrors the
// center, so the stencil telescopes and conduction conserves the plain mean.
inline ScalarMap laplacian(const ScalarMap& field, double hu, double hv) {
  int nu = field.width(), nv = field.height();
  ScalarMap out(nu, nv);
  double iu2 = 1.0 / (hu * hu), iv2 = 1.0 / (hv * hv);
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      double c = field.at(i, j);
      double du = 0.0, dv = 0.0;
      if (i > 0) du += field.at(i - 1, j) - c;
      if (i < nu - 1) du += field.at(i + 1, j) - c;
      if (j > 0) dv += field.at(i, j - 1) - c;
      if (j < nv - 1) dv += field.at(i, j + 1) - c;
      out.at(i, j) = du * iu2 + dv * iv2;
    }
  }
  return out;
}

inline ScalarMap laplacian(const ScalarMap& field, double h) {
  return laplacian(field, h, h);
}

// Largest stable explicit step: the conduction guard h^2/(4 alpha) is always
// kept; the lumped radiative/convective/exchange bound counts only active
// mechanisms, linearizing radiation at T_max + 50 K headroom.
inline double stable_dt(const MaterialProps& m, double h, const SimConfig& cfg,
                        double field_max_k = 0.0) {
  double alpha = thermal_diffusivity(m);
  double bound = h * h / (4.0 * alpha);
  double t_max = std::max(cfg.t_ambient_k, field_max_k);
  if (cfg.t_out_k) t_max = std::max(t_max, *cfg.t_out_k);
  t_max += 50.0;
  double denom = 0.0;
  if (cfg.toggles.convection) denom += cfg.h_convection;
  if (cfg.toggles.exchange) denom += cfg.h_exchange;
  if (cfg.toggles.radiation)
    denom += 4.0 * cfg.sigma * m.emissivity * t_max * t_max * t_max;
  if (denom > 0.0)
    bound = std::min(bound, m.rho * m.c_p * cfg.thickness_m / denom);
  return cfg.safety * bound;
}

// One explicit Euler step of the transient heat equation on a plane grid.
// Every lattice cell is a surface cell of the thin shell, so the boundary
// indicator is identically one and dv = A_cell * thickness.
inline ScalarMap step_heat(const ScalarMap& field, const ScalarMap& flux,
                           const ScalarMap& area, const MaterialProps& m,
                           double beta, const SimConfig& cfg, double hu,
                           double hv, double dt) {
  if (!field.same_shape(flux) || !field.same_shape(area))
    throw InputError("field, flux and area grids must share dimensions");
  double bound = stable_dt(m, std::min(hu, hv), cfg,
                           *std::max_element(field.data().begin(),
                                             field.data().end()));
  if (dt > bound * (1.0 + 1e-12))
    throw NumericError("dt " + std::to_string(dt) +
                       " s exceeds stability bound " + std::to_string(bound) +
                       " s");

  double alpha = thermal_diffusivity(m);
  double t_surr = cfg.t_surround();
  double t_out = cfg.t_out_k.value_or(0.0);
  ScalarMap lap =
      cfg.toggles.conduction ? laplacian(field, hu, hv) : ScalarMap();

  ScalarMap out(field.width(), field.height());
  for (int j = 0; j < field.height(); ++j) {
    for (int i = 0; i < field.width(); ++i) {
      double t = field.at(i, j);
      double a_cell = area.at(i, j);
      double dv = a_cell * cfg.thickness_m;
      double coef = 1.0 / (m.rho * m.c_p * dv);
      double lumped = a_cell * beta * flux.at(i, j);
      if (cfg.toggles.radiation) {
        double ts2 = t_surr * t_surr, t2 = t * t;
        lumped += cfg.sigma * m.emissivity * a_cell * (ts2 * ts2 - t2 * t2);
      }
      if (cfg.toggles.convection)
        lumped += cfg.h_convection * a_cell * (t_surr - t);
      if (cfg.toggles.exchange)
        lumped += cfg.paper_literal_exchange
                      ? cfg.h_exchange * a_cell * (t - t_out)
                      : cfg.h_exchange * a_cell * (t_out - t);
      double rate = coef * lumped;
      if (cfg.toggles.conduction) rate += alpha * lap.at(i, j);
      out.at(i, j) = t + dt * rate;
    }
  }
  return out;
}

struct TemperatureField {
  std::vector<ScalarMap> planes;
  double time_s = 0.0;
};

struct SimResult {
  std::vector<TemperatureField> snapshots;  // at k*record_every_s < duration
  TemperatureField final_field;             // at duration
  double dt_used = 0.0;                     // stability-limited base step
  std::size_t total_steps = 0;
};

namespace heatsim_detail {

inline void check_finite(const TemperatureField& f, std::size_t step) {
  for (const ScalarMap& plane : f.planes)
    for (double v : plane.data())
      if (!std::isfinite(v) || v <= 0.0)
        throw NumericError("non-physical temperature at step " +
                           std::to_string(step));
}

}  // namespace heatsim_detail

// Advances all plane grids from a uniform ambient start to cfg.duration_s.
// Snapshots are recorded at every multiple of record_every_s in
// [0, duration); the final field is reported separately at duration.
// Pure sequential arithmetic: identical inputs give bit-identical output.
inline SimResult run_sim(const SurfaceMesh& mesh, const PlaneValues& flux,
                         const std::vector<MaterialProps>& materials,
                         const std::vector<double>& betas,
                         const SimConfig& cfg) {
  cfg.validate();
  std::size_t np = mesh.planes.size();
  if (flux.size() != np || materials.size() != np || betas.size() != np)
    throw InputError("per-plane inputs must match the mesh plane count");

  SimResult res;
  TemperatureField cur;
  cur.time_s = 0.0;
  std::vector<ScalarMap> flux_maps, area_maps;
  double dt_base = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < np; ++p) {
    const PlaneMesh& pm = mesh.planes[p];
    if (flux[p].size() != pm.vertex_count())
      throw InputError("flux vector does not match plane " + pm.plane.id);
    for (double q : flux[p])
      if (!(q >= 0.0) || !std::isfinite(q))
        throw InputError("flux must be finite and non-negative");
    cur.planes.emplace_back(pm.nu, pm.nv, cfg.t_ambient_k);
    ScalarMap fm(pm.nu, pm.nv), am(pm.nu, pm.nv);
    fm.data().assign(flux[p].begin(), flux[p].end());
    am.data().assign(pm.cell_area.begin(), pm.cell_area.end());
    flux_maps.push_back(std::move(fm));
    area_maps.push_back(std::move(am));
    dt_base = std::min(dt_base, stable_dt(materials[p], pm.min_spacing(), cfg,
                                          cfg.t_ambient_k));
  }
  if (cfg.dt_s) {
    if (*cfg.dt_s > dt_base * (1.0 + 1e-12))
      throw NumericError("configured dt " + std::to_string(*cfg.dt_s) +
                         " s exceeds stability bound " +
                         std::to_string(dt_base) + " s");
    dt_base = *cfg.dt_s;
  }
  res.dt_used = dt_base;

  // event times: snapshot boundaries plus the end of the run
  std::vector<double> events{0.0};
  if (cfg.record_every_s > 0.0) {
    for (std::size_t k = 1;; ++k) {
      double t = static_cast<double>(k) * cfg.record_every_s;
      if (t >= cfg.duration_s - 1e-12) break;
      events.push_back(t);
    }
  }
  events.push_back(cfg.duration_s);

  std::size_t step_index = 0;
  for (std::size_t e = 0; e + 1 < events.size(); ++e) {
    res.snapshots.push_back(cur);  // segment start, including t = 0
    double seg = events[e + 1] - events[e];
    auto steps = static_cast<std::size_t>(std::ceil(seg / dt_base - 1e-12));
    double dt = seg / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) {
      TemperatureField next;
      next.time_s = cur.time_s + dt;
      for (std::size_t p = 0; p < np; ++p) {
        const PlaneMesh& pm = mesh.planes[p];
        next.planes.push_back(step_heat(cur.planes[p], flux_maps[p],
                                        area_maps[p], materials[p], betas[p],
                                        cfg, pm.su, pm.sv, dt));
      }
      ++step_index;
      heatsim_detail::check_finite(next, step_index);
      cur = std::move(next);
    }
    cur.time_s = events[e + 1];  // pin accumulated time to the boundary
  }
  res.total_steps = step_index;
  cur.time_s = cfg.duration_s;
  res.final_field = std::move(cur);
  return res;
}

// Partial configs are fine: absent keys keep their defaults, so the shipped
// default file and user overrides merge naturally.
inline SimConfig sim_config_from_json(const nlohmann::json& j,
                                      SimConfig base = {}) {
  SimConfig c = base;
  try {
    c.duration_s = j.value("duration_s", c.duration_s);
    if (j.contains("dt_s") && !j.at("dt_s").is_null())
      c.dt_s = j.at("dt_s").get<double>();
    c.thickness_m = j.value("thickness_m", c.thickness_m);
    c.t_ambient_k = j.value("t_ambient_k", c.t_ambient_k);
    if (j.contains("t_surround_k") && !j.at("t_surround_k").is_null())
      c.t_surround_k = j.at("t_surround_k").get<double>();
    if (j.contains("t_out_k") && !j.at("t_out_k").is_null())
      c.t_out_k = j.at("t_out_k").get<double>();
    c.h_convection = j.value("h_convection", c.h_convection);
    c.h_exchange = j.value("h_exchange", c.h_exchange);
    if (j.contains("beta") && !j.at("beta").is_null())
      c.beta = j.at("beta").get<double>();
    if (j.contains("toggles")) {
      const auto& t = j.at("toggles");
      c.toggles.conduction = t.value("conduction", c.toggles.conduction);
      c.toggles.radiation = t.value("radiation", c.toggles.radiation);
      c.toggles.convection = t.value("convection", c.toggles.convection);
      c.toggles.exchange = t.value("exchange", c.toggles.exchange);
    }
    c.record_every_s = j.value("record_every_s", c.record_every_s);
    c.grid_h_m = j.value("grid_h_m", c.grid_h_m);
    c.paper_literal_exchange =
        j.value("paper_literal_exchange", c.paper_literal_exchange);
    c.safety = j.value("safety", c.safety);
    c.sigma = j.value("sigma", c.sigma);
    c.lux_per_watt = j.value("lux_per_watt", c.lux_per_watt);
    c.efficacy = j.value("efficacy", c.efficacy);
    if (j.contains("luminance_weights")) {
      const auto& w = j.at("luminance_weights");
      c.luminance_weights = {w.at(0).get<double>(), w.at(1).get<double>(),
                             w.at(2).get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("sim config JSON: ") + e.what());
  }
  c.validate();
  return c;
}

inline SimConfig load_sim_config(const std::filesystem::path& path,
                                 SimConfig base = {}) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("sim config JSON parse error in " + path.string() +
                     ": " + e.what());
  }
  return sim_config_from_json(j, base);
}

// Per-plane beta: explicit override or 1 - reflectance.
inline std::vector<double> betas_for(const SurfaceMesh& mesh,
                                     const SimConfig& cfg) {
  std::vector<double> betas;
  for (const PlaneMesh& pm : mesh.planes)
    betas.push_back(cfg.beta ? *cfg.beta : 1.0 - pm.plane.reflectance);
  return betas;
}

inline std::vector<MaterialProps> materials_for(const SurfaceMesh& mesh,
                                                const MaterialDb& db) {
  std::vector<MaterialProps> mats;
  for (const PlaneMesh& pm : mesh.planes)
    mats.push_back(db.get(pm.plane.material));
  return mats;
}

}  // namespace panoheat
