#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "panoheat/errors.hpp"
#include "panoheat/image.hpp"

namespace panoheat {

// Radiometric calibration constants of the camera's count model
// W(T) = R / (exp(B/T) - F) + O, plus the TLinear defaults the frame was
// produced with. No physical defaults ship with the library; values come
// from the calibration JSON.
struct FlirCalibration {
  double R = 0.0;
  double B = 0.0;
  double F = 0.0;
  double O = 0.0;
  double eps_hat = 1.0;   // emissivity assumed by TLinear
  double t_back_k = 293.15;

  void validate() const {
    if (!(R > 0.0) || !(B > 0.0) || !(F >= 0.0))
      throw InputError("calibration requires R > 0, B > 0, F >= 0");
    if (!(eps_hat > 0.0 && eps_hat <= 1.0))
      throw InputError("default emissivity must be in (0, 1]");
    if (!(t_back_k > 0.0))
      throw InputError("background temperature must be positive Kelvin");
  }

  static FlirCalibration from_json(const nlohmann::json& j) {
    FlirCalibration c;
    try {
      c.R = j.at("R").get<double>();
      c.B = j.at("B").get<double>();
      c.F = j.at("F").get<double>();
      c.O = j.at("O").get<double>();
      c.eps_hat = j.at("eps_hat").get<double>();
      c.t_back_k = j.at("T_back_K").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("calibration JSON: ") + e.what());
    }
    c.validate();
    return c;
  }

  static FlirCalibration load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open: " + path.string());
    nlohmann::json j;
    try {
      is >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InputError("calibration JSON parse error in " + path.string() +
                       ": " + e.what());
    }
    return from_json(j);
  }
};

// ADC counts for an object at temperature T_K.
inline double counts_from_temp(double t_k, const FlirCalibration& cal) {
  if (!(t_k > 0.0)) throw InputError("temperature must be positive Kelvin");
  double denom = std::exp(cal.B / t_k) - cal.F;
  if (!(denom > 0.0))
    throw InputError("count model domain violation: exp(B/T) <= F");
  return cal.R / denom + cal.O;
}

// Background counts are a constant per calibration.
inline double background_counts(const FlirCalibration& cal) {
  return counts_from_temp(cal.t_back_k, cal);
}

// Flux at the detector under the TLinear default emissivity.
inline double detector_flux(double w_obj, const FlirCalibration& cal) {
  return cal.eps_hat * w_obj + (1.0 - cal.eps_hat) * background_counts(cal);
}

// Re-solves the object counts with the actual material emissivity.
inline double correct_emissivity(double s, double emissivity,
                                 const FlirCalibration& cal) {
  if (!(emissivity > 0.0 && emissivity <= 1.0))
    throw InputError("emissivity must be in (0, 1]");
  return (s - (1.0 - emissivity) * background_counts(cal)) / emissivity;
}

// Inverse of the count model.
inline double temp_from_counts(double w_obj, const FlirCalibration& cal) {
  if (!(w_obj > cal.O))
    throw InputError("counts below the calibration offset");
  double arg = cal.R / (w_obj - cal.O) + cal.F;
  if (!(arg > 1.0))
    throw InputError("count model inversion: log argument <= 1");
  return cal.B / std::log(arg);
}

// Full per-pixel reprocess of a TLinear frame to an actual emissivity:
// counts -> detector flux (default emissivity) -> corrected counts -> T.
// Identity when emissivity equals the TLinear default.
inline ScalarMap reprocess_frame(const ScalarMap& frame_k,
                                 const FlirCalibration& cal,
                                 double emissivity) {
  cal.validate();
  if (!(emissivity > 0.0 && emissivity <= 1.0))
    throw InputError("emissivity must be in (0, 1]");
  double w_back = background_counts(cal);  // constant per calibration
  ScalarMap out(frame_k.width(), frame_k.height());
  for (std::size_t i = 0; i < frame_k.size(); ++i) {
    double w = counts_from_temp(frame_k.data()[i], cal);
    double s = cal.eps_hat * w + (1.0 - cal.eps_hat) * w_back;
    double w_corr = (s - (1.0 - emissivity) * w_back) / emissivity;
    out.data()[i] = temp_from_counts(w_corr, cal);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frame container: little-endian uint16 counts plus a sidecar JSON (same
// path with a .json extension) holding width, height and the linear count
// mapping T_K = factor * count + offset.
// ---------------------------------------------------------------------------

struct FrameScale {
  double factor = 0.01;  // K per count
  double offset = 0.0;   // K
};

inline std::filesystem::path frame_sidecar(const std::filesystem::path& bin) {
  std::filesystem::path p = bin;
  p.replace_extension(".json");
  return p;
}

inline void write_thermal_frame(const std::filesystem::path& path,
                                const ScalarMap& frame_k,
                                const FrameScale& scale) {
  if (!(scale.factor > 0.0)) throw InputError("frame factor must be positive");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  std::vector<std::uint16_t> row(frame_k.width());
  for (int y = 0; y < frame_k.height(); ++y) {
    for (int x = 0; x < frame_k.width(); ++x) {
      double c = (frame_k.at(x, y) - scale.offset) / scale.factor;
      row[x] = static_cast<std::uint16_t>(
          std::clamp(std::llround(c), 0LL, 65535LL));
    }
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(row.size() * 2));
  }
  if (!os) throw IoError("write failed: " + path.string());

  nlohmann::json j{{"width", frame_k.width()},
                   {"height", frame_k.height()},
                   {"factor", scale.factor},
                   {"offset", scale.offset}};
  std::ofstream js(frame_sidecar(path));
  if (!js) throw IoError("cannot write sidecar for " + path.string());
  js << j.dump(2) << "\n";
}

inline ScalarMap read_thermal_frame(const std::filesystem::path& path,
                                    FrameScale* scale_out = nullptr) {
  std::ifstream js(frame_sidecar(path));
  if (!js) throw IoError("missing frame sidecar: " +
                         frame_sidecar(path).string());
  nlohmann::json j;
  try {
    js >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("frame sidecar JSON: ") + e.what());
  }
  int w = j.at("width").get<int>();
  int h = j.at("height").get<int>();
  FrameScale scale{j.at("factor").get<double>(),
                   j.value("offset", 0.0)};
  if (w <= 0 || h <= 0 || !(scale.factor > 0.0))
    throw InputError("frame sidecar: bad dimensions or factor");

  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());
  ScalarMap frame(w, h);
  std::vector<std::uint16_t> row(w);
  for (int y = 0; y < h; ++y) {
    is.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * 2));
    if (!is) throw IoError("thermal frame truncated: " + path.string());
    for (int x = 0; x < w; ++x)
      frame.at(x, y) = scale.factor * row[x] + scale.offset;
  }
  if (scale_out) *scale_out = scale;
  return frame;
}

}  // namespace panoheat
