#include "repcount/config.hpp"

#include <nlohmann/json.hpp>

#include "repcount/errors.hpp"

namespace repcount {

using nlohmann::json;

std::string to_string(PathMode mode) {
  return mode == PathMode::Dp ? "dp" : "greedy";
}

RunConfig parse_config_overrides(const RunConfig& cfg, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("config: expected a JSON object");

  RunConfig out = cfg;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "omega0") {
        out.omega0 = value.get<double>();
      } else if (key == "dj") {
        out.dj = value.get<double>();
      } else if (key == "s0_factor") {
        out.s0_factor = value.get<double>();
      } else if (key == "mean_window") {
        out.mean_window = value.get<int>();
      } else if (key == "kernel_size") {
        out.kernel_size = value.get<int>();
      } else if (key == "kernel_sigma") {
        out.kernel_sigma = value.get<double>();
      } else if (key == "min_reps") {
        out.min_reps = value.get<int>();
      } else if (key == "fourier_factor_conversion") {
        out.fourier_factor_conversion = value.get<bool>();
      } else if (key == "path_mode") {
        const auto mode = value.get<std::string>();
        if (mode == "dp") {
          out.path_mode = PathMode::Dp;
        } else if (mode == "greedy") {
          out.path_mode = PathMode::Greedy;
        } else {
          throw Error("config: path_mode must be \"dp\" or \"greedy\"");
        }
      } else if (key == "coi_exclude") {
        out.coi_exclude = value.get<bool>();
      } else if (key == "seed") {
        out.seed = value.get<unsigned long long>();
      } else {
        throw Error("config: unknown key \"" + key + "\"");
      }
    } catch (const json::exception& e) {
      throw Error("config: bad value for \"" + key + "\": " + e.what());
    }
  }

  if (out.omega0 <= 0 || out.dj <= 0 || out.s0_factor <= 0 || out.kernel_sigma <= 0)
    throw Error("config: omega0, dj, s0_factor and kernel_sigma must be positive");
  if (out.mean_window < 1 || out.mean_window % 2 == 0)
    throw Error("config: mean_window must be a positive odd integer");
  if (out.kernel_size < 3 || out.kernel_size % 2 == 0)
    throw Error("config: kernel_size must be an odd integer >= 3");
  if (out.min_reps < 1) throw Error("config: min_reps must be >= 1");
  return out;
}

}  // namespace repcount
