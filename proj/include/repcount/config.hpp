#ifndef REPCOUNT_CONFIG_HPP_
#define REPCOUNT_CONFIG_HPP_

#include <string>

namespace repcount {

enum class PathMode { Dp, Greedy };

/// Pipeline parameters. Defaults are the fixed settings used everywhere:
/// dj = 0.125, s0 = 2*dt, 13-tap sigma-2 derivative filters, mean window 7,
/// minimum of four repetitions.
struct RunConfig {
  double omega0 = 6.0;
  double dj = 0.125;
  double s0_factor = 2.0;           // s0 = s0_factor * dt
  int mean_window = 7;
  int kernel_size = 13;
  double kernel_sigma = 2.0;
  int min_reps = 4;
  bool fourier_factor_conversion = true;
  PathMode path_mode = PathMode::Dp;
  bool coi_exclude = false;
  unsigned long long seed = 0;
};

/// Applies fields of a JSON object (text) on top of cfg.
/// Unknown keys and malformed values raise Error.
RunConfig parse_config_overrides(const RunConfig& cfg, const std::string& json_text);

std::string to_string(PathMode mode);

}  // namespace repcount

#endif  // REPCOUNT_CONFIG_HPP_
