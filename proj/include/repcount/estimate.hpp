#ifndef REPCOUNT_ESTIMATE_HPP_
#define REPCOUNT_ESTIMATE_HPP_

#include <string>
#include <vector>

#include "repcount/config.hpp"
#include "repcount/flow.hpp"
#include "repcount/tfa.hpp"

namespace repcount {

/// Per-timestep scale index into a scalogram's grid.
struct RidgePath {
  std::vector<int> scale_index;

  size_t size() const { return scale_index.size(); }
};

/// Sentinel per-timestep cost returned for an all-zero power surface.
inline constexpr double kDegenerateCost = 1e12;

/// Count, selection cost and provenance for one signal bundle.
struct CountEstimate {
  double count = 0.0;
  double cost = 0.0;           // normalized per-timestep path cost
  Channel channel = Channel::Fx;
  RidgePath ridge;             // max-power ridge (used for counting)
  RidgePath path;              // min-cost path (used for selection)
};

/// Modulus maximum per timestep; ties break toward the smaller scale index.
RidgePath max_power_ridge(const Scalogram& sc);

/// Integrates local frequency over the ridge: sum_n dt / period(s_{j_n}).
/// With coi_exclude set, timesteps whose ridge scale exceeds the cone of
/// influence are skipped.
double integrate_count(const RidgePath& ridge, const Scalogram& sc,
                       const RunConfig& cfg = {});

struct PathResult {
  RidgePath path;
  double cost = 0.0;  // per-timestep
};

/// Minimum-cost traversal of the inverted, max-normalized power surface
/// with per-step scale moves |dj| <= 1. PathMode::Dp finds the exact
/// optimum by dynamic programming; PathMode::Greedy follows the cheapest
/// neighbor. All-zero power yields a flat path at scale 0 with the
/// kDegenerateCost sentinel.
PathResult min_cost_path(const Scalogram& sc, const RunConfig& cfg = {});

/// Per-channel diagnostics produced while selecting a signal.
struct ChannelEstimate {
  Channel channel = Channel::Fx;
  bool degenerate = false;
  double count = 0.0;
  double cost = kDegenerateCost;
  RidgePath ridge;
  RidgePath path;
  Scalogram scalogram;
};

/// Runs the counting pipeline on each of the six channels and keeps the one
/// with the lowest per-timestep min-cost; the count integrates that
/// channel's max-power ridge. Raises AllChannelsDegenerate when every
/// channel is constant or zero.
CountEstimate select_signal(const SignalBundle& bundle, const RunConfig& cfg = {});

/// Same, but also returns the per-channel table (used by experiments and
/// the CLI spectrum/report paths).
CountEstimate select_signal(const SignalBundle& bundle, const RunConfig& cfg,
                            std::vector<ChannelEstimate>* table);

/// Full wavelet counting pipeline for a single signal: detrend and smooth,
/// scale grid, transform, max-power ridge, count integration.
double wavelet_count(const Signal& signal, const RunConfig& cfg = {});

/// JSON export: {count, cost, channel, per_timestep_scale_seconds[]}.
std::string estimate_to_json(const CountEstimate& est, const Scalogram& sc);

}  // namespace repcount

#endif  // REPCOUNT_ESTIMATE_HPP_
