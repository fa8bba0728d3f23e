#include "repcount/estimate.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "repcount/parallel.hpp"

namespace repcount {

namespace {

constexpr double kCostEps = 1e-12;

}  // namespace

RidgePath max_power_ridge(const Scalogram& sc) {
  const Eigen::Index n = sc.timesteps();
  const Eigen::Index js = sc.num_scales();
  RidgePath ridge;
  ridge.scale_index.resize(static_cast<size_t>(n));
  for (Eigen::Index t = 0; t < n; ++t) {
    int best = 0;
    double best_p = sc.power(t, 0);
    for (Eigen::Index j = 1; j < js; ++j) {
      if (sc.power(t, j) > best_p) {
        best_p = sc.power(t, j);
        best = static_cast<int>(j);
      }
    }
    ridge.scale_index[static_cast<size_t>(t)] = best;
  }
  return ridge;
}

double integrate_count(const RidgePath& ridge, const Scalogram& sc,
                       const RunConfig& cfg) {
  if (static_cast<Eigen::Index>(ridge.size()) != sc.timesteps())
    throw Error("integrate_count: ridge length does not match the scalogram");
  double count = 0.0;
  for (Eigen::Index t = 0; t < sc.timesteps(); ++t) {
    const double s = sc.grid.scales(ridge.scale_index[static_cast<size_t>(t)]);
    if (cfg.coi_exclude && s > sc.coi(t)) continue;
    count += sc.dt / scale_to_period(s, cfg);
  }
  return count;
}

namespace {

PathResult degenerate_path(Eigen::Index n) {
  PathResult r;
  r.path.scale_index.assign(static_cast<size_t>(n), 0);
  r.cost = kDegenerateCost;
  return r;
}

PathResult dp_path(const Eigen::MatrixXd& cost) {
  const Eigen::Index n = cost.rows();
  const Eigen::Index js = cost.cols();
  Eigen::MatrixXd total(n, js);
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> prev(n, js);
  total.row(0) = cost.row(0);
  prev.row(0).setConstant(-1);
  for (Eigen::Index t = 1; t < n; ++t) {
    for (Eigen::Index j = 0; j < js; ++j) {
      double best = std::numeric_limits<double>::infinity();
      int best_prev = -1;
      for (Eigen::Index pj = std::max<Eigen::Index>(0, j - 1);
           pj <= std::min(js - 1, j + 1); ++pj) {
        if (total(t - 1, pj) < best) {
          best = total(t - 1, pj);
          best_prev = static_cast<int>(pj);
        }
      }
      total(t, j) = cost(t, j) + best;
      prev(t, j) = best_prev;
    }
  }
  Eigen::Index end = 0;
  for (Eigen::Index j = 1; j < js; ++j)
    if (total(n - 1, j) < total(n - 1, end)) end = j;

  PathResult r;
  r.path.scale_index.resize(static_cast<size_t>(n));
  Eigen::Index j = end;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    r.path.scale_index[static_cast<size_t>(t)] = static_cast<int>(j);
    if (t > 0) j = prev(t, j);
  }
  r.cost = total(n - 1, end) / static_cast<double>(n);
  return r;
}

PathResult greedy_path(const Eigen::MatrixXd& cost) {
  const Eigen::Index n = cost.rows();
  const Eigen::Index js = cost.cols();
  PathResult r;
  r.path.scale_index.resize(static_cast<size_t>(n));
  Eigen::Index j = 0;
  for (Eigen::Index c = 1; c < js; ++c)
    if (cost(0, c) < cost(0, j)) j = c;
  double total = cost(0, j);
  r.path.scale_index[0] = static_cast<int>(j);
  for (Eigen::Index t = 1; t < n; ++t) {
    Eigen::Index next = std::max<Eigen::Index>(0, j - 1);
    for (Eigen::Index c = next + 1; c <= std::min(js - 1, j + 1); ++c)
      if (cost(t, c) < cost(t, next)) next = c;
    j = next;
    total += cost(t, j);
    r.path.scale_index[static_cast<size_t>(t)] = static_cast<int>(j);
  }
  r.cost = total / static_cast<double>(n);
  return r;
}

}  // namespace

PathResult min_cost_path(const Scalogram& sc, const RunConfig& cfg) {
  const Eigen::Index n = sc.timesteps();
  const double maxp = sc.power.maxCoeff();
  if (!(maxp > 0)) return degenerate_path(n);
  const Eigen::MatrixXd cost =
      ((sc.power / maxp).array() + kCostEps).inverse().matrix();
  return cfg.path_mode == PathMode::Greedy ? greedy_path(cost) : dp_path(cost);
}

namespace {

// A channel whose detrended residual is numerical dust relative to its raw
// magnitude carries no usable periodicity; normalizing its power would
// otherwise promote rounding noise into a candidate signal.
bool is_degenerate_channel(const Eigen::VectorXd& raw, const Eigen::VectorXd& detrended) {
  const double raw_scale = std::max(1.0, raw.cwiseAbs().maxCoeff());
  return detrended.cwiseAbs().maxCoeff() <= 1e-12 * raw_scale;
}

}  // namespace

double wavelet_count(const Signal& signal, const RunConfig& cfg) {
  const Signal flat = detrend_and_smooth(signal, cfg.mean_window);
  const ScaleGrid grid = make_scale_grid(flat.size(), flat.dt, cfg);
  const Scalogram sc = cwt(flat, grid, cfg);
  return integrate_count(max_power_ridge(sc), sc, cfg);
}

CountEstimate select_signal(const SignalBundle& bundle, const RunConfig& cfg) {
  return select_signal(bundle, cfg, nullptr);
}

CountEstimate select_signal(const SignalBundle& bundle, const RunConfig& cfg,
                            std::vector<ChannelEstimate>* table) {
  if (bundle.length() < 2) throw EmptySequence("select_signal: bundle too short");
  if (!(bundle.dt > 0)) throw Error("select_signal: dt must be positive");

  std::vector<ChannelEstimate> rows(kNumChannels);
  parallel_for(kNumChannels, [&](int c) {
    ChannelEstimate& row = rows[static_cast<size_t>(c)];
    row.channel = static_cast<Channel>(c);
    Signal raw{bundle.channels[static_cast<size_t>(c)], bundle.dt};
    const Signal flat = detrend_and_smooth(raw, cfg.mean_window);
    if (is_degenerate_channel(raw.samples, flat.samples)) {
      row.degenerate = true;
      row.cost = kDegenerateCost;
      return;
    }
    const ScaleGrid grid = make_scale_grid(flat.size(), flat.dt, cfg);
    row.scalogram = cwt(flat, grid, cfg);
    const PathResult pr = min_cost_path(row.scalogram, cfg);
    row.path = pr.path;
    row.cost = pr.cost;
    row.ridge = max_power_ridge(row.scalogram);
    row.count = integrate_count(row.ridge, row.scalogram, cfg);
    if (pr.cost >= kDegenerateCost) row.degenerate = true;
  });

  int selected = -1;
  for (int c = 0; c < kNumChannels; ++c) {
    const ChannelEstimate& row = rows[static_cast<size_t>(c)];
    if (row.degenerate) continue;
    if (selected < 0 || row.cost < rows[static_cast<size_t>(selected)].cost)
      selected = c;
  }
  if (selected < 0)
    throw AllChannelsDegenerate("select_signal: every channel is constant or zero");

  const ChannelEstimate& win = rows[static_cast<size_t>(selected)];
  CountEstimate est;
  est.count = win.count;
  est.cost = win.cost;
  est.channel = win.channel;
  est.ridge = win.ridge;
  est.path = win.path;
  if (table) *table = std::move(rows);
  return est;
}

std::string estimate_to_json(const CountEstimate& est, const Scalogram& sc) {
  nlohmann::json j;
  j["count"] = est.count;
  j["cost"] = est.cost;
  j["channel"] = channel_names()[static_cast<size_t>(est.channel)];
  auto scales = nlohmann::json::array();
  for (size_t t = 0; t < est.ridge.size(); ++t)
    scales.push_back(sc.grid.scales(est.ridge.scale_index[t]));
  j["per_timestep_scale_seconds"] = std::move(scales);
  return j.dump(2) + "\n";
}

}  // namespace repcount
