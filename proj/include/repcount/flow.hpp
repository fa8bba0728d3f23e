#ifndef REPCOUNT_FLOW_HPP_
#define REPCOUNT_FLOW_HPP_

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "repcount/config.hpp"
#include "repcount/errors.hpp"

namespace repcount {

/// Dense 2D flow for one frame. u is the horizontal component, v the
/// vertical one, both in pixels/frame. Arrays are height x width, indexed
/// (y, x).
struct FlowField {
  Eigen::ArrayXXf u;
  Eigen::ArrayXXf v;

  Eigen::Index width() const { return u.cols(); }
  Eigen::Index height() const { return u.rows(); }
};

/// Boolean foreground mask paired with a FlowField of the same size.
struct ForegroundMask {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> bits;

  Eigen::Index width() const { return bits.cols(); }
  Eigen::Index height() const { return bits.rows(); }
  double foreground_fraction() const {
    return bits.size() == 0 ? 0.0
                            : static_cast<double>(bits.count()) /
                                  static_cast<double>(bits.size());
  }
};

/// Per-pixel scalar measurement, units 1/frame for flow differentials.
using ScalarField = Eigen::ArrayXXd;

/// The six measured channels, in fixed order.
enum class Channel { Fx = 0, Fy, GradXFx, GradYFy, Div, Curl };
inline constexpr int kNumChannels = 6;
const std::array<std::string, kNumChannels>& channel_names();
Channel channel_from_name(const std::string& name);

/// Six synchronized time series plus the sample interval (seconds).
struct SignalBundle {
  std::array<Eigen::VectorXd, kNumChannels> channels;
  double dt = 0.0;

  Eigen::Index length() const { return channels[0].size(); }
  const Eigen::VectorXd& channel(Channel c) const {
    return channels[static_cast<size_t>(c)];
  }
};

// ---------------------------------------------------------------------------
// Middlebury .flo and netpbm mask formats.

/// Parses the Middlebury format: float magic 202021.25, int32 width/height,
/// then row-major interleaved (u, v) float32, all little-endian.
/// Raises BadMagic, Truncated or NonFinite.
FlowField read_flo(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> write_flo(const FlowField& field);

FlowField read_flo_file(const std::string& path);
void write_flo_file(const FlowField& field, const std::string& path);

/// Masks as binary PGM (P5, maxval 255, pixel > 127 is foreground) or
/// 1-bit PBM (P4, set bit is foreground).
ForegroundMask read_mask(const std::vector<uint8_t>& bytes);
ForegroundMask read_mask_file(const std::string& path);
std::vector<uint8_t> write_mask_pgm(const ForegroundMask& mask);
void write_mask_pgm_file(const ForegroundMask& mask, const std::string& path);

// ---------------------------------------------------------------------------
// Gaussian derivative filtering.

/// Sampled Gaussian (order 0) or its first derivative (order 1) on integer
/// offsets -(size-1)/2 .. +(size-1)/2. The order-0 kernel sums to 1; the
/// order-1 kernel has zero sum and unit response to the ramp f(x) = x when
/// applied by correlate1d.
Eigen::VectorXd gaussian_derivative_kernel(int size, double sigma, int order);

/// Correlation with edge replication: out[i] = sum_j k[j] * in[clamp(i+j-c)].
Eigen::VectorXd correlate1d(const Eigen::VectorXd& in, const Eigen::VectorXd& kernel);

struct FlowDifferentials {
  ScalarField gradxx;  // dFx/dx
  ScalarField gradyy;  // dFy/dy
  ScalarField div;     // gradxx + gradyy
  ScalarField curl;    // dFy/dx - dFx/dy
};

/// Separable Gaussian-derivative differentials of the flow, with the kernel
/// settings from cfg (13 taps, sigma 2 by default). Requires width and
/// height >= kernel_size, else FieldTooSmall.
FlowDifferentials differentials(const FlowField& field, const RunConfig& cfg = {});

// ---------------------------------------------------------------------------
// Pooling and signal extraction.

struct PoolingDisk {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
};

/// Disk at the mask's foreground centroid, radius max(3, 0.2*sqrt(area)).
/// Raises EmptyMask.
PoolingDisk pooling_disk(const ForegroundMask& mask);

/// Mean of field values at pixel centers inside the disk (clipped to image
/// bounds).
double pooled_measurement(const ScalarField& field, const PoolingDisk& disk);
double pooled_measurement(const ScalarField& field, const ForegroundMask& mask);

/// Substitutes unreliable masks: a frame whose foreground covers less than
/// 1% of the frame reuses the previous reliable mask, or a full-frame mask
/// when there is none yet.
ForegroundMask mask_fallback(const ForegroundMask& current,
                             const std::optional<ForegroundMask>& previous);

/// Runs the per-frame measurement chain over a sequence: mask fallback,
/// differentials, disk pooling of Fx, Fy, GradXFx, GradYFy, Div, Curl.
SignalBundle extract_signals(const std::vector<FlowField>& flows,
                             const std::vector<ForegroundMask>& masks,
                             double fps, const RunConfig& cfg = {});

}  // namespace repcount

#endif  // REPCOUNT_FLOW_HPP_
