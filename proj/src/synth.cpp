#include "repcount/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace repcount {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kConstantRipple = 0.15;  // speed texture on constant motion
constexpr double kSourceCore = 2.0;       // px, vanishing-point regularization

const char* motion_str(MotionType m) {
  switch (m) {
    case MotionType::Translation: return "translation";
    case MotionType::Rotation: return "rotation";
    default: return "expansion";
  }
}

const char* continuity_str(Continuity c) {
  switch (c) {
    case Continuity::Constant: return "constant";
    case Continuity::Intermittent: return "intermittent";
    default: return "oscillating";
  }
}

const char* view_str(View v) { return v == View::Side ? "side" : "frontal"; }

// Raised-cosine gated pulse over one unit period; ramps take 10% of the
// on-time at each end.
double pulse_wave(double frac, double duty) {
  const double ramp = 0.1 * duty;
  if (frac < 0 || frac >= duty) return 0.0;
  if (frac < ramp) return 0.5 * (1.0 - std::cos(std::numbers::pi * frac / ramp));
  if (frac > duty - ramp)
    return 0.5 * (1.0 - std::cos(std::numbers::pi * (duty - frac) / ramp));
  return 1.0;
}

struct CaseGeometry {
  double cx, cy;        // frame center, pixel-center coordinates
  double mask_radius;   // main disk radius
  double marker_phase;  // initial angle of the rotation marker
};

}  // namespace

std::vector<MotionCase> all_cases() {
  std::vector<MotionCase> cases;
  for (int m = 0; m < 3; ++m)
    for (int c = 0; c < 3; ++c)
      for (int v = 0; v < 2; ++v)
        cases.push_back({static_cast<MotionType>(m), static_cast<Continuity>(c),
                         static_cast<View>(v)});
  return cases;
}

std::string case_name(const MotionCase& c) {
  return std::string(motion_str(c.motion)) + "_" + continuity_str(c.continuity) + "_" +
         view_str(c.view);
}

MotionCase case_from_name(const std::string& name) {
  for (const MotionCase& c : all_cases())
    if (case_name(c) == name) return c;
  throw InvalidParams("unknown case \"" + name + "\"");
}

SyntheticSequence generate_case(const MotionCase& c, const CaseParams& p) {
  if (p.period_frames < 4) throw InvalidParams("period_frames must be >= 4");
  if (p.n_frames < 4 * p.period_frames)
    throw InvalidParams("n_frames must cover at least four periods");
  if (!(p.amplitude > 0)) throw InvalidParams("amplitude must be positive");
  if (p.width < 32 || p.height < 32) throw InvalidParams("frame must be >= 32x32");
  if (!(p.duty_cycle > 0) || p.duty_cycle > 1)
    throw InvalidParams("duty_cycle must be in (0, 1]");
  if (!(p.fps > 0)) throw InvalidParams("fps must be positive");
  if (p.texture_period < 0) throw InvalidParams("texture_period must be >= 0");

  const double T = p.period_frames;
  const double A = p.amplitude;
  const double S = p.texture_period > 0 ? p.texture_period : A * T;

  CaseGeometry g;
  g.cx = 0.5 * (p.width - 1);
  g.cy = 0.5 * (p.height - 1);
  g.mask_radius = 0.22 * std::min(p.width, p.height);
  {
    std::mt19937_64 rng(p.seed);
    g.marker_phase = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
  }

  // Temporal profile. Constant motion keeps full amplitude with a small
  // cosine speed texture so the recurrence is observable in the measured
  // signals, not only in the pixel pattern.
  const auto amp_at = [&](double frac) -> double {
    switch (c.continuity) {
      case Continuity::Constant: return A * (1.0 + kConstantRipple * std::cos(kTwoPi * frac));
      case Continuity::Oscillating: return A * std::sin(kTwoPi * frac);
      default: return A * pulse_wave(frac, p.duty_cycle);
    }
  };
  // The rotating rigid profile seen from the side alternates sign with the
  // rotation phase even at constant angular speed.
  const auto side_rotation_factor = [&](double frac) -> double {
    switch (c.continuity) {
      case Continuity::Constant: return std::cos(kTwoPi * frac);
      case Continuity::Oscillating: return std::sin(kTwoPi * frac);
      default: return pulse_wave(frac, p.duty_cycle);
    }
  };

  SyntheticSequence seq;
  seq.motion_case = c;
  seq.fps = p.fps;
  seq.truth_count = static_cast<double>(p.n_frames - 1) / T;
  for (long k = 0; std::llround(k * T) <= p.n_frames - 1; ++k)
    seq.cycle_bounds.push_back(std::llround(k * T));
  seq.flows.reserve(static_cast<size_t>(p.n_frames));
  seq.masks.reserve(static_cast<size_t>(p.n_frames));

  for (int t = 0; t < p.n_frames; ++t) {
    const double frac = std::fmod(static_cast<double>(t), T) / T;
    const double a = amp_at(frac);

    FlowField flow;
    flow.u.resize(p.height, p.width);
    flow.v.resize(p.height, p.width);
    for (int y = 0; y < p.height; ++y) {
      const double yy = y - g.cy;
      for (int x = 0; x < p.width; ++x) {
        const double xx = x - g.cx;
        double u = 0.0, v = 0.0;
        switch (c.motion) {
          case MotionType::Translation:
            if (c.view == View::Side) {
              u = a;
            } else {
              // Flow to/from the vanishing point at the frame center; the
              // 1/r magnitude profile keeps the field divergence-free away
              // from a small core.
              const double denom = xx * xx + yy * yy + kSourceCore * kSourceCore;
              const double gain = a * 0.5 * g.mask_radius / denom;
              u = gain * xx;
              v = gain * yy;
            }
            break;
          case MotionType::Rotation:
            if (c.view == View::Side) {
              const double prof = std::clamp(xx / g.mask_radius, -1.0, 1.0);
              v = A * side_rotation_factor(frac) * std::sin(std::numbers::pi * prof);
            } else {
              const double omega =
                  (c.continuity == Continuity::Constant ? A : a) / g.mask_radius;
              u = -omega * yy;
              v = omega * xx;
            }
            break;
          case MotionType::Expansion:
            if (c.view == View::Side) {
              u = a * xx / g.mask_radius;
            } else {
              u = a * xx / g.mask_radius;
              v = a * yy / g.mask_radius;
            }
            break;
        }
        flow.u(y, x) = static_cast<float>(u + p.drift_x);
        flow.v(y, x) = static_cast<float>(v + p.drift_y);
      }
    }

    ForegroundMask mask;
    mask.bits.resize(p.height, p.width);
    const bool chain_rect =
        c.motion == MotionType::Translation && c.continuity == Continuity::Constant &&
        c.view == View::Side;
    const bool wobble_disk =
        c.motion == MotionType::Translation && c.continuity == Continuity::Oscillating &&
        c.view == View::Side;
    const bool marker =
        c.motion == MotionType::Rotation && c.continuity == Continuity::Constant;

    double disk_cx = g.cx;
    if (wobble_disk) {
      double off = -(A * T / kTwoPi) * std::cos(kTwoPi * frac);
      const double limit = 0.5 * p.width - g.mask_radius - 2.0;
      disk_cx = g.cx + std::clamp(off, -limit, limit);
    }
    double marker_x = 0.0, marker_y = 0.0, marker_r = 0.0;
    if (marker) {
      const double theta = kTwoPi * frac + g.marker_phase;
      marker_x = g.cx + 0.8 * g.mask_radius * std::cos(theta);
      marker_y = g.cy + 0.8 * g.mask_radius * std::sin(theta);
      marker_r = 0.12 * g.mask_radius;
    }
    double rect_ox = 0.0;
    if (chain_rect) rect_ox = S * frac - 0.5 * S;

    const double r2 = g.mask_radius * g.mask_radius;
    for (int y = 0; y < p.height; ++y) {
      const double yy = y - g.cy;
      for (int x = 0; x < p.width; ++x) {
        bool fg;
        if (chain_rect) {
          fg = std::abs(x - g.cx - rect_ox) <= 0.25 * p.width &&
               std::abs(yy) <= 0.15 * p.height;
        } else {
          const double dx = x - disk_cx;
          fg = dx * dx + yy * yy <= r2;
          if (marker && !fg) {
            const double mx = x - marker_x;
            const double my = y - marker_y;
            fg = mx * mx + my * my <= marker_r * marker_r;
          }
        }
        mask.bits(y, x) = fg;
      }
    }

    seq.flows.push_back(std::move(flow));
    seq.masks.push_back(std::move(mask));
  }
  return seq;
}

Signal idealized_signal(const VideoAnnotation& annotation) {
  const auto& b = annotation.cycle_bounds;
  if (b.size() < 2) throw BadAnnotation("idealized_signal: need at least 2 bounds");
  for (size_t i = 1; i < b.size(); ++i)
    if (b[i] <= b[i - 1])
      throw BadAnnotation("idealized_signal: bounds must be strictly increasing");
  if (!(annotation.fps > 0)) throw BadAnnotation("idealized_signal: fps must be positive");

  Signal out;
  out.dt = 1.0 / annotation.fps;
  const long n = b.back() - b.front() + 1;
  out.samples.resize(n);
  size_t k = 0;
  for (long i = 0; i < n; ++i) {
    const long t = b.front() + i;
    while (k + 2 < b.size() && t >= b[k + 1]) ++k;
    const double len = static_cast<double>(b[k + 1] - b[k]);
    out.samples(i) = std::sin(kTwoPi * static_cast<double>(t - b[k]) / len);
  }
  return out;
}

Signal add_noise(const Signal& signal, double sigma, unsigned long long seed) {
  if (sigma < 0) throw Error("add_noise: sigma must be >= 0");
  Signal out = signal;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (Eigen::Index i = 0; i < out.samples.size(); ++i) out.samples(i) += gauss(rng);
  return out;
}

Signal accelerate_halfway(const Signal& signal) {
  const Eigen::Index n = signal.samples.size();
  const Eigen::Index m = n / 2;
  Signal out;
  out.dt = signal.dt;
  std::vector<double> kept;
  kept.reserve(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < m; ++i) kept.push_back(signal.samples(i));
  for (Eigen::Index i = m; i < n; i += 2) kept.push_back(signal.samples(i));
  out.samples = Eigen::Map<Eigen::VectorXd>(kept.data(), static_cast<Eigen::Index>(kept.size()));
  return out;
}

}  // namespace repcount
