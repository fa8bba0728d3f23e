#ifndef REPCOUNT_SYNTH_HPP_
#define REPCOUNT_SYNTH_HPP_

#include <string>
#include <vector>

#include "repcount/annotation.hpp"
#include "repcount/flow.hpp"
#include "repcount/tfa.hpp"

namespace repcount {

enum class MotionType { Translation = 0, Rotation, Expansion };
enum class Continuity { Constant = 0, Intermittent, Oscillating };
enum class View { Side = 0, Frontal };

/// One of the 18 fundamental recurrence cases: motion type x continuity x
/// viewpoint extreme.
struct MotionCase {
  MotionType motion = MotionType::Translation;
  Continuity continuity = Continuity::Constant;
  View view = View::Side;
};

/// All 18 cases in a fixed enumeration order.
std::vector<MotionCase> all_cases();
std::string case_name(const MotionCase& c);
MotionCase case_from_name(const std::string& name);

struct CaseParams {
  double period_frames = 30.0;   // frames per cycle
  int n_frames = 300;
  int width = 128;
  int height = 128;
  double amplitude = 1.5;        // pixels/frame
  double texture_period = 0.0;   // pixels; 0 = amplitude * period_frames
  double duty_cycle = 0.5;       // intermittent on-time fraction
  double drift_x = 0.0;          // superposed constant translation
  double drift_y = 0.0;
  unsigned long long seed = 0;
  double fps = 30.0;
};

struct SyntheticSequence {
  std::vector<FlowField> flows;
  std::vector<ForegroundMask> masks;
  double truth_count = 0.0;
  MotionCase motion_case;
  std::vector<long> cycle_bounds;
  double fps = 30.0;
};

/// Emits a flow/mask sequence realizing the case's qualitative signature.
/// Flow patterns are whole-frame smooth fields so the divergence/curl type
/// conditions hold cleanly; masks carry the texture recurrence (drifting
/// chain rectangle for constant translation, an angular marker for constant
/// rotation). Fields and masks repeat exactly with period period_frames.
/// Raises InvalidParams.
SyntheticSequence generate_case(const MotionCase& c, const CaseParams& params);

/// Piecewise sinusoid through cycle bound annotations: each annotated cycle
/// spans exactly one period of phase. Sampled at the annotation's frame
/// rate; length = last bound - first bound + 1. Raises BadAnnotation.
Signal idealized_signal(const VideoAnnotation& annotation);

/// Adds i.i.d. zero-mean Gaussian noise, deterministic for a given seed.
Signal add_noise(const Signal& signal, double sigma, unsigned long long seed);

/// Keeps the first half unchanged and drops every second sample after the
/// midpoint m = floor(N/2): out = in[0..m) ++ in[m], in[m+2], ...
template <typename Seq>
Seq accelerate_halfway(const Seq& samples) {
  const auto n = static_cast<long>(samples.size());
  Seq out;
  if constexpr (requires(Seq s) { s.reserve(size_t{0}); }) {
    out.reserve(static_cast<size_t>(n));
  }
  const long m = n / 2;
  for (long i = 0; i < m; ++i) out.push_back(samples[static_cast<size_t>(i)]);
  for (long i = m; i < n; i += 2) out.push_back(samples[static_cast<size_t>(i)]);
  return out;
}

Signal accelerate_halfway(const Signal& signal);

}  // namespace repcount

#endif  // REPCOUNT_SYNTH_HPP_
