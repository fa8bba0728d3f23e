#ifndef REPCOUNT_EVAL_HPP_
#define REPCOUNT_EVAL_HPP_

#include <string>
#include <utility>
#include <vector>

#include "repcount/annotation.hpp"
#include "repcount/config.hpp"
#include "repcount/estimate.hpp"
#include "repcount/synth.hpp"

namespace repcount {

struct EvalItem {
  std::string id;
  double truth = 0.0;
  double prediction = 0.0;
  double abs_rel_error = 0.0;
};

struct EvalReport {
  std::vector<EvalItem> per_item;
  double mae = 0.0;
  double mae_std = 0.0;
  double oboa = 0.0;
};

/// Mean and population standard deviation of |pred - truth| / truth.
/// Raises LengthMismatch and ZeroTruth.
std::pair<double, double> mae(const std::vector<double>& preds,
                              const std::vector<double>& truths);

/// Fraction of items with |pred - truth| <= 1.
double oboa(const std::vector<double>& preds, const std::vector<double>& truths);

EvalReport make_report(const std::vector<std::string>& ids,
                       const std::vector<double>& preds,
                       const std::vector<double>& truths);

std::string report_to_json(const EvalReport& report);
std::string report_to_table(const EvalReport& report, const std::string& title);

// ---------------------------------------------------------------------------
// Synthetic annotation corpus mirroring the benchmark statistics: counts in
// [4, 63], per-video cycle-length variation averaging about 0.36.

std::vector<VideoAnnotation> synth_annotation_corpus(int n, unsigned long long seed);

/// Stationary variant (uniform cycle lengths per video).
std::vector<VideoAnnotation> stationary_annotation_corpus(int n, unsigned long long seed);

/// (max cycle - min cycle) / mean cycle for one annotation.
double cycle_length_variation(const VideoAnnotation& annotation);

/// Files named <digits><ext> directly under dir, ordered by frame number.
std::vector<std::string> list_numbered_files(const std::string& dir,
                                             const std::string& ext);

// ---------------------------------------------------------------------------
// Experiments.

struct IdealizedResult {
  EvalReport fourier;
  EvalReport wavelet;
  int wavelet_wins = 0;  // items where the wavelet error is strictly smaller
  int fourier_wins = 0;
};

/// Counts every annotation's idealized signal with the periodogram and with
/// the wavelet pipeline, optionally after adding Gaussian noise.
IdealizedResult run_idealized_experiment(const std::vector<VideoAnnotation>& annotations,
                                         double noise_sigma, unsigned long long seed,
                                         const RunConfig& cfg = {});

struct CaseResult {
  std::string case_name;
  double truth = 0.0;
  double prediction = 0.0;
  Channel selected = Channel::Fx;
};

struct CaseBenchmarkResult {
  EvalReport report;
  std::vector<CaseResult> per_case;
  std::array<int, kNumChannels> selection_histogram{};
};

/// Runs extract_signals + select_signal over a corpus directory written by
/// the synthesizer (one subdirectory per case: numbered .flo files, .pgm
/// masks, truth.json). Raises CorpusFormat.
CaseBenchmarkResult run_case_benchmark(const std::string& corpus_dir,
                                       const RunConfig& cfg = {});

/// In-memory variant used by tests and the acceptance suite.
CaseBenchmarkResult run_case_benchmark(
    const std::vector<std::pair<std::string, SyntheticSequence>>& sequences,
    const RunConfig& cfg = {});

struct AccelerationResult {
  EvalReport original;
  EvalReport accelerated;
  double degradation = 0.0;  // accelerated MAE - original MAE
};

struct AccelerationExperiment {
  AccelerationResult wavelet;
  AccelerationResult fourier;
};

/// Counts each annotation's idealized signal before and after the halfway
/// 2x speed-up, for both the wavelet pipeline and the periodogram.
AccelerationExperiment run_acceleration_experiment(
    const std::vector<VideoAnnotation>& annotations, const RunConfig& cfg = {});

}  // namespace repcount

#endif  // REPCOUNT_EVAL_HPP_
