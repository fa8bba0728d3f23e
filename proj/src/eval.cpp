#include "repcount/eval.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "repcount/parallel.hpp"

namespace repcount {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Annotations

VideoAnnotation parse_annotation(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw BadAnnotation(std::string("annotation: invalid JSON: ") + e.what());
  }
  VideoAnnotation a;
  try {
    a.id = j.at("id").get<std::string>();
    a.fps = j.at("fps").get<double>();
    a.cycle_bounds = j.at("cycle_bounds").get<std::vector<long>>();
  } catch (const json::exception& e) {
    throw BadAnnotation(std::string("annotation: ") + e.what());
  }
  if (a.cycle_bounds.size() < 2)
    throw BadAnnotation("annotation: need at least 2 cycle bounds");
  for (size_t i = 1; i < a.cycle_bounds.size(); ++i)
    if (a.cycle_bounds[i] <= a.cycle_bounds[i - 1])
      throw BadAnnotation("annotation: cycle bounds must be strictly increasing");
  if (!(a.fps > 0)) throw BadAnnotation("annotation: fps must be positive");
  return a;
}

std::string format_annotation(const VideoAnnotation& a) {
  json j;
  j["id"] = a.id;
  j["fps"] = a.fps;
  j["cycle_bounds"] = a.cycle_bounds;
  return j.dump(2) + "\n";
}

VideoAnnotation read_annotation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_annotation(ss.str());
  } catch (const Error& e) {
    throw BadAnnotation(path + ": " + e.what());
  }
}

void write_annotation_file(const VideoAnnotation& a, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << format_annotation(a);
}

// ---------------------------------------------------------------------------
// Metrics

std::pair<double, double> mae(const std::vector<double>& preds,
                              const std::vector<double>& truths) {
  if (preds.size() != truths.size() || preds.empty())
    throw LengthMismatch("mae: prediction/truth lengths differ or empty");
  std::vector<double> rel(preds.size());
  for (size_t i = 0; i < preds.size(); ++i) {
    if (truths[i] == 0.0) throw ZeroTruth("mae: truth count is zero");
    rel[i] = std::abs(preds[i] - truths[i]) / truths[i];
  }
  double mean = 0.0;
  for (double r : rel) mean += r;
  mean /= static_cast<double>(rel.size());
  double var = 0.0;
  for (double r : rel) var += (r - mean) * (r - mean);
  var /= static_cast<double>(rel.size());  // population
  return {mean, std::sqrt(var)};
}

double oboa(const std::vector<double>& preds, const std::vector<double>& truths) {
  if (preds.size() != truths.size() || preds.empty())
    throw LengthMismatch("oboa: prediction/truth lengths differ or empty");
  long within = 0;
  for (size_t i = 0; i < preds.size(); ++i)
    if (std::abs(preds[i] - truths[i]) <= 1.0) ++within;
  return static_cast<double>(within) / static_cast<double>(preds.size());
}

EvalReport make_report(const std::vector<std::string>& ids,
                       const std::vector<double>& preds,
                       const std::vector<double>& truths) {
  EvalReport rep;
  auto [m, s] = mae(preds, truths);
  rep.mae = m;
  rep.mae_std = s;
  rep.oboa = oboa(preds, truths);
  rep.per_item.resize(preds.size());
  for (size_t i = 0; i < preds.size(); ++i) {
    rep.per_item[i] = {ids.size() == preds.size() ? ids[i] : std::to_string(i),
                       truths[i], preds[i], std::abs(preds[i] - truths[i]) / truths[i]};
  }
  return rep;
}

std::string report_to_json(const EvalReport& rep) {
  json j;
  j["mae"] = rep.mae;
  j["mae_std"] = rep.mae_std;
  j["oboa"] = rep.oboa;
  auto items = json::array();
  for (const auto& it : rep.per_item) {
    items.push_back({{"id", it.id},
                     {"truth", it.truth},
                     {"prediction", it.prediction},
                     {"abs_rel_error", it.abs_rel_error}});
  }
  j["per_item"] = std::move(items);
  return j.dump(2) + "\n";
}

std::string report_to_table(const EvalReport& rep, const std::string& title) {
  std::ostringstream out;
  out << title << "\n";
  size_t idw = 4;
  for (const auto& it : rep.per_item) idw = std::max(idw, it.id.size());
  char line[256];
  std::snprintf(line, sizeof line, "%-*s %10s %10s %10s\n", static_cast<int>(idw),
                "id", "truth", "pred", "rel_err");
  out << line;
  for (const auto& it : rep.per_item) {
    std::snprintf(line, sizeof line, "%-*s %10.3f %10.3f %10.4f\n",
                  static_cast<int>(idw), it.id.c_str(), it.truth, it.prediction,
                  it.abs_rel_error);
    out << line;
  }
  std::snprintf(line, sizeof line,
                "MAE %.4f +- %.4f   OBOA %.3f   (n=%zu, MAE x100: %.1f)\n", rep.mae,
                rep.mae_std, rep.oboa, rep.per_item.size(), 100.0 * rep.mae);
  out << line;
  return out.str();
}

// ---------------------------------------------------------------------------
// Synthetic annotation corpora

double cycle_length_variation(const VideoAnnotation& a) {
  const auto& b = a.cycle_bounds;
  if (b.size() < 2) throw BadAnnotation("cycle_length_variation: need 2 bounds");
  double lmin = 1e300, lmax = 0.0, sum = 0.0;
  for (size_t i = 1; i < b.size(); ++i) {
    const double len = static_cast<double>(b[i] - b[i - 1]);
    lmin = std::min(lmin, len);
    lmax = std::max(lmax, len);
    sum += len;
  }
  return (lmax - lmin) / (sum / static_cast<double>(b.size() - 1));
}

std::vector<VideoAnnotation> synth_annotation_corpus(int n, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> count_dist(2.35, 0.55);
  std::uniform_real_distribution<double> base_dist(12.0, 40.0);
  std::normal_distribution<double> variation_dist(0.30, 0.13);
  std::uniform_real_distribution<double> jitter_dist(-0.03, 0.03);

  std::vector<VideoAnnotation> corpus;
  corpus.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    VideoAnnotation a;
    a.id = "synthetic_" + std::to_string(i);
    a.fps = 30.0;
    const long k = std::clamp<long>(std::lround(std::exp(count_dist(rng))), 4, 63);
    const double base = base_dist(rng);
    const double variation = std::clamp(variation_dist(rng), 0.02, 0.75);
    a.cycle_bounds.push_back(0);
    for (long j = 0; j < k; ++j) {
      // Cycle lengths ramp across the video (steady acceleration or
      // deceleration) with mild per-cycle jitter.
      const double pos = k > 1 ? static_cast<double>(j) / static_cast<double>(k - 1) : 0.5;
      const double len = base * (1.0 + variation * (pos - 0.5)) + base * jitter_dist(rng);
      a.cycle_bounds.push_back(a.cycle_bounds.back() +
                               std::max<long>(4, std::lround(len)));
    }
    corpus.push_back(std::move(a));
  }
  return corpus;
}

std::vector<VideoAnnotation> stationary_annotation_corpus(int n, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> count_dist(6, 24);
  std::uniform_int_distribution<long> len_dist(15, 40);
  std::vector<VideoAnnotation> corpus;
  corpus.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    VideoAnnotation a;
    a.id = "stationary_" + std::to_string(i);
    a.fps = 30.0;
    const long k = count_dist(rng);
    const long len = len_dist(rng);
    for (long j = 0; j <= k; ++j) a.cycle_bounds.push_back(j * len);
    corpus.push_back(std::move(a));
  }
  return corpus;
}

std::vector<std::string> list_numbered_files(const std::string& dir,
                                             const std::string& ext) {
  std::vector<std::pair<long, std::string>> found;
  if (!fs::is_directory(dir)) return {};
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (p.extension() != ext) continue;
    const std::string stem = p.stem().string();
    if (stem.empty() ||
        !std::all_of(stem.begin(), stem.end(), [](char c) { return std::isdigit(c); }))
      continue;
    found.emplace_back(std::stol(stem), p.string());
  }
  std::sort(found.begin(), found.end());
  std::vector<std::string> out;
  out.reserve(found.size());
  for (auto& [num, path] : found) out.push_back(std::move(path));
  return out;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

unsigned long long item_seed(unsigned long long base, int i) {
  return base + 0x9E3779B97F4A7C15ULL * static_cast<unsigned long long>(i + 1);
}

}  // namespace

IdealizedResult run_idealized_experiment(const std::vector<VideoAnnotation>& annotations,
                                         double noise_sigma, unsigned long long seed,
                                         const RunConfig& cfg) {
  if (annotations.empty()) throw Error("idealized experiment: no annotations");
  const int n = static_cast<int>(annotations.size());
  std::vector<double> truths(annotations.size());
  std::vector<double> fourier_preds(annotations.size());
  std::vector<double> wavelet_preds(annotations.size());
  std::vector<std::string> ids(annotations.size());

  parallel_for(n, [&](int i) {
    const auto idx = static_cast<size_t>(i);
    const VideoAnnotation& a = annotations[idx];
    Signal s = idealized_signal(a);
    if (noise_sigma > 0) s = add_noise(s, noise_sigma, item_seed(seed, i));
    ids[idx] = a.id;
    truths[idx] = static_cast<double>(a.count());
    fourier_preds[idx] = periodogram_count(s, cfg);
    wavelet_preds[idx] = wavelet_count(s, cfg);
  });

  IdealizedResult res;
  res.fourier = make_report(ids, fourier_preds, truths);
  res.wavelet = make_report(ids, wavelet_preds, truths);
  for (size_t i = 0; i < annotations.size(); ++i) {
    const double fe = res.fourier.per_item[i].abs_rel_error;
    const double we = res.wavelet.per_item[i].abs_rel_error;
    if (we < fe) ++res.wavelet_wins;
    if (fe < we) ++res.fourier_wins;
  }
  return res;
}

CaseBenchmarkResult run_case_benchmark(
    const std::vector<std::pair<std::string, SyntheticSequence>>& sequences,
    const RunConfig& cfg) {
  if (sequences.empty()) throw CorpusFormat("case benchmark: empty corpus");
  const int n = static_cast<int>(sequences.size());
  std::vector<CaseResult> rows(sequences.size());
  parallel_for(n, [&](int i) {
    const auto idx = static_cast<size_t>(i);
    const auto& [name, seq] = sequences[idx];
    const SignalBundle bundle = extract_signals(seq.flows, seq.masks, seq.fps, cfg);
    const CountEstimate est = select_signal(bundle, cfg);
    rows[idx] = {name, seq.truth_count, est.count, est.channel};
  });

  CaseBenchmarkResult out;
  out.per_case = std::move(rows);
  std::vector<std::string> ids;
  std::vector<double> preds, truths;
  for (const auto& r : out.per_case) {
    ids.push_back(r.case_name);
    preds.push_back(r.prediction);
    truths.push_back(r.truth);
    ++out.selection_histogram[static_cast<size_t>(r.selected)];
  }
  out.report = make_report(ids, preds, truths);
  return out;
}

CaseBenchmarkResult run_case_benchmark(const std::string& corpus_dir,
                                       const RunConfig& cfg) {
  if (!fs::is_directory(corpus_dir))
    throw CorpusFormat("case benchmark: not a directory: " + corpus_dir);

  std::vector<std::string> case_dirs;
  for (const auto& entry : fs::directory_iterator(corpus_dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "truth.json"))
      case_dirs.push_back(entry.path().string());
  }
  std::sort(case_dirs.begin(), case_dirs.end());
  if (case_dirs.empty())
    throw CorpusFormat("case benchmark: no case directories with truth.json under " +
                       corpus_dir);

  std::vector<std::pair<std::string, SyntheticSequence>> sequences;
  for (const std::string& dir : case_dirs) {
    SyntheticSequence seq;
    std::vector<std::string> flo_files = list_numbered_files(dir, ".flo");
    if (flo_files.size() < 2)
      throw CorpusFormat(dir + ": need at least 2 .flo frames");
    std::vector<std::string> mask_files = list_numbered_files(dir, ".pgm");
    if (mask_files.empty()) mask_files = list_numbered_files(dir, ".pbm");
    if (!mask_files.empty() && mask_files.size() != flo_files.size())
      throw CorpusFormat(dir + ": mask count does not match flow frame count");

    try {
      for (const auto& f : flo_files) seq.flows.push_back(read_flo_file(f));
      for (const auto& f : mask_files) seq.masks.push_back(read_mask_file(f));
    } catch (const Error& e) {
      throw CorpusFormat(e.what());
    }
    if (seq.masks.empty()) {
      ForegroundMask full;
      full.bits.setConstant(seq.flows[0].height(), seq.flows[0].width(), true);
      seq.masks.assign(seq.flows.size(), full);
    }

    const std::string truth_path = (fs::path(dir) / "truth.json").string();
    std::ifstream in(truth_path);
    std::stringstream ss;
    ss << in.rdbuf();
    json j;
    try {
      j = json::parse(ss.str());
    } catch (const json::exception& e) {
      throw CorpusFormat(truth_path + ": " + e.what());
    }
    VideoAnnotation ann;
    try {
      ann = parse_annotation(ss.str());
    } catch (const Error& e) {
      throw CorpusFormat(e.what());
    }
    seq.fps = ann.fps;
    seq.cycle_bounds = ann.cycle_bounds;
    seq.truth_count = j.contains("truth_count") ? j["truth_count"].get<double>()
                                                : static_cast<double>(ann.count());
    sequences.emplace_back(fs::path(dir).filename().string(), std::move(seq));
  }
  return run_case_benchmark(sequences, cfg);
}

AccelerationExperiment run_acceleration_experiment(
    const std::vector<VideoAnnotation>& annotations, const RunConfig& cfg) {
  if (annotations.empty()) throw Error("acceleration experiment: no annotations");
  const int n = static_cast<int>(annotations.size());
  std::vector<std::string> ids(annotations.size());
  std::vector<double> truths(annotations.size());
  std::vector<double> w_orig(annotations.size()), w_acc(annotations.size());
  std::vector<double> f_orig(annotations.size()), f_acc(annotations.size());

  parallel_for(n, [&](int i) {
    const auto idx = static_cast<size_t>(i);
    const VideoAnnotation& a = annotations[idx];
    const Signal s = idealized_signal(a);
    const Signal fast = accelerate_halfway(s);
    ids[idx] = a.id;
    truths[idx] = static_cast<double>(a.count());
    w_orig[idx] = wavelet_count(s, cfg);
    w_acc[idx] = wavelet_count(fast, cfg);
    f_orig[idx] = periodogram_count(s, cfg);
    f_acc[idx] = periodogram_count(fast, cfg);
  });

  AccelerationExperiment out;
  out.wavelet.original = make_report(ids, w_orig, truths);
  out.wavelet.accelerated = make_report(ids, w_acc, truths);
  out.wavelet.degradation = out.wavelet.accelerated.mae - out.wavelet.original.mae;
  out.fourier.original = make_report(ids, f_orig, truths);
  out.fourier.accelerated = make_report(ids, f_acc, truths);
  out.fourier.degradation = out.fourier.accelerated.mae - out.fourier.original.mae;
  return out;
}

}  // namespace repcount
