#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "repcount/estimate.hpp"
#include "repcount/eval.hpp"
#include "repcount/flow.hpp"
#include "repcount/synth.hpp"
#include "repcount/tfa.hpp"

namespace fs = std::filesystem;
using namespace repcount;

namespace {

RunConfig load_config(const std::string& config_path) {
  RunConfig cfg;
  if (config_path.empty()) return cfg;
  std::ifstream in(config_path);
  if (!in) throw Error("cannot open config file " + config_path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_overrides(cfg, ss.str());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

void write_bytes_file(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::vector<ForegroundMask> load_masks(const std::string& mask_dir, size_t n_frames,
                                       Eigen::Index width, Eigen::Index height) {
  std::vector<ForegroundMask> masks;
  if (!mask_dir.empty()) {
    std::vector<std::string> files = list_numbered_files(mask_dir, ".pgm");
    if (files.empty()) files = list_numbered_files(mask_dir, ".pbm");
    if (files.size() != n_frames)
      throw Error("mask directory " + mask_dir + " holds " +
                  std::to_string(files.size()) + " masks for " +
                  std::to_string(n_frames) + " flow frames");
    for (const auto& f : files) masks.push_back(read_mask_file(f));
    return masks;
  }
  std::cerr << "warning: no masks given, using full-frame masks\n";
  ForegroundMask full;
  full.bits.setConstant(height, width, true);
  masks.assign(n_frames, full);
  return masks;
}

SignalBundle bundle_from_flow_dir(const std::string& flow_dir,
                                  const std::string& mask_dir, double fps,
                                  const RunConfig& cfg) {
  std::vector<std::string> files = list_numbered_files(flow_dir, ".flo");
  if (files.empty()) throw Error("no flow frames found in " + flow_dir);
  std::vector<FlowField> flows;
  flows.reserve(files.size());
  for (const auto& f : files) flows.push_back(read_flo_file(f));
  std::vector<ForegroundMask> masks =
      load_masks(mask_dir, flows.size(), flows[0].width(), flows[0].height());
  return extract_signals(flows, masks, fps, cfg);
}

Signal read_signal_csv(const std::string& path, double fps) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    // Accept either one value per line or the last field of a CSV row.
    const auto comma = line.rfind(',');
    const std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      values.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw Error(path + ": cannot parse \"" + line + "\" as a number");
    }
  }
  if (values.size() < 2) throw SignalTooShort(path + ": signal too short");
  Signal s;
  s.dt = 1.0 / fps;
  s.samples = Eigen::Map<Eigen::VectorXd>(values.data(),
                                          static_cast<Eigen::Index>(values.size()));
  return s;
}

std::string paths_csv_row(const char* label, const RidgePath& path,
                          const Scalogram& sc) {
  std::string row = label;
  char buf[32];
  for (size_t t = 0; t < path.size(); ++t) {
    std::snprintf(buf, sizeof buf, ",%.17g", sc.grid.scales(path.scale_index[t]));
    row += buf;
  }
  row += '\n';
  return row;
}

// ---------------------------------------------------------------------------

int cmd_count(const std::string& flow_dir, const std::string& mask_dir, double fps,
              const std::string& config_path) {
  const RunConfig cfg = load_config(config_path);
  const SignalBundle bundle = bundle_from_flow_dir(flow_dir, mask_dir, fps, cfg);
  std::vector<ChannelEstimate> table;
  const CountEstimate est = select_signal(bundle, cfg, &table);
  std::cout << estimate_to_json(est, table[static_cast<size_t>(est.channel)].scalogram);
  return 0;
}

int cmd_synth(const std::string& case_arg, bool all_cases_flag, const std::string& out_dir,
              const CaseParams& params) {
  std::vector<MotionCase> cases;
  if (all_cases_flag) {
    cases = all_cases();
  } else {
    cases.push_back(case_from_name(case_arg));
  }
  fs::create_directories(out_dir);
  for (const MotionCase& c : cases) {
    const SyntheticSequence seq = generate_case(c, params);
    const fs::path dir = fs::path(out_dir) / case_name(c);
    fs::create_directories(dir);
    char name[32];
    for (size_t i = 0; i < seq.flows.size(); ++i) {
      std::snprintf(name, sizeof name, "%06zu.flo", i);
      write_flo_file(seq.flows[i], (dir / name).string());
      std::snprintf(name, sizeof name, "%06zu.pgm", i);
      write_mask_pgm_file(seq.masks[i], (dir / name).string());
    }
    nlohmann::json j;
    j["id"] = case_name(c);
    j["fps"] = seq.fps;
    j["cycle_bounds"] = seq.cycle_bounds;
    j["truth_count"] = seq.truth_count;
    write_text_file((dir / "truth.json").string(), j.dump(2) + "\n");
    std::cout << case_name(c) << ": " << seq.flows.size() << " frames, truth "
              << seq.truth_count << "\n";
  }
  return 0;
}

int cmd_spectrum(const std::string& signal_csv, const std::string& flow_dir,
                 const std::string& mask_dir, const std::string& channel_name,
                 double fps, const std::string& out_prefix,
                 const std::string& config_path) {
  const RunConfig cfg = load_config(config_path);
  Signal signal;
  if (!signal_csv.empty()) {
    signal = read_signal_csv(signal_csv, fps);
  } else {
    const SignalBundle bundle = bundle_from_flow_dir(flow_dir, mask_dir, fps, cfg);
    signal = Signal{bundle.channel(channel_from_name(channel_name)), bundle.dt};
  }
  const Signal flat = detrend_and_smooth(signal, cfg.mean_window);
  const ScaleGrid grid = make_scale_grid(flat.size(), flat.dt, cfg);
  const Scalogram sc = cwt(flat, grid, cfg);
  const RidgePath ridge = max_power_ridge(sc);
  const PathResult path = min_cost_path(sc, cfg);

  std::string csv = scalogram_to_csv(sc);
  csv += paths_csv_row("ridge", ridge, sc);
  csv += paths_csv_row("mincost", path.path, sc);
  write_text_file(out_prefix + ".csv", csv);
  write_bytes_file(out_prefix + ".pgm", scalogram_to_pgm(sc));
  std::cout << "wrote " << out_prefix << ".csv and " << out_prefix << ".pgm ("
            << sc.timesteps() << " timesteps, " << sc.num_scales() << " scales)\n";
  return 0;
}

int cmd_eval_idealized(int n, unsigned long long seed, double noise,
                       const std::string& json_out, const std::string& config_path) {
  const RunConfig cfg = load_config(config_path);
  const auto corpus = synth_annotation_corpus(n, seed);
  const IdealizedResult res = run_idealized_experiment(corpus, noise, seed, cfg);
  std::cout << report_to_table(res.fourier, "Fourier periodogram");
  std::cout << "\n" << report_to_table(res.wavelet, "Wavelet pipeline");
  std::cout << "\nwavelet wins " << res.wavelet_wins << " / " << n
            << " (fourier wins " << res.fourier_wins << ")\n";
  if (!json_out.empty()) {
    nlohmann::json j;
    j["fourier"] = nlohmann::json::parse(report_to_json(res.fourier));
    j["wavelet"] = nlohmann::json::parse(report_to_json(res.wavelet));
    j["wavelet_wins"] = res.wavelet_wins;
    j["fourier_wins"] = res.fourier_wins;
    write_text_file(json_out, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_eval_cases(const std::string& corpus_dir, const std::string& json_out,
                   const std::string& config_path) {
  const RunConfig cfg = load_config(config_path);
  const CaseBenchmarkResult res = run_case_benchmark(corpus_dir, cfg);
  std::cout << report_to_table(res.report, "18-case synthetic benchmark");
  std::cout << "\nselection histogram:\n";
  for (int c = 0; c < kNumChannels; ++c)
    std::cout << "  " << channel_names()[static_cast<size_t>(c)] << ": "
              << res.selection_histogram[static_cast<size_t>(c)] << "\n";
  if (!json_out.empty()) {
    nlohmann::json j;
    j["report"] = nlohmann::json::parse(report_to_json(res.report));
    auto hist = nlohmann::json::object();
    for (int c = 0; c < kNumChannels; ++c)
      hist[channel_names()[static_cast<size_t>(c)]] =
          res.selection_histogram[static_cast<size_t>(c)];
    j["selection_histogram"] = std::move(hist);
    auto rows = nlohmann::json::array();
    for (const auto& r : res.per_case)
      rows.push_back({{"case", r.case_name},
                      {"truth", r.truth},
                      {"prediction", r.prediction},
                      {"selected", channel_names()[static_cast<size_t>(r.selected)]}});
    j["per_case"] = std::move(rows);
    write_text_file(json_out, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_eval_acceleration(int n, unsigned long long seed, const std::string& json_out,
                          const std::string& config_path) {
  const RunConfig cfg = load_config(config_path);
  const auto corpus = stationary_annotation_corpus(n, seed);
  const AccelerationExperiment res = run_acceleration_experiment(corpus, cfg);
  std::cout << report_to_table(res.wavelet.original, "Wavelet, original");
  std::cout << "\n" << report_to_table(res.wavelet.accelerated, "Wavelet, accelerated");
  std::cout << "\n" << report_to_table(res.fourier.original, "Fourier, original");
  std::cout << "\n" << report_to_table(res.fourier.accelerated, "Fourier, accelerated");
  char line[160];
  std::snprintf(line, sizeof line,
                "\ndegradation: wavelet %.4f, fourier %.4f\n",
                res.wavelet.degradation, res.fourier.degradation);
  std::cout << line;
  if (!json_out.empty()) {
    nlohmann::json j;
    j["wavelet"] = {{"original", nlohmann::json::parse(report_to_json(res.wavelet.original))},
                    {"accelerated", nlohmann::json::parse(report_to_json(res.wavelet.accelerated))},
                    {"degradation", res.wavelet.degradation}};
    j["fourier"] = {{"original", nlohmann::json::parse(report_to_json(res.fourier.original))},
                    {"accelerated", nlohmann::json::parse(report_to_json(res.fourier.accelerated))},
                    {"degradation", res.fourier.degradation}};
    write_text_file(json_out, j.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"repetition counting from flow-field sequences"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON file overriding pipeline parameters")
      ->configurable(false);

  // count
  auto* count = app.add_subcommand("count", "count repetitions in a flow directory");
  std::string flow_dir, mask_dir;
  double fps = 30.0;
  count->add_option("--flow", flow_dir, "directory of numbered .flo files")->required();
  count->add_option("--masks", mask_dir, "directory of numbered .pgm/.pbm masks");
  count->add_option("--fps", fps, "frames per second");

  // synth
  auto* synth = app.add_subcommand("synth", "emit a synthetic recurrence corpus");
  std::string case_arg, out_dir = "corpus";
  bool all_flag = false;
  CaseParams params;
  synth->add_option("--case", case_arg, "case name, e.g. rotation_oscillating_frontal");
  synth->add_flag("--all", all_flag, "emit all 18 fundamental cases");
  synth->add_option("--out", out_dir, "output directory");
  synth->add_option("--period", params.period_frames, "frames per cycle");
  synth->add_option("--frames", params.n_frames, "total frames");
  synth->add_option("--width", params.width, "frame width");
  synth->add_option("--height", params.height, "frame height");
  synth->add_option("--amplitude", params.amplitude, "peak speed, pixels/frame");
  synth->add_option("--texture-period", params.texture_period,
                    "spatial texture period, pixels (0 = amplitude*period)");
  synth->add_option("--duty", params.duty_cycle, "intermittent on-time fraction");
  synth->add_option("--drift-x", params.drift_x, "superposed constant flow, x");
  synth->add_option("--drift-y", params.drift_y, "superposed constant flow, y");
  synth->add_option("--seed", params.seed, "texture placement seed");
  synth->add_option("--fps", params.fps, "frame rate recorded in the ground truth");

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "render a scalogram with its paths");
  std::string signal_csv, sp_flow_dir, sp_mask_dir, channel_name = "Fx";
  std::string out_prefix = "spectrum";
  double sp_fps = 30.0;
  spectrum->add_option("--signal", signal_csv, "CSV of signal samples, one per line");
  spectrum->add_option("--flow", sp_flow_dir, "directory of numbered .flo files");
  spectrum->add_option("--masks", sp_mask_dir, "directory of masks");
  spectrum->add_option("--channel", channel_name, "channel when reading flow");
  spectrum->add_option("--fps", sp_fps, "frames per second");
  spectrum->add_option("--out", out_prefix, "output prefix for .csv/.pgm");

  // eval
  auto* eval = app.add_subcommand("eval", "run an experiment");
  std::string experiment, corpus_dir, json_out;
  int n_items = 100;
  unsigned long long seed = 7;
  double noise = 0.0;
  eval->add_option("experiment", experiment, "idealized | cases | acceleration")
      ->required();
  eval->add_option("corpus", corpus_dir, "corpus directory (cases experiment)");
  eval->add_option("--n", n_items, "number of synthetic items");
  eval->add_option("--seed", seed, "corpus seed");
  eval->add_option("--noise", noise, "Gaussian noise sigma (idealized)");
  eval->add_option("--json", json_out, "write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*count) return cmd_count(flow_dir, mask_dir, fps, config_path);
    if (*synth) {
      if (!all_flag && case_arg.empty()) {
        std::cerr << "synth: give --case NAME or --all; valid names:\n";
        for (const MotionCase& c : all_cases()) std::cerr << "  " << case_name(c) << "\n";
        return 2;
      }
      return cmd_synth(case_arg, all_flag, out_dir, params);
    }
    if (*spectrum) {
      if (signal_csv.empty() && sp_flow_dir.empty()) {
        std::cerr << "spectrum: give --signal FILE or --flow DIR\n";
        return 2;
      }
      return cmd_spectrum(signal_csv, sp_flow_dir, sp_mask_dir, channel_name, sp_fps,
                          out_prefix, config_path);
    }
    if (*eval) {
      if (experiment == "idealized")
        return cmd_eval_idealized(n_items, seed, noise, json_out, config_path);
      if (experiment == "cases") {
        if (corpus_dir.empty()) {
          std::cerr << "eval cases: corpus directory required\n";
          return 2;
        }
        return cmd_eval_cases(corpus_dir, json_out, config_path);
      }
      if (experiment == "acceleration")
        return cmd_eval_acceleration(n_items == 100 ? 20 : n_items, seed, json_out,
                                     config_path);
      std::cerr << "eval: unknown experiment \"" << experiment
                << "\"; use idealized, cases or acceleration\n";
      return 2;
    }
  } catch (const InvalidParams& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (std::string(e.what()).find("unknown case") != std::string::npos) {
      std::cerr << "valid names:\n";
      for (const MotionCase& c : all_cases()) std::cerr << "  " << case_name(c) << "\n";
    }
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
