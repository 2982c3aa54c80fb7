// Command-line driver for multipath time delay estimation via the power
// cepstrum, with cepstrum subtraction and an autocorrelation baseline.
//
// Subcommands: simulate, cepstrogram, estimate, sweep-a, sweep-snr.
// Exit codes: 0 success, 2 usage error, 1 runtime error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ceptde/ceptde.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct AnalysisFlags {
  double frame_len_s = 0.1;
  double hop_s = 0.0;  // 0: same as frame length
  std::string window = "hann";
  std::size_t nfft = 0;
  double floor_rel = 1e-12;
  double q_min_us = 40.0;
  double q_max_us = 2000.0;
  double a = 1.5;
  std::string mean_mode = "full";
  std::size_t trailing_frames = 20;

  ceptde::EstimatorConfig to_config() const {
    ceptde::EstimatorConfig cfg;
    cfg.frame_len_s = frame_len_s;
    cfg.hop_s = hop_s > 0.0 ? hop_s : frame_len_s;
    cfg.window = ceptde::parse_window_kind(window);
    cfg.nfft = nfft;
    cfg.floor_rel = floor_rel;
    cfg.q_min_s = q_min_us * 1e-6;
    cfg.q_max_s = q_max_us * 1e-6;
    cfg.subtraction = ceptde::SubtractionConfig(a);
    if (mean_mode == "full") {
      cfg.mean_mode = ceptde::MeanMode::full_recording;
    } else if (mean_mode == "trailing") {
      cfg.mean_mode = ceptde::MeanMode::trailing_window;
    } else {
      throw CLI::ValidationError("--mean must be 'full' or 'trailing'");
    }
    cfg.trailing_frames = trailing_frames;
    return cfg;
  }

  void add_to(CLI::App* cmd) {
    cmd->add_option("--frame-len-s", frame_len_s, "Analysis frame length [s]");
    cmd->add_option("--hop-s", hop_s, "Frame hop [s] (default: frame length)");
    cmd->add_option("--window", window, "Analysis window: hann|rectangular");
    cmd->add_option("--nfft", nfft, "FFT size (0: next pow2 >= frame)");
    cmd->add_option("--floor-rel", floor_rel, "Relative log-spectrum floor");
    cmd->add_option("--q-min-us", q_min_us, "Search window lower edge [us]");
    cmd->add_option("--q-max-us", q_max_us, "Search window upper edge [us]");
    cmd->add_option("--a", a, "Cepstrum subtraction factor");
    cmd->add_option("--mean", mean_mode,
                    "Subtraction mean: full|trailing");
    cmd->add_option("--trailing-frames", trailing_frames,
                    "Frames in the trailing mean window");
  }

  json to_json() const {
    return json{{"frame_len_s", frame_len_s},
                {"hop_s", hop_s > 0.0 ? hop_s : frame_len_s},
                {"window", window},
                {"nfft", nfft},
                {"floor_rel", floor_rel},
                {"q_min_us", q_min_us},
                {"q_max_us", q_max_us},
                {"a", a},
                {"mean", mean_mode},
                {"trailing_frames", trailing_frames}};
  }
};

std::uint64_t resolve_seed(std::uint64_t scenario_seed,
                           std::optional<std::uint64_t> flag_seed) {
  std::uint64_t seed = flag_seed ? *flag_seed : scenario_seed;
  if (const char* env = std::getenv("CEPSTRAL_TDE_SEED")) {
    seed = std::strtoull(env, nullptr, 10);
  }
  return seed;
}

json scenario_to_json(const ceptde::Scenario& sc) {
  json j;
  j["environment"] = {{"sound_speed_mps", sc.env.sound_speed_mps},
                      {"water_depth_m", sc.env.water_depth_m},
                      {"source_height_m", sc.env.source_height_m},
                      {"receiver_height_m", sc.env.receiver_height_m}};
  j["track"] = {{"cpa_range_m", sc.cpa_range_m},
                {"speed_mps", sc.speed_mps},
                {"start_range_m", sc.start_range_m}};
  j["echo"] = {{"alpha", sc.alpha}};
  j["noise"] = {{"psd", sc.noise.psd_file ? *sc.noise.psd_file : "flat"},
                {"seed", sc.noise.seed}};
  if (sc.noise.snr_db) j["noise"]["snr_db"] = *sc.noise.snr_db;
  return j;
}

void write_manifest(const std::string& path, const std::string& command,
                    std::uint64_t seed, const json& detail) {
  json j;
  j["tool"] = "ceptde";
  j["version"] = ceptde::kVersion;
  j["command"] = command;
  j["master_seed"] = seed;
  j["detail"] = detail;
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write manifest: " + path);
  f << j.dump(2) << "\n";
}

ceptde::MetaRows meta_from_json(const std::string& command,
                                std::uint64_t seed, const json& detail) {
  ceptde::MetaRows meta;
  meta.emplace_back("tool", std::string("ceptde ") + ceptde::kVersion);
  meta.emplace_back("command", command);
  meta.emplace_back("master_seed", std::to_string(seed));
  meta.emplace_back("detail", detail.dump());
  return meta;
}

std::vector<double> parse_grid(const std::string& spec) {
  try {
    std::vector<double> grid;
    const auto colon1 = spec.find(':');
    if (colon1 != std::string::npos) {
      const auto colon2 = spec.find(':', colon1 + 1);
      if (colon2 == std::string::npos) {
        throw CLI::ValidationError("grid must be start:step:stop or v1,v2,...");
      }
      const double start = std::stod(spec.substr(0, colon1));
      const double step =
          std::stod(spec.substr(colon1 + 1, colon2 - colon1 - 1));
      const double stop = std::stod(spec.substr(colon2 + 1));
      if (!(step > 0.0) || stop < start) {
        throw CLI::ValidationError("grid needs step > 0 and stop >= start");
      }
      for (double v = start; v <= stop + 1e-9 * step; v += step) {
        grid.push_back(v);
      }
      return grid;
    }
    std::stringstream ss(spec);
    std::string field;
    while (std::getline(ss, field, ',')) grid.push_back(std::stod(field));
    if (grid.empty()) throw CLI::ValidationError("empty grid");
    return grid;
  } catch (const CLI::ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw CLI::ValidationError("cannot parse grid '" + spec + "'");
  }
}

std::vector<ceptde::DelayMethod> parse_methods(const std::string& spec) {
  if (spec == "all") {
    return {ceptde::DelayMethod::cepstrum,
            ceptde::DelayMethod::cepstrum_subtracted,
            ceptde::DelayMethod::autocorrelation};
  }
  std::vector<ceptde::DelayMethod> methods;
  std::stringstream ss(spec);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      methods.push_back(ceptde::parse_delay_method(field));
    } catch (const std::exception& e) {
      throw CLI::ValidationError(e.what());
    }
  }
  return methods;
}

ceptde::NoiseModel noise_model_for(const ceptde::Scenario& sc,
                                   std::uint64_t seed) {
  if (sc.noise.psd_file) {
    return ceptde::read_psd_csv(*sc.noise.psd_file, seed);
  }
  return ceptde::NoiseModel::flat({0.0, 90000.0}, seed);
}

struct SimulatedScenario {
  ceptde::TransitRecording clean;
  ceptde::GroundTruthTrack truth;
};

SimulatedScenario simulate_scenario(const ceptde::Scenario& sc,
                                    std::uint64_t seed) {
  const auto track = ceptde::straight_transit(sc.cpa_range_m, sc.speed_mps,
                                              sc.start_range_m, 0.1);
  SimulatedScenario out;
  out.clean = ceptde::simulate_transit(track, sc.env, sc.alpha, seed);
  out.truth.frame_times_s = out.clean.frame_times_s;
  out.truth.true_delays_s = out.clean.truth_delays_s;
  return out;
}

// --- subcommand bodies ------------------------------------------------------

int run_simulate(const std::string& scenario_path, const std::string& out_dir,
                 bool pcm16, std::optional<std::uint64_t> flag_seed) {
  const auto sc = ceptde::read_scenario(scenario_path);
  const auto seed = resolve_seed(sc.noise.seed, flag_seed);
  fs::create_directories(out_dir);

  auto sim = simulate_scenario(sc, seed);
  ceptde::SampledSignal recording = std::move(sim.clean.recording);
  if (sc.noise.snr_db) {
    const ceptde::FrequencyBand band{0.0, 90000.0};
    const auto model = noise_model_for(sc, ceptde::derive_seed(seed, 0x6e));
    const auto noise =
        ceptde::color_noise(model, recording.duration_s(),
                            recording.sample_rate_hz);
    const double direct =
        ceptde::band_power(recording, band) / (1.0 + sc.alpha * sc.alpha);
    recording =
        ceptde::mix_at_snr(recording, noise, *sc.noise.snr_db, band, direct);
  }

  json detail;
  detail["scenario"] = scenario_to_json(sc);
  detail["scenario_file"] = scenario_path;
  detail["encoding"] = pcm16 ? "pcm16" : "float32";
  detail["frames"] = sim.truth.frame_times_s.size();

  const auto wav_path = (fs::path(out_dir) / "recording.wav").string();
  const auto truth_path = (fs::path(out_dir) / "truth.csv").string();
  ceptde::write_wav(wav_path, recording,
                    pcm16 ? ceptde::WavEncoding::pcm16
                          : ceptde::WavEncoding::float32);
  ceptde::write_truth_csv(truth_path, sim.truth,
                          meta_from_json("simulate", seed, detail));
  write_manifest((fs::path(out_dir) / "manifest.json").string(), "simulate",
                 seed, detail);
  std::cout << "wrote " << wav_path << " (" << sim.truth.frame_times_s.size()
            << " frames) and " << truth_path << "\n";
  return 0;
}

int run_cepstrogram(const std::string& wav_path, const std::string& out_path,
                    bool subtract, double q_max_us, const AnalysisFlags& flags) {
  const auto cfg = flags.to_config();
  const auto signal = ceptde::read_wav(wav_path);
  const auto frames =
      ceptde::frame_signal(signal, cfg.frame_len_s, cfg.hop_s);
  auto cg = ceptde::build_cepstrogram(frames, cfg.window, cfg.nfft,
                                      cfg.floor_rel);
  if (subtract && !cg.empty()) {
    const auto mean = ceptde::mean_cepstrum(cg);
    for (auto& row : cg.rows) {
      row = ceptde::cepstrum_subtract(row, mean, cfg.subtraction);
    }
  }

  json detail;
  detail["wav"] = wav_path;
  detail["subtract"] = subtract;
  detail["q_max_us"] = q_max_us;
  detail["analysis"] = flags.to_json();
  ceptde::write_cepstrogram_csv(cg, out_path, q_max_us,
                                meta_from_json("cepstrogram", 0, detail));
  std::cout << "wrote " << out_path << " (" << cg.frame_count()
            << " frames)\n";
  return 0;
}

int run_estimate(const std::string& wav_path,
                 const std::string& track_path,
                 const std::string& truth_path,
                 const std::string& scenario_path,
                 const std::string& methods_spec, const std::string& out_dir,
                 const AnalysisFlags& flags) {
  const auto cfg = flags.to_config();
  const auto methods = parse_methods(methods_spec);
  const auto signal = ceptde::read_wav(wav_path);
  fs::create_directories(out_dir);

  ceptde::EnvironmentModel env;
  if (!scenario_path.empty()) {
    env = ceptde::read_scenario(scenario_path).env;
  }

  std::optional<ceptde::GroundTruthTrack> truth;
  const auto frame_times =
      ceptde::frame_signal(signal, cfg.frame_len_s, cfg.hop_s).start_times_s();
  if (!truth_path.empty()) {
    truth = ceptde::read_truth_csv(truth_path);
  } else if (!track_path.empty()) {
    const auto track = ceptde::read_track_csv(track_path);
    ceptde::GroundTruthTrack t;
    t.frame_times_s = frame_times;
    for (double r : ceptde::resample_track_ranges(track, frame_times)) {
      t.true_delays_s.push_back(ceptde::multipath_delay(r, env).delay_s);
    }
    truth = std::move(t);
  }

  const auto series = ceptde::run_estimators(
      signal, truth ? &*truth : nullptr, methods, cfg);

  json detail;
  detail["wav"] = wav_path;
  detail["analysis"] = flags.to_json();
  const auto meta = meta_from_json("estimate", 0, detail);
  ceptde::write_estimates_csv(
      (fs::path(out_dir) / "estimates.csv").string(), series, meta);

  if (truth) {
    ceptde::SweepResult result;
    result.variable = "a";
    ceptde::SweepPoint point;
    point.grid_value = flags.a;
    for (const auto& s : series) {
      point.reports.push_back(ceptde::mae(s, *truth));
    }
    result.points.push_back(point);
    ceptde::write_sweep_csv((fs::path(out_dir) / "mae.csv").string(), result,
                            meta);
    for (const auto& rep : result.points[0].reports) {
      std::cout << to_string(rep.method) << ": MAE "
                << rep.mae_s * 1e6 << " us over " << rep.frames_used
                << " frames (" << rep.frames_excluded << " excluded)\n";
    }
  }
  write_manifest((fs::path(out_dir) / "manifest.json").string(), "estimate", 0,
                 detail);
  return 0;
}

int run_sweep_a(const std::string& scenario_path, const std::string& grid_spec,
                const std::string& out_dir, const AnalysisFlags& flags,
                std::optional<std::uint64_t> flag_seed) {
  const auto sc = ceptde::read_scenario(scenario_path);
  const auto seed = resolve_seed(sc.noise.seed, flag_seed);
  const auto grid = parse_grid(grid_spec);
  const auto cfg = flags.to_config();
  fs::create_directories(out_dir);

  auto sim = simulate_scenario(sc, seed);
  ceptde::SampledSignal recording = std::move(sim.clean.recording);
  if (sc.noise.snr_db) {
    const ceptde::FrequencyBand band{0.0, 90000.0};
    const auto model = noise_model_for(sc, ceptde::derive_seed(seed, 0x6e));
    const auto noise = ceptde::color_noise(
        model, recording.duration_s(), recording.sample_rate_hz);
    const double direct =
        ceptde::band_power(recording, band) / (1.0 + sc.alpha * sc.alpha);
    recording =
        ceptde::mix_at_snr(recording, noise, *sc.noise.snr_db, band, direct);
  }

  const auto sweep =
      ceptde::sweep_subtraction_factor(recording, sim.truth, grid, cfg);

  json detail;
  detail["scenario"] = scenario_to_json(sc);
  detail["grid"] = grid;
  detail["analysis"] = flags.to_json();
  const auto path = (fs::path(out_dir) / "sweep_a.csv").string();
  ceptde::write_sweep_csv(path, sweep, meta_from_json("sweep-a", seed, detail));
  write_manifest((fs::path(out_dir) / "manifest.json").string(), "sweep-a",
                 seed, detail);
  std::cout << "wrote " << path << "\n";
  return 0;
}

int run_sweep_snr(const std::string& scenario_path,
                  const std::string& grid_spec, const std::string& methods_spec,
                  int reps, const std::string& out_dir,
                  const AnalysisFlags& flags,
                  std::optional<std::uint64_t> flag_seed) {
  const auto sc = ceptde::read_scenario(scenario_path);
  const auto seed = resolve_seed(sc.noise.seed, flag_seed);
  const auto grid = parse_grid(grid_spec);
  const auto methods = parse_methods(methods_spec);
  const auto cfg = flags.to_config();
  fs::create_directories(out_dir);

  const auto sim = simulate_scenario(sc, seed);
  ceptde::NoiseModel model = noise_model_for(sc, seed);
  const auto sweep = ceptde::sweep_snr(sim.clean.recording, sim.truth, model,
                                       grid, methods, cfg, sc.alpha, reps);

  json detail;
  detail["scenario"] = scenario_to_json(sc);
  detail["grid"] = grid;
  detail["realizations"] = reps;
  detail["analysis"] = flags.to_json();
  const auto path = (fs::path(out_dir) / "sweep_snr.csv").string();
  ceptde::write_sweep_csv(path, sweep,
                          meta_from_json("sweep-snr", seed, detail));
  write_manifest((fs::path(out_dir) / "manifest.json").string(), "sweep-snr",
                 seed, detail);
  std::cout << "wrote " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multipath time delay estimation via the power cepstrum"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> flag_seed;
  app.add_option("--seed", flag_seed,
                 "Master seed (CEPSTRAL_TDE_SEED overrides)");

  // simulate
  auto* sim = app.add_subcommand(
      "simulate", "Synthesize a transit recording (WAV + truth CSV)");
  std::string sim_scenario, sim_out;
  bool sim_pcm16 = false;
  sim->add_option("--scenario", sim_scenario, "Scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  sim->add_option("--out", sim_out, "Output directory")->required();
  sim->add_flag("--pcm16", sim_pcm16, "Write 16-bit PCM instead of float32");

  // cepstrogram
  auto* cg = app.add_subcommand("cepstrogram",
                                "Compute a cepstrogram CSV from a WAV file");
  std::string cg_wav, cg_out = "cepstrogram.csv";
  bool cg_subtract = false;
  double cg_qmax = 300.0;
  AnalysisFlags cg_flags;
  cg->add_option("--wav", cg_wav, "Input WAV")->required()
      ->check(CLI::ExistingFile);
  cg->add_option("--out", cg_out, "Output CSV path");
  cg->add_flag("--subtract", cg_subtract, "Apply cepstrum subtraction");
  cg->add_option("--q-max-out-us", cg_qmax, "Quefrency extent of the CSV [us]");
  cg_flags.add_to(cg);

  // estimate
  auto* est = app.add_subcommand(
      "estimate", "Per-frame delay estimates (and MAE when truth is known)");
  std::string est_wav, est_track, est_truth, est_scenario, est_out = ".";
  std::string est_methods = "cepstrum-subtracted";
  AnalysisFlags est_flags;
  est->add_option("--wav", est_wav, "Input WAV")->required()
      ->check(CLI::ExistingFile);
  est->add_option("--track", est_track, "Track CSV (time_s,range_m)")
      ->check(CLI::ExistingFile);
  est->add_option("--truth", est_truth, "Truth CSV from simulate")
      ->check(CLI::ExistingFile);
  est->add_option("--scenario", est_scenario,
                  "Scenario file for the environment geometry")
      ->check(CLI::ExistingFile);
  est->add_option("--methods", est_methods,
                  "Comma list or 'all': cepstrum,cepstrum-subtracted,"
                  "autocorrelation");
  est->add_option("--out", est_out, "Output directory");
  est_flags.add_to(est);

  // sweep-a
  auto* swa = app.add_subcommand(
      "sweep-a", "MAE versus the cepstrum subtraction factor");
  std::string swa_scenario, swa_grid = "0:0.25:2.5", swa_out = ".";
  AnalysisFlags swa_flags;
  swa->add_option("--scenario", swa_scenario, "Scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  swa->add_option("--grid", swa_grid, "Factor grid (start:step:stop or list)");
  swa->add_option("--out", swa_out, "Output directory");
  swa_flags.add_to(swa);

  // sweep-snr
  auto* sws = app.add_subcommand("sweep-snr", "MAE versus SNR per method");
  std::string sws_scenario, sws_grid = "-15:3:15", sws_out = ".";
  std::string sws_methods = "all";
  int sws_reps = 1;
  AnalysisFlags sws_flags;
  sws->add_option("--scenario", sws_scenario, "Scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  sws->add_option("--grid", sws_grid, "SNR grid in dB");
  sws->add_option("--methods", sws_methods, "Comma list or 'all'");
  sws->add_option("--reps", sws_reps, "Noise realizations per grid point");
  sws->add_option("--out", sws_out, "Output directory");
  sws_flags.add_to(sws);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) {
      return run_simulate(sim_scenario, sim_out, sim_pcm16, flag_seed);
    }
    if (cg->parsed()) {
      return run_cepstrogram(cg_wav, cg_out, cg_subtract, cg_qmax, cg_flags);
    }
    if (est->parsed()) {
      return run_estimate(est_wav, est_track, est_truth, est_scenario,
                          est_methods, est_out, est_flags);
    }
    if (swa->parsed()) {
      return run_sweep_a(swa_scenario, swa_grid, swa_out, swa_flags,
                         flag_seed);
    }
    if (sws->parsed()) {
      return run_sweep_snr(sws_scenario, sws_grid, sws_methods, sws_reps,
                           sws_out, sws_flags, flag_seed);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
