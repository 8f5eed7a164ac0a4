// vdtk: synthetic video-depth benchmarking and two-stage fusion toolbox.
//
// Subcommands: synth, evaluate, spectrum, fuse, tempcons, schedule.
// Exit codes: 0 success, 2 usage/config error, 3 data error.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "vdtk/alignment.hpp"
#include "vdtk/container.hpp"
#include "vdtk/fusion.hpp"
#include "vdtk/global_align.hpp"
#include "vdtk/metrics.hpp"
#include "vdtk/parallel.hpp"
#include "vdtk/schedule.hpp"
#include "vdtk/spectral.hpp"
#include "vdtk/synth.hpp"
#include "vdtk/temporal.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// FNV-1a over the raw spec bytes, recorded in run manifests.
std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw vdtk::UsageError("cannot open file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Optional JSON config file; flag values override file values.
class ConfigFile {
 public:
  void load(const std::string& path) {
    if (path.empty()) return;
    try {
      json_ = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw vdtk::UsageError(std::string("config file: ") + e.what());
    }
  }
  template <typename T>
  void fill(const CLI::Option* opt, const char* key, T& value) const {
    if (json_.is_null() || opt->count() > 0) return;  // flag wins
    if (json_.contains(key)) {
      try {
        value = json_.at(key).get<T>();
      } catch (const nlohmann::json::exception& e) {
        throw vdtk::UsageError(std::string("config field '") + key +
                               "': " + e.what());
      }
    }
  }
  const nlohmann::json& raw() const { return json_; }

 private:
  nlohmann::json json_;
};

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

void write_manifest(const fs::path& dir, ordered_json manifest) {
  std::ofstream out(dir / "run_manifest.json", std::ios::trunc);
  if (!out) throw vdtk::IoError("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << "\n";
}

ordered_json base_manifest(const std::string& command, std::uint64_t seed,
                           int threads) {
  ordered_json m;
  m["command"] = command;
  m["seed"] = seed;
  m["threads"] = threads;
  return m;
}

// ---------------------------------------------------------------------------
// synth

struct ScenarioSpec {
  vdtk::SceneSpec scene;
  std::vector<std::pair<std::string, vdtk::EstimatorSurrogateSpec>> surrogates;
  std::optional<vdtk::EstimatorSurrogateSpec> pairwise_noise;
  int pairwise_n = 2;
  int correspondence_delta = 10;
};

ScenarioSpec parse_scenario(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw vdtk::UsageError(std::string("scenario: ") + e.what());
  }
  ScenarioSpec scenario;
  if (j.contains("scene")) {
    scenario.scene = vdtk::scene_spec_from_json_string(j["scene"].dump());
    if (j.contains("surrogates")) {
      for (const auto& [name, spec] : j["surrogates"].items()) {
        scenario.surrogates.emplace_back(
            name, vdtk::surrogate_spec_from_json_string(spec.dump()));
      }
    }
    if (j.contains("pairwise")) {
      scenario.pairwise_n = j["pairwise"].value("n", 2);
      scenario.pairwise_noise = vdtk::surrogate_spec_from_json_string(
          j["pairwise"].value("noise", nlohmann::json::object()).dump());
    }
    scenario.correspondence_delta = j.value("correspondence_delta", 10);
  } else {
    scenario.scene = vdtk::scene_spec_from_json_string(text);
  }
  return scenario;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir,
              std::uint64_t seed, bool seed_given, int threads) {
  const std::string text = read_file(spec_path);
  ScenarioSpec scenario = parse_scenario(text);
  if (seed_given) scenario.scene.seed = seed;
  const std::uint64_t effective_seed = scenario.scene.seed;

  Timer timer;
  const vdtk::GtBundle gt =
      vdtk::render_gt(scenario.scene, scenario.correspondence_delta);
  const fs::path out(out_dir);
  fs::create_directories(out);
  vdtk::write_container(gt.depth, &gt.track, &gt.masks, out / "gt", nullptr,
                        scenario.scene.fps);
  vdtk::write_correspondences(
      gt.correspondences,
      out / ("correspondences_d" +
             std::to_string(scenario.correspondence_delta) + ".bin"));

  ordered_json surrogate_list = ordered_json::array();
  for (auto& [name, spec] : scenario.surrogates) {
    if (spec.seed == 0) spec.seed = effective_seed;
    const vdtk::DepthVideo video = vdtk::corrupt(gt.depth, gt.masks, spec);
    vdtk::write_container(video, &gt.track, &gt.masks, out / name, nullptr,
                          scenario.scene.fps);
    surrogate_list.push_back(name);
  }

  if (scenario.pairwise_noise.has_value()) {
    vdtk::EstimatorSurrogateSpec noise = *scenario.pairwise_noise;
    if (noise.seed == 0) noise.seed = effective_seed;
    const vdtk::PairGraph graph = vdtk::make_pairwise(
        gt.depth, gt.track, gt.masks, scenario.pairwise_n, noise);
    vdtk::write_pair_graph(graph, out / "pairs");
    const auto tree = vdtk::max_confidence_spanning_tree(graph);
    vdtk::write_text_file(out / "pairs" / "tree.json",
                          vdtk::pair_graph_summary_json(graph, tree));
  }

  ordered_json manifest = base_manifest("synth", effective_seed, threads);
  manifest["spec_path"] = spec_path;
  manifest["spec_fnv1a"] = fnv1a(text);
  manifest["surrogates"] = surrogate_list;
  manifest["elapsed_seconds"] = timer.seconds();
  write_manifest(out, std::move(manifest));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvalSettings {
  bool per_frame = false;
  std::string absrel_denominator = "gt";
  bool rmse_paper_literal = false;

  vdtk::MetricOptions metric_options() const {
    vdtk::MetricOptions opt;
    if (absrel_denominator == "gt") {
      opt.absrel_denominator = vdtk::AbsRelDenominator::kGt;
    } else if (absrel_denominator == "pred") {
      opt.absrel_denominator = vdtk::AbsRelDenominator::kPred;
    } else {
      throw vdtk::UsageError("--absrel-denominator must be gt or pred");
    }
    opt.rmse_outside_root = rmse_paper_literal;
    return opt;
  }
};

// Shared protocol: resize prediction to GT size (nearest) and fit the
// affine map over all frames (or per frame when requested).
vdtk::DepthVideo align_prediction(const vdtk::DepthVideo& pred_in,
                                  const vdtk::DepthVideo& gt, bool per_frame,
                                  ordered_json* fit_info) {
  vdtk::DepthVideo pred = pred_in;
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    pred = vdtk::resize_nearest(pred, gt.width(), gt.height());
  }
  if (pred.frame_count() != gt.frame_count()) {
    throw vdtk::DataError("evaluate: frame count mismatch");
  }
  if (!per_frame) {
    const vdtk::AffineFit fit = vdtk::fit_affine_shared(pred, gt);
    if (fit_info != nullptr) {
      (*fit_info)["mode"] = "shared";
      (*fit_info)["scale"] = fit.scale;
      (*fit_info)["shift"] = fit.shift;
      (*fit_info)["valid_pixel_count"] = fit.valid_pixel_count;
    }
    return vdtk::apply_affine(pred, fit).video;
  }
  const std::vector<vdtk::AffineFit> fits = vdtk::fit_affine_per_frame(pred, gt);
  vdtk::DepthVideo aligned(gt.width(), gt.height(), gt.frame_count(), pred.kind());
  ordered_json frames = ordered_json::array();
  for (int t = 0; t < gt.frame_count(); ++t) {
    vdtk::DepthVideo one(gt.width(), gt.height(), 1, pred.kind());
    for (int y = 0; y < gt.height(); ++y) {
      for (int x = 0; x < gt.width(); ++x) {
        if (pred.valid(t, y, x)) {
          one.set(0, y, x, pred.at(t, y, x));
        } else {
          one.invalidate(0, y, x);
        }
      }
    }
    const vdtk::DepthVideo fitted = vdtk::apply_affine(one, fits[t]).video;
    for (int y = 0; y < gt.height(); ++y) {
      for (int x = 0; x < gt.width(); ++x) {
        if (fitted.valid(0, y, x)) {
          aligned.set(t, y, x, fitted.at(0, y, x));
        } else {
          aligned.invalidate(t, y, x);
        }
      }
    }
    frames.push_back({{"scale", fits[t].scale}, {"shift", fits[t].shift}});
  }
  if (fit_info != nullptr) {
    (*fit_info)["mode"] = "per_frame";
    (*fit_info)["per_frame"] = std::move(frames);
  }
  return aligned;
}

int cmd_evaluate(const std::string& pred_dir, const std::string& gt_dir,
                 const std::string& out_dir, const EvalSettings& settings,
                 std::uint64_t seed, int threads) {
  Timer timer;
  const vdtk::ContainerContents pred = vdtk::read_container(pred_dir);
  const vdtk::ContainerContents gt = vdtk::read_container(gt_dir);
  const fs::path out(out_dir);
  fs::create_directories(out);

  ordered_json fit_info;
  const vdtk::DepthVideo aligned =
      align_prediction(pred.video, gt.video, settings.per_frame, &fit_info);
  const vdtk::MetricOptions options = settings.metric_options();

  const vdtk::MetricReport overall =
      vdtk::compute_metrics(aligned, gt.video, nullptr, true, options);
  vdtk::write_text_file(out / "metrics.csv", vdtk::metric_report_csv(overall));
  vdtk::write_text_file(out / "metrics.json", vdtk::metric_report_json(overall));

  if (gt.masks.has_value()) {
    const vdtk::RegionMetricReports split =
        vdtk::region_split_metrics(aligned, gt.video, *gt.masks, options);
    vdtk::write_text_file(out / "metrics_dynamic.csv",
                          vdtk::metric_report_csv(split.dynamic));
    vdtk::write_text_file(out / "metrics_static.csv",
                          vdtk::metric_report_csv(split.static_region));
    vdtk::write_text_file(out / "metrics_dynamic.json",
                          vdtk::metric_report_json(split.dynamic));
    vdtk::write_text_file(out / "metrics_static.json",
                          vdtk::metric_report_json(split.static_region));
  }
  vdtk::write_text_file(out / "alignment.json", fit_info.dump(2) + "\n");

  ordered_json manifest = base_manifest("evaluate", seed, threads);
  manifest["pred"] = pred_dir;
  manifest["gt"] = gt_dir;
  manifest["per_frame"] = settings.per_frame;
  manifest["absrel_denominator"] = settings.absrel_denominator;
  manifest["rmse_paper_literal"] = settings.rmse_paper_literal;
  manifest["elapsed_seconds"] = timer.seconds();
  write_manifest(out, std::move(manifest));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// spectrum

int cmd_spectrum(const std::string& pred_dir, const std::string& pred2_dir,
                 const std::string& gt_dir, const std::string& metric_name,
                 int bands, const std::string& out_dir,
                 const EvalSettings& settings, std::uint64_t seed, int threads) {
  Timer timer;
  const vdtk::MetricName metric = vdtk::metric_name_from_string(metric_name);
  const vdtk::ContainerContents gt = vdtk::read_container(gt_dir);
  const fs::path out(out_dir);
  fs::create_directories(out);

  auto sequence_of = [&](const std::string& dir) {
    const vdtk::ContainerContents pred = vdtk::read_container(dir);
    const vdtk::DepthVideo aligned =
        align_prediction(pred.video, gt.video, false, nullptr);
    const vdtk::MetricReport report = vdtk::compute_metrics(
        aligned, gt.video, nullptr, true, settings.metric_options());
    return vdtk::ErrorSequence(report.sequence(vdtk::to_string(metric)), metric);
  };

  const vdtk::ErrorSequence seq = sequence_of(pred_dir);
  const int frames = seq.length();
  const double fps = gt.fps;

  const std::vector<double> mags = vdtk::magnitude_spectrum(seq);
  std::string spectrum_csv = "bin,frequency_hz,amplitude\n";
  for (std::size_t k = 0; k < mags.size(); ++k) {
    spectrum_csv += std::to_string(k) + "," +
                    fmt_double(static_cast<double>(k) * fps / frames) + "," +
                    fmt_double(mags[k]) + "\n";
  }
  vdtk::write_text_file(out / "spectrum.csv", spectrum_csv);

  const vdtk::BandPartition partition = vdtk::make_band_partition(
      frames, bands, vdtk::BandScheme::kExponential);
  const std::vector<double> values = vdtk::band_metrics(seq, partition);
  std::string band_csv = "band,start_bin,end_bin,value\n";
  ordered_json band_json = ordered_json::array();
  for (int b = 0; b < partition.band_count; ++b) {
    const auto [lo, hi] = partition.band_range(b);
    band_csv += std::to_string(b) + "," + std::to_string(lo) + "," +
                std::to_string(hi) + "," + fmt_double(values[b]) + "\n";
    band_json.push_back({{"band", b},
                         {"start_bin", lo},
                         {"end_bin", hi},
                         {"value", values[b]}});
  }
  vdtk::write_text_file(out / "bands.csv", band_csv);
  vdtk::write_text_file(out / "bands.json", band_json.dump(2) + "\n");

  if (!pred2_dir.empty()) {
    const vdtk::ErrorSequence seq2 = sequence_of(pred2_dir);
    const auto ratio = vdtk::amplitude_ratio(seq, seq2);
    std::string ratio_csv = "bin,frequency_hz,ratio\n";
    for (std::size_t k = 0; k < ratio.size(); ++k) {
      ratio_csv += std::to_string(k) + "," +
                   fmt_double(static_cast<double>(k) * fps / frames) + ",";
      ratio_csv += ratio[k].has_value() ? fmt_double(*ratio[k]) : "";
      ratio_csv += "\n";
    }
    vdtk::write_text_file(out / "amplitude_ratio.csv", ratio_csv);
  }

  ordered_json manifest = base_manifest("spectrum", seed, threads);
  manifest["pred"] = pred_dir;
  if (!pred2_dir.empty()) manifest["pred2"] = pred2_dir;
  manifest["gt"] = gt_dir;
  manifest["metric"] = metric_name;
  manifest["bands"] = bands;
  manifest["elapsed_seconds"] = timer.seconds();
  write_manifest(out, std::move(manifest));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fuse

int cmd_fuse(const std::string& pairs_dir, const std::string& out_dir,
             const vdtk::FusionConfig& cfg, std::uint64_t seed, int threads) {
  Timer timer;
  const vdtk::PairGraph graph = vdtk::read_pair_graph(pairs_dir);
  const vdtk::TwoStageResult result = vdtk::run_two_stage(graph, cfg, seed);
  const fs::path out(out_dir);
  fs::create_directories(out);
  vdtk::write_container(result.stage1.depth, &result.stage1.track, nullptr,
                        out / "stage1");
  vdtk::write_container(result.fused, &result.stage1.track, nullptr,
                        out / "fused");

  const vdtk::WindowPlan plan = vdtk::plan_windows(
      graph.frame_count, cfg.window_length, cfg.overlap);
  ordered_json windows = ordered_json::array();
  for (const auto& [s, e] : plan.windows) windows.push_back({s, e});

  ordered_json manifest = base_manifest("fuse", seed, threads);
  manifest["pairs"] = pairs_dir;
  manifest["window_length"] = cfg.window_length;
  manifest["overlap"] = cfg.overlap;
  manifest["blend"] = cfg.blend;
  manifest["alpha"] = cfg.denoiser.alpha;
  manifest["cutoff_hz"] = cfg.denoiser.cutoff_hz;
  manifest["inject_step_index"] = cfg.denoiser.inject_step_index;
  manifest["inject_timestep"] = cfg.denoiser.inject_timestep();
  manifest["spacing_mode"] = vdtk::to_string(cfg.denoiser.spacing.mode);
  manifest["windows"] = windows;
  manifest["stage1_seconds"] = result.stage1_seconds;
  manifest["stage2_seconds"] = result.stage2_seconds;
  manifest["stage1_seconds_per_frame"] =
      result.stage1_seconds / graph.frame_count;
  manifest["stage2_seconds_per_frame"] =
      result.stage2_seconds / graph.frame_count;
  manifest["elapsed_seconds"] = timer.seconds();
  write_manifest(out, std::move(manifest));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// tempcons

int cmd_tempcons(const std::string& pred_dir, const std::string& gt_dir,
                 const std::string& corr_path, int delta,
                 const std::string& out_dir, std::uint64_t seed, int threads) {
  Timer timer;
  const vdtk::ContainerContents pred = vdtk::read_container(pred_dir);
  const vdtk::ContainerContents gt = vdtk::read_container(gt_dir);
  if (!gt.track.has_value()) {
    throw vdtk::DataError("tempcons: ground-truth container carries no camera track");
  }
  const vdtk::CorrespondenceTable table = vdtk::read_correspondences(corr_path);
  const vdtk::DepthVideo aligned =
      align_prediction(pred.video, gt.video, false, nullptr);
  const vdtk::TempConsReport report =
      vdtk::temporal_consistency(aligned, *gt.track, table, true, delta);

  const fs::path out(out_dir);
  fs::create_directories(out);
  vdtk::write_text_file(out / "tempcons.csv", report.csv());
  vdtk::write_text_file(out / "tempcons.json", report.json());

  ordered_json manifest = base_manifest("tempcons", seed, threads);
  manifest["pred"] = pred_dir;
  manifest["gt"] = gt_dir;
  manifest["correspondences"] = corr_path;
  manifest["delta"] = delta;
  manifest["elapsed_seconds"] = timer.seconds();
  write_manifest(out, std::move(manifest));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// schedule

int cmd_schedule(const std::string& kind, double beta_start, double beta_end,
                 int steps, int inference_steps, const std::string& mode,
                 const std::string& out_dir, std::uint64_t seed, int threads) {
  Timer timer;
  const vdtk::ScheduleTable table = vdtk::build_schedule(
      vdtk::schedule_kind_from_string(kind), beta_start, beta_end, steps);
  const fs::path out(out_dir);
  fs::create_directories(out);
  vdtk::write_text_file(out / "schedule.csv", table.csv());
  const vdtk::TimestepSpacing spacing = vdtk::make_spacing(
      steps, inference_steps, vdtk::spacing_mode_from_string(mode));
  vdtk::write_text_file(out / "spacing.json", spacing.json());

  ordered_json manifest = base_manifest("schedule", seed, threads);
  manifest["kind"] = kind;
  manifest["beta_start"] = beta_start;
  manifest["beta_end"] = beta_end;
  manifest["train_steps"] = steps;
  manifest["inference_steps"] = inference_steps;
  manifest["mode"] = mode;
  manifest["elapsed_seconds"] = timer.seconds();
  write_manifest(out, std::move(manifest));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic video-depth benchmark and two-stage fusion toolbox"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int threads = 0;
  std::string config_path;
  app.add_option("--seed", seed, "global RNG seed");
  app.add_option("--threads", threads, "worker thread budget (0 = hardware)");
  app.add_option("--config", config_path, "JSON config file (flags override)");

  // synth
  auto* synth = app.add_subcommand("synth", "render a synthetic benchmark");
  std::string spec_path, out_dir;
  synth->add_option("spec", spec_path, "scenario or scene JSON")->required();
  synth->add_option("out", out_dir, "output directory")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "affine-aligned depth metrics");
  std::string pred_dir, gt_dir, eval_out = "eval_out";
  EvalSettings eval_settings;
  evaluate->add_option("--pred", pred_dir, "prediction container")->required();
  evaluate->add_option("--gt", gt_dir, "ground-truth container")->required();
  auto* eval_out_opt = evaluate->add_option("--out", eval_out, "output directory");
  auto* per_frame_opt = evaluate->add_flag("--per-frame", eval_settings.per_frame,
                                           "fit scale/shift per frame");
  auto* denom_opt = evaluate->add_option("--absrel-denominator",
                                         eval_settings.absrel_denominator,
                                         "gt or pred");
  auto* literal_opt = evaluate->add_flag("--rmse-paper-literal",
                                         eval_settings.rmse_paper_literal,
                                         "1/N outside the square root");

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "error-sequence spectrum and bands");
  std::string spec_pred, spec_pred2, spec_gt, spec_metric = "absrel",
              spec_out = "spectrum_out";
  int bands = 11;
  spectrum->add_option("--pred", spec_pred, "prediction container")->required();
  spectrum->add_option("--pred2", spec_pred2, "second prediction (amplitude ratio)");
  spectrum->add_option("--gt", spec_gt, "ground-truth container")->required();
  auto* metric_opt = spectrum->add_option("--metric", spec_metric,
                                          "absrel | rmse | one_minus_delta1");
  auto* bands_opt = spectrum->add_option("--bands", bands, "band count");
  spectrum->add_option("--out", spec_out, "output directory");

  // fuse
  auto* fuse = app.add_subcommand("fuse", "two-stage alignment plus denoising");
  std::string pairs_dir, fuse_out = "fuse_out";
  vdtk::FusionConfig fusion_cfg;
  bool no_blend = false;
  fuse->add_option("--pairs", pairs_dir, "pairwise prediction directory")->required();
  fuse->add_option("--out", fuse_out, "output directory");
  auto* alpha_opt = fuse->add_option("--alpha", fusion_cfg.denoiser.alpha,
                                     "high-band shrink factor (0, 1]");
  auto* cutoff_opt = fuse->add_option("--cutoff-hz", fusion_cfg.denoiser.cutoff_hz,
                                      "temporal cutoff, cycles/frame");
  auto* wl_opt = fuse->add_option("--window-length", fusion_cfg.window_length,
                                  "denoising window length");
  auto* ov_opt = fuse->add_option("--overlap", fusion_cfg.overlap,
                                  "window overlap in frames");
  auto* nb_opt = fuse->add_flag("--no-blend", no_blend,
                                "hard window cuts instead of cross-fades");
  auto* inject_opt = fuse->add_option("--inject-step-index",
                                      fusion_cfg.denoiser.inject_step_index,
                                      "spacing index for the forward noise");
  bool null_noise = false;
  auto* nn_opt = fuse->add_flag("--null-noise", null_noise,
                                "test hook: inject exactly zero noise");

  // tempcons
  auto* tempcons = app.add_subcommand("tempcons", "3-D temporal consistency");
  std::string tc_pred, tc_gt, tc_corr, tc_out = "tempcons_out";
  int delta = 10;
  tempcons->add_option("--pred", tc_pred, "prediction container")->required();
  tempcons->add_option("--gt", tc_gt, "ground-truth container")->required();
  tempcons->add_option("--correspondences", tc_corr, "correspondence table")
      ->required();
  auto* delta_opt = tempcons->add_option("--delta", delta, "frame spacing");
  tempcons->add_option("--out", tc_out, "output directory");

  // schedule
  auto* schedule = app.add_subcommand("schedule", "dump a diffusion schedule");
  std::string sched_kind = "linear", sched_mode = "trailing",
              sched_out = "schedule_out";
  double beta_start = 0.00085, beta_end = 0.012;
  int train_steps = 1000, inference_steps = 4;
  schedule->add_option("--kind", sched_kind, "linear | scaled_linear");
  schedule->add_option("--beta-start", beta_start, "");
  schedule->add_option("--beta-end", beta_end, "");
  schedule->add_option("--steps", train_steps, "train steps");
  schedule->add_option("--inference-steps", inference_steps, "");
  schedule->add_option("--mode", sched_mode, "leading | trailing");
  schedule->add_option("--out", sched_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    ConfigFile config;
    config.load(config_path);
    vdtk::set_thread_budget(threads);

    if (synth->parsed()) {
      const bool seed_given = app.count("--seed") > 0;
      return cmd_synth(spec_path, out_dir, seed, seed_given, threads);
    }
    if (evaluate->parsed()) {
      config.fill(per_frame_opt, "per_frame", eval_settings.per_frame);
      config.fill(denom_opt, "absrel_denominator", eval_settings.absrel_denominator);
      config.fill(literal_opt, "rmse_paper_literal", eval_settings.rmse_paper_literal);
      config.fill(eval_out_opt, "out", eval_out);
      return cmd_evaluate(pred_dir, gt_dir, eval_out, eval_settings, seed, threads);
    }
    if (spectrum->parsed()) {
      config.fill(metric_opt, "metric", spec_metric);
      config.fill(bands_opt, "bands", bands);
      return cmd_spectrum(spec_pred, spec_pred2, spec_gt, spec_metric, bands,
                          spec_out, EvalSettings{}, seed, threads);
    }
    if (fuse->parsed()) {
      config.fill(alpha_opt, "alpha", fusion_cfg.denoiser.alpha);
      config.fill(cutoff_opt, "cutoff_hz", fusion_cfg.denoiser.cutoff_hz);
      config.fill(wl_opt, "window_length", fusion_cfg.window_length);
      config.fill(ov_opt, "overlap", fusion_cfg.overlap);
      config.fill(nb_opt, "no_blend", no_blend);
      config.fill(inject_opt, "inject_step_index",
                  fusion_cfg.denoiser.inject_step_index);
      config.fill(nn_opt, "null_noise", null_noise);
      fusion_cfg.blend = !no_blend;
      fusion_cfg.denoiser.null_noise = null_noise;
      fusion_cfg.denoiser.validate();
      return cmd_fuse(pairs_dir, fuse_out, fusion_cfg, seed, threads);
    }
    if (tempcons->parsed()) {
      config.fill(delta_opt, "delta", delta);
      return cmd_tempcons(tc_pred, tc_gt, tc_corr, delta, tc_out, seed, threads);
    }
    if (schedule->parsed()) {
      return cmd_schedule(sched_kind, beta_start, beta_end, train_steps,
                          inference_steps, sched_mode, sched_out, seed, threads);
    }
  } catch (const vdtk::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const vdtk::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
