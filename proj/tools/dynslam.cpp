// Command-line front end: simulate, run, evaluate, bench.

#include <chrono>
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "dynslam/pipeline/evaluate.hpp"
#include "dynslam/pipeline/pipeline.hpp"
#include "dynslam/sim/simulator.hpp"
#include "dynslam/simd/kernels.hpp"

using namespace dynslam;
namespace fs = std::filesystem;

namespace {

int cmd_simulate(const fs::path& config_path, const fs::path& out_dir) {
  const sim::SceneConfig scene = sim::load_scene_config(config_path);
  auto frames = sim::generate_sequence(scene);
  sim::degrade_masks(frames, scene.degradation, scene.seed);
  sim::write_dataset(out_dir, scene, frames);
  std::printf("wrote %zu frames to %s\n", frames.size(), out_dir.string().c_str());
  return 0;
}

PipelineConfig config_or_default(const std::string& path) {
  return path.empty() ? PipelineConfig{} : load_pipeline_config(path);
}

int report_failures(const RunSummary& s) {
  if (s.failed_frames.empty()) return 0;
  std::fprintf(stderr, "%zu frame(s) failed:\n", s.failed_frames.size());
  for (const auto& d : s.diagnostics) {
    if (!d.error.empty()) std::fprintf(stderr, "  frame %lld: %s\n", static_cast<long long>(d.frame_id), d.error.c_str());
  }
  return 2;
}

int cmd_run(const fs::path& dataset_dir, const std::string& config_path, const std::string& mode,
            const fs::path& out_dir) {
  PipelineConfig config = config_or_default(config_path);
  if (!mode.empty()) config.mode = parse_mode(mode);
  const Dataset dataset(dataset_dir, config.frame_rate);
  const RunSummary s = run_dataset(dataset, config, out_dir);
  std::printf("mode %s: %zu frames, static map %zu points\n", to_string(config.mode).c_str(),
              s.frames, s.static_map_points);
  if (dataset.ground_truth() && s.trajectory.size() == dataset.ground_truth()->size()) {
    const DriftReport r = evaluate(s.trajectory, *dataset.ground_truth());
    std::printf("ATDE %.4f cm  MTDE %.4f cm\n", r.atde_cm, r.mtde_cm);
  }
  return report_failures(s);
}

int cmd_evaluate(const fs::path& est, const fs::path& gt, const std::string& report_path) {
  const DriftReport r = evaluate(read_tum(est), read_tum(gt));
  std::printf("frames %zu\nATDE %.6f cm\nMTDE %.6f cm\n", r.drift_cm.size(), r.atde_cm, r.mtde_cm);
  if (!report_path.empty()) write_drift_csv(report_path, r);
  return 0;
}

int cmd_bench(const fs::path& dataset_dir, const std::string& config_path, const std::string& mode) {
  PipelineConfig config = config_or_default(config_path);
  if (!mode.empty()) config.mode = parse_mode(mode);
  const Dataset dataset(dataset_dir, config.frame_rate);
  const ClassTable classes = ClassTable::defaults();
  const bool masks = config.mode != AblationMode::None;

  std::vector<FrameInput> frames;
  const auto l0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < dataset.size(); ++i) frames.push_back(dataset.load(i, masks, classes));
  const double load_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - l0).count();

  SlamPipeline pipeline(config, dataset.camera(), classes);
  StageTimes sum;
  std::size_t points = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& f : frames) {
    const auto& d = pipeline.process(f);
    sum.label_ms += d.times.label_ms;
    sum.features_ms += d.times.features_ms;
    sum.registration_ms += d.times.registration_ms;
    sum.mapping_ms += d.times.mapping_ms;
    points += d.points;
  }
  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  const double n = static_cast<double>(frames.size());
  std::printf("isa %s, mode %s, %zu frames, %.0f points/frame\n",
              std::string(simd::to_string(simd::kernels().isa)).c_str(), to_string(config.mode).c_str(),
              frames.size(), points / n);
  std::printf("label         %8.2f ms\n", sum.label_ms / n);
  std::printf("features      %8.2f ms\n", sum.features_ms / n);
  std::printf("registration  %8.2f ms\n", sum.registration_ms / n);
  std::printf("mapping       %8.2f ms\n", sum.mapping_ms / n);
  std::printf("load (disk)   %8.2f ms\n", load_ms / n);
  std::printf("end-to-end    %8.2f ms  %.1f Hz\n", wall / n, 1000.0 * n / wall);
  std::printf("with loading  %8.2f ms  %.1f Hz\n", (wall + load_ms) / n, 1000.0 * n / (wall + load_ms));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic-environment LiDAR/camera SLAM"};
  app.require_subcommand(1);

  std::string scene_cfg, sim_out;
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
  simulate->add_option("config", scene_cfg, "scene YAML")->required()->check(CLI::ExistingFile);
  simulate->add_option("out_dir", sim_out, "output directory")->required();

  std::string run_dataset_dir, run_cfg, run_mode, run_out;
  auto* run = app.add_subcommand("run", "run the pipeline on a dataset");
  run->add_option("dataset", run_dataset_dir)->required()->check(CLI::ExistingDirectory);
  run->add_option("--config", run_cfg, "pipeline YAML")->check(CLI::ExistingFile);
  run->add_option("--mode", run_mode, "none | vision | multimodal")
      ->check(CLI::IsMember({"none", "vision", "vision-only", "multimodal"}));
  run->add_option("--out", run_out, "output directory")->required();

  std::string est, gt, report;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "translational drift of a trajectory");
  evaluate_cmd->add_option("estimate", est)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("groundtruth", gt)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--report", report, "per-frame drift CSV");

  std::string bench_dataset, bench_cfg, bench_mode;
  auto* bench = app.add_subcommand("bench", "per-stage timings and throughput");
  bench->add_option("dataset", bench_dataset)->required()->check(CLI::ExistingDirectory);
  bench->add_option("--config", bench_cfg)->check(CLI::ExistingFile);
  bench->add_option("--mode", bench_mode)
      ->check(CLI::IsMember({"none", "vision", "vision-only", "multimodal"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(scene_cfg, sim_out);
    if (*run) return cmd_run(run_dataset_dir, run_cfg, run_mode, run_out);
    if (*evaluate_cmd) return cmd_evaluate(est, gt, report);
    if (*bench) return cmd_bench(bench_dataset, bench_cfg, bench_mode);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
