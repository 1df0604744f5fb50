// Command-line front end: closed-loop combing trials and experiments on the
// simulated head, plus rendering and difference utilities.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "combplan/harness.hpp"

using namespace combplan;

namespace {

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return ExperimentConfig{};
  return load_config_file(path);
}

int cmd_trial(const std::string& config_path, const std::string& method_str,
              const std::string& scenario, uint64_t seed, bool seed_set,
              const std::string& out) {
  ExperimentConfig cfg = load_config(config_path);
  if (!scenario.empty()) cfg.scenario = scenario;
  if (seed_set) cfg.seed = seed;
  cfg.validate();
  const Method method = method_from_name(method_str);

  std::filesystem::create_directories(out);
  TrialArtifacts artifacts;
  artifacts.out_dir = out;
  artifacts.tag = std::string(method_name(method)) + "_" + cfg.scenario + "_seed" +
                  std::to_string(cfg.seed);
  artifacts.write_trajectories = true;
  artifacts.write_final_strands = true;

  const TrialResult result = run_trial(cfg, method, cfg.seed, &artifacts);

  std::vector<TrialResult> one{result};
  std::ofstream csv(out + "/" + artifacts.tag + "_curve.csv");
  csv << curves_to_csv(one);

  std::printf("trial %s scenario=%s seed=%llu: iterations=%zu initial=%.4f final=%.4f "
              "strokes=%d fallbacks=%d skips=%d posefails=%d\n",
              result.method.c_str(), result.scenario.c_str(),
              static_cast<unsigned long long>(result.seed), result.records.size(),
              result.records.front().mean_delta, result.final_mean,
              result.strokes_total, result.fallback_total, result.planner_skips,
              result.pose_check_failures);
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out) {
  const ExperimentConfig cfg = load_config(config_path);
  cfg.validate();

  std::vector<uint64_t> seeds;
  for (int i = 0; i < cfg.seeds; ++i) seeds.push_back(cfg.seed + i);
  const std::vector<std::string> scenarios{"natural", "5to5", "7to3"};

  const ExperimentResult result = run_experiment(cfg, seeds, scenarios, out);

  std::printf("%s", summary_to_csv(result.summary).c_str());
  std::printf("experiment: %zu trials, %d failed; outputs in %s\n",
              result.trials.size(), result.failed_trials, out.c_str());
  return result.failed_trials > 0 ? 2 : 0;
}

int cmd_render(const std::string& config_path, const std::string& scenario,
               uint64_t seed, bool seed_set, const std::string& out) {
  ExperimentConfig cfg = load_config(config_path);
  if (!scenario.empty()) cfg.scenario = scenario;
  if (seed_set) cfg.seed = seed;
  cfg.validate();

  std::filesystem::create_directories(out);
  const HeadModel head = make_head(cfg.head);
  const std::vector<StyleScenario> scenarios = builtin_scenarios(head, cfg.field);
  const StyleScenario* target = nullptr;
  for (const StyleScenario& s : scenarios)
    if (s.name == cfg.scenario) target = &s;
  if (!target) throw ConfigError("unknown scenario: " + cfg.scenario);

  const StrandField initial = make_initial_field(head, cfg.field, cfg.jitter, cfg.seed);

  const OrientationState target_state = render(head, target->target_field, cfg.rasterize_width);
  const OrientationState initial_state = render(head, initial, cfg.rasterize_width);
  write_orientation_file(target_state, out + "/target_" + cfg.scenario + ".orient");
  write_orientation_file(initial_state, out + "/initial.orient");
  write_strands_json(target->target_field.strands, out + "/target_strands.json");
  write_strands_json(initial.strands, out + "/initial_strands.json");

  const DifferenceReport report =
      difference_map(eroded(initial_state, cfg.erode_kernel),
                     eroded(target_state, cfg.erode_kernel), cfg.absent_mask_penalty);
  write_difference_ppm(report, out + "/diff_initial_vs_" + cfg.scenario + ".ppm");
  std::printf("rendered scenario=%s seed=%llu mean_delta=%.4f rad -> %s\n",
              cfg.scenario.c_str(), static_cast<unsigned long long>(cfg.seed),
              report.mean, out.c_str());
  return 0;
}

int cmd_diff(const std::string& config_path, const std::string& current_path,
             const std::string& target_path, const std::string& out) {
  const ExperimentConfig cfg = load_config(config_path);
  const OrientationState current = read_orientation_file(current_path);
  const OrientationState target = read_orientation_file(target_path);

  const DifferenceReport report =
      difference_map(eroded(current, cfg.erode_kernel), eroded(target, cfg.erode_kernel),
                     cfg.absent_mask_penalty);
  if (!out.empty()) write_difference_ppm(report, out);
  std::printf("mean_delta=%.6f rad over %d x %d (coverage mismatches: %zu)\n",
              report.mean, report.width, report.height, report.coverage_penalty_count);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Root-centric combing path planner and simulator"};
  app.require_subcommand(1);

  std::string config_path, method_str = "proposed", scenario, out = "out";
  std::string current_path, target_path;
  uint64_t seed = 0;

  CLI::App* trial = app.add_subcommand("trial", "run one closed-loop trial");
  trial->add_option("--config", config_path, "JSON config file");
  trial->add_option("--method", method_str, "proposed|random")
      ->check(CLI::IsMember({"proposed", "random"}));
  trial->add_option("--scenario", scenario, "natural|5to5|7to3");
  CLI::Option* trial_seed = trial->add_option("--seed", seed, "trial seed");
  trial->add_option("--out", out, "output directory");

  CLI::App* experiment =
      app.add_subcommand("experiment", "run methods x scenarios x seeds");
  experiment->add_option("--config", config_path, "JSON config file");
  experiment->add_option("--out", out, "output directory");

  CLI::App* render_cmd = app.add_subcommand("render", "render scenario and initial state");
  render_cmd->add_option("--config", config_path, "JSON config file");
  render_cmd->add_option("--scenario", scenario, "natural|5to5|7to3");
  CLI::Option* render_seed = render_cmd->add_option("--seed", seed, "initial-field seed");
  render_cmd->add_option("--out", out, "output directory");

  CLI::App* diff = app.add_subcommand("diff", "difference between two orientation files");
  diff->add_option("--config", config_path, "JSON config file");
  diff->add_option("current", current_path, "current ORIENT file")->required();
  diff->add_option("target", target_path, "target ORIENT file")->required();
  diff->add_option("--out", out, "heatmap PPM path (optional)")->default_val("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (trial->parsed())
      return cmd_trial(config_path, method_str, scenario, seed, !trial_seed->empty(), out);
    if (experiment->parsed()) return cmd_experiment(config_path, out);
    if (render_cmd->parsed())
      return cmd_render(config_path, scenario, seed, !render_seed->empty(), out);
    if (diff->parsed()) return cmd_diff(config_path, current_path, target_path, out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
