#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "combplan/orientation.hpp"
#include "combplan/planner.hpp"
#include "combplan/simulator.hpp"
#include "combplan/tracing.hpp"
#include "combplan/trajectory.hpp"

namespace combplan {

enum class Method { kProposed, kRandom };

const char* method_name(Method m);
Method method_from_name(const std::string& name);  // throws ConfigError

// Full closed-loop configuration. Everything has a default; JSON configs
// override fields selectively.
struct ExperimentConfig {
  HeadParams head;
  FieldParams field;
  InitialJitter jitter;

  double rasterize_width = 3.0;  // px
  int erode_kernel = 15;
  double absent_mask_penalty = kDefaultAbsentMaskPenalty;

  SeedPolicy seed_policy;
  TraceConfig tracing;
  int target_extraction_stride = 6;  // px grid for target strand sampling
  double root_tolerance = 15.0;      // max traced-root distance from the scalp, px

  PlannerConfig planner;
  RansacConfig ransac;
  double approach_clearance = kDefaultClearanceMm;
  double retract_clearance = kDefaultClearanceMm;
  double max_step_mm = kDefaultMaxStepMm;

  double compliance = 0.9;
  double noise_sigma = 0.04;  // rad, comb pass noise

  double stop_threshold = 0.02;  // rad
  int max_iterations = 15;

  std::string scenario = "5to5";  // natural | 5to5 | 7to3
  uint64_t seed = 1;
  int seeds = 10;  // seed count for experiments (seed, seed+1, ...)

  void validate() const;  // throws ConfigError
};

ExperimentConfig config_from_json(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

struct IterationRecord {
  int iteration = 0;
  double mean_delta = 0.0;  // measured before this iteration's strokes
  int strokes_executed = 0;
  int fallback_events = 0;
  double wall_time_ms = 0.0;  // in-memory only, never serialized
};

struct TrialResult {
  std::string method;
  std::string scenario;
  uint64_t seed = 0;
  std::vector<IterationRecord> records;
  double final_mean = 0.0;  // last record's mean_delta
  int strokes_total = 0;
  int fallback_total = 0;
  int planner_skips = 0;         // per-stroke errors logged and skipped
  int pose_check_failures = 0;   // trajectory invariant violations (expect 0)
  bool completed = false;
  std::string error;
};

// Optional per-trial outputs.
struct TrialArtifacts {
  std::string out_dir;
  std::string tag;  // file name prefix
  bool write_heatmaps = true;
  bool write_trajectories = false;
  bool write_final_strands = false;
};

// One closed-loop trial: repeatedly render, align, erode, compare, then
// trace a strand per selected seed and comb along the planned (or random
// baseline) stroke, until the mean difference drops below stop_threshold or
// the iteration budget runs out. A final measurement record is always
// appended, so final_mean reflects the finished field. Fully deterministic
// per (config, method, seed).
TrialResult run_trial(const ExperimentConfig& config, Method method, uint64_t seed,
                      const TrialArtifacts* artifacts = nullptr);

struct SummaryRow {
  std::string method;
  std::string scenario;
  int trials = 0;  // completed
  double mean_final = 0.0;
  double std_final = 0.0;  // sample standard deviation
};

struct ExperimentResult {
  std::vector<TrialResult> trials;
  std::vector<SummaryRow> summary;
  int failed_trials = 0;
};

// All (method x scenario x seed) trials; writes trials.csv, summary.csv,
// curves.csv and first-seed initial/final heatmaps into out_dir. Failed
// trials get a failure row; summaries cover completed trials only.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::vector<uint64_t>& seeds,
                                const std::vector<std::string>& scenarios,
                                const std::string& out_dir);

// Summary rows recomputed from per-trial values (method, scenario, final
// mean); also used internally so summary.csv has no hidden state.
std::vector<SummaryRow> summarize(const std::vector<TrialResult>& trials);

std::string trials_to_csv(const std::vector<TrialResult>& trials);
std::string curves_to_csv(const std::vector<TrialResult>& trials);
std::string summary_to_csv(const std::vector<SummaryRow>& rows);

}  // namespace combplan
