#include "combplan/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "combplan/random.hpp"

namespace combplan {

const char* method_name(Method m) {
  return m == Method::kProposed ? "proposed" : "random";
}

Method method_from_name(const std::string& name) {
  if (name == "proposed") return Method::kProposed;
  if (name == "random") return Method::kRandom;
  throw ConfigError("unknown method: " + name + " (expected proposed|random)");
}

void ExperimentConfig::validate() const {
  if (compliance < 0.0 || compliance > 1.0)
    throw ConfigError("compliance must be in [0, 1]");
  if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
  if (erode_kernel < 1 || erode_kernel % 2 == 0)
    throw ConfigError("erode_kernel must be odd and >= 1");
  if (rasterize_width <= 0.0) throw ConfigError("rasterize_width must be > 0");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (stop_threshold < 0.0) throw ConfigError("stop_threshold must be >= 0");
  if (seed_policy.difference_threshold <= 0.0 || seed_policy.difference_threshold >= kPi)
    throw ConfigError("seed_policy.difference_threshold must be in (0, pi)");
  if (seed_policy.max_seeds < 1) throw ConfigError("seed_policy.max_seeds must be >= 1");
  if (field.strand_count < 2) throw ConfigError("strand_count must be >= 2");
  if (field.strand_length <= 0.0) throw ConfigError("strand_length must be > 0");
  if (planner.comb_length <= 0.0) throw ConfigError("planner.comb_length must be > 0");
  if (planner.stroke_samples < 2) throw ConfigError("planner.stroke_samples must be >= 2");
  if (planner.candidate_radius <= 0.0)
    throw ConfigError("planner.candidate_radius must be > 0");
  if (target_extraction_stride < 1)
    throw ConfigError("target_extraction_stride must be >= 1");
  if (ransac.iterations < 1 || ransac.inlier_tol <= 0.0 || ransac.window < 3)
    throw ConfigError("bad ransac config");
  if (seeds < 1) throw ConfigError("seeds must be >= 1");
  if (scenario != "natural" && scenario != "5to5" && scenario != "7to3")
    throw ConfigError("unknown scenario: " + scenario + " (expected natural|5to5|7to3)");
}

// --- config parsing ----------------------------------------------------------

namespace {

using nlohmann::json;

void expect_keys(const json& obj, std::initializer_list<const char*> keys,
                 const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* k : keys)
      if (key == k) {
        known = true;
        break;
      }
    if (!known) throw ConfigError("unknown config key: " + where + key);
  }
}

template <typename T>
void get_if(const json& obj, const char* key, T* out) {
  if (obj.contains(key)) {
    try {
      *out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("bad value for config key: ") + key);
    }
  }
}

}  // namespace

ExperimentConfig config_from_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");

  expect_keys(doc,
              {"head", "strand_count", "strand_length", "point_spacing", "stiffness",
               "sweep_angle", "base_jitter_sigma", "stray_fraction", "stray_min",
               "stray_max", "rasterize_width", "erode_kernel", "absent_mask_penalty",
               "seed_policy", "tracing", "target_extraction_stride", "root_tolerance", "planner",
               "ransac", "approach_clearance", "retract_clearance", "max_step_mm",
               "compliance", "noise_sigma", "stop_threshold", "max_iterations",
               "scenario", "seed", "seeds"},
              "");

  ExperimentConfig cfg;
  if (doc.contains("head")) {
    const json& h = doc.at("head");
    expect_keys(h,
                {"width", "height", "cx", "cy", "rx", "ry", "rz", "base_depth",
                 "hairline_y", "scalp_half_width", "scalp_samples"},
                "head.");
    get_if(h, "width", &cfg.head.width);
    get_if(h, "height", &cfg.head.height);
    get_if(h, "cx", &cfg.head.cx);
    get_if(h, "cy", &cfg.head.cy);
    get_if(h, "rx", &cfg.head.rx);
    get_if(h, "ry", &cfg.head.ry);
    get_if(h, "rz", &cfg.head.rz);
    get_if(h, "base_depth", &cfg.head.base_depth);
    get_if(h, "hairline_y", &cfg.head.hairline_y);
    get_if(h, "scalp_half_width", &cfg.head.scalp_half_width);
    get_if(h, "scalp_samples", &cfg.head.scalp_samples);
  }
  get_if(doc, "strand_count", &cfg.field.strand_count);
  get_if(doc, "strand_length", &cfg.field.strand_length);
  get_if(doc, "point_spacing", &cfg.field.point_spacing);
  get_if(doc, "stiffness", &cfg.field.stiffness);
  get_if(doc, "sweep_angle", &cfg.field.sweep_angle);
  get_if(doc, "base_jitter_sigma", &cfg.jitter.base_sigma);
  get_if(doc, "stray_fraction", &cfg.jitter.stray_fraction);
  get_if(doc, "stray_min", &cfg.jitter.stray_min);
  get_if(doc, "stray_max", &cfg.jitter.stray_max);
  get_if(doc, "rasterize_width", &cfg.rasterize_width);
  get_if(doc, "erode_kernel", &cfg.erode_kernel);
  get_if(doc, "absent_mask_penalty", &cfg.absent_mask_penalty);
  if (doc.contains("seed_policy")) {
    const json& s = doc.at("seed_policy");
    expect_keys(s, {"difference_threshold", "max_seeds", "min_seed_separation"},
                "seed_policy.");
    get_if(s, "difference_threshold", &cfg.seed_policy.difference_threshold);
    get_if(s, "max_seeds", &cfg.seed_policy.max_seeds);
    get_if(s, "min_seed_separation", &cfg.seed_policy.min_seed_separation);
  }
  if (doc.contains("tracing")) {
    const json& t = doc.at("tracing");
    expect_keys(t, {"step", "max_steps", "turn_limit"}, "tracing.");
    get_if(t, "step", &cfg.tracing.step);
    get_if(t, "max_steps", &cfg.tracing.max_steps);
    get_if(t, "turn_limit", &cfg.tracing.turn_limit);
  }
  get_if(doc, "target_extraction_stride", &cfg.target_extraction_stride);
  get_if(doc, "root_tolerance", &cfg.root_tolerance);
  if (doc.contains("planner")) {
    const json& p = doc.at("planner");
    expect_keys(p,
                {"candidate_radius", "eps", "min_pts", "direction_weight",
                 "resample_points", "comb_length", "stroke_samples", "comb_width",
                 "dominance_ratio", "boundary_margin"},
                "planner.");
    get_if(p, "candidate_radius", &cfg.planner.candidate_radius);
    get_if(p, "eps", &cfg.planner.eps);
    get_if(p, "min_pts", &cfg.planner.min_pts);
    get_if(p, "direction_weight", &cfg.planner.direction_weight);
    get_if(p, "resample_points", &cfg.planner.resample_points);
    get_if(p, "comb_length", &cfg.planner.comb_length);
    get_if(p, "stroke_samples", &cfg.planner.stroke_samples);
    get_if(p, "comb_width", &cfg.planner.comb_width);
    get_if(p, "dominance_ratio", &cfg.planner.dominance_ratio);
    get_if(p, "boundary_margin", &cfg.planner.boundary_margin);
  }
  if (doc.contains("ransac")) {
    const json& r = doc.at("ransac");
    expect_keys(r, {"iterations", "inlier_tol", "window"}, "ransac.");
    get_if(r, "iterations", &cfg.ransac.iterations);
    get_if(r, "inlier_tol", &cfg.ransac.inlier_tol);
    get_if(r, "window", &cfg.ransac.window);
  }
  get_if(doc, "approach_clearance", &cfg.approach_clearance);
  get_if(doc, "retract_clearance", &cfg.retract_clearance);
  get_if(doc, "max_step_mm", &cfg.max_step_mm);
  get_if(doc, "compliance", &cfg.compliance);
  get_if(doc, "noise_sigma", &cfg.noise_sigma);
  get_if(doc, "stop_threshold", &cfg.stop_threshold);
  get_if(doc, "max_iterations", &cfg.max_iterations);
  get_if(doc, "scenario", &cfg.scenario);
  get_if(doc, "seed", &cfg.seed);
  get_if(doc, "seeds", &cfg.seeds);

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

// --- trial ---------------------------------------------------------------------

namespace {

const StyleScenario& find_scenario(const std::vector<StyleScenario>& scenarios,
                                   const std::string& name) {
  for (const StyleScenario& s : scenarios)
    if (s.name == name) return s;
  throw ConfigError("unknown scenario: " + name);
}

const float kReportNaN = std::numeric_limits<float>::quiet_NaN();

// Report restricted to cells with a measured angular difference.
DifferenceReport angular_view(const DifferenceReport& report) {
  DifferenceReport view = report;
  for (size_t i = 0; i < view.delta.size(); ++i)
    if (view.absent_target[i]) view.delta[i] = kReportNaN;
  return view;
}

// Report restricted to coverage-mismatch cells.
DifferenceReport penalty_view(const DifferenceReport& report) {
  DifferenceReport view = report;
  for (size_t i = 0; i < view.delta.size(); ++i)
    if (!view.absent_target[i]) view.delta[i] = kReportNaN;
  return view;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

TrialResult run_trial(const ExperimentConfig& config, Method method, uint64_t seed,
                      const TrialArtifacts* artifacts) {
  config.validate();

  TrialResult result;
  result.method = method_name(method);
  result.scenario = config.scenario;
  result.seed = seed;

  const HeadModel head = make_head(config.head);
  const std::vector<StyleScenario> scenarios = builtin_scenarios(head, config.field);
  const StyleScenario& scenario = find_scenario(scenarios, config.scenario);

  // The target side is static: render, align onto the current head via the
  // landmark correspondences, erode, and sample its strand set once. Strand
  // extraction runs on the uneroded state so roots reach the scalp line;
  // erosion only denoises the comparison.
  const OrientationState target_raw =
      render(head, scenario.target_field, config.rasterize_width);
  const OrientationState target_aligned =
      align_target(target_raw, head.landmarks, head.landmarks);
  const OrientationState target = eroded(target_aligned, config.erode_kernel);
  const std::vector<Strand> target_strands =
      extract_strands(target_aligned, config.target_extraction_stride, config.tracing);

  StrandField field = make_initial_field(head, config.field, config.jitter, seed);

  Rng trial_rng(Rng::mix(seed, method == Method::kProposed ? 0x9A11 : 0x7A2D));

  const std::string prefix =
      artifacts ? artifacts->out_dir + "/" + artifacts->tag : std::string();

  for (int it = 0; it <= config.max_iterations; ++it) {
    const auto t0 = std::chrono::steady_clock::now();

    const OrientationState current_raw = render(head, field, config.rasterize_width);
    const OrientationState current = eroded(current_raw, config.erode_kernel);
    const DifferenceReport report =
        difference_map(current, target, config.absent_mask_penalty);

    if (artifacts && artifacts->write_heatmaps && it == 0)
      write_difference_ppm(report, prefix + "_initial.ppm");

    IterationRecord record;
    record.iteration = it;
    record.mean_delta = report.mean;
    result.records.push_back(record);

    if (report.mean <= config.stop_threshold || it == config.max_iterations) {
      result.records.back().wall_time_ms = ms_since(t0);
      if (artifacts && artifacts->write_heatmaps)
        write_difference_ppm(report, prefix + "_final.ppm");
      break;
    }

    // Measured orientation mismatches get the seed budget first; any slots
    // left go to coverage mismatches (strands sitting where the target has
    // no hair), so those get combed out once the field is otherwise settled.
    std::vector<Vec2> seeds = select_seeds(angular_view(report), config.seed_policy);
    if (static_cast<int>(seeds.size()) < config.seed_policy.max_seeds) {
      SeedPolicy fill = config.seed_policy;
      fill.max_seeds = config.seed_policy.max_seeds - static_cast<int>(seeds.size());
      const std::vector<Vec2> extra = select_seeds(penalty_view(report), fill);
      seeds.insert(seeds.end(), extra.begin(), extra.end());
    }
    int strokes = 0;
    int fallbacks = 0;
    std::vector<Vec2> stroked_roots;
    for (size_t si = 0; si < seeds.size(); ++si) {
      try {
        const Strand current_strand = trace_strand(current_raw, seeds[si], config.tracing);

        // Root-centric planning needs a believable root; traces that end
        // mid-field (mask gaps, tangles) would put the stroke nowhere.
        if (current.scalp_line.distance_to(current_strand.root) > config.root_tolerance)
          throw PlanningError("traced root is not near the scalp line");

        // Seeds on the same strand trace to the same root; one stroke per
        // captured neighborhood per iteration.
        const double dedup_radius = config.planner.comb_width / 2.0;
        bool duplicate = false;
        for (const Vec2& r : stroked_roots)
          if ((r - current_strand.root).norm() < dedup_radius) {
            duplicate = true;
            break;
          }
        if (duplicate) continue;

        bool used_fallback = false;
        CombStroke stroke = [&] {
          if (method == Method::kProposed) {
            PlanOutcome outcome =
                plan_root_centric_stroke(current_strand, target_strands, config.planner);
            used_fallback = outcome.used_fallback;
            return outcome.stroke;
          }
          return random_baseline_stroke(target_strands, trial_rng.next_u64(),
                                        config.planner.comb_length,
                                        config.planner.stroke_samples,
                                        config.planner.comb_width);
        }();

        const ToolTrajectory traj = stroke_to_trajectory(
            stroke, head.depth, config.ransac, config.approach_clearance,
            config.retract_clearance, trial_rng.next_u64());

        // Pose feasibility: orthonormal frames, the contract pose count, and
        // bounded spacing. Violations mean a geometry bug, not a bad stroke.
        if (traj.max_frame_error() > 1e-9 ||
            traj.poses.size() != stroke.path.size() + 2 ||
            !traj.spacing_ok(config.max_step_mm)) {
          ++result.pose_check_failures;
          continue;
        }

        if (artifacts && artifacts->write_trajectories) {
          char name[64];
          std::snprintf(name, sizeof(name), "_iter%02d_stroke%02zu.csv", it, si);
          write_trajectory_csv(traj, prefix + name);
        }

        field = apply_stroke(field, stroke, stroke.comb_width, config.compliance,
                             config.noise_sigma, trial_rng.next_u64());
        stroked_roots.push_back(current_strand.root);
        ++strokes;
        if (used_fallback) ++fallbacks;
      } catch (const Error&) {
        ++result.planner_skips;
      }
    }

    result.records.back().strokes_executed = strokes;
    result.records.back().fallback_events = fallbacks;
    result.records.back().wall_time_ms = ms_since(t0);
    result.strokes_total += strokes;
    result.fallback_total += fallbacks;
  }

  result.final_mean = result.records.back().mean_delta;
  result.completed = true;

  if (artifacts && artifacts->write_final_strands)
    write_strands_json(field.strands, prefix + "_final_strands.json");
  return result;
}

// --- experiment -----------------------------------------------------------------

std::vector<SummaryRow> summarize(const std::vector<TrialResult>& trials) {
  std::vector<SummaryRow> rows;
  for (const TrialResult& t : trials) {
    SummaryRow* row = nullptr;
    for (SummaryRow& r : rows)
      if (r.method == t.method && r.scenario == t.scenario) row = &r;
    if (!row) {
      rows.push_back({t.method, t.scenario, 0, 0.0, 0.0});
      row = &rows.back();
    }
    if (t.completed) {
      ++row->trials;
      row->mean_final += t.final_mean;  // accumulate, normalized below
    }
  }
  for (SummaryRow& r : rows)
    if (r.trials > 0) r.mean_final /= r.trials;

  for (SummaryRow& r : rows) {
    if (r.trials < 2) continue;
    double ss = 0.0;
    for (const TrialResult& t : trials)
      if (t.completed && t.method == r.method && t.scenario == r.scenario)
        ss += (t.final_mean - r.mean_final) * (t.final_mean - r.mean_final);
    r.std_final = std::sqrt(ss / (r.trials - 1));
  }
  return rows;
}

std::string trials_to_csv(const std::vector<TrialResult>& trials) {
  std::string out =
      "method,scenario,seed,completed,final_mean_rad,iterations,strokes,"
      "fallbacks,planner_skips,pose_check_failures,error\n";
  char line[512];
  for (const TrialResult& t : trials) {
    std::string err = t.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::snprintf(line, sizeof(line), "%s,%s,%llu,%d,%.9f,%zu,%d,%d,%d,%d,%s\n",
                  t.method.c_str(), t.scenario.c_str(),
                  static_cast<unsigned long long>(t.seed), t.completed ? 1 : 0,
                  t.final_mean, t.records.size(), t.strokes_total, t.fallback_total,
                  t.planner_skips, t.pose_check_failures, err.c_str());
    out += line;
  }
  return out;
}

std::string curves_to_csv(const std::vector<TrialResult>& trials) {
  std::string out = "method,scenario,seed,iteration,mean_delta_rad\n";
  char line[256];
  for (const TrialResult& t : trials)
    for (const IterationRecord& r : t.records) {
      std::snprintf(line, sizeof(line), "%s,%s,%llu,%d,%.9f\n", t.method.c_str(),
                    t.scenario.c_str(), static_cast<unsigned long long>(t.seed),
                    r.iteration, r.mean_delta);
      out += line;
    }
  return out;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "method,scenario,trials,mean_final_rad,std_final_rad\n";
  char line[256];
  for (const SummaryRow& r : rows) {
    std::snprintf(line, sizeof(line), "%s,%s,%d,%.9f,%.9f\n", r.method.c_str(),
                  r.scenario.c_str(), r.trials, r.mean_final, r.std_final);
    out += line;
  }
  return out;
}

namespace {

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::vector<uint64_t>& seeds,
                                const std::vector<std::string>& scenarios,
                                const std::string& out_dir) {
  config.validate();
  if (seeds.size() < 2) throw ConfigError("run_experiment needs at least 2 seeds");
  std::filesystem::create_directories(out_dir);

  ExperimentResult result;
  for (const std::string& scenario : scenarios) {
    ExperimentConfig trial_cfg = config;
    trial_cfg.scenario = scenario;
    trial_cfg.validate();
    for (Method method : {Method::kProposed, Method::kRandom}) {
      for (size_t i = 0; i < seeds.size(); ++i) {
        TrialArtifacts artifacts;
        artifacts.out_dir = out_dir;
        artifacts.tag = std::string("heatmap_") + method_name(method) + "_" + scenario;
        const bool first_seed = i == 0;

        try {
          result.trials.push_back(run_trial(trial_cfg, method, seeds[i],
                                            first_seed ? &artifacts : nullptr));
        } catch (const Error& e) {
          TrialResult failed;
          failed.method = method_name(method);
          failed.scenario = scenario;
          failed.seed = seeds[i];
          failed.completed = false;
          failed.error = e.what();
          result.trials.push_back(std::move(failed));
          ++result.failed_trials;
        }
      }
    }
  }

  result.summary = summarize(result.trials);
  write_text(out_dir + "/trials.csv", trials_to_csv(result.trials));
  write_text(out_dir + "/curves.csv", curves_to_csv(result.trials));
  write_text(out_dir + "/summary.csv", summary_to_csv(result.summary));
  return result;
}

}  // namespace combplan
