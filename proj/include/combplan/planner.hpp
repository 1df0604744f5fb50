#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "combplan/geometry.hpp"
#include "combplan/tracing.hpp"

namespace combplan {

// Feature vector a strand is clustered on: end point plus the root-to-end
// direction vector scaled by direction_weight.
struct StrandFeature {
  double end_x, end_y;
  double dir_x, dir_y;

  static StrandFeature of(const Strand& s, double direction_weight) {
    const Vec2 e = s.end();
    const Vec2 d = e - s.root;
    return {e.x, e.y, d.x * direction_weight, d.y * direction_weight};
  }
  double distance(const StrandFeature& o) const {
    const double a = end_x - o.end_x, b = end_y - o.end_y;
    const double c = dir_x - o.dir_x, d = dir_y - o.dir_y;
    return std::sqrt(a * a + b * b + c * c + d * d);
  }
};

constexpr int kNoiseLabel = -1;

struct ClusterResult {
  std::vector<int> labels;            // cluster id per strand, -1 = noise
  std::vector<size_t> largest_cluster;  // indices of the biggest cluster (C_max)
};

// Target strands whose roots lie within `radius` of the current strand's root.
std::vector<Strand> candidate_targets(const Strand& current,
                                      const std::vector<Strand>& target_strands,
                                      double radius);

// DBSCAN over strand features, Euclidean metric, neighborhoods including the
// point itself. Clusters are numbered in scan order; region queries iterate
// in index order, so the result is deterministic. Largest-cluster ties go to
// the smallest cluster id.
ClusterResult cluster_strands(const std::vector<Strand>& candidates, double eps,
                              int min_pts, double direction_weight);

// Pointwise average of the largest cluster's members, each resampled to
// resample_points by arc length; the averaged path is re-anchored at the mean
// member root. Throws NoRepresentativeError when the cluster is empty.
Strand representative_strand(const std::vector<Strand>& candidates,
                             const ClusterResult& cluster,
                             size_t resample_points = 32);

// All-noise fallback: index of the candidate whose feature vector is nearest
// to the candidate-set centroid.
size_t nearest_to_centroid(const std::vector<Strand>& candidates,
                           double direction_weight);

// Smoothed comb path: a back-shifted entry segment followed by the
// re-rooted reference strand.
struct CombStroke {
  Polyline2D path;
  double comb_width = 24.0;  // px
  Vec2 source_root;
};

// Raw manipulation path = entry segment of length comb_length extended
// backward along the representative's initial direction from the current
// root, then the representative path translated so its root sits on the
// current root; smoothed with the cubic Bezier fit into `samples` points.
CombStroke generate_stroke(const Strand& current, const Strand& rep,
                           double comb_length, size_t samples,
                           double comb_width = 24.0);

// Baseline: pick one target strand uniformly at random (seeded) and build the
// same stroke rooted at that strand's own root.
CombStroke random_baseline_stroke(const std::vector<Strand>& target_strands,
                                  uint64_t rng_seed, double comb_length,
                                  size_t samples, double comb_width = 24.0);

struct PlannerConfig {
  double candidate_radius = 40.0;  // px around the current root
  double eps = 25.0;               // DBSCAN, feature units
  int min_pts = 2;
  double direction_weight = 1.0;
  size_t resample_points = 32;
  double comb_length = 30.0;  // px
  size_t stroke_samples = 32;
  double comb_width = 14.0;  // px; narrow enough not to drag across a parting
  // The largest cluster counts as the dominant direction only when it
  // outnumbers the runner-up by this factor; otherwise (typically astride a
  // parting, where the split is nearly even) the plan follows the cluster
  // whose nearest member root is closest to the current root. <= 1 disables.
  double dominance_ratio = 1.25;
  // In the ambiguous case, skip the stroke when the two clusters' nearest
  // roots are within this distance of each other: the strand sits on the
  // boundary itself.
  double boundary_margin = 3.0;  // px
};

struct PlanOutcome {
  CombStroke stroke;
  bool used_fallback;
};

// Full root-centric plan for one current strand: gather candidates by root
// proximity, cluster, average the dominant cluster (falling back to the
// centroid-nearest candidate when everything is noise), generate the stroke.
// Throws PlanningError when no target root lies within the radius.
PlanOutcome plan_root_centric_stroke(const Strand& current,
                                     const std::vector<Strand>& target_strands,
                                     const PlannerConfig& config);

// { "path": [[x,y],...], "comb_width": w, "source_root": [x,y] }
std::string stroke_to_json(const CombStroke& stroke);
void write_stroke_json(const CombStroke& stroke, const std::string& path);

}  // namespace combplan
