#pragma once

#include <string>
#include <vector>

#include "combplan/geometry.hpp"
#include "combplan/orientation.hpp"

namespace combplan {

// Root-identified hair strand: polyline ordered root to tip.
struct Strand {
  Polyline2D path;
  Vec2 root;          // equals path.front()
  double arc_length;  // equals path.arc_length()

  static Strand from_path(Polyline2D p) {
    Strand s{std::move(p), {}, 0.0};
    s.root = s.path.front();
    s.arc_length = s.path.arc_length();
    return s;
  }
  Vec2 end() const { return path.back(); }
};

// Governs where strands are extracted: pixels whose orientation difference
// is significant.
struct SeedPolicy {
  double difference_threshold = 0.12;  // radians
  int max_seeds = 8;
  double min_seed_separation = 12.0;  // px
};

// Up to max_seeds pixels with delta >= threshold, greedily in descending
// delta order (ties by row then column), each at least min_seed_separation
// from all previously chosen seeds.
std::vector<Vec2> select_seeds(const DifferenceReport& report, const SeedPolicy& policy);

struct TraceConfig {
  double step = 1.0;            // px
  int max_steps = 600;          // per direction
  double turn_limit = kPi / 3;  // max direction change per step
};

// Integrate the orientation field from the seed in both directions (with and
// against the field) using midpoint steps; stops on mask exit, sharp turns,
// or the step budget. The endpoint nearer the scalp line becomes the root.
// Throws InvalidSeedError if the seed is unmasked or cannot be traced.
Strand trace_strand(const OrientationState& state, const Vec2& seed,
                    const TraceConfig& config);

// Trace a strand from every masked pixel on a square grid of the given
// stride. Untraceable seeds are skipped.
std::vector<Strand> extract_strands(const OrientationState& state, int stride,
                                    const TraceConfig& config);

// { "strands": [ { "root": [x,y], "points": [[x,y],...] } ] }
std::string strands_to_json(const std::vector<Strand>& strands);
void write_strands_json(const std::vector<Strand>& strands, const std::string& path);
std::vector<Strand> strands_from_json(const std::string& text);

}  // namespace combplan
