#include "combplan/planner.hpp"

#include <algorithm>
#include <deque>
#include <fstream>

#include <json.hpp>

#include "combplan/random.hpp"

namespace combplan {

std::vector<Strand> candidate_targets(const Strand& current,
                                      const std::vector<Strand>& target_strands,
                                      double radius) {
  if (radius <= 0.0) throw InvalidParameterError("candidate_targets: radius must be > 0");
  std::vector<Strand> out;
  for (const Strand& s : target_strands)
    if ((s.root - current.root).norm() <= radius) out.push_back(s);
  return out;
}

ClusterResult cluster_strands(const std::vector<Strand>& candidates, double eps,
                              int min_pts, double direction_weight) {
  if (candidates.empty())
    throw InvalidParameterError("cluster_strands: candidates must be nonempty");

  const size_t n = candidates.size();
  std::vector<StrandFeature> feats;
  feats.reserve(n);
  for (const Strand& s : candidates) feats.push_back(StrandFeature::of(s, direction_weight));

  auto neighbors_of = [&](size_t i) {
    std::vector<size_t> nb;
    for (size_t j = 0; j < n; ++j)
      if (feats[i].distance(feats[j]) <= eps) nb.push_back(j);
    return nb;  // includes i itself
  };

  ClusterResult result;
  result.labels.assign(n, kNoiseLabel);
  std::vector<uint8_t> visited(n, 0);
  int next_cluster = 0;

  for (size_t i = 0; i < n; ++i) {
    if (visited[i]) continue;
    visited[i] = 1;
    std::vector<size_t> nb = neighbors_of(i);
    if (static_cast<int>(nb.size()) < min_pts) continue;  // noise for now

    const int cluster = next_cluster++;
    result.labels[i] = cluster;
    std::deque<size_t> frontier(nb.begin(), nb.end());
    while (!frontier.empty()) {
      const size_t j = frontier.front();
      frontier.pop_front();
      if (result.labels[j] == kNoiseLabel) result.labels[j] = cluster;  // border point
      if (visited[j]) continue;
      visited[j] = 1;
      result.labels[j] = cluster;
      const std::vector<size_t> nbj = neighbors_of(j);
      if (static_cast<int>(nbj.size()) >= min_pts)
        frontier.insert(frontier.end(), nbj.begin(), nbj.end());
    }
  }

  // Largest cluster, ties to the smallest id.
  std::vector<size_t> sizes(static_cast<size_t>(next_cluster), 0);
  for (int label : result.labels)
    if (label >= 0) ++sizes[static_cast<size_t>(label)];
  int best = -1;
  for (int c = 0; c < next_cluster; ++c)
    if (best < 0 || sizes[static_cast<size_t>(c)] > sizes[static_cast<size_t>(best)])
      best = c;
  if (best >= 0)
    for (size_t i = 0; i < n; ++i)
      if (result.labels[i] == best) result.largest_cluster.push_back(i);
  return result;
}

Strand representative_strand(const std::vector<Strand>& candidates,
                             const ClusterResult& cluster, size_t resample_points) {
  if (cluster.largest_cluster.empty())
    throw NoRepresentativeError("representative_strand: largest cluster is empty");
  if (resample_points < 2)
    throw InvalidParameterError("representative_strand: need >= 2 resample points");

  std::vector<Vec2> mean(resample_points, {0.0, 0.0});
  Vec2 mean_root{0.0, 0.0};
  for (size_t idx : cluster.largest_cluster) {
    const Polyline2D rs = candidates[idx].path.resampled(resample_points);
    for (size_t i = 0; i < resample_points; ++i) mean[i] = mean[i] + rs.points()[i];
    mean_root = mean_root + candidates[idx].root;
  }
  const double inv = 1.0 / static_cast<double>(cluster.largest_cluster.size());
  for (Vec2& p : mean) p = p * inv;
  mean_root = mean_root * inv;

  // Re-anchor so the first point is exactly the mean member root.
  const Vec2 shift = mean_root - mean.front();
  for (Vec2& p : mean) p = p + shift;

  return Strand::from_path(Polyline2D::from_points(std::move(mean)));
}

size_t nearest_to_centroid(const std::vector<Strand>& candidates,
                           double direction_weight) {
  if (candidates.empty())
    throw InvalidParameterError("nearest_to_centroid: candidates must be nonempty");
  std::vector<StrandFeature> feats;
  for (const Strand& s : candidates) feats.push_back(StrandFeature::of(s, direction_weight));

  StrandFeature centroid{0, 0, 0, 0};
  for (const StrandFeature& f : feats) {
    centroid.end_x += f.end_x;
    centroid.end_y += f.end_y;
    centroid.dir_x += f.dir_x;
    centroid.dir_y += f.dir_y;
  }
  const double inv = 1.0 / static_cast<double>(feats.size());
  centroid.end_x *= inv;
  centroid.end_y *= inv;
  centroid.dir_x *= inv;
  centroid.dir_y *= inv;

  size_t best = 0;
  double best_d = feats[0].distance(centroid);
  for (size_t i = 1; i < feats.size(); ++i) {
    const double d = feats[i].distance(centroid);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

CombStroke generate_stroke(const Strand& current, const Strand& rep,
                           double comb_length, size_t samples, double comb_width) {
  if (comb_length <= 0.0)
    throw InvalidParameterError("generate_stroke: comb_length must be > 0");
  if (rep.arc_length < 1e-9)
    throw InvalidRepresentativeError("generate_stroke: representative strand has zero length");

  // Representative translated so its root sits on the current root.
  const Vec2 shift = current.root - rep.root;
  std::vector<Vec2> raw;
  raw.reserve(rep.path.size() + 1);

  const Vec2 u = rep.path.tangent_at_arc(0.0);  // initial direction
  raw.push_back(current.root - u * comb_length);
  for (const Vec2& p : rep.path.points()) raw.push_back(p + shift);

  const Polyline2D smoothed = fit_bezier(Polyline2D::from_points(std::move(raw)), samples);
  return CombStroke{smoothed, comb_width, current.root};
}

CombStroke random_baseline_stroke(const std::vector<Strand>& target_strands,
                                  uint64_t rng_seed, double comb_length,
                                  size_t samples, double comb_width) {
  if (target_strands.empty())
    throw PlanningError("random_baseline_stroke: no target strands");
  Rng rng(rng_seed);
  const size_t pick = rng.uniform_index(target_strands.size());
  const Strand& chosen = target_strands[pick];
  // Same shift-back and smoothing, rooted at the chosen strand's own root.
  return generate_stroke(chosen, chosen, comb_length, samples, comb_width);
}

PlanOutcome plan_root_centric_stroke(const Strand& current,
                                     const std::vector<Strand>& target_strands,
                                     const PlannerConfig& config) {
  const std::vector<Strand> cands =
      candidate_targets(current, target_strands, config.candidate_radius);
  if (cands.empty())
    throw PlanningError("no target strand roots within the candidate radius");

  const ClusterResult clusters =
      cluster_strands(cands, config.eps, config.min_pts, config.direction_weight);

  if (!clusters.largest_cluster.empty()) {
    ClusterResult chosen = clusters;
    if (config.dominance_ratio > 1.0) {
      std::vector<size_t> sizes;
      for (int label : clusters.labels) {
        if (label < 0) continue;
        if (sizes.size() <= static_cast<size_t>(label))
          sizes.resize(static_cast<size_t>(label) + 1, 0);
        ++sizes[static_cast<size_t>(label)];
      }
      std::vector<size_t> ranked = sizes;
      std::sort(ranked.rbegin(), ranked.rend());
      if (ranked.size() > 1 && static_cast<double>(ranked[0]) <
                                   config.dominance_ratio * static_cast<double>(ranked[1])) {
        // No dominant direction (typically astride a parting): fall back to
        // root correspondence between the two main clusters. When even the
        // nearest roots cannot separate them the strand truly sits on the
        // boundary, and combing would drag the wrong side along.
        int label_a = -1, label_b = -1;
        for (size_t c = 0; c < sizes.size(); ++c) {
          if (label_a < 0 || sizes[c] > sizes[static_cast<size_t>(label_a)])
            label_a = static_cast<int>(c);
        }
        for (size_t c = 0; c < sizes.size(); ++c) {
          if (static_cast<int>(c) == label_a) continue;
          if (label_b < 0 || sizes[c] > sizes[static_cast<size_t>(label_b)])
            label_b = static_cast<int>(c);
        }
        double near_a = -1.0, near_b = -1.0;
        for (size_t i = 0; i < cands.size(); ++i) {
          const double d = (cands[i].root - current.root).norm();
          if (clusters.labels[i] == label_a && (near_a < 0.0 || d < near_a)) near_a = d;
          if (clusters.labels[i] == label_b && (near_b < 0.0 || d < near_b)) near_b = d;
        }
        if (std::fabs(near_a - near_b) < config.boundary_margin)
          throw PlanningError("root sits on a style boundary; no safe stroke");
        const int nearest_label = near_a < near_b ? label_a : label_b;
        chosen.largest_cluster.clear();
        for (size_t i = 0; i < cands.size(); ++i)
          if (clusters.labels[i] == nearest_label) chosen.largest_cluster.push_back(i);
      }
    }
    const Strand rep = representative_strand(cands, chosen, config.resample_points);
    return {generate_stroke(current, rep, config.comb_length, config.stroke_samples,
                            config.comb_width),
            false};
  }
  const size_t idx = nearest_to_centroid(cands, config.direction_weight);
  const Strand rep = Strand::from_path(cands[idx].path.resampled(config.resample_points));
  return {generate_stroke(current, rep, config.comb_length, config.stroke_samples,
                          config.comb_width),
          true};
}

std::string stroke_to_json(const CombStroke& stroke) {
  nlohmann::json doc;
  nlohmann::json pts = nlohmann::json::array();
  for (const Vec2& p : stroke.path.points()) pts.push_back({p.x, p.y});
  doc["path"] = std::move(pts);
  doc["comb_width"] = stroke.comb_width;
  doc["source_root"] = {stroke.source_root.x, stroke.source_root.y};
  return doc.dump(2);
}

void write_stroke_json(const CombStroke& stroke, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << stroke_to_json(stroke) << "\n";
}

}  // namespace combplan
