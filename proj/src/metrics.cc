#include "goss/metrics.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace goss {

std::optional<double> segment_quality(const MatchCounts& counts) {
  const double denom = static_cast<double>(counts.tp) + 0.5 * static_cast<double>(counts.fp) +
                       0.5 * static_cast<double>(counts.fn);
  if (denom <= 0.0) return std::nullopt;
  return counts.iou_sum / denom;
}

std::optional<double> gq_known(const MatchAccumulator& acc, bool strict_n) {
  double sum = 0.0;
  int defined = 0;
  for (int k = 0; k < acc.num_known(); ++k) {
    if (auto q = segment_quality(acc.known(k))) {
      sum += *q;
      ++defined;
    }
  }
  if (defined == 0) return std::nullopt;
  return sum / (strict_n ? acc.num_known() : defined);
}

std::optional<double> gq_unknown(const MatchAccumulator& acc) {
  return segment_quality(acc.unknown());
}

double gq(double gq_kn, double gq_uk, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError("lambda must lie in [0,1], got " + std::to_string(lambda));
  }
  return lambda * gq_kn + (1.0 - lambda) * gq_uk;
}

GqSummary summarize_gq(const MatchAccumulator& acc, double lambda, bool strict_n, bool fallback) {
  GqSummary s;
  s.known = gq_known(acc, strict_n);
  s.unknown = gq_unknown(acc);
  if (s.known && s.unknown) {
    s.combined = gq(*s.known, *s.unknown, lambda);
  } else if (s.known && fallback) {
    s.combined = s.known;
    s.fell_back = true;
  }
  return s;
}

ClusterMap class_agnostic_segments(const GossMap& gt, Connectivity connectivity) {
  constexpr std::uint32_t kIgnore = 0xffffffffu;
  std::vector<std::uint32_t> keys(gt.size(), kIgnore);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const GossPair p = gt[i];
    if (p.cls == kVoid) continue;
    keys[i] = (static_cast<std::uint32_t>(p.cls) << 16) | p.cluster;
  }
  return label_components(keys, gt.height(), gt.width(), kIgnore, connectivity).ids;
}

MatchCounts match_clustering(const ClusterMap& pred_clusters, const GossMap& gt,
                             Connectivity connectivity) {
  if (!pred_clusters.same_shape(gt.classes())) {
    throw ValidationError("cluster map and ground truth differ in shape");
  }
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i].cls != kVoid && pred_clusters[i] == kVoid) {
      throw ValidationError("clustering leaves labelled pixel " + std::to_string(i) + " uncovered");
    }
  }
  return match_cluster_maps(pred_clusters, class_agnostic_segments(gt, connectivity), void_mask(gt));
}

std::optional<double> gq_clu(const MatchCounts& clustering) { return segment_quality(clustering); }

std::optional<double> gq_clu(const ClusterMap& pred_clusters, const GossMap& gt,
                             Connectivity connectivity) {
  return gq_clu(match_clustering(pred_clusters, gt, connectivity));
}

std::optional<double> miou_clusters(const MatchCounts& clustering) {
  const std::uint64_t gt_segments = clustering.tp + clustering.fn;
  if (gt_segments == 0) return std::nullopt;
  return clustering.iou_sum / static_cast<double>(gt_segments);
}

std::optional<double> miou_clusters(const ClusterMap& pred_clusters, const ClusterMap& gt_segments) {
  if (!pred_clusters.same_shape(gt_segments)) {
    throw ValidationError("cluster map and ground-truth segments differ in shape");
  }
  PixelMask void_pixels(gt_segments.height(), gt_segments.width(), 0);
  for (std::size_t i = 0; i < gt_segments.size(); ++i) void_pixels[i] = gt_segments[i] == kVoid;
  return miou_clusters(match_cluster_maps(pred_clusters, gt_segments, void_pixels));
}

void collect_samples(const Grid<float>& anomaly, const SemanticMap& gt,
                     std::vector<ScoredPixelSample>& out) {
  if (!anomaly.same_shape(gt.labels())) {
    throw ValidationError("anomaly map and ground truth differ in shape");
  }
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] == kVoid) continue;
    if (!std::isfinite(anomaly[i])) throw ValidationError("anomaly map contains non-finite values");
    out.push_back({static_cast<double>(anomaly[i]), gt.is_unknown(i)});
  }
}

namespace {

// Samples grouped by distinct score, highest score first.
struct ScoreGroup {
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
};

struct GroupedSamples {
  std::vector<ScoreGroup> groups;
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
};

GroupedSamples group_descending(std::span<const ScoredPixelSample> samples) {
  for (const ScoredPixelSample& s : samples) {
    if (!std::isfinite(s.anomaly_score)) throw ValidationError("ranking metrics require finite scores");
  }
  std::vector<ScoredPixelSample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(), [](const ScoredPixelSample& a, const ScoredPixelSample& b) {
    return a.anomaly_score > b.anomaly_score;
  });
  GroupedSamples out;
  for (std::size_t i = 0; i < sorted.size();) {
    ScoreGroup g;
    std::size_t j = i;
    for (; j < sorted.size() && sorted[j].anomaly_score == sorted[i].anomaly_score; ++j) {
      (sorted[j].is_unknown_gt ? g.positives : g.negatives) += 1;
    }
    out.positives += g.positives;
    out.negatives += g.negatives;
    out.groups.push_back(g);
    i = j;
  }
  return out;
}

std::optional<double> auroc_grouped(const GroupedSamples& s) {
  if (s.positives == 0 || s.negatives == 0) return std::nullopt;
  // Twice the Mann-Whitney U statistic, accumulated exactly.
  unsigned __int128 twice_u = 0;
  std::uint64_t negatives_below = s.negatives;
  for (const ScoreGroup& g : s.groups) {
    negatives_below -= g.negatives;
    twice_u += static_cast<unsigned __int128>(2) * g.positives * negatives_below;
    twice_u += static_cast<unsigned __int128>(g.positives) * g.negatives;
  }
  const long double pairs = static_cast<long double>(s.positives) * static_cast<long double>(s.negatives);
  return static_cast<double>(static_cast<long double>(twice_u) / (2.0L * pairs));
}

std::optional<double> aupr_grouped(const GroupedSamples& s) {
  if (s.positives == 0) return std::nullopt;
  const auto total_pos = static_cast<double>(s.positives);
  double area = 0.0;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  for (const ScoreGroup& g : s.groups) {
    tp += g.positives;
    fp += g.negatives;
    if (g.positives == 0) continue;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    area += static_cast<double>(g.positives) / total_pos * precision;
  }
  return area;
}

std::optional<double> fpr95_grouped(const GroupedSamples& s) {
  if (s.positives == 0 || s.negatives == 0) return std::nullopt;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  for (const ScoreGroup& g : s.groups) {
    tp += g.positives;
    fp += g.negatives;
    // TPR >= 0.95 without floating-point rounding.
    if (20 * tp >= 19 * s.positives) {
      return static_cast<double>(fp) / static_cast<double>(s.negatives);
    }
  }
  return 1.0;
}

}  // namespace

std::optional<double> auroc(std::span<const ScoredPixelSample> samples) {
  return auroc_grouped(group_descending(samples));
}

std::optional<double> aupr(std::span<const ScoredPixelSample> samples) {
  return aupr_grouped(group_descending(samples));
}

std::optional<double> fpr_at_95_tpr(std::span<const ScoredPixelSample> samples) {
  return fpr95_grouped(group_descending(samples));
}

RankingMetrics ranking_metrics(std::span<const ScoredPixelSample> samples) {
  const GroupedSamples grouped = group_descending(samples);
  return {auroc_grouped(grouped), aupr_grouped(grouped), fpr95_grouped(grouped)};
}

}  // namespace goss
