#ifndef GOSS_METRICS_H_
#define GOSS_METRICS_H_

// GQ metric family and open-set ranking metrics.
//
// Per known class k the quality is
//   iou_sum_k / (tp_k + fp_k / 2 + fn_k / 2)
// GQ^kn averages it over known classes, GQ^uk applies it to the unknown pool
// and GQ = lambda * GQ^kn + (1 - lambda) * GQ^uk. An empty optional marks a
// value that is undefined (0 / 0).

#include <optional>
#include <span>
#include <vector>

#include "goss/core.h"
#include "goss/labeling.h"
#include "goss/matching.h"

namespace goss {

// iou_sum / (tp + fp/2 + fn/2); undefined when the denominator is zero.
std::optional<double> segment_quality(const MatchCounts& counts);

// Default: mean over classes with a non-empty denominator. strict_n: sum over
// all N classes divided by N, empty classes counting as zero.
std::optional<double> gq_known(const MatchAccumulator& acc, bool strict_n = false);

std::optional<double> gq_unknown(const MatchAccumulator& acc);

double gq(double gq_kn, double gq_uk, double lambda);

struct GqSummary {
  std::optional<double> known;
  std::optional<double> unknown;
  std::optional<double> combined;
  // True when combined fell back to the known-class quality.
  bool fell_back = false;
};

// With `fallback`, an undefined GQ^uk makes GQ equal GQ^kn.
GqSummary summarize_gq(const MatchAccumulator& acc, double lambda, bool strict_n = false,
                       bool fallback = false);

// Class-agnostic segmentation of a ground-truth GOSS map: connected
// components of pixels sharing the same (class, cluster) pair. Void stays void.
ClusterMap class_agnostic_segments(const GossMap& gt, Connectivity connectivity);

// Single-pool matching of a whole-image clustering against the class-agnostic
// ground truth. Every non-void ground-truth pixel must carry a cluster id.
MatchCounts match_clustering(const ClusterMap& pred_clusters, const GossMap& gt,
                             Connectivity connectivity);

std::optional<double> gq_clu(const MatchCounts& clustering);
std::optional<double> gq_clu(const ClusterMap& pred_clusters, const GossMap& gt,
                             Connectivity connectivity = Connectivity::kFour);

// Mean over ground-truth segments of the IoU of the matched cluster, zero for
// unmatched segments: iou_sum / (tp + fn).
std::optional<double> miou_clusters(const MatchCounts& clustering);
std::optional<double> miou_clusters(const ClusterMap& pred_clusters, const ClusterMap& gt_segments);

struct ScoredPixelSample {
  double anomaly_score = 0.0;
  bool is_unknown_gt = false;
};

// Pixels with ground truth N are positives, known classes negatives, void is
// skipped.
void collect_samples(const Grid<float>& anomaly, const SemanticMap& gt,
                     std::vector<ScoredPixelSample>& out);

// Probability that a random unknown sample outranks a random known one, ties
// counting one half.
std::optional<double> auroc(std::span<const ScoredPixelSample> samples);

// Average precision with unknown as positive class: sum over descending
// distinct thresholds of (recall step) x precision.
std::optional<double> aupr(std::span<const ScoredPixelSample> samples);

// False positive rate at the strictest threshold whose TPR reaches 0.95.
std::optional<double> fpr_at_95_tpr(std::span<const ScoredPixelSample> samples);

struct RankingMetrics {
  std::optional<double> auroc;
  std::optional<double> aupr;
  std::optional<double> fpr_at_95_tpr;
};

RankingMetrics ranking_metrics(std::span<const ScoredPixelSample> samples);

}  // namespace goss

#endif  // GOSS_METRICS_H_
