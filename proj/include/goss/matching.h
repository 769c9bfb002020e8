#ifndef GOSS_MATCHING_H_
#define GOSS_MATCHING_H_

// Segment extraction and IoU > 0.5 segment matching.
//
// A segment is the union of all pixels of one known class, or of one unknown
// cluster id. Predicted and ground-truth segments are matched only within the
// same known class or within the unknown pool. Because two segments can only
// reach IoU > 0.5 with each other if they overlap by more than half of their
// union, every segment takes part in at most one such pair and the greedy
// assignment is already the optimal one.
//
// Void handling: pixels on ground-truth void are excluded from every
// intersection and union, and an unmatched predicted segment lying more than
// half on void is dropped rather than counted as a false positive.

#include <cstdint>
#include <vector>

#include "goss/core.h"

namespace goss {

using PixelMask = Grid<std::uint8_t>;

enum class SegmentKind : std::uint8_t { kKnown, kUnknown };

struct SegmentKey {
  SegmentKind kind = SegmentKind::kKnown;
  // Class index for known segments, cluster id for unknown ones.
  LabelId id = 0;
  friend auto operator<=>(const SegmentKey&, const SegmentKey&) = default;
};

struct Segment {
  SegmentKey key;
  std::uint32_t pixel_count = 0;
};

// Segments plus the segment index of every pixel (-1 for none).
struct SegmentSet {
  std::vector<Segment> segments;
  Grid<std::int32_t> index;
};

// Known segments in class order followed by unknown segments in cluster-id
// order. Void pixels belong to no segment.
SegmentSet extract_segments(const GossMap& map);

// Every non-void cluster id becomes an unknown-kind segment (class-agnostic
// pool).
SegmentSet segments_from_clusters(const ClusterMap& clusters);

PixelMask void_mask(const GossMap& gt);
PixelMask segment_mask(const SegmentSet& set, std::size_t segment);

// |a ∩ b \ void| / |a ∪ b \ void|; 0 when the union is empty.
double iou(const PixelMask& a, const PixelMask& b, const PixelMask& void_pixels);

struct MatchCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  double iou_sum = 0.0;

  MatchCounts& operator+=(const MatchCounts& other);
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

struct SegmentMatch {
  std::size_t pred = 0;
  std::size_t gt = 0;
  double iou = 0.0;
};

struct MatchResult {
  std::vector<SegmentMatch> matches;
  // Unmatched predictions lying mostly on void, excluded from FP counting.
  std::vector<std::size_t> ignored_pred;
  std::vector<std::size_t> unmatched_pred;
  std::vector<std::size_t> unmatched_gt;
};

// Pairs segments of the same key kind (and same class for known segments)
// whose IoU exceeds 0.5. Matches are sorted by predicted index.
MatchResult match_segments(const SegmentSet& pred, const SegmentSet& gt,
                           const PixelMask& void_pixels);

class MatchAccumulator {
 public:
  explicit MatchAccumulator(int num_known);

  int num_known() const { return num_known_; }
  const MatchCounts& known(int k) const { return known_.at(static_cast<std::size_t>(k)); }
  const MatchCounts& unknown() const { return unknown_; }

  // Adds the outcome of one image.
  void add(const SegmentSet& pred, const SegmentSet& gt, const MatchResult& result);
  void merge(const MatchAccumulator& other);

  friend bool operator==(const MatchAccumulator&, const MatchAccumulator&) = default;

 private:
  MatchCounts& bucket(const SegmentKey& key);

  int num_known_;
  std::vector<MatchCounts> known_;
  MatchCounts unknown_;
};

MatchAccumulator merge(MatchAccumulator a, const MatchAccumulator& b);

// Matches one predicted GOSS map against its ground truth.
MatchAccumulator match_images(const GossMap& pred, const GossMap& gt);

// Single-pool matching of class-agnostic segmentations.
MatchCounts match_cluster_maps(const ClusterMap& pred, const ClusterMap& gt,
                               const PixelMask& void_pixels);

}  // namespace goss

#endif  // GOSS_MATCHING_H_
