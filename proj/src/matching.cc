#include "goss/matching.h"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>

namespace goss {
namespace {

SegmentSet build_segment_set(int height, int width, const std::map<SegmentKey, std::uint32_t>& areas,
                             auto&& key_of) {
  SegmentSet set;
  set.index = Grid<std::int32_t>(height, width, -1);
  std::map<SegmentKey, std::int32_t> slot;
  for (const auto& [key, count] : areas) {
    slot.emplace(key, static_cast<std::int32_t>(set.segments.size()));
    set.segments.push_back({key, count});
  }
  for (std::size_t i = 0; i < set.index.size(); ++i) {
    if (auto key = key_of(i)) set.index[i] = slot.at(*key);
  }
  return set;
}

bool same_category(const SegmentKey& a, const SegmentKey& b) {
  if (a.kind != b.kind) return false;
  return a.kind == SegmentKind::kUnknown || a.id == b.id;
}

void require_shape(const SegmentSet& pred, const SegmentSet& gt, const PixelMask& void_pixels) {
  if (!pred.index.same_shape(gt.index) || !void_pixels.same_shape(gt.index)) {
    throw ValidationError("prediction, ground truth and void mask differ in shape");
  }
}

}  // namespace

SegmentSet extract_segments(const GossMap& map) {
  const LabelId unknown = map.unknown_id();
  auto key_of = [&](std::size_t i) -> std::optional<SegmentKey> {
    const GossPair p = map[i];
    if (p.cls < unknown) return SegmentKey{SegmentKind::kKnown, p.cls};
    if (p.cls == unknown && p.cluster != kVoid) return SegmentKey{SegmentKind::kUnknown, p.cluster};
    return std::nullopt;
  };
  std::map<SegmentKey, std::uint32_t> areas;
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (auto key = key_of(i)) ++areas[*key];
  }
  return build_segment_set(map.height(), map.width(), areas, key_of);
}

SegmentSet segments_from_clusters(const ClusterMap& clusters) {
  auto key_of = [&](std::size_t i) -> std::optional<SegmentKey> {
    if (clusters[i] == kVoid) return std::nullopt;
    return SegmentKey{SegmentKind::kUnknown, clusters[i]};
  };
  std::map<SegmentKey, std::uint32_t> areas;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (auto key = key_of(i)) ++areas[*key];
  }
  return build_segment_set(clusters.height(), clusters.width(), areas, key_of);
}

PixelMask void_mask(const GossMap& gt) {
  PixelMask mask(gt.height(), gt.width(), 0);
  for (std::size_t i = 0; i < gt.size(); ++i) mask[i] = gt[i].cls == kVoid ? 1 : 0;
  return mask;
}

PixelMask segment_mask(const SegmentSet& set, std::size_t segment) {
  PixelMask mask(set.index.height(), set.index.width(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = set.index[i] == static_cast<std::int32_t>(segment) ? 1 : 0;
  }
  return mask;
}

double iou(const PixelMask& a, const PixelMask& b, const PixelMask& void_pixels) {
  if (!a.same_shape(b) || !a.same_shape(void_pixels)) {
    throw ValidationError("iou operands differ in shape");
  }
  std::uint64_t inter = 0;
  std::uint64_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (void_pixels[i]) continue;
    inter += (a[i] && b[i]) ? 1 : 0;
    uni += (a[i] || b[i]) ? 1 : 0;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

MatchCounts& MatchCounts::operator+=(const MatchCounts& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  iou_sum += other.iou_sum;
  return *this;
}

MatchResult match_segments(const SegmentSet& pred, const SegmentSet& gt,
                           const PixelMask& void_pixels) {
  require_shape(pred, gt, void_pixels);
  const std::size_t np = pred.segments.size();
  const std::size_t ng = gt.segments.size();

  std::vector<std::uint64_t> pred_area(np, 0);
  std::vector<std::uint64_t> pred_void(np, 0);
  std::vector<std::uint64_t> gt_area(ng, 0);
  std::unordered_map<std::uint64_t, std::uint64_t> intersections;
  for (std::size_t i = 0; i < void_pixels.size(); ++i) {
    const std::int32_t p = pred.index[i];
    const std::int32_t g = gt.index[i];
    if (void_pixels[i]) {
      if (p >= 0) ++pred_void[static_cast<std::size_t>(p)];
      continue;
    }
    if (p >= 0) ++pred_area[static_cast<std::size_t>(p)];
    if (g >= 0) ++gt_area[static_cast<std::size_t>(g)];
    if (p >= 0 && g >= 0 &&
        same_category(pred.segments[static_cast<std::size_t>(p)].key,
                      gt.segments[static_cast<std::size_t>(g)].key)) {
      ++intersections[(static_cast<std::uint64_t>(p) << 32) | static_cast<std::uint32_t>(g)];
    }
  }

  struct Candidate {
    std::size_t pred;
    std::size_t gt;
    std::uint64_t inter;
    std::uint64_t uni;
  };
  std::vector<Candidate> candidates;
  for (const auto& [packed, inter] : intersections) {
    const auto p = static_cast<std::size_t>(packed >> 32);
    const auto g = static_cast<std::size_t>(packed & 0xffffffffu);
    const std::uint64_t uni = pred_area[p] + gt_area[g] - inter;
    if (2 * inter > uni) candidates.push_back({p, g, inter, uni});
  }
  // Highest IoU first; ties by index. With the > 0.5 rule no candidate ever
  // conflicts with another, the ordering only fixes the output sequence.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    const auto lhs = static_cast<unsigned __int128>(a.inter) * b.uni;
    const auto rhs = static_cast<unsigned __int128>(b.inter) * a.uni;
    if (lhs != rhs) return lhs > rhs;
    return std::tie(a.pred, a.gt) < std::tie(b.pred, b.gt);
  });

  MatchResult result;
  std::vector<bool> pred_used(np, false);
  std::vector<bool> gt_used(ng, false);
  for (const Candidate& c : candidates) {
    if (pred_used[c.pred] || gt_used[c.gt]) continue;
    pred_used[c.pred] = true;
    gt_used[c.gt] = true;
    result.matches.push_back(
        {c.pred, c.gt, static_cast<double>(c.inter) / static_cast<double>(c.uni)});
  }
  std::sort(result.matches.begin(), result.matches.end(),
            [](const SegmentMatch& a, const SegmentMatch& b) { return a.pred < b.pred; });

  for (std::size_t p = 0; p < np; ++p) {
    if (pred_used[p]) continue;
    const std::uint64_t total = pred_area[p] + pred_void[p];
    if (2 * pred_void[p] > total) {
      result.ignored_pred.push_back(p);
    } else {
      result.unmatched_pred.push_back(p);
    }
  }
  for (std::size_t g = 0; g < ng; ++g) {
    if (!gt_used[g]) result.unmatched_gt.push_back(g);
  }
  return result;
}

MatchAccumulator::MatchAccumulator(int num_known) : num_known_(num_known) {
  validate_num_known(num_known);
  known_.resize(static_cast<std::size_t>(num_known));
}

MatchCounts& MatchAccumulator::bucket(const SegmentKey& key) {
  if (key.kind == SegmentKind::kUnknown) return unknown_;
  if (key.id >= num_known_) {
    throw ValidationError("segment class " + std::to_string(key.id) + " outside N=" +
                          std::to_string(num_known_));
  }
  return known_[key.id];
}

void MatchAccumulator::add(const SegmentSet& pred, const SegmentSet& gt, const MatchResult& result) {
  for (const SegmentMatch& m : result.matches) {
    MatchCounts& b = bucket(gt.segments[m.gt].key);
    ++b.tp;
    b.iou_sum += m.iou;
  }
  for (std::size_t p : result.unmatched_pred) ++bucket(pred.segments[p].key).fp;
  for (std::size_t g : result.unmatched_gt) ++bucket(gt.segments[g].key).fn;
}

void MatchAccumulator::merge(const MatchAccumulator& other) {
  if (other.num_known_ != num_known_) {
    throw ValidationError("cannot merge accumulators with N=" + std::to_string(num_known_) +
                          " and N=" + std::to_string(other.num_known_));
  }
  for (std::size_t k = 0; k < known_.size(); ++k) known_[k] += other.known_[k];
  unknown_ += other.unknown_;
}

MatchAccumulator merge(MatchAccumulator a, const MatchAccumulator& b) {
  a.merge(b);
  return a;
}

MatchAccumulator match_images(const GossMap& pred, const GossMap& gt) {
  if (pred.num_known() != gt.num_known()) {
    throw ValidationError("prediction N=" + std::to_string(pred.num_known()) +
                          " differs from ground truth N=" + std::to_string(gt.num_known()));
  }
  if (!pred.classes().same_shape(gt.classes())) {
    throw ValidationError("prediction and ground truth differ in shape");
  }
  const SegmentSet pred_segments = extract_segments(pred);
  const SegmentSet gt_segments = extract_segments(gt);
  const MatchResult result = match_segments(pred_segments, gt_segments, void_mask(gt));
  MatchAccumulator acc(gt.num_known());
  acc.add(pred_segments, gt_segments, result);
  return acc;
}

MatchCounts match_cluster_maps(const ClusterMap& pred, const ClusterMap& gt,
                               const PixelMask& void_pixels) {
  const SegmentSet pred_segments = segments_from_clusters(pred);
  const SegmentSet gt_segments = segments_from_clusters(gt);
  const MatchResult result = match_segments(pred_segments, gt_segments, void_pixels);
  MatchCounts counts;
  counts.tp = result.matches.size();
  for (const SegmentMatch& m : result.matches) counts.iou_sum += m.iou;
  counts.fp = result.unmatched_pred.size();
  counts.fn = result.unmatched_gt.size();
  return counts;
}

}  // namespace goss
