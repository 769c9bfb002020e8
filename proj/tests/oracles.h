// Independent reference implementations and random generators shared by the
// unit and acceptance suites. Nothing here calls into the code paths it is
// used to check.

#ifndef GOSS_TESTS_ORACLES_H_
#define GOSS_TESTS_ORACLES_H_

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "goss/core.h"
#include "goss/metrics.h"

namespace goss::testing {

// Breadth-first flood fill over equal keys. Returns one label per pixel, -1
// for ignored pixels.
inline std::vector<int> flood_fill_labels(const std::vector<std::uint32_t>& keys, int h, int w,
                                          std::uint32_t ignore, int connectivity) {
  std::vector<int> labels(keys.size(), -1);
  int next = 0;
  std::vector<std::pair<int, int>> offsets = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  if (connectivity == 8) {
    offsets.insert(offsets.end(), {{-1, -1}, {-1, 1}, {1, -1}, {1, 1}});
  }
  for (int start = 0; start < h * w; ++start) {
    if (keys[start] == ignore || labels[start] >= 0) continue;
    std::deque<int> queue{start};
    labels[start] = next;
    while (!queue.empty()) {
      const int p = queue.front();
      queue.pop_front();
      const int r = p / w;
      const int c = p % w;
      for (auto [dr, dc] : offsets) {
        const int rr = r + dr;
        const int cc = c + dc;
        if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
        const int q = rr * w + cc;
        if (labels[q] < 0 && keys[q] == keys[start]) {
          labels[q] = next;
          queue.push_back(q);
        }
      }
    }
    ++next;
  }
  return labels;
}

// Void as -1, everything else as its id.
inline std::vector<long> as_labels(const Grid<LabelId>& ids) {
  std::vector<long> out;
  for (LabelId v : ids.values()) out.push_back(v == kVoid ? -1 : static_cast<long>(v));
  return out;
}

inline std::vector<long> as_labels(const std::vector<int>& ids) {
  return std::vector<long>(ids.begin(), ids.end());
}

// True iff both labelings induce the same partition and agree on which
// pixels are void (-1).
inline bool same_partition(const std::vector<long>& a, const std::vector<long>& b) {
  if (a.size() != b.size()) return false;
  std::map<long, long> fwd;
  std::map<long, long> bwd;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] < 0) != (b[i] < 0)) return false;
    if (a[i] < 0) continue;
    auto [it, fresh] = fwd.emplace(a[i], b[i]);
    if (!fresh && it->second != b[i]) return false;
    auto [jt, fresh_b] = bwd.emplace(b[i], a[i]);
    if (!fresh_b && jt->second != a[i]) return false;
  }
  return true;
}

// Per-pixel boolean masks for one segmentation side.
struct MaskSegment {
  int category;  // known class k, or -1 for the unknown pool
  int cluster;   // cluster id in the unknown pool, -1 for known segments
  std::vector<std::uint8_t> mask;
};

inline std::vector<MaskSegment> mask_segments(const GossMap& map) {
  std::map<std::pair<int, int>, std::vector<std::uint8_t>> by_key;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const GossPair p = map[i];
    std::pair<int, int> key;
    if (p.cls < map.num_known()) {
      key = {p.cls, -1};
    } else if (p.cls == map.num_known() && p.cluster != kVoid) {
      key = {-1, p.cluster};
    } else {
      continue;
    }
    auto& m = by_key[key];
    if (m.empty()) m.assign(map.size(), 0);
    m[i] = 1;
  }
  std::vector<MaskSegment> out;
  for (auto& [key, mask] : by_key) out.push_back({key.first, key.second, std::move(mask)});
  return out;
}

inline double mask_iou(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b,
                       const std::vector<std::uint8_t>& void_pixels) {
  long inter = 0;
  long uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (void_pixels[i]) continue;
    inter += a[i] && b[i];
    uni += a[i] || b[i];
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

struct OptimalMatching {
  int matched = 0;
  double iou_sum = 0.0;
  // Best assignment: gt index per pred index, -1 if unmatched.
  std::vector<int> assignment;
  // Largest number of IoU > 0.5 partners any single segment has.
  int max_partners = 0;
};

// Exhaustive search over every one-to-one assignment of same-category pairs
// with IoU > 0.5, maximizing the number of matches and then the IoU sum.
inline OptimalMatching brute_force_matching(const std::vector<MaskSegment>& pred,
                                            const std::vector<MaskSegment>& gt,
                                            const std::vector<std::uint8_t>& void_pixels) {
  const std::size_t np = pred.size();
  const std::size_t ng = gt.size();
  std::vector<std::vector<double>> w(np, std::vector<double>(ng, -1.0));
  OptimalMatching best;
  std::vector<int> gt_partners(ng, 0);
  for (std::size_t p = 0; p < np; ++p) {
    int partners = 0;
    for (std::size_t g = 0; g < ng; ++g) {
      if (pred[p].category != gt[g].category) continue;
      const double v = mask_iou(pred[p].mask, gt[g].mask, void_pixels);
      if (v > 0.5) {
        w[p][g] = v;
        ++partners;
        ++gt_partners[g];
      }
    }
    best.max_partners = std::max(best.max_partners, partners);
  }
  for (int c : gt_partners) best.max_partners = std::max(best.max_partners, c);

  std::vector<int> current(np, -1);
  std::vector<bool> used(ng, false);
  best.assignment = current;
  std::function<void(std::size_t, int, double)> search = [&](std::size_t p, int matched,
                                                              double sum) {
    if (p == np) {
      if (matched > best.matched || (matched == best.matched && sum > best.iou_sum + 1e-15)) {
        best.matched = matched;
        best.iou_sum = sum;
        best.assignment = current;
      }
      return;
    }
    search(p + 1, matched, sum);
    for (std::size_t g = 0; g < ng; ++g) {
      if (used[g] || w[p][g] < 0.0) continue;
      used[g] = true;
      current[p] = static_cast<int>(g);
      search(p + 1, matched + 1, sum + w[p][g]);
      current[p] = -1;
      used[g] = false;
    }
  };
  search(0, 0, 0.0);
  return best;
}

// ROC curve over every distinct threshold, integrated with trapezoids.
inline double trapezoid_auroc(const std::vector<ScoredPixelSample>& samples) {
  std::vector<double> thresholds;
  long pos = 0;
  long neg = 0;
  for (const auto& s : samples) {
    thresholds.push_back(s.anomaly_score);
    (s.is_unknown_gt ? pos : neg) += 1;
  }
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  double area = 0.0;
  double prev_tpr = 0.0;
  double prev_fpr = 0.0;
  for (double t : thresholds) {
    long tp = 0;
    long fp = 0;
    for (const auto& s : samples) {
      if (s.anomaly_score >= t) (s.is_unknown_gt ? tp : fp) += 1;
    }
    const double tpr = static_cast<double>(tp) / pos;
    const double fpr = static_cast<double>(fp) / neg;
    area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
    prev_tpr = tpr;
    prev_fpr = fpr;
  }
  return area;
}

// Mann-Whitney statistic by direct comparison of every pair.
inline double pairwise_auroc(const std::vector<ScoredPixelSample>& samples) {
  double wins = 0.0;
  long pairs = 0;
  for (const auto& a : samples) {
    if (!a.is_unknown_gt) continue;
    for (const auto& b : samples) {
      if (b.is_unknown_gt) continue;
      ++pairs;
      if (a.anomaly_score > b.anomaly_score) wins += 1.0;
      if (a.anomaly_score == b.anomaly_score) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

struct ThresholdPoint {
  long tp = 0;
  long fp = 0;
};

// Confusion counts at every distinct threshold (score >= t predicted unknown),
// strictest first, each counted from scratch.
inline std::vector<ThresholdPoint> enumerate_thresholds(const std::vector<ScoredPixelSample>& samples) {
  std::vector<double> thresholds;
  for (const auto& s : samples) thresholds.push_back(s.anomaly_score);
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  std::vector<ThresholdPoint> points;
  for (double t : thresholds) {
    ThresholdPoint pt;
    for (const auto& s : samples) {
      if (s.anomaly_score >= t) (s.is_unknown_gt ? pt.tp : pt.fp) += 1;
    }
    points.push_back(pt);
  }
  return points;
}

inline double enumerated_aupr(const std::vector<ScoredPixelSample>& samples) {
  long pos = 0;
  for (const auto& s : samples) pos += s.is_unknown_gt;
  double area = 0.0;
  long prev_tp = 0;
  for (const ThresholdPoint& pt : enumerate_thresholds(samples)) {
    if (pt.tp > prev_tp) {
      const double precision = static_cast<double>(pt.tp) / static_cast<double>(pt.tp + pt.fp);
      area += static_cast<double>(pt.tp - prev_tp) / static_cast<double>(pos) * precision;
    }
    prev_tp = pt.tp;
  }
  return area;
}

inline double enumerated_fpr95(const std::vector<ScoredPixelSample>& samples) {
  long pos = 0;
  long neg = 0;
  for (const auto& s : samples) (s.is_unknown_gt ? pos : neg) += 1;
  double best = 1.0;
  for (const ThresholdPoint& pt : enumerate_thresholds(samples)) {
    if (static_cast<double>(pt.tp) / static_cast<double>(pos) >= 0.95) {
      best = std::min(best, static_cast<double>(pt.fp) / static_cast<double>(neg));
    }
  }
  return best;
}

// Random GOSS map built from overlapping rectangles: known classes first,
// then min_clusters..max_clusters unknown clusters, optionally a void patch.
// Later rectangles can fully cover earlier clusters.
inline GossMap random_goss_map(std::mt19937& rng, int h, int w, int num_known, int max_clusters,
                               bool with_void, int min_clusters = 0) {
  std::uniform_int_distribution<int> cls(0, num_known - 1);
  Grid<LabelId> classes(h, w, static_cast<LabelId>(cls(rng)));
  Grid<LabelId> clusters(h, w, kVoid);
  auto rect = [&](auto&& paint) {
    std::uniform_int_distribution<int> rr(0, h - 1);
    std::uniform_int_distribution<int> rc(0, w - 1);
    int r0 = rr(rng), r1 = rr(rng), c0 = rc(rng), c1 = rc(rng);
    if (r0 > r1) std::swap(r0, r1);
    if (c0 > c1) std::swap(c0, c1);
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) paint(static_cast<std::size_t>(r) * w + c);
    }
  };
  const int known_rects = std::uniform_int_distribution<int>(0, 6)(rng);
  for (int i = 0; i < known_rects; ++i) {
    const auto k = static_cast<LabelId>(cls(rng));
    rect([&](std::size_t p) { classes[p] = k; });
  }
  const int n_clusters = std::uniform_int_distribution<int>(min_clusters, max_clusters)(rng);
  for (int c = 0; c < n_clusters; ++c) {
    rect([&](std::size_t p) {
      classes[p] = static_cast<LabelId>(num_known);
      clusters[p] = static_cast<LabelId>(c);
    });
  }
  if (with_void && std::bernoulli_distribution(0.5)(rng)) {
    rect([&](std::size_t p) {
      classes[p] = kVoid;
      clusters[p] = kVoid;
    });
  }
  return GossMap(num_known, std::move(classes), std::move(clusters));
}

inline std::vector<ScoredPixelSample> random_samples(std::mt19937& rng, int max_count) {
  const int n = std::uniform_int_distribution<int>(2, max_count)(rng);
  // Coarse score grid so ties are frequent.
  const int levels = std::uniform_int_distribution<int>(2, 40)(rng);
  std::uniform_int_distribution<int> level(0, levels - 1);
  std::bernoulli_distribution positive(std::uniform_real_distribution<double>(0.1, 0.9)(rng));
  std::vector<ScoredPixelSample> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({static_cast<double>(level(rng)) / levels, positive(rng)});
  }
  out[0].is_unknown_gt = true;
  out[1].is_unknown_gt = false;
  return out;
}

}  // namespace goss::testing

#endif  // GOSS_TESTS_ORACLES_H_
