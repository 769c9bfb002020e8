// Temporary directories and synthetic on-disk datasets for the command-level
// tests.

#ifndef GOSS_TESTS_FIXTURES_H_
#define GOSS_TESTS_FIXTURES_H_

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

#include "goss/commands.h"
#include "goss/metrics.h"
#include "goss/tensorio.h"
#include "oracles.h"

namespace goss::testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "goss") {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string read_bytes(const fs::path& path) { return read_text_file(path); }

inline void write_goss_dir(const GossMap& map, const fs::path& dir, const std::string& stem) {
  fs::create_directories(dir / kSemanticDir);
  fs::create_directories(dir / kClustersDir);
  write_label_map(map.classes(), dir / kSemanticDir / (stem + ".png"));
  write_label_map(map.clusters(), dir / kClustersDir / (stem + ".png"));
}

// Prediction derived from a ground truth by relabelling a random rectangle
// and shifting cluster ids.
inline GossMap perturb(std::mt19937& rng, const GossMap& gt) {
  Grid<LabelId> cls = gt.classes();
  Grid<LabelId> clu = gt.clusters();
  const int h = gt.height();
  const int w = gt.width();
  std::uniform_int_distribution<int> rr(0, h - 1);
  std::uniform_int_distribution<int> rc(0, w - 1);
  int r0 = rr(rng), r1 = rr(rng), c0 = rc(rng), c1 = rc(rng);
  if (r0 > r1) std::swap(r0, r1);
  if (c0 > c1) std::swap(c0, c1);
  const bool unknown = std::bernoulli_distribution(0.5)(rng);
  const auto k = static_cast<LabelId>(std::uniform_int_distribution<int>(0, gt.num_known() - 1)(rng));
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      cls[i] = unknown ? gt.unknown_id() : k;
      clu[i] = unknown ? 40 : kVoid;
    }
  }
  // Void in the ground truth is unconstrained in the prediction.
  for (std::size_t i = 0; i < cls.size(); ++i) {
    if (cls[i] == kVoid) {
      cls[i] = 0;
      clu[i] = kVoid;
    } else if (clu[i] != kVoid) {
      clu[i] = static_cast<LabelId>(clu[i] + 3);
    }
  }
  return GossMap(gt.num_known(), std::move(cls), std::move(clu));
}

// Writes gt/, pred/, raw/ (whole-image clusters) and anomaly/ under `root`.
inline void write_synthetic_dataset(const fs::path& root, std::uint32_t seed, int images,
                                    int num_known, int h, int w) {
  std::mt19937 rng(seed);
  fs::create_directories(root / "raw");
  fs::create_directories(root / "anomaly");
  for (int i = 0; i < images; ++i) {
    char stem[32];
    std::snprintf(stem, sizeof(stem), "img_%04d", i);
    const GossMap gt = random_goss_map(rng, h, w, num_known, 5, true);
    const GossMap pred = perturb(rng, gt);
    write_goss_dir(gt, root / "gt", stem);
    write_goss_dir(pred, root / "pred", stem);

    // Whole-image clustering: class-agnostic ground truth, with one stripe
    // merged into its neighbour.
    ClusterMap raw = class_agnostic_segments(gt, Connectivity::kFour);
    for (std::size_t p = 0; p < raw.size(); ++p) {
      if (raw[p] == kVoid) raw[p] = 60000;
      if (p % static_cast<std::size_t>(w) == 0) raw[p] = 1;
    }
    write_label_map(raw, root / "raw" / (std::string(stem) + ".png"));

    AnomalyMap anomaly(h, w, 0.0f);
    std::normal_distribution<float> noise(0.0f, 0.3f);
    for (std::size_t p = 0; p < anomaly.size(); ++p) {
      anomaly[p] = (gt[p].cls == gt.unknown_id() ? 1.0f : 0.0f) + noise(rng);
    }
    write_score_volume(anomaly_to_volume(anomaly), root / "anomaly" / (std::string(stem) + ".gsv"));
  }
}

}  // namespace goss::testing

#endif  // GOSS_TESTS_FIXTURES_H_
