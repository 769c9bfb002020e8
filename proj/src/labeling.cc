#include "goss/labeling.h"

#include <numeric>
#include <string>

namespace goss {

Connectivity connectivity_from_int(int value) {
  if (value == 4) return Connectivity::kFour;
  if (value == 8) return Connectivity::kEight;
  throw ValidationError("connectivity must be 4 or 8, got " + std::to_string(value));
}

namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0u); }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Smaller index stays root so roots are stable across runs.
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }

 private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace

ComponentLabels label_components(std::span<const std::uint32_t> keys, int height, int width,
                                 std::uint32_t ignore, Connectivity connectivity, int min_area) {
  ClusterMap ids(height, width, kVoid);
  if (keys.size() != ids.size()) {
    throw ValidationError("key buffer does not match the grid size");
  }
  const auto w = static_cast<std::size_t>(width);
  DisjointSet sets(keys.size());

  // Backward neighbours only: west, north, and for 8-connectivity north-west
  // and north-east.
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + static_cast<std::size_t>(c);
      const std::uint32_t key = keys[i];
      if (key == ignore) continue;
      auto join = [&](std::size_t j) {
        if (keys[j] == key) sets.unite(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      };
      if (c > 0) join(i - 1);
      if (r > 0) {
        join(i - w);
        if (connectivity == Connectivity::kEight) {
          if (c > 0) join(i - w - 1);
          if (c + 1 < width) join(i - w + 1);
        }
      }
    }
  }

  std::vector<std::uint32_t> area;
  if (min_area > 1) {
    area.assign(keys.size(), 0);
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (keys[i] != ignore) ++area[sets.find(static_cast<std::uint32_t>(i))];
    }
  }

  constexpr std::uint32_t kUnassigned = 0xffffffffu;
  std::vector<std::uint32_t> root_to_id(keys.size(), kUnassigned);
  std::uint32_t next = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] == ignore) continue;
    const std::uint32_t root = sets.find(static_cast<std::uint32_t>(i));
    if (!area.empty() && area[root] < static_cast<std::uint32_t>(min_area)) continue;
    if (root_to_id[root] == kUnassigned) {
      if (next >= kVoid) throw ValidationError("more than 65534 components in one image");
      root_to_id[root] = next++;
    }
    ids[i] = static_cast<LabelId>(root_to_id[root]);
  }
  return {std::move(ids), static_cast<int>(next)};
}

ComponentLabels split_clusters(const ClusterMap& clusters, Connectivity connectivity) {
  std::vector<std::uint32_t> keys(clusters.values().begin(), clusters.values().end());
  return label_components(keys, clusters.height(), clusters.width(), kVoid, connectivity);
}

}  // namespace goss
