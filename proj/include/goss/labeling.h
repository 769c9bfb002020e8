#ifndef GOSS_LABELING_H_
#define GOSS_LABELING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "goss/core.h"

namespace goss {

enum class Connectivity { kFour = 4, kEight = 8 };

Connectivity connectivity_from_int(int value);

struct ComponentLabels {
  // Component id per pixel (0..count-1), kVoid for ignored or filtered pixels.
  ClusterMap ids;
  int count = 0;
};

// Connected components over pixels sharing the same key. Pixels whose key
// equals `ignore` are left void. Components smaller than `min_area` pixels are
// dropped to void. Ids are assigned in raster-scan first-touch order.
ComponentLabels label_components(std::span<const std::uint32_t> keys, int height, int width,
                                 std::uint32_t ignore, Connectivity connectivity,
                                 int min_area = 0);

// Splits every cluster of `clusters` into its connected pieces.
ComponentLabels split_clusters(const ClusterMap& clusters, Connectivity connectivity);

}  // namespace goss

#endif  // GOSS_LABELING_H_
