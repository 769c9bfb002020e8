#include "goss/fuse.h"

#include <algorithm>
#include <string>

namespace goss {

ClusterMap mask_clusters(const ClusterMap& clusters, const SemanticMap& s_ide) {
  if (!clusters.same_shape(s_ide.labels())) {
    throw ValidationError("cluster map and identified map differ in shape");
  }
  ClusterMap out(clusters.height(), clusters.width(), kVoid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (s_ide.is_unknown(i)) out[i] = clusters[i];
  }
  return out;
}

GossMap fuse(const SemanticMap& s_ide, const ClusterMap& g_uk, const FuseOptions& options) {
  ClusterMap clusters = mask_clusters(g_uk, s_ide);
  if (options.split_masked_clusters) {
    clusters = split_clusters(clusters, options.connectivity).ids;
  }

  std::vector<std::uint32_t> uncovered;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (!s_ide.is_unknown(i) || clusters[i] != kVoid) continue;
    if (!options.singleton_fallback) {
      throw ValidationError("unknown pixel (" + std::to_string(i / clusters.width()) + ", " +
                            std::to_string(i % clusters.width()) + ") has no cluster id");
    }
    if (uncovered.empty()) uncovered.assign(clusters.size(), 0);
    uncovered[i] = 1;
  }

  if (!uncovered.empty()) {
    int next = 0;
    for (LabelId id : clusters.values()) {
      if (id != kVoid) next = std::max(next, static_cast<int>(id) + 1);
    }
    const ComponentLabels extra =
        label_components(uncovered, clusters.height(), clusters.width(), 0, options.connectivity);
    if (next + extra.count >= kVoid) {
      throw ValidationError("fallback clusters exceed the 16-bit id range");
    }
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      if (extra.ids[i] != kVoid) clusters[i] = static_cast<LabelId>(next + extra.ids[i]);
    }
  }

  return GossMap(s_ide.num_known(), s_ide.labels(), std::move(clusters));
}

}  // namespace goss
