#ifndef GOSS_FUSE_H_
#define GOSS_FUSE_H_

#include "goss/core.h"
#include "goss/labeling.h"

namespace goss {

struct FuseOptions {
  // Re-split every masked cluster into its connected pieces before fusing.
  bool split_masked_clusters = false;
  // Give unknown pixels without a cluster id fresh ids, one per connected
  // uncovered region, instead of failing.
  bool singleton_fallback = false;
  Connectivity connectivity = Connectivity::kFour;
};

// Keeps cluster ids only where s_ide marks the pixel unknown.
ClusterMap mask_clusters(const ClusterMap& clusters, const SemanticMap& s_ide);

// (class, void) on known pixels, (N, cluster) on unknown pixels, (void, void)
// on void pixels. Clusters on non-unknown pixels are discarded.
GossMap fuse(const SemanticMap& s_ide, const ClusterMap& g_uk, const FuseOptions& options = {});

}  // namespace goss

#endif  // GOSS_FUSE_H_
