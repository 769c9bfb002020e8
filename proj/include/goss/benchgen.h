#ifndef GOSS_BENCHGEN_H_
#define GOSS_BENCHGEN_H_

// Conversion of ordinary semantic annotations into open-set ground truth.

#include "goss/core.h"
#include "goss/labeling.h"

namespace goss {

enum class SplitMode { kTrain, kTest };

enum class DatasetStyle {
  // Images are selected by content (COCO-Stuff style).
  kFilter,
  // Every image is kept (Cityscapes style).
  kKeepAll,
};

struct SplitPolicy {
  SplitMode mode = SplitMode::kTest;
  DatasetStyle style = DatasetStyle::kFilter;
};

// Known ids map to their position in split.known. Unknown ids map to N in
// test mode and to void in train mode. Original void stays void.
SemanticMap remap_semantic(const LabelImage& gt, const ClassSplit& split, const SplitPolicy& policy);

// Connected components of same-original-class unknown pixels. Components of
// different unknown classes never merge. Components below `min_area` become
// void.
ClusterMap connectivity_label(const LabelImage& gt, const ClassSplit& split,
                              Connectivity connectivity, int min_area = 0);

// train/filter: no unknown pixel; test/filter: at least one unknown pixel;
// keep-all: always.
bool admit_image(const LabelImage& gt, const ClassSplit& split, const SplitPolicy& policy);

// Test-mode ground truth. Unknown pixels dropped by the area filter become
// (void, void).
GossMap build_goss_gt(const LabelImage& gt, const ClassSplit& split, Connectivity connectivity,
                      int min_area = 0);

}  // namespace goss

#endif  // GOSS_BENCHGEN_H_
