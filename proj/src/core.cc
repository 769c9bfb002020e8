#include "goss/core.h"

#include <cmath>
#include <limits>
#include <unordered_set>

namespace goss {

void validate_num_known(int num_known) {
  if (num_known < 1 || num_known >= kVoid) {
    throw ValidationError("class count N must be in [1, 65534], got " + std::to_string(num_known));
  }
}

namespace {

void validate_classes(int num_known, const Grid<LabelId>& labels) {
  validate_num_known(num_known);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const LabelId v = labels[i];
    if (v > num_known && v != kVoid) {
      throw ValidationError("class id " + std::to_string(v) + " at pixel " + std::to_string(i) +
                            " exceeds unknown id " + std::to_string(num_known));
    }
  }
}

}  // namespace

SemanticMap::SemanticMap(int num_known, Grid<LabelId> labels)
    : num_known_(num_known), labels_(std::move(labels)) {
  validate_classes(num_known_, labels_);
}

SemanticMap::SemanticMap(int num_known, int height, int width, LabelId fill)
    : SemanticMap(num_known, Grid<LabelId>(height, width, fill)) {}

ScoreVolume::ScoreVolume(int channels, int height, int width, std::vector<float> data,
                         bool softmax)
    : channels_(channels), height_(height), width_(width), data_(std::move(data)),
      softmax_(softmax) {
  if (channels < 1 || height < 1 || width < 1) {
    throw ValidationError("score volume dimensions must be positive");
  }
  const auto expected = static_cast<std::size_t>(channels) * static_cast<std::size_t>(height) *
                        static_cast<std::size_t>(width);
  if (data_.size() != expected) {
    throw ValidationError("score volume data length " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(expected));
  }
  for (float v : data_) {
    if (!std::isfinite(v)) throw ValidationError("score volume contains non-finite values");
  }
  if (!softmax_) return;
  const std::size_t n = pixels();
  for (std::size_t p = 0; p < n; ++p) {
    double sum = 0.0;
    for (int c = 0; c < channels_; ++c) {
      const float v = at(c, p);
      if (v < 0.0f || v > 1.0f) {
        throw ValidationError("softmax volume entry out of [0,1] at pixel " + std::to_string(p));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSoftmaxTolerance) {
      throw ValidationError("softmax volume channels sum to " + std::to_string(sum) +
                            " at pixel " + std::to_string(p));
    }
  }
}

GossMap::GossMap(int num_known, Grid<LabelId> classes, Grid<LabelId> clusters)
    : num_known_(num_known), classes_(std::move(classes)), clusters_(std::move(clusters)) {
  if (!classes_.same_shape(clusters_)) {
    throw ValidationError("class and cluster grids differ in shape");
  }
  validate_classes(num_known_, classes_);
}

void validate_split(const ClassSplit& split) {
  if (split.known.empty()) throw ValidationError("split '" + split.name + "' has no known classes");
  validate_num_known(split.num_known());
  std::unordered_set<LabelId> seen;
  for (LabelId id : split.known) {
    if (id == kVoid) throw ValidationError("split lists the void sentinel as a class");
    if (!seen.insert(id).second) {
      throw ValidationError("split '" + split.name + "' lists class " + std::to_string(id) +
                            " more than once");
    }
  }
  for (LabelId id : split.unknown) {
    if (id == kVoid) throw ValidationError("split lists the void sentinel as a class");
    if (!seen.insert(id).second) {
      throw ValidationError("split '" + split.name + "' lists class " + std::to_string(id) +
                            " as both known and unknown (or twice)");
    }
  }
}

bool validate_pair_consistency(const GossMap& map) {
  const LabelId unknown = map.unknown_id();
  for (std::size_t i = 0; i < map.size(); ++i) {
    const GossPair p = map[i];
    if (p.cls < unknown) {
      if (p.cluster != kVoid) return false;
    } else if (p.cls == unknown) {
      if (p.cluster == kVoid) return false;
    } else if (p.cluster != kVoid) {
      return false;
    }
  }
  return true;
}

}  // namespace goss
