#include "goss/benchgen.h"

#include <string>

namespace goss {
namespace {

enum class Role : std::uint8_t { kUnlisted, kKnown, kUnknown };

// Dense lookup from original id to (role, remapped index).
class SplitIndex {
 public:
  explicit SplitIndex(const ClassSplit& split) : roles_(kVoid, Role::kUnlisted), index_(kVoid, 0) {
    validate_split(split);
    for (std::size_t k = 0; k < split.known.size(); ++k) {
      roles_[split.known[k]] = Role::kKnown;
      index_[split.known[k]] = static_cast<LabelId>(k);
    }
    for (LabelId id : split.unknown) roles_[id] = Role::kUnknown;
  }

  Role role(LabelId original, std::size_t pixel) const {
    if (original == kVoid) return Role::kUnlisted;
    const Role r = roles_[original];
    if (r == Role::kUnlisted) {
      throw ValidationError("original class " + std::to_string(original) + " at pixel " +
                            std::to_string(pixel) + " is not listed in the split");
    }
    return r;
  }
  LabelId index(LabelId original) const { return index_[original]; }

 private:
  std::vector<Role> roles_;
  std::vector<LabelId> index_;
};

}  // namespace

SemanticMap remap_semantic(const LabelImage& gt, const ClassSplit& split, const SplitPolicy& policy) {
  const SplitIndex lookup(split);
  const auto unknown_value =
      policy.mode == SplitMode::kTest ? static_cast<LabelId>(split.num_known()) : kVoid;
  Grid<LabelId> out(gt.height(), gt.width(), kVoid);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    switch (lookup.role(gt[i], i)) {
      case Role::kKnown:
        out[i] = lookup.index(gt[i]);
        break;
      case Role::kUnknown:
        out[i] = unknown_value;
        break;
      case Role::kUnlisted:
        break;
    }
  }
  return SemanticMap(split.num_known(), std::move(out));
}

ClusterMap connectivity_label(const LabelImage& gt, const ClassSplit& split,
                              Connectivity connectivity, int min_area) {
  const SplitIndex lookup(split);
  constexpr std::uint32_t kIgnore = 0xffffffffu;
  std::vector<std::uint32_t> keys(gt.size(), kIgnore);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (lookup.role(gt[i], i) == Role::kUnknown) keys[i] = gt[i];
  }
  return label_components(keys, gt.height(), gt.width(), kIgnore, connectivity, min_area).ids;
}

bool admit_image(const LabelImage& gt, const ClassSplit& split, const SplitPolicy& policy) {
  if (policy.style == DatasetStyle::kKeepAll) return true;
  const SplitIndex lookup(split);
  bool has_unknown = false;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (lookup.role(gt[i], i) == Role::kUnknown) {
      has_unknown = true;
      break;
    }
  }
  return policy.mode == SplitMode::kTrain ? !has_unknown : has_unknown;
}

GossMap build_goss_gt(const LabelImage& gt, const ClassSplit& split, Connectivity connectivity,
                      int min_area) {
  const SemanticMap semantic = remap_semantic(gt, split, {SplitMode::kTest, DatasetStyle::kFilter});
  ClusterMap clusters = connectivity_label(gt, split, connectivity, min_area);
  Grid<LabelId> classes = semantic.labels();
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (semantic.is_unknown(i) && clusters[i] == kVoid) classes[i] = kVoid;
  }
  return GossMap(split.num_known(), std::move(classes), std::move(clusters));
}

}  // namespace goss
