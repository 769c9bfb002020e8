#ifndef GOSS_CORE_H_
#define GOSS_CORE_H_

// Domain types shared by every stage of the pipeline: label grids, score
// volumes, fused (class, cluster) maps and class splits.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace goss {

using LabelId = std::uint16_t;

// Sentinel for pixels outside evaluation and for cluster slots of known pixels.
inline constexpr LabelId kVoid = 65535;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file content (bad magic, wrong PNG layout, truncation).
class FormatError : public IoError {
 public:
  using IoError::IoError;
};

// Row-major 2-D grid. Dimensions are fixed at construction.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int height, int width, T fill = T{}) : Grid(height, width, std::vector<T>(checked_area(height, width), fill)) {}
  Grid(int height, int width, std::vector<T> data)
      : height_(height), width_(width), data_(std::move(data)) {
    if (data_.size() != checked_area(height, width)) {
      throw ValidationError("grid data length " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(height) + "x" +
                            std::to_string(width));
    }
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }

  const T& operator[](std::size_t i) const { return data_[i]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& at(int row, int col) const { return data_[index(row, col)]; }
  T& at(int row, int col) { return data_[index(row, col)]; }

  std::span<const T> values() const { return data_; }
  std::span<T> values() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool same_shape(int height, int width) const { return height_ == height && width_ == width; }
  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return same_shape(other.height(), other.width());
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }
  static std::size_t checked_area(int height, int width) {
    if (height < 1 || width < 1) {
      throw ValidationError("grid dimensions must be positive, got " + std::to_string(height) +
                            "x" + std::to_string(width));
    }
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<T> data_;
};

// Raw annotation over original dataset ids (no class-count semantics).
using LabelImage = Grid<LabelId>;

// Per-pixel class ids in 0..N-1 (known), N (unknown) or kVoid.
class SemanticMap {
 public:
  SemanticMap(int num_known, Grid<LabelId> labels);
  SemanticMap(int num_known, int height, int width, LabelId fill);

  int num_known() const { return num_known_; }
  LabelId unknown_id() const { return static_cast<LabelId>(num_known_); }
  int height() const { return labels_.height(); }
  int width() const { return labels_.width(); }
  std::size_t size() const { return labels_.size(); }
  LabelId operator[](std::size_t i) const { return labels_[i]; }
  LabelId at(int row, int col) const { return labels_.at(row, col); }
  const Grid<LabelId>& labels() const { return labels_; }

  bool is_known(std::size_t i) const { return labels_[i] < num_known_; }
  bool is_unknown(std::size_t i) const { return labels_[i] == num_known_; }

  friend bool operator==(const SemanticMap&, const SemanticMap&) = default;

 private:
  int num_known_;
  Grid<LabelId> labels_;
};

// Per-pixel cluster ids; kVoid pixels belong to no cluster.
using ClusterMap = Grid<LabelId>;

// C x H x W channel-major stack of confidences or logits.
class ScoreVolume {
 public:
  // Tolerance on the per-pixel channel sum of a softmax-normalized volume.
  static constexpr double kSoftmaxTolerance = 1e-5;

  ScoreVolume(int channels, int height, int width, std::vector<float> data, bool softmax);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixels() const { return static_cast<std::size_t>(height_) * width_; }
  bool softmax() const { return softmax_; }

  float at(int channel, std::size_t pixel) const {
    return data_[static_cast<std::size_t>(channel) * pixels() + pixel];
  }
  std::span<const float> channel(int c) const {
    return std::span<const float>(data_).subspan(static_cast<std::size_t>(c) * pixels(), pixels());
  }
  const std::vector<float>& data() const { return data_; }

  friend bool operator==(const ScoreVolume&, const ScoreVolume&) = default;

 private:
  int channels_;
  int height_;
  int width_;
  std::vector<float> data_;
  bool softmax_;
};

struct GossPair {
  LabelId cls = kVoid;
  LabelId cluster = kVoid;
  friend bool operator==(const GossPair&, const GossPair&) = default;
};

// Fused output: (class, cluster) per pixel. Pair consistency is not enforced
// on construction; see validate_pair_consistency.
class GossMap {
 public:
  GossMap(int num_known, Grid<LabelId> classes, Grid<LabelId> clusters);

  int num_known() const { return num_known_; }
  LabelId unknown_id() const { return static_cast<LabelId>(num_known_); }
  int height() const { return classes_.height(); }
  int width() const { return classes_.width(); }
  std::size_t size() const { return classes_.size(); }
  GossPair operator[](std::size_t i) const { return {classes_[i], clusters_[i]}; }

  const Grid<LabelId>& classes() const { return classes_; }
  const Grid<LabelId>& clusters() const { return clusters_; }
  SemanticMap semantic() const { return SemanticMap(num_known_, classes_); }

  friend bool operator==(const GossMap&, const GossMap&) = default;

 private:
  int num_known_;
  Grid<LabelId> classes_;
  Grid<LabelId> clusters_;
};

// Known/unknown partition of a dataset's original class ids. The position of
// an id in `known` is its remapped class index.
struct ClassSplit {
  std::string name;
  std::vector<LabelId> known;
  std::vector<LabelId> unknown;

  int num_known() const { return static_cast<int>(known.size()); }
};

// Throws ValidationError unless known and unknown are disjoint, duplicate
// free, non-empty on the known side and free of kVoid.
void validate_split(const ClassSplit& split);

void validate_num_known(int num_known);

// True iff every pixel is (known, void), (unknown, cluster) or (void, void).
bool validate_pair_consistency(const GossMap& map);

}  // namespace goss

#endif  // GOSS_CORE_H_
