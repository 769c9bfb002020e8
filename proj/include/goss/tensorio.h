#ifndef GOSS_TENSORIO_H_
#define GOSS_TENSORIO_H_

// File formats: single-channel label PNGs, GSV1 score volumes, JSON run
// configs and JSON/CSV metric reports.
//
// GSV1 layout (all integers little-endian):
//   bytes 0-3   magic "GSV1"
//   bytes 4-7   channels (uint32)
//   bytes 8-11  height (uint32)
//   bytes 12-15 width (uint32)
//   bytes 16-19 flags (uint32; bit 0 = softmax-normalized, others reserved 0)
//   bytes 20-   channels*height*width IEEE-754 float32, channel-major then
//               row-major

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "goss/core.h"
#include "goss/identify.h"

namespace goss {

struct LabelReadOptions {
  // 8-bit files use 255 as their void value (COCO-Stuff, Cityscapes trainIds).
  bool void_255_in_8bit = false;
};

LabelImage read_label_map(const std::filesystem::path& path, const LabelReadOptions& options = {});
SemanticMap read_semantic_map(const std::filesystem::path& path, int num_known,
                              const LabelReadOptions& options = {});
ClusterMap read_cluster_map(const std::filesystem::path& path, const LabelReadOptions& options = {});

// 16-bit grayscale PNG; kVoid is written as 65535.
void write_label_map(const Grid<LabelId>& map, const std::filesystem::path& path);

ScoreVolume read_score_volume(const std::filesystem::path& path);
void write_score_volume(const ScoreVolume& vol, const std::filesystem::path& path);

std::vector<std::uint8_t> encode_score_volume(const ScoreVolume& vol);
ScoreVolume decode_score_volume(const std::vector<std::uint8_t>& bytes);

// Anomaly maps travel as single-channel GSV1 volumes.
ScoreVolume anomaly_to_volume(const AnomalyMap& anomaly);
AnomalyMap volume_to_anomaly(const ScoreVolume& vol);

struct RunConfig {
  // Identification threshold; msp falls back to 0.5, maxlogit needs it set.
  std::optional<double> tau;
  double beta_uk = 5.0;
  double lambda = 0.5;
  int connectivity = 4;
  int min_segment_area = 0;
  IdentifyKind method = IdentifyKind::kMsp;
  bool strict_n = false;
  bool fallback_gq = false;
  bool split_masked_clusters = false;
  bool singleton_fallback = false;
  bool per_image = false;
  bool void_255 = false;
  std::optional<int> num_known;
  int workers = 1;

  double effective_tau() const { return tau.value_or(0.5); }
  IdentifyMethod identify_method() const;
  void validate() const;
};

// Strict: unknown keys and wrongly typed values are validation errors. With
// `validate` off, range checks are left to the caller (for configs that are
// completed by command-line overrides).
RunConfig parse_run_config(std::string_view json_text, bool validate = true);
RunConfig read_run_config(const std::filesystem::path& path, bool validate = true);

struct PerClassRow {
  // Class index; the unknown pool uses N.
  int class_id = 0;
  double iou_sum = 0.0;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
};

struct PerImageRow {
  std::string name;
  std::optional<double> gq;
};

struct MetricReport {
  int num_known = 0;
  std::size_t images = 0;
  double lambda = 0.5;
  bool strict_n = false;
  bool gq_fell_back = false;
  std::optional<double> gq_known;
  std::optional<double> gq_unknown;
  std::optional<double> gq;
  std::optional<double> gq_clu;
  std::optional<double> miou_clusters;
  std::optional<double> auroc;
  std::optional<double> aupr;
  std::optional<double> fpr_at_95_tpr;
  std::vector<PerClassRow> per_class;
  std::vector<PerImageRow> per_image;
};

// Undefined values serialize as null. A "display_percent" block repeats the metrics
// as percentages with two decimals.
std::string metric_report_json(const MetricReport& report);
std::string per_class_csv(const MetricReport& report);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace goss

#endif  // GOSS_TENSORIO_H_
