#ifndef GOSS_COMMANDS_H_
#define GOSS_COMMANDS_H_

// Batch drivers behind the `goss` command-line tool.
//
// A GOSS directory holds two sub-directories of 16-bit label PNGs paired by
// basename: semantic/ (class ids, N = unknown, 65535 = void) and clusters/
// (cluster ids, 65535 = void).

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "goss/benchgen.h"
#include "goss/metrics.h"
#include "goss/tensorio.h"

namespace goss {

inline constexpr const char* kSemanticDir = "semantic";
inline constexpr const char* kClustersDir = "clusters";
inline constexpr const char* kAnomalyDir = "anomaly";

ClassSplit parse_class_split(std::string_view json_text);
ClassSplit read_class_split(const std::filesystem::path& path);

// Sorted basenames (stem) of files with `extension` directly under `dir`.
std::vector<std::string> list_stems(const std::filesystem::path& dir, std::string_view extension);

struct ConvertSummary {
  std::size_t admitted = 0;
  std::size_t rejected = 0;
  std::vector<std::string> failures;
  // At least one failure was an I/O or file-format error.
  bool io_failure = false;
};

// Reads every *.png annotation in gt_dir. Admitted images are written to
// out_dir as a GOSS directory (train mode: semantic/ only) and listed in
// out_dir/admitted.txt.
ConvertSummary cmd_convert(const std::filesystem::path& gt_dir, const ClassSplit& split,
                           const SplitPolicy& policy, const std::filesystem::path& out_dir,
                           const RunConfig& config);

// *.gsv score volumes in, out_dir/semantic/*.png and out_dir/anomaly/*.gsv out.
std::size_t cmd_identify(const std::filesystem::path& scores_dir,
                         const std::filesystem::path& out_dir, const RunConfig& config);

// Identified maps plus whole-image cluster maps in, GOSS directory out.
std::size_t cmd_fuse(const std::filesystem::path& side_dir, const std::filesystem::path& clusters_dir,
                     const std::filesystem::path& out_dir, const RunConfig& config);

struct EvalInputs {
  std::filesystem::path pred_dir;
  std::filesystem::path gt_dir;
  // Whole-image clusterings before fusion; enables gq_clu and miou_clusters.
  std::optional<std::filesystem::path> raw_clusters_dir;
  // Single-channel anomaly volumes; enables auroc, aupr and fpr_at_95_tpr.
  std::optional<std::filesystem::path> anomaly_dir;
};

MetricReport cmd_eval(const EvalInputs& inputs, const RunConfig& config);

RankingMetrics cmd_roc(const std::filesystem::path& anomaly_dir, const std::filesystem::path& gt_dir,
                       const RunConfig& config);

std::string ranking_metrics_json(const RankingMetrics& metrics);

}  // namespace goss

#endif  // GOSS_COMMANDS_H_
