#include "goss/commands.h"

#include <algorithm>
#include <iostream>
#include <set>
#include <sstream>

#include "goss/fuse.h"
#include "goss/identify.h"
#include "goss/parallel.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace goss {
namespace {

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

int require_num_known(const RunConfig& config) {
  if (!config.num_known) throw ValidationError("the class count N (num_known) must be given");
  return *config.num_known;
}

// Every name in `expected` must have a file `dir/name+ext`.
void require_counterparts(const std::vector<std::string>& expected, const fs::path& dir,
                          std::string_view ext) {
  std::vector<std::string> missing;
  for (const auto& stem : expected) {
    if (!fs::exists(dir / (stem + std::string(ext)))) missing.push_back(stem);
  }
  if (!missing.empty()) {
    throw ValidationError("missing counterpart files in " + dir.string() + ": " + join(missing));
  }
}

void require_same_sets(const std::vector<std::string>& a, const fs::path& a_dir,
                       const std::vector<std::string>& b, const fs::path& b_dir) {
  std::vector<std::string> only_a;
  std::vector<std::string> only_b;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
  if (only_a.empty() && only_b.empty()) return;
  std::string msg = "unpaired files:";
  if (!only_a.empty()) msg += " only in " + a_dir.string() + ": " + join(only_a) + ";";
  if (!only_b.empty()) msg += " only in " + b_dir.string() + ": " + join(only_b) + ";";
  throw ValidationError(msg);
}

GossMap read_goss_map(const fs::path& dir, const std::string& stem, int num_known) {
  const fs::path semantic_path = dir / kSemanticDir / (stem + ".png");
  const fs::path clusters_path = dir / kClustersDir / (stem + ".png");
  SemanticMap semantic = read_semantic_map(semantic_path, num_known);
  ClusterMap clusters = read_cluster_map(clusters_path);
  if (!clusters.same_shape(semantic.labels())) {
    throw ValidationError(clusters_path.string() + " does not match the shape of " +
                          semantic_path.string());
  }
  GossMap map(num_known, semantic.labels(), std::move(clusters));
  if (!validate_pair_consistency(map)) {
    throw ValidationError(dir.string() + "/" + stem + ": inconsistent (class, cluster) pairs");
  }
  return map;
}

void write_goss_map(const GossMap& map, const fs::path& dir, const std::string& stem) {
  write_label_map(map.classes(), dir / kSemanticDir / (stem + ".png"));
  write_label_map(map.clusters(), dir / kClustersDir / (stem + ".png"));
}

}  // namespace

ClassSplit parse_class_split(std::string_view json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("split file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("split file must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "name" && key != "known" && key != "unknown") {
      throw ValidationError("unknown split key '" + key + "'");
    }
  }
  ClassSplit split;
  try {
    split.name = doc.value("name", std::string());
    split.known = doc.at("known").get<std::vector<LabelId>>();
    split.unknown = doc.at("unknown").get<std::vector<LabelId>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed split file: ") + e.what());
  }
  validate_split(split);
  return split;
}

ClassSplit read_class_split(const fs::path& path) {
  try {
    return parse_class_split(read_text_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::vector<std::string> list_stems(const fs::path& dir, std::string_view extension) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) {
      stems.push_back(entry.path().stem().string());
    }
  }
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(stems.begin(), stems.end());
  return stems;
}

ConvertSummary cmd_convert(const fs::path& gt_dir, const ClassSplit& split, const SplitPolicy& policy,
                           const fs::path& out_dir, const RunConfig& config) {
  validate_split(split);
  config.validate();
  const std::vector<std::string> stems = list_stems(gt_dir, ".png");
  const Connectivity connectivity = connectivity_from_int(config.connectivity);
  const LabelReadOptions read_options{config.void_255};
  ensure_dir(out_dir / kSemanticDir);
  if (policy.mode == SplitMode::kTest) ensure_dir(out_dir / kClustersDir);

  enum class Outcome { kAdmitted, kRejected, kFailed };
  std::vector<Outcome> outcomes(stems.size(), Outcome::kFailed);
  std::vector<std::string> errors(stems.size());
  std::vector<char> io_errors(stems.size(), 0);
  parallel_for(stems.size(), config.workers, [&](std::size_t i) {
    const std::string& stem = stems[i];
    try {
      const LabelImage gt = read_label_map(gt_dir / (stem + ".png"), read_options);
      if (!admit_image(gt, split, policy)) {
        outcomes[i] = Outcome::kRejected;
        return;
      }
      if (policy.mode == SplitMode::kTest) {
        write_goss_map(build_goss_gt(gt, split, connectivity, config.min_segment_area), out_dir, stem);
      } else {
        write_label_map(remap_semantic(gt, split, policy).labels(),
                        out_dir / kSemanticDir / (stem + ".png"));
      }
      outcomes[i] = Outcome::kAdmitted;
    } catch (const IoError& e) {
      errors[i] = e.what();
      io_errors[i] = 1;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  ConvertSummary summary;
  std::string admitted_list;
  for (std::size_t i = 0; i < stems.size(); ++i) {
    switch (outcomes[i]) {
      case Outcome::kAdmitted:
        ++summary.admitted;
        admitted_list += stems[i] + "\n";
        break;
      case Outcome::kRejected:
        ++summary.rejected;
        break;
      case Outcome::kFailed:
        summary.failures.push_back(stems[i] + ": " + errors[i]);
        summary.io_failure = summary.io_failure || io_errors[i];
        break;
    }
  }
  write_text_file(out_dir / "admitted.txt", admitted_list);
  return summary;
}

std::size_t cmd_identify(const fs::path& scores_dir, const fs::path& out_dir, const RunConfig& config) {
  config.validate();
  const IdentifyMethod method = config.identify_method();
  const std::vector<std::string> stems = list_stems(scores_dir, ".gsv");
  ensure_dir(out_dir / kSemanticDir);
  ensure_dir(out_dir / kAnomalyDir);
  parallel_for(stems.size(), config.workers, [&](std::size_t i) {
    const std::string& stem = stems[i];
    const ScoreVolume vol = read_score_volume(scores_dir / (stem + ".gsv"));
    try {
      const int n = method.num_known(vol.channels());
      if (config.num_known && *config.num_known != n) {
        throw ValidationError("volume implies N=" + std::to_string(n) + " but N=" +
                              std::to_string(*config.num_known) + " was configured");
      }
      write_label_map(identify(vol, method).labels(), out_dir / kSemanticDir / (stem + ".png"));
      write_score_volume(anomaly_to_volume(anomaly_map(vol, method)),
                         out_dir / kAnomalyDir / (stem + ".gsv"));
    } catch (const ValidationError& e) {
      throw ValidationError(stem + ": " + e.what());
    }
  });
  return stems.size();
}

std::size_t cmd_fuse(const fs::path& side_dir, const fs::path& clusters_dir, const fs::path& out_dir,
                     const RunConfig& config) {
  config.validate();
  const int n = require_num_known(config);
  const std::vector<std::string> stems = list_stems(side_dir, ".png");
  require_counterparts(stems, clusters_dir, ".png");
  FuseOptions options;
  options.split_masked_clusters = config.split_masked_clusters;
  options.singleton_fallback = config.singleton_fallback;
  options.connectivity = connectivity_from_int(config.connectivity);
  ensure_dir(out_dir / kSemanticDir);
  ensure_dir(out_dir / kClustersDir);
  parallel_for(stems.size(), config.workers, [&](std::size_t i) {
    const std::string& stem = stems[i];
    const SemanticMap s_ide = read_semantic_map(side_dir / (stem + ".png"), n);
    const ClusterMap g = read_cluster_map(clusters_dir / (stem + ".png"));
    try {
      write_goss_map(fuse(s_ide, g, options), out_dir, stem);
    } catch (const ValidationError& e) {
      throw ValidationError(stem + ": " + e.what());
    }
  });
  return stems.size();
}

MetricReport cmd_eval(const EvalInputs& inputs, const RunConfig& config) {
  config.validate();
  const int n = require_num_known(config);
  const Connectivity connectivity = connectivity_from_int(config.connectivity);

  const std::vector<std::string> stems = list_stems(inputs.pred_dir / kSemanticDir, ".png");
  require_same_sets(stems, inputs.pred_dir / kSemanticDir,
                    list_stems(inputs.gt_dir / kSemanticDir, ".png"), inputs.gt_dir / kSemanticDir);
  require_counterparts(stems, inputs.pred_dir / kClustersDir, ".png");
  require_counterparts(stems, inputs.gt_dir / kClustersDir, ".png");
  if (inputs.raw_clusters_dir) require_counterparts(stems, *inputs.raw_clusters_dir, ".png");
  if (inputs.anomaly_dir) require_counterparts(stems, *inputs.anomaly_dir, ".gsv");

  struct ImageResult {
    std::optional<MatchAccumulator> segments;
    MatchCounts clustering;
    std::vector<ScoredPixelSample> samples;
  };
  std::vector<ImageResult> results(stems.size());
  parallel_for(stems.size(), config.workers, [&](std::size_t i) {
    const std::string& stem = stems[i];
    const GossMap pred = read_goss_map(inputs.pred_dir, stem, n);
    const GossMap gt = read_goss_map(inputs.gt_dir, stem, n);
    ImageResult& r = results[i];
    r.segments = match_images(pred, gt);
    if (inputs.raw_clusters_dir) {
      const ClusterMap raw = read_cluster_map(*inputs.raw_clusters_dir / (stem + ".png"));
      r.clustering = match_clustering(raw, gt, connectivity);
    }
    if (inputs.anomaly_dir) {
      const AnomalyMap anomaly =
          volume_to_anomaly(read_score_volume(*inputs.anomaly_dir / (stem + ".gsv")));
      collect_samples(anomaly, gt.semantic(), r.samples);
    }
  });

  // Fold in basename order so the result is independent of scheduling.
  MatchAccumulator total(n);
  MatchCounts clustering;
  std::vector<ScoredPixelSample> samples;
  MetricReport report;
  for (std::size_t i = 0; i < stems.size(); ++i) {
    total.merge(*results[i].segments);
    clustering += results[i].clustering;
    samples.insert(samples.end(), results[i].samples.begin(), results[i].samples.end());
    if (config.per_image) {
      const GqSummary s = summarize_gq(*results[i].segments, config.lambda, config.strict_n,
                                       config.fallback_gq);
      report.per_image.push_back({stems[i], s.combined});
    }
  }

  const GqSummary summary = summarize_gq(total, config.lambda, config.strict_n, config.fallback_gq);
  if (summary.fell_back) {
    std::cerr << "warning: no unknown segments in the dataset, gq falls back to gq_known\n";
  }
  report.num_known = n;
  report.images = stems.size();
  report.lambda = config.lambda;
  report.strict_n = config.strict_n;
  report.gq_fell_back = summary.fell_back;
  report.gq_known = summary.known;
  report.gq_unknown = summary.unknown;
  report.gq = summary.combined;
  if (inputs.raw_clusters_dir) {
    report.gq_clu = gq_clu(clustering);
    report.miou_clusters = miou_clusters(clustering);
  }
  if (inputs.anomaly_dir) {
    const RankingMetrics ranking = ranking_metrics(samples);
    report.auroc = ranking.auroc;
    report.aupr = ranking.aupr;
    report.fpr_at_95_tpr = ranking.fpr_at_95_tpr;
  }
  for (int k = 0; k < n; ++k) {
    const MatchCounts& c = total.known(k);
    report.per_class.push_back({k, c.iou_sum, c.tp, c.fp, c.fn});
  }
  const MatchCounts& u = total.unknown();
  report.per_class.push_back({n, u.iou_sum, u.tp, u.fp, u.fn});
  return report;
}

RankingMetrics cmd_roc(const fs::path& anomaly_dir, const fs::path& gt_dir, const RunConfig& config) {
  config.validate();
  const int n = require_num_known(config);
  const std::vector<std::string> stems = list_stems(anomaly_dir, ".gsv");
  require_counterparts(stems, gt_dir / kSemanticDir, ".png");
  std::vector<std::vector<ScoredPixelSample>> per_image(stems.size());
  parallel_for(stems.size(), config.workers, [&](std::size_t i) {
    const AnomalyMap anomaly = volume_to_anomaly(read_score_volume(anomaly_dir / (stems[i] + ".gsv")));
    const SemanticMap gt = read_semantic_map(gt_dir / kSemanticDir / (stems[i] + ".png"), n);
    collect_samples(anomaly, gt, per_image[i]);
  });
  std::vector<ScoredPixelSample> samples;
  for (const auto& s : per_image) samples.insert(samples.end(), s.begin(), s.end());
  return ranking_metrics(samples);
}

std::string ranking_metrics_json(const RankingMetrics& metrics) {
  nlohmann::ordered_json doc;
  auto put = [&](const char* key, const std::optional<double>& v) {
    doc[key] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  put("auroc", metrics.auroc);
  put("aupr", metrics.aupr);
  put("fpr_at_95_tpr", metrics.fpr_at_95_tpr);
  return doc.dump(2) + "\n";
}

}  // namespace goss
