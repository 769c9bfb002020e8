// goss: build open-set segmentation benchmarks and score predictions.
//
//   goss convert  --gt DIR --split FILE --out DIR [--mode test|train] [--style filter|keep-all]
//   goss identify --scores DIR --out DIR [--method msp|maxlogit|nplus1|nplus1_adjusted]
//   goss fuse     --identified DIR --clusters DIR --out DIR --num-known N
//   goss eval     --pred DIR --gt DIR --num-known N [--raw-clusters DIR] [--anomaly DIR]
//   goss roc      --anomaly DIR --gt DIR --num-known N
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "goss/commands.h"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

// Command-line values that override the JSON config.
struct Overrides {
  std::string config_path;
  std::optional<double> tau;
  std::optional<double> beta_uk;
  std::optional<double> lambda;
  std::optional<int> connectivity;
  std::optional<int> min_segment_area;
  std::optional<int> workers;
  std::optional<int> num_known;
  std::optional<std::string> method;
  bool strict_n = false;
  bool fallback_gq = false;
  bool split_masked_clusters = false;
  bool singleton_fallback = false;
  bool per_image = false;
  bool void_255 = false;

  goss::RunConfig resolve() const {
    goss::RunConfig cfg = config_path.empty() ? goss::RunConfig{} : goss::read_run_config(config_path, false);
    if (tau) cfg.tau = tau;
    if (beta_uk) cfg.beta_uk = *beta_uk;
    if (lambda) cfg.lambda = *lambda;
    if (connectivity) cfg.connectivity = *connectivity;
    if (min_segment_area) cfg.min_segment_area = *min_segment_area;
    if (workers) cfg.workers = *workers;
    if (num_known) cfg.num_known = num_known;
    if (method) cfg.method = goss::identify_kind_from_string(*method);
    cfg.strict_n = cfg.strict_n || strict_n;
    cfg.fallback_gq = cfg.fallback_gq || fallback_gq;
    cfg.split_masked_clusters = cfg.split_masked_clusters || split_masked_clusters;
    cfg.singleton_fallback = cfg.singleton_fallback || singleton_fallback;
    cfg.per_image = cfg.per_image || per_image;
    cfg.void_255 = cfg.void_255 || void_255;
    cfg.validate();
    return cfg;
  }
};

void add_config_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON run config")->check(CLI::ExistingFile);
  cmd->add_option("--tau", o.tau, "identification threshold");
  cmd->add_option("--beta-uk", o.beta_uk, "unknown-confidence scale for nplus1_adjusted");
  cmd->add_option("--lambda", o.lambda, "known/unknown weight of GQ");
  cmd->add_option("--connectivity", o.connectivity, "4 or 8");
  cmd->add_option("--min-segment-area", o.min_segment_area, "drop smaller unknown components");
  cmd->add_option("--workers", o.workers, "worker threads");
  cmd->add_option("--num-known", o.num_known, "number of known classes N");
  cmd->add_option("--method", o.method, "msp, maxlogit, nplus1 or nplus1_adjusted");
  cmd->add_flag("--strict-n", o.strict_n, "average GQ^kn over all N classes");
  cmd->add_flag("--fallback-gq", o.fallback_gq, "use GQ^kn when GQ^uk is undefined");
  cmd->add_flag("--split-masked-clusters", o.split_masked_clusters,
                "re-split masked clusters into connected pieces");
  cmd->add_flag("--singleton-fallback", o.singleton_fallback,
                "give uncovered unknown pixels fresh cluster ids");
  cmd->add_flag("--per-image", o.per_image, "also report per-image GQ");
  cmd->add_flag("--void-255", o.void_255, "treat 255 in 8-bit PNGs as void");
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
  } else {
    goss::write_text_file(path, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-set segmentation benchmark construction and evaluation"};
  app.require_subcommand(1);

  Overrides o;
  std::string gt_dir, split_path, out_dir, mode = "test", style = "filter";
  std::string scores_dir, identified_dir, clusters_dir, pred_dir, raw_clusters_dir, anomaly_dir;
  std::string report_path, csv_path;

  auto* convert = app.add_subcommand("convert", "turn annotations into GOSS ground truth");
  convert->add_option("--gt", gt_dir, "directory of original label PNGs")->required();
  convert->add_option("--split", split_path, "class split JSON")->required()->check(CLI::ExistingFile);
  convert->add_option("--out", out_dir, "output directory")->required();
  convert->add_option("--mode", mode, "test or train")->check(CLI::IsMember({"test", "train"}));
  convert->add_option("--style", style, "filter or keep-all")
      ->check(CLI::IsMember({"filter", "keep-all"}));
  add_config_flags(convert, o);

  auto* identify = app.add_subcommand("identify", "identify unknown pixels from score volumes");
  identify->add_option("--scores", scores_dir, "directory of GSV1 volumes")->required();
  identify->add_option("--out", out_dir, "output directory")->required();
  add_config_flags(identify, o);

  auto* fuse = app.add_subcommand("fuse", "merge identified maps with cluster maps");
  fuse->add_option("--identified", identified_dir, "identified semantic PNGs")->required();
  fuse->add_option("--clusters", clusters_dir, "whole-image cluster PNGs")->required();
  fuse->add_option("--out", out_dir, "output GOSS directory")->required();
  add_config_flags(fuse, o);

  auto* eval = app.add_subcommand("eval", "score predictions with the GQ metrics");
  eval->add_option("--pred", pred_dir, "predicted GOSS directory")->required();
  eval->add_option("--gt", gt_dir, "ground-truth GOSS directory")->required();
  eval->add_option("--raw-clusters", raw_clusters_dir, "clusterings before fusion");
  eval->add_option("--anomaly", anomaly_dir, "anomaly GSV1 volumes");
  eval->add_option("--report", report_path, "report JSON path (default: stdout)");
  eval->add_option("--csv", csv_path, "per-class CSV path");
  add_config_flags(eval, o);

  auto* roc = app.add_subcommand("roc", "AUROC, AUPR and FPR at 95% TPR");
  roc->add_option("--anomaly", anomaly_dir, "anomaly GSV1 volumes")->required();
  roc->add_option("--gt", gt_dir, "ground-truth GOSS directory")->required();
  roc->add_option("--report", report_path, "output JSON path (default: stdout)");
  add_config_flags(roc, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitValidation;
  }

  try {
    const goss::RunConfig cfg = o.resolve();
    if (*convert) {
      goss::SplitPolicy policy;
      policy.mode = mode == "train" ? goss::SplitMode::kTrain : goss::SplitMode::kTest;
      policy.style = style == "keep-all" ? goss::DatasetStyle::kKeepAll : goss::DatasetStyle::kFilter;
      const goss::ConvertSummary s =
          goss::cmd_convert(gt_dir, goss::read_class_split(split_path), policy, out_dir, cfg);
      for (const auto& f : s.failures) std::cerr << "error: " << f << "\n";
      std::cerr << "admitted " << s.admitted << ", rejected " << s.rejected << ", failed "
                << s.failures.size() << "\n";
      if (!s.failures.empty()) return s.io_failure ? kExitIo : kExitValidation;
    } else if (*identify) {
      const std::size_t n = goss::cmd_identify(scores_dir, out_dir, cfg);
      std::cerr << "identified " << n << " volumes\n";
    } else if (*fuse) {
      const std::size_t n = goss::cmd_fuse(identified_dir, clusters_dir, out_dir, cfg);
      std::cerr << "fused " << n << " images\n";
    } else if (*eval) {
      goss::EvalInputs inputs{pred_dir, gt_dir, std::nullopt, std::nullopt};
      if (!raw_clusters_dir.empty()) inputs.raw_clusters_dir = raw_clusters_dir;
      if (!anomaly_dir.empty()) inputs.anomaly_dir = anomaly_dir;
      const goss::MetricReport report = goss::cmd_eval(inputs, cfg);
      emit(goss::metric_report_json(report), report_path);
      if (!csv_path.empty()) goss::write_text_file(csv_path, goss::per_class_csv(report));
    } else if (*roc) {
      emit(goss::ranking_metrics_json(goss::cmd_roc(anomaly_dir, gt_dir, cfg)), report_path);
    }
  } catch (const goss::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const goss::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
