#ifndef GOSS_IDENTIFY_H_
#define GOSS_IDENTIFY_H_

// Known/unknown pixel identification from classifier score volumes.
//
// N-model volumes carry N channels; pixels are declared unknown by
// thresholding a per-pixel anomaly score. N+1-model volumes carry an extra
// unknown channel and are decided by argmax, optionally after boosting the
// unknown confidence by beta_uk. Argmax ties go to the lowest channel.

#include <optional>
#include <string_view>

#include "goss/core.h"

namespace goss {

// Per-pixel anomaly score; higher means more likely unknown.
using AnomalyMap = Grid<float>;

enum class IdentifyKind { kMsp, kMaxLogit, kNPlus1, kNPlus1Adjusted };

IdentifyKind identify_kind_from_string(std::string_view name);
std::string_view to_string(IdentifyKind kind);

struct IdentifyMethod {
  IdentifyKind kind = IdentifyKind::kMsp;
  // Threshold on the anomaly score (msp, maxlogit only).
  std::optional<double> tau;
  // Unknown-confidence scale (nplus1_adjusted only).
  double beta_uk = 5.0;

  // Class count N implied by a volume with `channels` channels.
  int num_known(int channels) const;
  void validate() const;
};

// Unknown iff max probability < tau; tau = 0 reduces to plain argmax.
SemanticMap msp_identify(const ScoreVolume& vol, double tau);

// Unknown iff -max logit >= tau.
SemanticMap maxlogit_identify(const ScoreVolume& vol, double tau);

// Multiplies the last (unknown) channel by beta_uk. The result is no longer
// normalized.
ScoreVolume adjust_confidence(const ScoreVolume& vol, double beta_uk);

SemanticMap nplus1_identify(const ScoreVolume& vol, std::optional<double> beta_uk = std::nullopt);

AnomalyMap anomaly_map(const ScoreVolume& vol, const IdentifyMethod& method);

// Dispatches on method.kind.
SemanticMap identify(const ScoreVolume& vol, const IdentifyMethod& method);

// Thresholds an externally computed anomaly map over a closed-set prediction:
// pixels with anomaly >= tau become unknown.
SemanticMap identify_with_anomaly(const SemanticMap& closed_set, const AnomalyMap& anomaly,
                                  double tau);

}  // namespace goss

#endif  // GOSS_IDENTIFY_H_
