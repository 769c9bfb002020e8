#include "goss/identify.h"

#include <cmath>
#include <string>

namespace goss {
namespace {

struct ArgMax {
  int channel;
  float value;
};

// Lowest channel wins ties.
ArgMax argmax(const ScoreVolume& vol, std::size_t pixel, int channels) {
  ArgMax best{0, vol.at(0, pixel)};
  for (int c = 1; c < channels; ++c) {
    const float v = vol.at(c, pixel);
    if (v > best.value) best = {c, v};
  }
  return best;
}

void require_channels(const ScoreVolume& vol, int expected_at_least, const char* what) {
  if (vol.channels() < expected_at_least) {
    throw ValidationError(std::string(what) + " needs at least " +
                          std::to_string(expected_at_least) + " channels, got " +
                          std::to_string(vol.channels()));
  }
}

void require_softmax(const ScoreVolume& vol, const char* what) {
  if (!vol.softmax()) {
    throw ValidationError(std::string(what) + " requires a softmax-normalized volume");
  }
}

void require_beta(double beta_uk) {
  if (!(beta_uk > 1.0) || !std::isfinite(beta_uk)) {
    throw ValidationError("beta_uk must be a finite value > 1, got " + std::to_string(beta_uk));
  }
}

}  // namespace

IdentifyKind identify_kind_from_string(std::string_view name) {
  if (name == "msp") return IdentifyKind::kMsp;
  if (name == "maxlogit") return IdentifyKind::kMaxLogit;
  if (name == "nplus1") return IdentifyKind::kNPlus1;
  if (name == "nplus1_adjusted") return IdentifyKind::kNPlus1Adjusted;
  throw ValidationError("unknown identification method '" + std::string(name) + "'");
}

std::string_view to_string(IdentifyKind kind) {
  switch (kind) {
    case IdentifyKind::kMsp:
      return "msp";
    case IdentifyKind::kMaxLogit:
      return "maxlogit";
    case IdentifyKind::kNPlus1:
      return "nplus1";
    case IdentifyKind::kNPlus1Adjusted:
      return "nplus1_adjusted";
  }
  return "unknown";
}

int IdentifyMethod::num_known(int channels) const {
  const bool extra = kind == IdentifyKind::kNPlus1 || kind == IdentifyKind::kNPlus1Adjusted;
  return extra ? channels - 1 : channels;
}

void IdentifyMethod::validate() const {
  switch (kind) {
    case IdentifyKind::kMsp:
      if (tau && (*tau < 0.0 || *tau > 1.0)) {
        throw ValidationError("msp threshold must lie in [0,1], got " + std::to_string(*tau));
      }
      break;
    case IdentifyKind::kMaxLogit:
      if (!tau) throw ValidationError("maxlogit requires an explicit threshold (tau)");
      if (!std::isfinite(*tau)) throw ValidationError("maxlogit threshold must be finite");
      break;
    case IdentifyKind::kNPlus1:
      break;
    case IdentifyKind::kNPlus1Adjusted:
      require_beta(beta_uk);
      break;
  }
}

SemanticMap msp_identify(const ScoreVolume& vol, double tau) {
  require_softmax(vol, "msp");
  if (tau < 0.0 || tau > 1.0) throw ValidationError("msp threshold must lie in [0,1]");
  const int n = vol.channels();
  validate_num_known(n);
  Grid<LabelId> out(vol.height(), vol.width(), 0);
  for (std::size_t p = 0; p < vol.pixels(); ++p) {
    const ArgMax best = argmax(vol, p, n);
    out[p] = static_cast<double>(best.value) >= tau ? static_cast<LabelId>(best.channel)
                                                    : static_cast<LabelId>(n);
  }
  return SemanticMap(n, std::move(out));
}

SemanticMap maxlogit_identify(const ScoreVolume& vol, double tau) {
  if (!std::isfinite(tau)) throw ValidationError("maxlogit threshold must be finite");
  const int n = vol.channels();
  validate_num_known(n);
  Grid<LabelId> out(vol.height(), vol.width(), 0);
  for (std::size_t p = 0; p < vol.pixels(); ++p) {
    const ArgMax best = argmax(vol, p, n);
    const double anomaly = -static_cast<double>(best.value);
    out[p] = anomaly >= tau ? static_cast<LabelId>(n) : static_cast<LabelId>(best.channel);
  }
  return SemanticMap(n, std::move(out));
}

ScoreVolume adjust_confidence(const ScoreVolume& vol, double beta_uk) {
  require_beta(beta_uk);
  require_channels(vol, 2, "confidence adjustment");
  require_softmax(vol, "confidence adjustment");
  std::vector<float> data = vol.data();
  const std::size_t offset = static_cast<std::size_t>(vol.channels() - 1) * vol.pixels();
  const auto beta = static_cast<float>(beta_uk);
  for (std::size_t p = 0; p < vol.pixels(); ++p) data[offset + p] *= beta;
  return ScoreVolume(vol.channels(), vol.height(), vol.width(), std::move(data), false);
}

SemanticMap nplus1_identify(const ScoreVolume& vol, std::optional<double> beta_uk) {
  require_channels(vol, 2, "N+1 identification");
  if (beta_uk) return nplus1_identify(adjust_confidence(vol, *beta_uk));
  const int n = vol.channels() - 1;
  validate_num_known(n);
  Grid<LabelId> out(vol.height(), vol.width(), 0);
  for (std::size_t p = 0; p < vol.pixels(); ++p) {
    out[p] = static_cast<LabelId>(argmax(vol, p, vol.channels()).channel);
  }
  return SemanticMap(n, std::move(out));
}

AnomalyMap anomaly_map(const ScoreVolume& vol, const IdentifyMethod& method) {
  method.validate();
  AnomalyMap out(vol.height(), vol.width(), 0.0f);
  switch (method.kind) {
    case IdentifyKind::kMsp:
      require_softmax(vol, "msp");
      for (std::size_t p = 0; p < vol.pixels(); ++p) {
        out[p] = static_cast<float>(1.0 - argmax(vol, p, vol.channels()).value);
      }
      break;
    case IdentifyKind::kMaxLogit:
      for (std::size_t p = 0; p < vol.pixels(); ++p) {
        out[p] = -argmax(vol, p, vol.channels()).value;
      }
      break;
    case IdentifyKind::kNPlus1: {
      require_channels(vol, 2, "N+1 anomaly");
      const auto unknown = vol.channel(vol.channels() - 1);
      std::copy(unknown.begin(), unknown.end(), out.values().begin());
      break;
    }
    case IdentifyKind::kNPlus1Adjusted: {
      const ScoreVolume adjusted = adjust_confidence(vol, method.beta_uk);
      const auto unknown = adjusted.channel(adjusted.channels() - 1);
      std::copy(unknown.begin(), unknown.end(), out.values().begin());
      break;
    }
  }
  return out;
}

SemanticMap identify(const ScoreVolume& vol, const IdentifyMethod& method) {
  method.validate();
  switch (method.kind) {
    case IdentifyKind::kMsp:
      return msp_identify(vol, method.tau.value_or(0.5));
    case IdentifyKind::kMaxLogit:
      return maxlogit_identify(vol, *method.tau);
    case IdentifyKind::kNPlus1:
      return nplus1_identify(vol);
    case IdentifyKind::kNPlus1Adjusted:
      return nplus1_identify(vol, method.beta_uk);
  }
  throw ValidationError("unhandled identification method");
}

SemanticMap identify_with_anomaly(const SemanticMap& closed_set, const AnomalyMap& anomaly,
                                  double tau) {
  if (!anomaly.same_shape(closed_set.labels())) {
    throw ValidationError("anomaly map and closed-set prediction differ in shape");
  }
  Grid<LabelId> out = closed_set.labels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!std::isfinite(anomaly[i])) throw ValidationError("anomaly map contains non-finite values");
    if (static_cast<double>(anomaly[i]) >= tau) out[i] = closed_set.unknown_id();
  }
  return SemanticMap(closed_set.num_known(), std::move(out));
}

}  // namespace goss
