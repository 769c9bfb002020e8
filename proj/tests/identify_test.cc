#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "goss/identify.h"

namespace goss {
namespace {

ScoreVolume pixel(std::vector<float> scores, bool softmax) {
  const int c = static_cast<int>(scores.size());
  return ScoreVolume(c, 1, 1, std::move(scores), softmax);
}

ScoreVolume random_softmax(std::mt19937& rng, int c, int h, int w) {
  std::vector<float> data(static_cast<std::size_t>(c) * h * w);
  std::exponential_distribution<double> e(1.0);
  const std::size_t n = static_cast<std::size_t>(h) * w;
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<double> v(static_cast<std::size_t>(c));
    for (auto& x : v) x = e(rng);
    const double s = std::accumulate(v.begin(), v.end(), 0.0);
    for (int k = 0; k < c; ++k) data[k * n + p] = static_cast<float>(v[k] / s);
  }
  return ScoreVolume(c, h, w, std::move(data), true);
}

TEST(Msp, Examples) {
  EXPECT_EQ(msp_identify(pixel({0.7f, 0.2f, 0.1f}, true), 0.5)[0], 0);
  EXPECT_EQ(msp_identify(pixel({0.4f, 0.35f, 0.25f}, true), 0.5)[0], 3);
}

TEST(Msp, ZeroThresholdIsArgmax) {
  std::mt19937 rng(1);
  const ScoreVolume v = random_softmax(rng, 4, 6, 6);
  const SemanticMap m = msp_identify(v, 0.0);
  const SemanticMap plain = nplus1_identify(ScoreVolume(4, 6, 6, v.data(), false));
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_LT(m[i], 4);
    EXPECT_EQ(m[i], plain[i]);
  }
}

TEST(Msp, RequiresSoftmaxAndRange) {
  EXPECT_THROW(msp_identify(pixel({3.0f, 1.0f}, false), 0.5), ValidationError);
  EXPECT_THROW(msp_identify(pixel({0.5f, 0.5f}, true), 1.5), ValidationError);
}

TEST(Msp, TiesGoToLowestChannel) {
  EXPECT_EQ(msp_identify(pixel({0.5f, 0.5f}, true), 0.5)[0], 0);
}

TEST(MaxLogit, Examples) {
  EXPECT_EQ(maxlogit_identify(pixel({5.0f, 1.0f}, false), -2.0)[0], 0);
  EXPECT_EQ(maxlogit_identify(pixel({0.1f, 0.2f}, false), -1.0)[0], 2);
}

TEST(Adjust, Example) {
  const ScoreVolume a = adjust_confidence(pixel({0.5f, 0.3f, 0.2f}, true), 5.0);
  EXPECT_FLOAT_EQ(a.at(0, 0), 0.5f);
  EXPECT_FLOAT_EQ(a.at(1, 0), 0.3f);
  EXPECT_FLOAT_EQ(a.at(2, 0), 1.0f);
  EXPECT_FALSE(a.softmax());
}

TEST(Adjust, NearOneIsNearIdentity) {
  const ScoreVolume a = adjust_confidence(pixel({0.5f, 0.3f, 0.2f}, true), 1.0 + 1e-9);
  EXPECT_NEAR(a.at(2, 0), 0.2f, 1e-6);
}

TEST(Adjust, RejectsBadBeta) {
  EXPECT_THROW(adjust_confidence(pixel({0.5f, 0.5f}, true), 1.0), ValidationError);
  EXPECT_THROW(adjust_confidence(pixel({0.5f, 0.5f}, true), 0.5), ValidationError);
  EXPECT_THROW(adjust_confidence(pixel({1.0f}, true), 5.0), ValidationError);
}

TEST(NPlus1, Examples) {
  EXPECT_EQ(nplus1_identify(pixel({0.5f, 0.3f, 0.2f}, true))[0], 0);
  EXPECT_EQ(nplus1_identify(pixel({0.5f, 0.3f, 0.2f}, true), 5.0)[0], 2);
  EXPECT_EQ(nplus1_identify(pixel({0.5f, 0.3f, 0.2f}, true)).num_known(), 2);
}

TEST(Anomaly, Examples) {
  EXPECT_FLOAT_EQ(anomaly_map(pixel({1.0f, 0.0f}, true), {IdentifyKind::kMsp})[0], 0.0f);
  EXPECT_FLOAT_EQ(anomaly_map(pixel({3.0f, -1.0f}, false), {IdentifyKind::kMaxLogit, -1.0})[0], -3.0f);
  EXPECT_FLOAT_EQ(anomaly_map(pixel({0.5f, 0.3f, 0.2f}, true), {IdentifyKind::kNPlus1Adjusted, {}, 5.0})[0],
                  1.0f);
  EXPECT_FLOAT_EQ(anomaly_map(pixel({0.5f, 0.3f, 0.2f}, true), {IdentifyKind::kNPlus1})[0], 0.2f);
}

TEST(Anomaly, ThresholdingMatchesDirectIdentification) {
  std::mt19937 rng(3);
  const ScoreVolume v = random_softmax(rng, 5, 8, 8);
  const IdentifyMethod msp{IdentifyKind::kMsp, 0.4};
  const SemanticMap direct = identify(v, msp);
  const SemanticMap closed = msp_identify(v, 0.0);
  for (std::size_t i = 0; i < direct.size(); ++i) {
    EXPECT_EQ(direct.is_unknown(i), static_cast<double>(v.at(closed[i], i)) < 0.4);
  }
  const SemanticMap via = identify_with_anomaly(closed, anomaly_map(v, {IdentifyKind::kMaxLogit, 0.0}), -0.4);
  for (std::size_t i = 0; i < via.size(); ++i) {
    EXPECT_EQ(via.is_unknown(i), -static_cast<double>(v.at(closed[i], i)) >= -0.4);
  }
}

TEST(Method, ValidationAndNames) {
  EXPECT_THROW((IdentifyMethod{IdentifyKind::kMaxLogit}).validate(), ValidationError);
  EXPECT_THROW((IdentifyMethod{IdentifyKind::kNPlus1Adjusted, {}, 1.0}).validate(), ValidationError);
  EXPECT_NO_THROW((IdentifyMethod{IdentifyKind::kMsp}).validate());
  for (auto k : {IdentifyKind::kMsp, IdentifyKind::kMaxLogit, IdentifyKind::kNPlus1,
                 IdentifyKind::kNPlus1Adjusted}) {
    EXPECT_EQ(identify_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(identify_kind_from_string("entropy"), ValidationError);
  EXPECT_EQ((IdentifyMethod{IdentifyKind::kNPlus1}).num_known(6), 5);
  EXPECT_EQ((IdentifyMethod{IdentifyKind::kMsp}).num_known(6), 6);
}

// Raising tau can only turn known pixels into unknown, never the reverse.
TEST(Monotonicity, MspThreshold) {
  std::mt19937 rng(10);
  for (int t = 0; t < 20; ++t) {
    const ScoreVolume v = random_softmax(rng, 4, 8, 8);
    SemanticMap prev = msp_identify(v, 0.0);
    for (double tau = 0.05; tau <= 1.0; tau += 0.05) {
      const SemanticMap cur = msp_identify(v, tau);
      for (std::size_t i = 0; i < cur.size(); ++i) {
        if (prev.is_unknown(i)) EXPECT_TRUE(cur.is_unknown(i));
        if (!cur.is_unknown(i)) EXPECT_EQ(cur[i], prev[i]);
      }
      prev = cur;
    }
  }
}

TEST(Monotonicity, NPlus1Beta) {
  std::mt19937 rng(12);
  for (int t = 0; t < 20; ++t) {
    const ScoreVolume v = random_softmax(rng, 4, 8, 8);
    SemanticMap prev = nplus1_identify(v, 1.0 + 1e-6);
    for (double beta = 1.25; beta <= 20.0; beta += 0.25) {
      const SemanticMap cur = nplus1_identify(v, beta);
      for (std::size_t i = 0; i < cur.size(); ++i) {
        if (prev.is_unknown(i)) EXPECT_TRUE(cur.is_unknown(i));
      }
      prev = cur;
    }
  }
}

// Relabelling the known channels permutes the decisions and nothing else.
TEST(Msp, ChannelPermutationInvariance) {
  std::mt19937 rng(21);
  const ScoreVolume v = random_softmax(rng, 4, 5, 5);
  const std::vector<int> perm = {2, 0, 3, 1};
  std::vector<float> data(v.data().size());
  const std::size_t n = v.pixels();
  for (int c = 0; c < 4; ++c) {
    std::copy(v.channel(c).begin(), v.channel(c).end(), data.begin() + perm[c] * n);
  }
  const ScoreVolume pv(4, 5, 5, data, true);
  const SemanticMap a = msp_identify(v, 0.45);
  const SemanticMap b = msp_identify(pv, 0.45);
  for (std::size_t i = 0; i < n; ++i) {
    if (a.is_unknown(i)) {
      EXPECT_TRUE(b.is_unknown(i));
    } else {
      EXPECT_EQ(b[i], perm[a[i]]);
    }
  }
}

}  // namespace
}  // namespace goss
