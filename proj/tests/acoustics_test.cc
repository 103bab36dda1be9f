// Copyright (c) 2026 The eosseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eosseg/acoustics.h"

#include <cmath>
#include <sstream>

#include "eosseg/common.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace eosseg {
namespace {

// "hello" [300, 900), "world" [1000, 1600), then silence.
UtteranceSpec HelloWorld(int total_ms = 2200) {
  return testing_util::MakeSpec({{"hello", 300, 900, false}, {"world", 1000, 1600, false}},
                                total_ms, DomainKind::kShortQuery);
}

TokenInventory Tokens() { return TokenInventory({"hello", "world", "uh"}); }

SyntheticAcoustics Quiet() {
  AcousticConfig c;
  c.feature_noise = 0;
  c.causal_noise = 0;
  c.cascaded_noise = 0;
  c.eos_noise = 0;
  return SyntheticAcoustics(c, Tokens());
}

double LogSumExpNeg(const std::vector<double>& costs) {
  double m = -*std::min_element(costs.begin(), costs.end());
  double s = 0;
  for (double c : costs) s += std::exp(-c - m);
  return m + std::log(s);
}

int Argmin(const PosteriorFrame& p, int limit) {
  return static_cast<int>(std::min_element(p.costs.begin(), p.costs.begin() + limit) -
                          p.costs.begin());
}

TEST(TokenInventoryTest, BlankAndEosFollowTheVocabulary) {
  TokenInventory t = Tokens();
  EXPECT_EQ(t.num_words(), 3);
  EXPECT_EQ(t.blank(), 3);
  EXPECT_EQ(t.eos(), 4);
  EXPECT_EQ(t.size(), 5);
  EXPECT_EQ(t.Text(t.eos()), kEosMarker);
  EXPECT_EQ(t.Ids({"world", "hello"}), (std::vector<int>{1, 0}));
  EXPECT_EQ(t.Texts({0, 4}), (std::vector<std::string>{"hello", kEosMarker}));
  EXPECT_THROW(t.Id("nope"), ConfigError);
}

TEST(AcousticsTest, OneFramePerTick) {
  auto ac = Quiet();
  auto frames = ac.CausalFeatures(HelloWorld(2200));
  ASSERT_EQ(frames.size(), 2200u / 30);
  for (size_t i = 0; i < frames.size(); ++i) {
    EXPECT_EQ(frames[i].frame_index, static_cast<int>(i));
    EXPECT_EQ(frames[i].arrival_ms, static_cast<int>(i + 1) * 30);
    EXPECT_EQ(frames[i].values.size(), 16u);
    EXPECT_EQ(frames[i].origin, FrameOrigin::kReal);
  }
  EXPECT_FALSE(frames[5].is_speech);  // 150 ms, before "hello"
  EXPECT_TRUE(frames[15].is_speech);  // 450 ms
}

TEST(AcousticsTest, PosteriorsFormOneDistributionIncludingEos) {
  AcousticConfig c;  // noisy defaults
  SyntheticAcoustics ac(c, Tokens());
  auto spec = HelloWorld();
  auto ann = AnnotateEos(spec, 600);
  auto tl = BuildTimeline(spec, ann, ac.tokens(), c);
  for (const auto& f : ac.CausalFeatures(spec)) {
    for (Stream s : {Stream::kCausal, Stream::kCascaded}) {
      auto p = ac.Posteriors(f, tl, s);
      ASSERT_EQ(p.costs.size(), 5u);
      EXPECT_NEAR(LogSumExpNeg(p.costs), 0.0, 1e-9);
      for (double v : p.costs) EXPECT_TRUE(std::isfinite(v));
    }
  }
}

TEST(AcousticsTest, NoiselessPosteriorsFollowTheLabels) {
  auto ac = Quiet();
  auto spec = HelloWorld();
  auto ann = AnnotateEos(spec, 600);
  auto tl = BuildTimeline(spec, ann, ac.tokens(), ac.config());
  auto frames = ac.CausalFeatures(spec);
  for (const auto& f : frames) {
    auto p = ac.Posteriors(f, tl, Stream::kCausal);
    EXPECT_EQ(Argmin(p, ac.tokens().eos()), tl.label[f.frame_index]);
  }
  // "world" ends at 1600 ms: word-final frame 53.
  EXPECT_EQ(tl.word_final, (std::vector<int>{29, 53}));
  EXPECT_EQ(tl.label[53], 1);
}

TEST(AcousticsTest, EosCostIsLowestRightAfterTheWordAndCapped) {
  auto ac = Quiet();
  auto spec = testing_util::MakeSpec({{"hello", 0, 600, false}, {"world", 1500, 1800, false}},
                                     2400);
  auto ann = AnnotateEos(spec, 600);
  ASSERT_EQ(ann.EosAfterWord(), (std::vector<int>{0}));
  auto tl = BuildTimeline(spec, ann, ac.tokens(), ac.config());
  ASSERT_EQ(tl.eos_frames, (std::vector<int>{20}));
  auto frames = ac.CausalFeatures(spec);
  const int eos = ac.tokens().eos();
  auto cost = [&](int t) { return ac.Posteriors(frames[t], tl, Stream::kCausal).cost(eos); };
  EXPECT_NEAR(cost(20), ac.config().eos_base, 1e-12);
  EXPECT_LT(cost(20), cost(19));
  EXPECT_LT(cost(20), cost(21));
  EXPECT_GT(cost(19) - cost(20), cost(21) - cost(20));  // steeper before
  EXPECT_DOUBLE_EQ(cost(70), ac.config().eos_cost_cap);
  EXPECT_EQ(tl.EosDistance(18), 2);
  EXPECT_DOUBLE_EQ(tl.EosRamp(22, 2.0, 4.0), 4.0);
  EXPECT_DOUBLE_EQ(tl.EosRamp(18, 2.0, 4.0), 8.0);
}

TEST(AcousticsTest, NoiseIsDeterministicPerUtterance) {
  SyntheticAcoustics ac(AcousticConfig{}, Tokens());
  auto a = ac.CausalFeatures(HelloWorld());
  auto b = ac.CausalFeatures(HelloWorld());
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].values, b[i].values);
  auto other = HelloWorld();
  other.id = "t1";
  EXPECT_NE(ac.CausalFeatures(other)[3].values, a[3].values);
}

TEST(AcousticsTest, CleanFeatureBeyondAudioIsSilence) {
  auto ac = Quiet();
  auto spec = HelloWorld();
  auto tl = BuildTimeline(spec, AnnotateEos(spec, 600), ac.tokens(), ac.config());
  EXPECT_EQ(ac.CleanFeature(tl, spec, tl.num_frames + 4), ac.config().SilenceFeature());
  EXPECT_EQ(ac.CleanFeature(tl, spec, 15), ac.embedding(0));
}

TEST(CascadedEncodeTest, WindowContractAndArrival) {
  AcousticConfig c;
  std::vector<FeatureFrame> w(c.right_context_frames + 1);
  for (size_t k = 0; k < w.size(); ++k) {
    w[k].values.assign(c.dim, static_cast<double>(k));
    w[k].frame_index = 10 + static_cast<int>(k);
    w[k].arrival_ms = 30 * static_cast<int>(k + 11);
  }
  FeatureFrame e = CascadedEncode(w, c);
  EXPECT_EQ(e.frame_index, 10);
  EXPECT_EQ(e.origin, FrameOrigin::kEncoded);
  EXPECT_EQ(e.arrival_ms, w.back().arrival_ms);
  // Weights decay with distance and sum to one.
  double wsum = 0, num = 0;
  for (size_t k = 0; k < w.size(); ++k) {
    double wk = std::pow(c.context_decay, static_cast<double>(k));
    wsum += wk;
    num += wk * k;
  }
  EXPECT_NEAR(e.values[0], num / wsum, 1e-12);
  w.pop_back();
  EXPECT_THROW(CascadedEncode(w, c), ContractViolation);
  EXPECT_NO_THROW(CascadedEncodeTruncated(w, c));
  EXPECT_THROW(CascadedEncodeTruncated({}, c), ContractViolation);
}

TEST(DummyFramesTest, ZeroAndLastCopies) {
  FeatureFrame last;
  last.values = {1.0, -2.0};
  last.frame_index = 7;
  last.is_speech = true;
  last.arrival_ms = 240;
  auto zero = InjectDummyFrames(last, DummyMode::kZero, 3);
  auto copy = InjectDummyFrames(last, DummyMode::kLast, 3);
  ASSERT_EQ(zero.size(), 3u);
  ASSERT_EQ(copy.size(), 3u);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(zero[k].values, (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(copy[k].values, last.values);
    EXPECT_EQ(copy[k].frame_index, 8 + k);
    EXPECT_EQ(copy[k].origin, FrameOrigin::kDummy);
    EXPECT_EQ(copy[k].arrival_ms, 240);
  }
  EXPECT_TRUE(InjectDummyFrames(last, DummyMode::kLast, 0).empty());
  EXPECT_THROW(InjectDummyFrames(last, DummyMode::kZero, -1), ContractViolation);
}

TEST(AcousticConfigTest, ValidationRejectsBadValues) {
  AcousticConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.dim = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = AcousticConfig{};
  c.causal_noise = -1;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = AcousticConfig{};
  c.silence_feature = {1.0};
  EXPECT_THROW(c.Validate(), ConfigError);
  EXPECT_EQ(AcousticConfig{}.lag_ms(), 900);
}

TEST(AcousticsTest, DumpHasHeaderAndOneRowPerFrame) {
  auto ac = Quiet();
  auto spec = HelloWorld();
  auto ann = AnnotateEos(spec, 600);
  auto frames = ac.CausalFeatures(spec);
  std::vector<PosteriorFrame> post;
  for (int i = 0; i < 3; ++i) post.push_back(ac.Posteriors(frames[i], spec, ann, Stream::kCausal));
  std::ostringstream out;
  DumpPosteriors(out, post, ac.tokens());
  std::string line;
  std::istringstream in(out.str());
  std::getline(in, line);
  EXPECT_EQ(line, "frame\tstream\thello\tworld\tuh\t<blank>\t<EOS>");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

}  // namespace
}  // namespace eosseg
