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

#include "eosseg/vad.h"

#include <vector>

#include "eosseg/common.h"
#include "gtest/gtest.h"

namespace eosseg {
namespace {

constexpr VadLabel S = VadLabel::kSpeech;
constexpr VadLabel N = VadLabel::kSilence;

// Runs the detector; returns the frame indices that emitted EOS.
std::vector<int> RunVad(const std::vector<VadLabel>& labels, const VadConfig& c) {
  VadState st;
  std::vector<int> out;
  for (size_t i = 0; i < labels.size(); ++i) {
    auto r = VadStep(st, labels[i], static_cast<int>(i + 1) * c.frame_ms, c);
    if (r.eos) {
      EXPECT_EQ(r.eos->timestamp_ms, static_cast<int>(i + 1) * c.frame_ms);
      out.push_back(static_cast<int>(i));
    }
    st = r.state;
  }
  return out;
}

// Reference: within each silence run, the k-th silent frame (1-based) fires
// when k reaches the trigger length and every trigger length after that.
std::vector<int> ReferenceVad(const std::vector<VadLabel>& labels, const VadConfig& c) {
  const int period = (c.trigger_ms + c.frame_ms - 1) / c.frame_ms;
  std::vector<int> out;
  int k = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    k = labels[i] == S ? 0 : k + 1;
    if (k >= period && (k - period) % period == 0) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<VadLabel> Labels(const std::vector<std::pair<VadLabel, int>>& runs) {
  std::vector<VadLabel> out;
  for (auto [l, n] : runs) out.insert(out.end(), n, l);
  return out;
}

TEST(VadTest, FiresAfterTriggerLengthOfSilence) {
  VadConfig c;
  // 7 silent frames = 210 ms is the first to reach 200 ms.
  EXPECT_EQ(RunVad(Labels({{S, 5}, {N, 7}}), c), (std::vector<int>{11}));
  EXPECT_TRUE(RunVad(Labels({{S, 5}, {N, 6}}), c).empty());
}

TEST(VadTest, LongSilenceRetriggers) {
  VadConfig c;
  // 510 ms of silence: fires at 210 ms and again at 420 ms.
  auto eos = RunVad(Labels({{S, 10}, {N, 17}}), c);
  EXPECT_EQ(eos.size(), 2u);
  EXPECT_EQ(RunVad(Labels({{S, 10}, {N, 21}}), c).size(), 3u);
}

TEST(VadTest, SpeechResetsTheCounter) {
  VadConfig c;
  EXPECT_TRUE(RunVad(Labels({{N, 6}, {S, 1}, {N, 6}, {S, 1}}), c).empty());
}

TEST(VadTest, MatchesReferenceOnRandomSequences) {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    VadConfig c;
    c.trigger_ms = static_cast<int>(rng.UniformInt(10, 400));
    c.frame_ms = static_cast<int>(rng.UniformInt(5, 60));
    std::vector<VadLabel> labels(rng.UniformInt(0, 200));
    const double p = rng.Uniform();
    for (auto& l : labels) l = rng.Bernoulli(p) ? N : S;
    ASSERT_EQ(RunVad(labels, c), ReferenceVad(labels, c))
        << "trigger " << c.trigger_ms << " frame " << c.frame_ms;
  }
}

TEST(VadTest, OutOfOrderFramesAreRejected) {
  VadConfig c;
  VadState st = VadStep(VadState{}, N, 60, c).state;
  EXPECT_THROW(VadStep(st, N, 60, c), ContractViolation);
}

TEST(FrameFilterTest, DropsSilenceBeyondTheTrigger) {
  VadConfig c;
  auto labels = Labels({{S, 3}, {N, 20}, {S, 2}, {N, 4}});
  VadState st;
  int kept_silence = 0, kept_speech = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (FrameFilter(st, labels[i], c) == FilterDecision::kKeep) {
      (labels[i] == S ? kept_speech : kept_silence)++;
    }
    st = VadStep(st, labels[i], static_cast<int>(i + 1) * c.frame_ms, c).state;
  }
  EXPECT_EQ(kept_speech, 5);
  EXPECT_EQ(kept_silence, 7 + 4);  // first trigger-length of each run
}

TEST(FrameFilterTest, DisabledKeepsEverything) {
  VadConfig c;
  c.filter_enabled = false;
  VadState st;
  st.consecutive_silence_ms = 10000;
  EXPECT_EQ(FrameFilter(st, N, c), FilterDecision::kKeep);
}

TEST(VadTest, ClassifyUsesGroundTruth) {
  FeatureFrame f;
  f.is_speech = true;
  EXPECT_EQ(Classify(f), S);
  f.is_speech = false;
  EXPECT_EQ(Classify(f), N);
  VadConfig bad;
  bad.trigger_ms = 0;
  EXPECT_THROW(bad.Validate(), ConfigError);
}

}  // namespace
}  // namespace eosseg
