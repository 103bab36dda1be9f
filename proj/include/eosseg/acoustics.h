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

#ifndef EOSSEG_ACOUSTICS_H_
#define EOSSEG_ACOUSTICS_H_

// Synthetic stand-in for the causal encoder, the cascaded (non-causal)
// encoder and the ASR/EOS joint layers. Everything is a deterministic
// function of the utterance script and the configured seed, so decoding
// experiments are exactly reproducible.
//
// Posterior model. For a frame whose encoder output is y and whose
// noise-free counterpart is c, the logit of vocabulary token v is
//
//   evidence_scale * <y, e_v> + word_margin * m * [v is the label] + noise
//
// and the blank logit uses the silence prototype s with blank_margin.
// m = exp(-|y - c|^2 / match_width^2) measures how far the encoder input
// is from what the joint expects; injected dummy frames that do not look
// like the real continuation lower m. The EOS cost is set directly as
// eos_base + eos_slope * distance (frames) past the nearest annotated EOS
// frame (eos_slope_before when still ahead of it), plus noise, and the
// remaining mass is renormalized.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "eosseg/corpus.h"

namespace eosseg {

// Vocabulary ids, then blank, then EOS.
class TokenInventory {
 public:
  explicit TokenInventory(std::vector<std::string> words);

  int num_words() const { return static_cast<int>(words_.size()) - 2; }
  int size() const { return num_words() + 2; }
  int blank() const { return num_words(); }
  int eos() const { return num_words() + 1; }

  int Id(const std::string& text) const;  // throws ConfigError if unknown
  const std::string& Text(int id) const;
  std::vector<int> Ids(const std::vector<std::string>& texts) const;
  std::vector<std::string> Texts(const std::vector<int>& ids) const;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

enum class Stream { kCausal, kCascaded };
enum class FrameOrigin { kReal, kDummy, kEncoded };
enum class DummyMode { kZero, kLast };

std::string ToString(Stream s);
std::string ToString(FrameOrigin o);

struct FeatureFrame {
  std::vector<double> values;
  int frame_index = 0;
  bool is_speech = false;  // ground truth
  FrameOrigin origin = FrameOrigin::kReal;
  // Noise-free counterpart the joint layer is matched against. Empty means
  // "unknown", in which case values are trusted as-is.
  std::vector<double> clean;
  // Wall-clock time the frame became available to consumers.
  int arrival_ms = 0;
};

struct PosteriorFrame {
  std::vector<double> costs;  // negative log probability per token id
  int frame_index = 0;
  Stream stream = Stream::kCausal;

  double cost(int token) const { return costs[token]; }
};

struct AcousticConfig {
  int dim = 16;
  int frame_ms = 30;
  int right_context_frames = 30;
  uint64_t seed = 17;

  double feature_noise = 0.08;
  double causal_noise = 2.0;
  double cascaded_noise = 1.9;
  double eos_noise = 0.6;

  double evidence_scale = 3.0;
  double word_margin = 9.0;
  double blank_margin = 12.0;
  double match_width = 0.8;

  double eos_base = 1.0;
  double eos_slope = 2.0;
  // Slope on frames before the EOS position, i.e. while the word is still
  // being spoken; EOS should not fire ahead of the silence.
  double eos_slope_before = 4.0;
  double eos_cost_cap = 40.0;
  double context_decay = 0.7;

  // Empty means the default: all-ones scaled to unit norm.
  std::vector<double> silence_feature;

  static AcousticConfig Default() { return AcousticConfig{}; }
  void Validate() const;  // throws ConfigError
  std::vector<double> SilenceFeature() const;
  int lag_ms() const { return right_context_frames * frame_ms; }
};

// Per-frame ground truth derived from the script, rebuilt once per utterance.
struct UtteranceTimeline {
  int num_frames = 0;
  int frame_ms = 0;
  std::vector<int> word_at;       // word index overlapping the frame, or -1
  std::vector<int> label;         // token id emitted at the frame, or blank
  std::vector<int> eos_frames;    // first frame after each annotated EOS
  std::vector<int> word_final;    // word-final frame per word
  uint64_t utterance_key = 0;

  int EosDistance(int frame_index) const;  // INT32_MAX when no EOS annotated
  // Smallest slope-weighted distance to an annotated EOS frame; +inf when
  // none is annotated.
  double EosRamp(int frame_index, double slope_after, double slope_before) const;
};

UtteranceTimeline BuildTimeline(const UtteranceSpec& spec,
                                const AnnotatedTranscript& annotated,
                                const TokenInventory& tokens,
                                const AcousticConfig& config);

class SyntheticAcoustics {
 public:
  SyntheticAcoustics(AcousticConfig config, TokenInventory tokens);

  const AcousticConfig& config() const { return config_; }
  const TokenInventory& tokens() const { return tokens_; }
  const std::vector<double>& embedding(int token) const {
    return embeddings_[token];
  }

  // One frame per frame_ms tick covering [0, total_ms).
  std::vector<FeatureFrame> CausalFeatures(const UtteranceSpec& spec) const;
  // Noise-free causal encoder output at a frame of the real timeline.
  // Frames past the end of the audio read as silence.
  std::vector<double> CleanFeature(const UtteranceTimeline& timeline,
                                   const UtteranceSpec& spec,
                                   int frame_index) const;

  PosteriorFrame Posteriors(const FeatureFrame& frame,
                            const UtteranceTimeline& timeline,
                            Stream stream) const;
  // Convenience overload that rebuilds the timeline; intended for tests.
  PosteriorFrame Posteriors(const FeatureFrame& frame,
                            const UtteranceSpec& spec,
                            const AnnotatedTranscript& annotated,
                            Stream stream) const;

 private:
  AcousticConfig config_;
  TokenInventory tokens_;
  std::vector<double> silence_;
  std::vector<std::vector<double>> embeddings_;  // per vocabulary token
};

// Weighted average of a window whose first element is the center frame;
// weights decay geometrically with right-context offset and are renormalized.
// Requires exactly right_context_frames + 1 frames.
FeatureFrame CascadedEncode(const std::vector<FeatureFrame>& window,
                            const AcousticConfig& config);
// Same aggregation over a window cut short by the end of the audio.
FeatureFrame CascadedEncodeTruncated(const std::vector<FeatureFrame>& window,
                                     const AcousticConfig& config);

std::vector<FeatureFrame> InjectDummyFrames(const FeatureFrame& last_frame,
                                            DummyMode mode, int count);

// Tab-separated per-frame costs, for inspection.
void DumpPosteriors(std::ostream& out, const std::vector<PosteriorFrame>& frames,
                    const TokenInventory& tokens);

}  // namespace eosseg

#endif  // EOSSEG_ACOUSTICS_H_
