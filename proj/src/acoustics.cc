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

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <ostream>

#include "eosseg/common.h"

namespace eosseg {

TokenInventory::TokenInventory(std::vector<std::string> words)
    : words_(std::move(words)) {
  for (size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], static_cast<int>(i)).second) {
      throw ConfigError("duplicate vocabulary entry: " + words_[i]);
    }
  }
  words_.push_back("<blank>");
  words_.push_back(kEosMarker);
}

int TokenInventory::Id(const std::string& text) const {
  auto it = index_.find(text);
  if (it == index_.end()) throw ConfigError("token not in vocabulary: " + text);
  return it->second;
}

const std::string& TokenInventory::Text(int id) const { return words_.at(id); }

std::vector<int> TokenInventory::Ids(const std::vector<std::string>& texts) const {
  std::vector<int> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(Id(t));
  return out;
}

std::vector<std::string> TokenInventory::Texts(const std::vector<int>& ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(Text(id));
  return out;
}

std::string ToString(Stream s) {
  return s == Stream::kCausal ? "causal" : "cascaded";
}

std::string ToString(FrameOrigin o) {
  switch (o) {
    case FrameOrigin::kReal: return "real";
    case FrameOrigin::kDummy: return "dummy";
    case FrameOrigin::kEncoded: return "encoded";
  }
  return "?";
}

void AcousticConfig::Validate() const {
  if (dim <= 0 || frame_ms <= 0 || right_context_frames < 0) {
    throw ConfigError("acoustic dim/frame_ms must be positive, R >= 0");
  }
  if (feature_noise < 0 || causal_noise < 0 || cascaded_noise < 0 ||
      eos_noise < 0) {
    throw ConfigError("noise levels must be >= 0");
  }
  if (cascaded_noise > causal_noise) {
    throw ConfigError("cascaded_noise must not exceed causal_noise");
  }
  if (eos_slope < 0 || eos_slope_before < 0) {
    throw ConfigError("EOS slopes must be >= 0");
  }
  if (match_width <= 0 || context_decay < 0 || context_decay > 1) {
    throw ConfigError("match_width must be > 0 and context_decay in [0, 1]");
  }
  if (!silence_feature.empty() &&
      static_cast<int>(silence_feature.size()) != dim) {
    throw ConfigError("silence_feature length must equal dim");
  }
}

std::vector<double> AcousticConfig::SilenceFeature() const {
  if (!silence_feature.empty()) return silence_feature;
  return std::vector<double>(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
}

int UtteranceTimeline::EosDistance(int frame_index) const {
  int best = INT_MAX;
  for (int e : eos_frames) best = std::min(best, std::abs(frame_index - e));
  return best;
}

double UtteranceTimeline::EosRamp(int frame_index, double slope_after,
                                  double slope_before) const {
  double best = std::numeric_limits<double>::infinity();
  for (int e : eos_frames) {
    double r = frame_index >= e ? slope_after * (frame_index - e)
                                : slope_before * (e - frame_index);
    best = std::min(best, r);
  }
  return best;
}

UtteranceTimeline BuildTimeline(const UtteranceSpec& spec,
                                const AnnotatedTranscript& annotated,
                                const TokenInventory& tokens,
                                const AcousticConfig& config) {
  UtteranceTimeline tl;
  tl.frame_ms = config.frame_ms;
  tl.num_frames = spec.total_ms / config.frame_ms;
  tl.word_at.assign(tl.num_frames, -1);
  tl.label.assign(tl.num_frames, tokens.blank());
  tl.utterance_key = HashString(spec.id);
  const int f = config.frame_ms;
  for (size_t w = 0; w < spec.words.size(); ++w) {
    const auto& word = spec.words[w];
    int first = word.start_ms / f;
    int last = (word.end_ms - 1) / f;
    for (int i = std::max(0, first); i <= last && i < tl.num_frames; ++i) {
      if (tl.word_at[i] < 0) tl.word_at[i] = static_cast<int>(w);
    }
    int final_frame = std::min(last, tl.num_frames - 1);
    tl.word_final.push_back(final_frame);
    if (final_frame >= 0) tl.label[final_frame] = tokens.Id(word.text);
  }
  for (int after : annotated.EosAfterWord()) {
    if (after < 0 || after >= static_cast<int>(tl.word_final.size())) continue;
    tl.eos_frames.push_back(tl.word_final[after] + 1);
  }
  return tl;
}

namespace {

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

uint64_t NoiseKey(uint64_t seed, uint64_t utt, uint64_t stream, uint64_t frame,
                  uint64_t slot) {
  return HashCombine(HashCombine(HashCombine(HashCombine(seed, utt), stream),
                                 frame),
                     slot);
}

constexpr uint64_t kFeatureStream = 7;

}  // namespace

SyntheticAcoustics::SyntheticAcoustics(AcousticConfig config,
                                       TokenInventory tokens)
    : config_(std::move(config)), tokens_(std::move(tokens)) {
  config_.Validate();
  silence_ = config_.SilenceFeature();
  double snorm = std::sqrt(Dot(silence_, silence_));
  std::vector<double> s_unit = silence_;
  if (snorm > 0) {
    for (auto& v : s_unit) v /= snorm;
  }
  // Word prototypes: pseudo-random directions orthogonal to silence.
  embeddings_.resize(tokens_.num_words());
  for (int w = 0; w < tokens_.num_words(); ++w) {
    uint64_t key = HashCombine(config_.seed ^ 0xe3b0c442ULL,
                               HashString(tokens_.Text(w)));
    std::vector<double> e(config_.dim);
    for (int d = 0; d < config_.dim; ++d) e[d] = HashNormal(HashCombine(key, d));
    double proj = Dot(e, s_unit);
    for (int d = 0; d < config_.dim; ++d) e[d] -= proj * s_unit[d];
    double n = std::sqrt(Dot(e, e));
    for (auto& v : e) v /= n;
    embeddings_[w] = std::move(e);
  }
}

std::vector<double> SyntheticAcoustics::CleanFeature(
    const UtteranceTimeline& timeline, const UtteranceSpec& spec,
    int frame_index) const {
  if (frame_index < 0 || frame_index >= timeline.num_frames) return silence_;
  int w = timeline.word_at[frame_index];
  if (w < 0) return silence_;
  return embeddings_[tokens_.Id(spec.words[w].text)];
}

std::vector<FeatureFrame> SyntheticAcoustics::CausalFeatures(
    const UtteranceSpec& spec) const {
  // The timeline's label/EOS fields are unused here.
  UtteranceTimeline tl =
      BuildTimeline(spec, AnnotatedTranscript{}, tokens_, config_);
  std::vector<FeatureFrame> frames(tl.num_frames);
  for (int i = 0; i < tl.num_frames; ++i) {
    FeatureFrame& fr = frames[i];
    fr.frame_index = i;
    fr.is_speech = tl.word_at[i] >= 0;
    fr.origin = FrameOrigin::kReal;
    fr.arrival_ms = (i + 1) * config_.frame_ms;
    fr.clean = CleanFeature(tl, spec, i);
    fr.values = fr.clean;
    if (config_.feature_noise > 0) {
      for (int d = 0; d < config_.dim; ++d) {
        fr.values[d] += config_.feature_noise *
                        HashNormal(NoiseKey(config_.seed, tl.utterance_key,
                                            kFeatureStream, i, d));
      }
    }
  }
  return frames;
}

PosteriorFrame SyntheticAcoustics::Posteriors(const FeatureFrame& frame,
                                              const UtteranceTimeline& timeline,
                                              Stream stream) const {
  EOSSEG_REQUIRE(frame.frame_index >= 0 && frame.frame_index < timeline.num_frames,
                 "posterior requested outside the utterance timeline");
  EOSSEG_REQUIRE(static_cast<int>(frame.values.size()) == config_.dim,
                 "feature dimension mismatch");
  const int t = frame.frame_index;
  const int label = timeline.label[t];
  const double sigma =
      stream == Stream::kCausal ? config_.causal_noise : config_.cascaded_noise;
  const uint64_t skey = stream == Stream::kCausal ? 1 : 2;

  double match = 1.0;
  if (!frame.clean.empty()) {
    double dev2 = 0.0;
    for (int d = 0; d < config_.dim; ++d) {
      double diff = frame.values[d] - frame.clean[d];
      dev2 += diff * diff;
    }
    match = std::exp(-dev2 / (config_.match_width * config_.match_width));
  }

  const int n = tokens_.num_words() + 1;  // words + blank
  std::vector<double> logits(n);
  for (int v = 0; v < n; ++v) {
    const bool is_blank = v == tokens_.blank();
    const auto& proto = is_blank ? silence_ : embeddings_[v];
    double z = config_.evidence_scale * Dot(frame.values, proto);
    if (v == label) {
      z += (is_blank ? config_.blank_margin : config_.word_margin) * match;
    }
    if (sigma > 0) {
      z += sigma * HashNormal(NoiseKey(config_.seed, timeline.utterance_key,
                                       skey, t, v));
    }
    logits[v] = z;
  }
  double zmax = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - zmax);
  double log_norm = zmax + std::log(sum);

  double eos_cost =
      config_.eos_base +
      timeline.EosRamp(t, config_.eos_slope, config_.eos_slope_before);
  eos_cost = std::min(eos_cost, config_.eos_cost_cap);
  if (config_.eos_noise > 0) {
    eos_cost += config_.eos_noise *
                HashNormal(NoiseKey(config_.seed, timeline.utterance_key, skey,
                                    t, tokens_.eos()));
  }
  // Keep EOS strictly inside the distribution.
  eos_cost = std::clamp(eos_cost, 1e-3, config_.eos_cost_cap);
  const double p_eos = std::exp(-eos_cost);
  const double rest = -std::log1p(-p_eos);

  PosteriorFrame out;
  out.frame_index = t;
  out.stream = stream;
  out.costs.resize(tokens_.size());
  for (int v = 0; v < n; ++v) out.costs[v] = log_norm - logits[v] + rest;
  out.costs[tokens_.eos()] = eos_cost;
  return out;
}

PosteriorFrame SyntheticAcoustics::Posteriors(const FeatureFrame& frame,
                                              const UtteranceSpec& spec,
                                              const AnnotatedTranscript& annotated,
                                              Stream stream) const {
  return Posteriors(frame, BuildTimeline(spec, annotated, tokens_, config_),
                    stream);
}

namespace {

FeatureFrame Aggregate(const std::vector<FeatureFrame>& window, double decay) {
  const size_t dim = window.front().values.size();
  bool have_clean = true;
  for (const auto& f : window) {
    EOSSEG_REQUIRE(f.values.size() == dim, "window frames differ in dimension");
    have_clean = have_clean && f.clean.size() == dim;
  }
  std::vector<double> weights(window.size());
  double wsum = 0.0;
  for (size_t k = 0; k < window.size(); ++k) {
    weights[k] = std::pow(decay, static_cast<double>(k));
    wsum += weights[k];
  }
  FeatureFrame out;
  out.frame_index = window.front().frame_index;
  out.is_speech = window.front().is_speech;
  out.origin = FrameOrigin::kEncoded;
  out.values.assign(dim, 0.0);
  if (have_clean) out.clean.assign(dim, 0.0);
  for (size_t k = 0; k < window.size(); ++k) {
    const double w = weights[k] / wsum;
    for (size_t d = 0; d < dim; ++d) {
      out.values[d] += w * window[k].values[d];
      if (have_clean) out.clean[d] += w * window[k].clean[d];
    }
    out.arrival_ms = std::max(out.arrival_ms, window[k].arrival_ms);
  }
  return out;
}

}  // namespace

FeatureFrame CascadedEncode(const std::vector<FeatureFrame>& window,
                            const AcousticConfig& config) {
  EOSSEG_REQUIRE(
      static_cast<int>(window.size()) == config.right_context_frames + 1,
      "cascaded window must hold exactly R + 1 frames");
  return Aggregate(window, config.context_decay);
}

FeatureFrame CascadedEncodeTruncated(const std::vector<FeatureFrame>& window,
                                     const AcousticConfig& config) {
  EOSSEG_REQUIRE(!window.empty() && static_cast<int>(window.size()) <=
                                        config.right_context_frames + 1,
                 "truncated window must hold 1..R+1 frames");
  return Aggregate(window, config.context_decay);
}

std::vector<FeatureFrame> InjectDummyFrames(const FeatureFrame& last_frame,
                                            DummyMode mode, int count) {
  EOSSEG_REQUIRE(count >= 0, "dummy frame count must be >= 0");
  std::vector<FeatureFrame> out;
  out.reserve(count);
  for (int k = 1; k <= count; ++k) {
    FeatureFrame f;
    f.values = mode == DummyMode::kZero
                   ? std::vector<double>(last_frame.values.size(), 0.0)
                   : last_frame.values;
    f.frame_index = last_frame.frame_index + k;
    f.is_speech = mode == DummyMode::kLast && last_frame.is_speech;
    f.origin = FrameOrigin::kDummy;
    f.arrival_ms = last_frame.arrival_ms;
    out.push_back(std::move(f));
  }
  return out;
}

void DumpPosteriors(std::ostream& out, const std::vector<PosteriorFrame>& frames,
                    const TokenInventory& tokens) {
  out << "frame\tstream";
  for (int v = 0; v < tokens.size(); ++v) out << '\t' << tokens.Text(v);
  out << '\n';
  for (const auto& f : frames) {
    out << f.frame_index << '\t' << ToString(f.stream);
    for (double c : f.costs) out << '\t' << c;
    out << '\n';
  }
}

}  // namespace eosseg
