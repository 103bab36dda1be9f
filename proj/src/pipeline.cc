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

#include "eosseg/pipeline.h"

#include <algorithm>
#include <deque>
#include <ostream>

#include "eosseg/common.h"

namespace eosseg {

std::string ToString(Strategy s) {
  switch (s) {
    case Strategy::kB1Immediate: return "B1";
    case Strategy::kB2Wait: return "B2";
    case Strategy::kE1DummyZero: return "E1";
    case Strategy::kE2DummyLast: return "E2";
  }
  return "?";
}

Strategy StrategyFromString(const std::string& s) {
  if (s == "B1") return Strategy::kB1Immediate;
  if (s == "B2") return Strategy::kB2Wait;
  if (s == "E1") return Strategy::kE1DummyZero;
  if (s == "E2") return Strategy::kE2DummyLast;
  throw ConfigError("unknown strategy: " + s);
}

std::string ToString(SegmenterKind k) {
  switch (k) {
    case SegmenterKind::kFixed: return "fixed";
    case SegmenterKind::kVad: return "vad";
    case SegmenterKind::kE2e: return "e2e";
  }
  return "?";
}

SegmenterKind SegmenterKindFromString(const std::string& s) {
  if (s == "fixed") return SegmenterKind::kFixed;
  if (s == "vad") return SegmenterKind::kVad;
  if (s == "e2e") return SegmenterKind::kE2e;
  throw ConfigError("unknown segmenter: " + s);
}

std::string ToString(EventKind k) {
  switch (k) {
    case EventKind::kFrameArrival: return "frame_arrival";
    case EventKind::kEosEmitted: return "eos_emitted";
    case EventKind::kSecondPassCenterAdvanced: return "second_pass_center_advanced";
    case EventKind::kDummyInjection: return "dummy_injection";
    case EventKind::kSegmentFinalized: return "segment_finalized";
  }
  return "?";
}

void PipelineConfig::Validate() const {
  if (frame_ms <= 0) throw ConfigError("pipeline.frame_ms must be positive");
  if (lag_ms <= 0 || lag_ms % frame_ms != 0)
    throw ConfigError("pipeline.lag_ms must be a positive multiple of frame_ms");
  if (comp_latency_ms < 0) throw ConfigError("pipeline.comp_latency_ms must be >= 0");
  if (fixed_len_ms <= 0 || fixed_len_ms % frame_ms != 0)
    throw ConfigError("pipeline.fixed_len_ms must be a positive multiple of frame_ms");
}

SimulationConfig SimulationConfig::Default() { return SimulationConfig{}; }

void SimulationConfig::Validate() const {
  acoustic.Validate();
  vad.Validate();
  first_pass.Validate();
  second_pass.Validate();
  pipeline.Validate();
  if (acoustic.frame_ms != pipeline.frame_ms || vad.frame_ms != pipeline.frame_ms)
    throw ConfigError("frame_ms differs between acoustic, vad and pipeline");
  if (acoustic.lag_ms() != pipeline.lag_ms)
    throw ConfigError("pipeline.lag_ms must equal right_context_frames * frame_ms");
  if (t_sil_ms <= 0 || t_sil_hes_ms <= 0)
    throw ConfigError("EOS annotation thresholds must be positive");
}

std::vector<int> UtteranceResult::Transcript1st() const {
  std::vector<int> out;
  for (const auto& s : segments)
    out.insert(out.end(), s.transcript_1st.begin(), s.transcript_1st.end());
  return out;
}

std::vector<int> UtteranceResult::Transcript2nd() const {
  std::vector<int> out;
  for (const auto& s : segments)
    out.insert(out.end(), s.transcript_2nd.begin(), s.transcript_2nd.end());
  return out;
}

void WriteEventLog(std::ostream& out, const std::vector<TimelineEvent>& events) {
  for (const auto& e : events) {
    nlohmann::json j = {{"time_ms", e.time_ms}, {"kind", ToString(e.kind)},
                        {"payload", e.payload}};
    out << j.dump() << '\n';
  }
}

std::pair<int, int> NominalLatency(Strategy strategy, const PipelineConfig& config) {
  switch (strategy) {
    case Strategy::kB1Immediate: return {0, 0};
    case Strategy::kB2Wait: return {config.lag_ms, config.lag_ms};
    case Strategy::kE1DummyZero:
    case Strategy::kE2DummyLast: return {0, config.comp_latency_ms};
  }
  return {0, 0};
}

std::optional<int> SegmenterDecision(SegmenterKind kind, const SegmenterInputs& in) {
  switch (kind) {
    case SegmenterKind::kFixed:
      EOSSEG_REQUIRE(in.fixed_len_ms > 0, "fixed_len_ms must be positive");
      if (in.frame_end_ms > 0 && in.frame_end_ms % in.fixed_len_ms == 0)
        return in.frame_end_ms;
      return std::nullopt;
    case SegmenterKind::kVad:
      if (in.vad_eos) return in.vad_eos->timestamp_ms;
      return std::nullopt;
    case SegmenterKind::kE2e:
      return in.e2e_eos;
  }
  return std::nullopt;
}

namespace {

// State of one utterance simulation. Indices into `kept_` address the
// frames that survived the VAD filter; the cascaded pass walks them with a
// fixed right context of R kept frames.
class UtteranceRun {
 public:
  UtteranceRun(const SyntheticAcoustics& acoustics, const SimulationConfig& config,
               const UtteranceSpec& spec)
      : ac_(acoustics),
        cfg_(config),
        spec_(spec),
        first_(config.first_pass, config.pipeline.frame_ms),
        second_(config.second_pass, config.pipeline.frame_ms),
        r_(config.pipeline.right_context_frames()) {
    AnnotatedTranscript annotated = AnnotateEos(spec, config.t_sil_ms, config.t_sil_hes_ms);
    timeline_ = BuildTimeline(spec, annotated, ac_.tokens(), ac_.config());
    frames_ = ac_.CausalFeatures(spec);
    result_.id = spec.id;
  }

  UtteranceResult Run() {
    const int f = cfg_.pipeline.frame_ms;
    const int n = static_cast<int>(frames_.size());
    VadState vad;
    for (int i = 0; i < n; ++i) {
      const int now = (i + 1) * f;
      const FeatureFrame& frame = frames_[i];
      EOSSEG_REQUIRE(frame.arrival_ms <= now, "frame arrives in the future");
      VadLabel label = Classify(frame);
      bool keep = FrameFilter(vad, label, cfg_.vad) == FilterDecision::kKeep;
      VadStepResult vr = VadStep(vad, label, now, cfg_.vad);
      vad = vr.state;
      Log(now, EventKind::kFrameArrival,
          [&] { return nlohmann::json{{"frame", i}, {"kept", keep}}; });

      std::optional<int> e2e;
      if (keep) {
        kept_.push_back(i);
        PosteriorFrame post = ac_.Posteriors(frame, timeline_, Stream::kCausal);
        first_.Step(post);
        if (cfg_.pipeline.segmenter == SegmenterKind::kE2e) e2e = first_.CheckEos(post);
      }
      AdvanceSecondPass(now);
      EOSSEG_REQUIRE(next_center_ >= static_cast<int>(kept_.size()) - r_,
                     "cascaded pass lags more than the right context");

      SegmenterInputs in{now, cfg_.pipeline.fixed_len_ms, vr.eos, e2e};
      if (auto t = SegmenterDecision(cfg_.pipeline.segmenter, in)) HandleEos(*t, now);
    }
    Flush(n * f);
    return std::move(result_);
  }

 private:
  // `payload` is only evaluated when events are recorded.
  template <typename F>
  void Log(int now, EventKind kind, F&& payload) {
    if (!cfg_.record_events) return;
    result_.events.push_back({now, kind, payload()});
  }

  int LastKeptFrame() const { return kept_.empty() ? -1 : kept_.back(); }
  int KeptFrame(int p) const { return p < 0 ? -1 : kept_[p]; }

  void DecodeCenter(int c, int now, const std::vector<FeatureFrame>& window,
                    bool truncated) {
    int max_arrival = 0, dummies = 0;
    for (const auto& w : window) {
      max_arrival = std::max(max_arrival, w.arrival_ms);
      if (w.origin == FrameOrigin::kDummy) ++dummies;
    }
    EOSSEG_REQUIRE(max_arrival <= now, "cascaded encoder read a future frame");
    if (cfg_.first_pass_only) return;
    FeatureFrame enc = truncated ? CascadedEncodeTruncated(window, ac_.config())
                                 : CascadedEncode(window, ac_.config());
    second_.Step(ac_.Posteriors(enc, timeline_, Stream::kCascaded));
    Log(now, EventKind::kSecondPassCenterAdvanced, [&] {
      return nlohmann::json{{"center", c}, {"frame", enc.frame_index},
                            {"max_input_arrival_ms", max_arrival},
                            {"dummy_inputs", dummies}, {"truncated", truncated}};
    });
  }

  std::vector<FeatureFrame> RealWindow(int c, int last) const {
    std::vector<FeatureFrame> w;
    for (int k = c; k <= last; ++k) w.push_back(frames_[kept_[k]]);
    return w;
  }

  void AdvanceSecondPass(int now) {
    while (next_center_ + r_ < static_cast<int>(kept_.size())) {
      DecodeCenter(next_center_, now, RealWindow(next_center_, next_center_ + r_), false);
      ++next_center_;
      FinalizeReachedWaits(now, false);
    }
  }

  void FinalizeSecond(int seg, int p, int now) {
    FinalizedSegment fs = second_.FinalizeSegment(KeptFrame(p));
    SegmentResult& s = result_.segments[seg];
    s.transcript_2nd = std::move(fs.best.tokens);
    s.lattice_2nd = std::move(fs.lattice);
    s.second_pass_finalized_ms = now;
    Log(now, EventKind::kSegmentFinalized,
        [&] {
          return nlohmann::json{{"segment", seg}, {"pass", 2}, {"tokens", s.transcript_2nd}};
        });
  }

  void FinalizeReachedWaits(int now, bool fallback) {
    while (!waits_.empty() && waits_.front().p < next_center_) {
      const Wait w = waits_.front();
      waits_.pop_front();
      FinalizeSecond(w.seg, w.p, now);
      SegmentResult& s = result_.segments[w.seg];
      s.finalize_algorithmic_ms = cfg_.pipeline.lag_ms;
      s.finalize_computational_ms = now - w.t;
      s.b2_fallback = fallback;
    }
  }

  int OpenSegment(int t, int now, bool terminal) {
    SegmentResult s;
    s.index = static_cast<int>(result_.segments.size());
    s.start_ms = seg_start_ms_;
    s.eos_emit_ms = now;
    s.eos_timestamp_ms = t;
    s.terminal = terminal;
    seg_start_ms_ = t;
    FinalizedSegment fs = first_.FinalizeSegment(LastKeptFrame());
    s.transcript_1st = std::move(fs.best.tokens);
    result_.segments.push_back(std::move(s));
    const int index = result_.segments.back().index;
    Log(now, EventKind::kSegmentFinalized,
        [&] {
          return nlohmann::json{{"segment", index},
                                {"pass", 1},
                                {"tokens", result_.segments.back().transcript_1st}};
        });
    return index;
  }

  void HandleEos(int t, int now) {
    const int seg = OpenSegment(t, now, false);
    Log(now, EventKind::kEosEmitted, [&] {
      return nlohmann::json{{"segment", seg}, {"timestamp_ms", t},
                            {"segmenter", ToString(cfg_.pipeline.segmenter)}};
    });
    const int p = static_cast<int>(kept_.size()) - 1;
    const Strategy strategy = cfg_.pipeline.strategy;
    auto nominal = NominalLatency(strategy, cfg_.pipeline);
    switch (strategy) {
      case Strategy::kB1Immediate:
        FinalizeSecond(seg, p, now);
        next_center_ = std::max(next_center_, p + 1);
        break;
      case Strategy::kE1DummyZero:
      case Strategy::kE2DummyLast:
        if (next_center_ <= p) DecodeWithDummies(p, now, strategy);
        next_center_ = std::max(next_center_, p + 1);
        FinalizeSecond(seg, p, now);
        break;
      case Strategy::kB2Wait:
        waits_.push_back({seg, t, p});
        FinalizeReachedWaits(now, false);
        return;
    }
    result_.segments[seg].finalize_algorithmic_ms = nominal.first;
    result_.segments[seg].finalize_computational_ms = nominal.second;
  }

  void DecodeWithDummies(int p, int now, Strategy strategy) {
    DummyMode mode = strategy == Strategy::kE1DummyZero ? DummyMode::kZero : DummyMode::kLast;
    std::vector<FeatureFrame> dummies = InjectDummyFrames(frames_[kept_[p]], mode, r_);
    for (auto& d : dummies) {
      // The joint is matched against what the audio would really have been.
      d.clean = ac_.CleanFeature(timeline_, spec_, d.frame_index);
      d.arrival_ms = now;
    }
    Log(now, EventKind::kDummyInjection, [&] {
      return nlohmann::json{{"count", r_},
                            {"mode", mode == DummyMode::kZero ? "zero" : "last"},
                            {"after_frame", kept_[p]}};
    });
    for (int c = next_center_; c <= p; ++c) {
      std::vector<FeatureFrame> w = RealWindow(c, p);
      const int need = r_ + 1 - static_cast<int>(w.size());
      w.insert(w.end(), dummies.begin(), dummies.begin() + need);
      DecodeCenter(c, now, w, false);
    }
  }

  void Flush(int end_ms) {
    const int size = static_cast<int>(kept_.size());
    for (int c = next_center_; c < size; ++c) {
      DecodeCenter(c, end_ms, RealWindow(c, std::min(c + r_, size - 1)), true);
      next_center_ = c + 1;
      FinalizeReachedWaits(end_ms, true);
    }
    FinalizeReachedWaits(end_ms, true);
    const int seg = OpenSegment(end_ms, end_ms, true);
    FinalizeSecond(seg, size - 1, end_ms);
  }

  struct Wait {
    int seg;
    int t;
    int p;
  };

  const SyntheticAcoustics& ac_;
  const SimulationConfig& cfg_;
  const UtteranceSpec& spec_;
  UtteranceTimeline timeline_;
  std::vector<FeatureFrame> frames_;
  std::vector<int> kept_;
  StreamDecoder first_;
  StreamDecoder second_;
  const int r_;
  int next_center_ = 0;
  int seg_start_ms_ = 0;
  std::deque<Wait> waits_;
  UtteranceResult result_;
};

}  // namespace

TwoPassPipeline::TwoPassPipeline(const SyntheticAcoustics& acoustics,
                                 SimulationConfig config)
    : acoustics_(acoustics), config_(std::move(config)) {
  config_.Validate();
  if (acoustics_.config().frame_ms != config_.pipeline.frame_ms ||
      acoustics_.config().right_context_frames != config_.pipeline.right_context_frames())
    throw ConfigError("acoustic model does not match the pipeline configuration");
}

UtteranceResult TwoPassPipeline::Run(const UtteranceSpec& spec) const {
  UtteranceRun run(acoustics_, config_, spec);
  return run.Run();
}

}  // namespace eosseg
