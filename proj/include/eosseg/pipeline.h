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

#ifndef EOSSEG_PIPELINE_H_
#define EOSSEG_PIPELINE_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eosseg/acoustics.h"
#include "eosseg/corpus.h"
#include "eosseg/decoder.h"
#include "eosseg/vad.h"
#include "json.hpp"

namespace eosseg {

// Second-pass handling when the first pass emits EOS at audio time T.
enum class Strategy {
  kB1Immediate,   // finalize at once; centers in (T - lag, T] are never decoded
  kB2Wait,        // keep decoding real frames until the center reaches T
  kE1DummyZero,   // inject R zero frames and decode up to T immediately
  kE2DummyLast,   // inject R copies of the last causal frame
};
enum class SegmenterKind { kFixed, kVad, kE2e };

std::string ToString(Strategy s);
Strategy StrategyFromString(const std::string& s);
std::string ToString(SegmenterKind k);
SegmenterKind SegmenterKindFromString(const std::string& s);

struct PipelineConfig {
  int frame_ms = 30;
  int lag_ms = 900;
  int comp_latency_ms = 208;  // reported constant for dummy-frame finalization
  Strategy strategy = Strategy::kE2DummyLast;
  SegmenterKind segmenter = SegmenterKind::kE2e;
  int fixed_len_ms = 3000;

  int right_context_frames() const { return lag_ms / frame_ms; }
  void Validate() const;
};

// Everything one utterance simulation needs.
struct SimulationConfig {
  AcousticConfig acoustic;
  VadConfig vad;
  BeamConfig first_pass = BeamConfig::FirstPass();
  BeamConfig second_pass = BeamConfig::SecondPass();
  PipelineConfig pipeline;
  // EOS annotation thresholds for the EOS posterior.
  int t_sil_ms = 600;
  int t_sil_hes_ms = 1200;
  bool record_events = false;
  // Skip cascaded decoding; segmentation and 1st-pass output are unchanged.
  bool first_pass_only = false;

  static SimulationConfig Default();
  void Validate() const;  // throws ConfigError on any mismatch
};

struct SegmentResult {
  int index = 0;
  int start_ms = 0;
  std::vector<int> transcript_1st;
  std::vector<int> transcript_2nd;
  int eos_emit_ms = 0;       // wall-clock time of the EOS decision
  int eos_timestamp_ms = 0;  // audio time T of the EOS
  bool terminal = false;     // end-of-audio flush rather than an EOS
  int finalize_algorithmic_ms = 0;
  int finalize_computational_ms = 0;
  int second_pass_finalized_ms = 0;  // wall-clock 2nd-pass finalization
  bool b2_fallback = false;  // B2 ran out of real future frames
  Lattice lattice_2nd;

  int length_ms() const { return eos_timestamp_ms - start_ms; }
};

enum class EventKind {
  kFrameArrival,
  kEosEmitted,
  kSecondPassCenterAdvanced,
  kDummyInjection,
  kSegmentFinalized,
};
std::string ToString(EventKind k);

struct TimelineEvent {
  int time_ms = 0;
  EventKind kind = EventKind::kFrameArrival;
  nlohmann::json payload;
};

struct UtteranceResult {
  std::string id;
  std::vector<SegmentResult> segments;
  std::vector<TimelineEvent> events;  // only when record_events

  std::vector<int> Transcript1st() const;
  std::vector<int> Transcript2nd() const;
};

// Line-delimited JSON event log.
void WriteEventLog(std::ostream& out, const std::vector<TimelineEvent>& events);

// Nominal finalization latency of a strategy: (algorithmic, computational).
// B2's computational figure is a lower bound; the simulation reports the
// measured wait.
std::pair<int, int> NominalLatency(Strategy strategy, const PipelineConfig& config);

struct SegmenterInputs {
  int frame_end_ms = 0;
  int fixed_len_ms = 0;
  std::optional<VadEvent> vad_eos;
  std::optional<int> e2e_eos;
};
// fixed: every fixed_len_ms of audio; vad/e2e: pass through their events.
std::optional<int> SegmenterDecision(SegmenterKind kind, const SegmenterInputs& in);

class TwoPassPipeline {
 public:
  // `acoustics` must outlive the pipeline.
  TwoPassPipeline(const SyntheticAcoustics& acoustics, SimulationConfig config);

  UtteranceResult Run(const UtteranceSpec& spec) const;
  const SimulationConfig& config() const { return config_; }

 private:
  const SyntheticAcoustics& acoustics_;
  SimulationConfig config_;
};

}  // namespace eosseg

#endif  // EOSSEG_PIPELINE_H_
