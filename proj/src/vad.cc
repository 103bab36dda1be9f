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

#include "eosseg/common.h"

namespace eosseg {

void VadConfig::Validate() const {
  if (trigger_ms <= 0 || frame_ms <= 0) {
    throw ConfigError("vad trigger_ms and frame_ms must be positive");
  }
}

VadLabel Classify(const FeatureFrame& frame) {
  return frame.is_speech ? VadLabel::kSpeech : VadLabel::kSilence;
}

VadStepResult VadStep(const VadState& state, VadLabel label, int frame_end_ms,
                      const VadConfig& config) {
  EOSSEG_REQUIRE(frame_end_ms > state.last_frame_end_ms,
                 "VadStep frames must arrive in time order");
  VadStepResult r{state, std::nullopt};
  VadState& s = r.state;
  s.last_frame_end_ms = frame_end_ms;
  if (label == VadLabel::kSpeech) {
    s.consecutive_silence_ms = 0;
    s.silence_since_trigger_ms = 0;
    s.emitted_in_current_silence = false;
    return r;
  }
  s.consecutive_silence_ms += config.frame_ms;
  if (!s.emitted_in_current_silence) {
    if (s.consecutive_silence_ms >= config.trigger_ms) {
      s.emitted_in_current_silence = true;
      s.silence_since_trigger_ms = 0;
      r.eos = VadEvent{frame_end_ms};
    }
  } else {
    s.silence_since_trigger_ms += config.frame_ms;
    if (s.silence_since_trigger_ms >= config.trigger_ms) {
      s.silence_since_trigger_ms = 0;
      r.eos = VadEvent{frame_end_ms};
    }
  }
  return r;
}

FilterDecision FrameFilter(const VadState& state, VadLabel label,
                           const VadConfig& config) {
  if (!config.filter_enabled || label == VadLabel::kSpeech) {
    return FilterDecision::kKeep;
  }
  return state.consecutive_silence_ms < config.trigger_ms ? FilterDecision::kKeep
                                                          : FilterDecision::kDrop;
}

}  // namespace eosseg
