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

#ifndef EOSSEG_VAD_H_
#define EOSSEG_VAD_H_

#include <optional>

#include "eosseg/acoustics.h"

namespace eosseg {

enum class VadLabel { kSpeech, kSilence };
enum class FilterDecision { kKeep, kDrop };

struct VadConfig {
  int trigger_ms = 200;
  int frame_ms = 30;
  bool filter_enabled = true;

  void Validate() const;
};

struct VadState {
  int consecutive_silence_ms = 0;
  int silence_since_trigger_ms = 0;
  bool emitted_in_current_silence = false;
  int last_frame_end_ms = -1;  // ordering check
};

struct VadEvent {
  int timestamp_ms = 0;
};

// Ground-truth speech/silence; stands in for a lightweight classifier.
VadLabel Classify(const FeatureFrame& frame);

// Smoothing state machine. Emits EOS at the first frame whose consecutive
// silence reaches trigger_ms; within one silence run a further EOS needs
// another full trigger_ms after the previous emission. Speech resets.
struct VadStepResult {
  VadState state;
  std::optional<VadEvent> eos;
};
VadStepResult VadStep(const VadState& state, VadLabel label, int frame_end_ms,
                      const VadConfig& config);

// Keeps speech and the silence frames that start before trigger_ms of the
// current run has elapsed. Must be evaluated before VadStep for the frame.
FilterDecision FrameFilter(const VadState& state, VadLabel label,
                           const VadConfig& config);

}  // namespace eosseg

#endif  // EOSSEG_VAD_H_
