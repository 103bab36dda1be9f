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

#ifndef EOSSEG_CONFIG_H_
#define EOSSEG_CONFIG_H_

#include <string>
#include <vector>

#include "eosseg/acoustics.h"
#include "eosseg/corpus.h"
#include "eosseg/decoder.h"
#include "eosseg/pipeline.h"
#include "eosseg/vad.h"
#include "json.hpp"

namespace eosseg {

struct ExperimentConfig {
  uint64_t seed = 17;  // applied to both corpus and acoustics
  std::string output_dir = "out";
  int threads = 0;     // 0: hardware concurrency

  CorpusConfig corpus = CorpusConfig::Default();
  AcousticConfig acoustic;
  VadConfig vad;
  BeamConfig first_pass = BeamConfig::FirstPass();
  BeamConfig second_pass = BeamConfig::SecondPass();
  PipelineConfig pipeline;
  int t_sil_ms = 600;
  int t_sil_hes_ms = 1200;

  std::vector<SegmenterKind> segmenters = {SegmenterKind::kFixed, SegmenterKind::kVad,
                                           SegmenterKind::kE2e};
  std::vector<Strategy> strategies = {Strategy::kB1Immediate, Strategy::kB2Wait,
                                      Strategy::kE1DummyZero, Strategy::kE2DummyLast};

  std::vector<double> sweep_eos_thresholds = {1.0, 2.0, 3.7, 6.0, 10.0};
  std::vector<int> sweep_silence_thresholds_ms = {300, 600, 900};

  double oracle_sl_tolerance = 0.10;
  int oracle_search_iterations = 24;

  int latency_bin_ms = 50;
  int length_bin_ms = 1000;

  static ExperimentConfig Default() { return ExperimentConfig{}; }
  // Grids non-empty, nested configs valid and sharing frame_ms.
  void Validate() const;
  // Copies `seed` into the corpus and acoustic configs.
  ExperimentConfig WithSeedApplied() const;
};

nlohmann::json ToJson(const ExperimentConfig& config);
// Unknown keys and mistyped values raise ConfigError. Missing keys keep
// their defaults.
ExperimentConfig FromJson(const nlohmann::json& j);

// Parses a JSON document that may contain // and /* */ comments.
ExperimentConfig LoadConfig(const std::string& path);

// Applies `dotted.key=value`. The key must already exist; the value is
// parsed as JSON when possible and as a plain string otherwise.
void ApplyOverride(nlohmann::json& j, const std::string& assignment);

}  // namespace eosseg

#endif  // EOSSEG_CONFIG_H_
