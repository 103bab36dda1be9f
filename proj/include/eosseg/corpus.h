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

#ifndef EOSSEG_CORPUS_H_
#define EOSSEG_CORPUS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace eosseg {

inline constexpr const char* kEosMarker = "<EOS>";

struct Word {
  std::string text;
  int start_ms = 0;
  int end_ms = 0;
  bool hesitation = false;  // filler such as "uh"

  bool operator==(const Word&) const = default;
};

enum class DomainKind { kShortQuery, kLongForm };

std::string ToString(DomainKind kind);
DomainKind DomainKindFromString(const std::string& s);

// Scripted ground truth for one utterance.
struct UtteranceSpec {
  std::string id;
  std::vector<Word> words;
  int total_ms = 0;
  DomainKind domain_kind = DomainKind::kLongForm;

  std::vector<std::string> WordTexts() const;
  bool operator==(const UtteranceSpec&) const = default;
};

// Reference transcript with EOS markers interleaved between words.
struct AnnotatedTranscript {
  std::vector<std::string> tokens;

  // Word indices i such that an EOS follows word i.
  std::vector<int> EosAfterWord() const;
  bool operator==(const AnnotatedTranscript&) const = default;
};

std::vector<std::string> StripEos(const AnnotatedTranscript& transcript);

struct CorpusConfig {
  uint64_t seed = 17;
  int num_utterances = 200;
  std::vector<std::string> vocab;
  // Subset of vocab treated as fillers; emitted with hesitation=true.
  std::vector<std::string> hesitation_tokens;
  double hesitation_prob = 0.06;
  double short_query_fraction = 0.0;

  // Inter-word gaps: with probability long_pause_prob a long pause from
  // [long_pause_min_ms, long_pause_max_ms], with probability pause_prob a
  // short pause from [pause_min_ms, pause_max_ms], otherwise an ordinary
  // gap from [min_gap_ms, max_gap_ms].
  int min_gap_ms = 60;
  int max_gap_ms = 180;
  double pause_prob = 0.2;
  int pause_min_ms = 220;
  int pause_max_ms = 400;
  double long_pause_prob = 0.03;
  int long_pause_min_ms = 650;
  int long_pause_max_ms = 1200;

  int min_word_ms = 150;
  int max_word_ms = 600;
  int max_lead_silence_ms = 400;
  int min_trail_silence_ms = 400;
  int max_trail_silence_ms = 800;

  int short_query_cap_ms = 5000;
  int long_form_floor_ms = 30000;
  int long_form_target_ms = 60000;
  int long_form_jitter_ms = 8000;

  static CorpusConfig Default();
  void Validate() const;  // throws ConfigError
};

std::vector<UtteranceSpec> GenerateCorpus(const CorpusConfig& config);
// One utterance; depends only on (config, index).
UtteranceSpec GenerateUtterance(const CorpusConfig& config, int index);

// Weakly supervised EOS placement. t_sil_hes_ms applies after a hesitation.
AnnotatedTranscript AnnotateEos(const UtteranceSpec& spec, int t_sil_ms,
                                int t_sil_hes_ms);
inline AnnotatedTranscript AnnotateEos(const UtteranceSpec& spec,
                                       int t_sil_ms) {
  return AnnotateEos(spec, t_sil_ms, 2 * t_sil_ms);
}

struct AlignedWord {
  int word_index = 0;
  int start_ms = 0;
  int end_ms = 0;
  bool operator==(const AlignedWord&) const = default;
};

std::vector<AlignedWord> ForcedAlignment(const UtteranceSpec& spec);
std::optional<int> EndOfSpeechMs(const UtteranceSpec& spec);
// End of the last word that started before time_ms.
std::optional<int> EndOfSpeechBefore(const UtteranceSpec& spec, int time_ms);

// Line-delimited JSON, one utterance per line. See schemas/corpus.schema.json.
std::string ToJsonLine(const UtteranceSpec& spec);
UtteranceSpec FromJsonLine(const std::string& line);
void WriteCorpus(std::ostream& out, const std::vector<UtteranceSpec>& corpus);
std::vector<UtteranceSpec> ReadCorpus(std::istream& in);

}  // namespace eosseg

#endif  // EOSSEG_CORPUS_H_
