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

#include "eosseg/corpus.h"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>

#include "eosseg/common.h"
#include "json.hpp"

namespace eosseg {

using nlohmann::json;

std::string ToString(DomainKind kind) {
  return kind == DomainKind::kShortQuery ? "short_query" : "long_form";
}

DomainKind DomainKindFromString(const std::string& s) {
  if (s == "short_query") return DomainKind::kShortQuery;
  if (s == "long_form") return DomainKind::kLongForm;
  throw ConfigError("unknown domain_kind: " + s);
}

std::vector<std::string> UtteranceSpec::WordTexts() const {
  std::vector<std::string> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(w.text);
  return out;
}

std::vector<int> AnnotatedTranscript::EosAfterWord() const {
  std::vector<int> out;
  int word = -1;
  for (const auto& t : tokens) {
    if (t == kEosMarker) {
      out.push_back(word);
    } else {
      ++word;
    }
  }
  return out;
}

std::vector<std::string> StripEos(const AnnotatedTranscript& transcript) {
  std::vector<std::string> out;
  for (const auto& t : transcript.tokens) {
    if (t != kEosMarker) out.push_back(t);
  }
  return out;
}

CorpusConfig CorpusConfig::Default() {
  CorpusConfig c;
  c.vocab = {"the",   "a",     "and",   "you",    "can",   "put",    "go",
             "around", "like", "was",   "doing",  "before", "edge",  "every",
             "time",  "right", "up",    "to",     "your",  "just",   "so",
             "we",    "get",   "same",  "inch",   "here",  "all",    "my",
             "line",  "over",  "back",  "forth",  "have",  "sorry",  "shrink",
             "cause", "issue", "hello", "world",  "today", "uh",     "um"};
  c.hesitation_tokens = {"uh", "um"};
  return c;
}

void CorpusConfig::Validate() const {
  auto is_filler = [this](const std::string& w) {
    return std::find(hesitation_tokens.begin(), hesitation_tokens.end(), w) !=
           hesitation_tokens.end();
  };
  size_t content = std::count_if(vocab.begin(), vocab.end(),
                                 [&](const auto& w) { return !is_filler(w); });
  if (vocab.empty() || content == 0) {
    throw ConfigError("corpus vocab must contain at least one non-filler word");
  }
  for (const auto& h : hesitation_tokens) {
    if (std::find(vocab.begin(), vocab.end(), h) == vocab.end()) {
      throw ConfigError("hesitation token not in vocab: " + h);
    }
  }
  auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob_ok(hesitation_prob) || !prob_ok(short_query_fraction) ||
      !prob_ok(pause_prob) || !prob_ok(long_pause_prob) ||
      pause_prob + long_pause_prob > 1.0) {
    throw ConfigError("corpus probabilities must lie in [0, 1]");
  }
  if (num_utterances < 0) throw ConfigError("num_utterances must be >= 0");
  if (min_gap_ms <= 0 || max_gap_ms < min_gap_ms || pause_min_ms < min_gap_ms ||
      pause_max_ms < pause_min_ms || long_pause_min_ms < min_gap_ms ||
      long_pause_max_ms < long_pause_min_ms) {
    throw ConfigError("invalid gap bounds");
  }
  if (min_word_ms <= 0 || max_word_ms < min_word_ms) {
    throw ConfigError("invalid word duration bounds");
  }
  if (max_lead_silence_ms < 0 || min_trail_silence_ms < 0 ||
      max_trail_silence_ms < min_trail_silence_ms) {
    throw ConfigError("invalid lead/trail silence bounds");
  }
  if (short_query_cap_ms <= 0 || long_form_floor_ms <= 0 ||
      long_form_target_ms < long_form_floor_ms || long_form_jitter_ms < 0) {
    throw ConfigError("invalid utterance duration bounds");
  }
  if (short_query_fraction > 0.0 &&
      short_query_cap_ms <
          min_word_ms + min_trail_silence_ms) {
    throw ConfigError("short_query_cap_ms too small for a single word");
  }
}

namespace {

struct Vocabulary {
  std::vector<std::string> content;
  std::vector<std::string> fillers;
};

Vocabulary SplitVocab(const CorpusConfig& config) {
  Vocabulary v;
  for (const auto& w : config.vocab) {
    bool filler = std::find(config.hesitation_tokens.begin(),
                            config.hesitation_tokens.end(),
                            w) != config.hesitation_tokens.end();
    (filler ? v.fillers : v.content).push_back(w);
  }
  return v;
}

Word DrawWord(const Vocabulary& vocab, const CorpusConfig& config, Rng& rng,
              int start_ms) {
  Word w;
  w.hesitation = !vocab.fillers.empty() && rng.Bernoulli(config.hesitation_prob);
  const auto& pool = w.hesitation ? vocab.fillers : vocab.content;
  w.text = pool[rng.UniformInt(0, static_cast<int64_t>(pool.size()) - 1)];
  w.start_ms = start_ms;
  w.end_ms = start_ms + static_cast<int>(
                            rng.UniformInt(config.min_word_ms, config.max_word_ms));
  return w;
}

int DrawGap(const CorpusConfig& config, Rng& rng) {
  const double u = rng.Uniform();
  if (u < config.long_pause_prob) {
    return static_cast<int>(
        rng.UniformInt(config.long_pause_min_ms, config.long_pause_max_ms));
  }
  if (u < config.long_pause_prob + config.pause_prob) {
    return static_cast<int>(rng.UniformInt(config.pause_min_ms, config.pause_max_ms));
  }
  return static_cast<int>(rng.UniformInt(config.min_gap_ms, config.max_gap_ms));
}

}  // namespace

UtteranceSpec GenerateUtterance(const CorpusConfig& config, int index) {
  Rng rng(HashCombine(config.seed, static_cast<uint64_t>(index)));
  Vocabulary vocab = SplitVocab(config);

  UtteranceSpec spec;
  char id[32];
  std::snprintf(id, sizeof(id), "utt%05d", index);
  spec.id = id;
  spec.domain_kind = rng.Bernoulli(config.short_query_fraction)
                         ? DomainKind::kShortQuery
                         : DomainKind::kLongForm;

  int cursor = static_cast<int>(rng.UniformInt(config.min_gap_ms,
                                               std::max(config.min_gap_ms,
                                                        config.max_lead_silence_ms)));
  int trail = static_cast<int>(
      rng.UniformInt(config.min_trail_silence_ms, config.max_trail_silence_ms));

  if (spec.domain_kind == DomainKind::kShortQuery) {
    const int budget = config.short_query_cap_ms - trail;
    int max_words = static_cast<int>(rng.UniformInt(1, 4));
    for (int i = 0; i < max_words; ++i) {
      if (i > 0) cursor += DrawGap(config, rng);
      Word w = DrawWord(vocab, config, rng, cursor);
      if (w.end_ms > budget) {
        if (!spec.words.empty()) break;
        // First word must fit; clamp its start into the budget.
        int dur = w.end_ms - w.start_ms;
        w.start_ms = std::max(0, budget - dur);
        w.end_ms = w.start_ms + dur;
      }
      spec.words.push_back(w);
      cursor = w.end_ms;
    }
    spec.total_ms = std::min(config.short_query_cap_ms, cursor + trail);
  } else {
    int target = config.long_form_target_ms +
                 static_cast<int>(rng.UniformInt(-config.long_form_jitter_ms,
                                                 config.long_form_jitter_ms));
    target = std::max(target, config.long_form_floor_ms);
    while (true) {
      if (!spec.words.empty()) cursor += DrawGap(config, rng);
      Word w = DrawWord(vocab, config, rng, cursor);
      spec.words.push_back(w);
      cursor = w.end_ms;
      if (cursor + trail >= target) break;
    }
    spec.total_ms = std::max(cursor + trail, config.long_form_floor_ms);
  }
  return spec;
}

std::vector<UtteranceSpec> GenerateCorpus(const CorpusConfig& config) {
  config.Validate();
  std::vector<UtteranceSpec> out;
  out.reserve(config.num_utterances);
  for (int i = 0; i < config.num_utterances; ++i) {
    out.push_back(GenerateUtterance(config, i));
  }
  return out;
}

AnnotatedTranscript AnnotateEos(const UtteranceSpec& spec, int t_sil_ms,
                                int t_sil_hes_ms) {
  EOSSEG_REQUIRE(t_sil_ms > 0 && t_sil_hes_ms >= t_sil_ms,
                 "AnnotateEos requires t_sil_hes_ms >= t_sil_ms > 0");
  AnnotatedTranscript out;
  const auto& words = spec.words;
  for (size_t i = 0; i < words.size(); ++i) {
    out.tokens.push_back(words[i].text);
    if (spec.domain_kind == DomainKind::kLongForm && i + 1 < words.size()) {
      int gap = words[i + 1].start_ms - words[i].end_ms;
      int needed = words[i].hesitation ? t_sil_hes_ms : t_sil_ms;
      if (gap > needed) out.tokens.push_back(kEosMarker);
    }
  }
  if (spec.domain_kind == DomainKind::kShortQuery) {
    out.tokens.push_back(kEosMarker);
  }
  return out;
}

std::vector<AlignedWord> ForcedAlignment(const UtteranceSpec& spec) {
  std::vector<AlignedWord> out;
  out.reserve(spec.words.size());
  for (size_t i = 0; i < spec.words.size(); ++i) {
    out.push_back({static_cast<int>(i), spec.words[i].start_ms,
                   spec.words[i].end_ms});
  }
  return out;
}

std::optional<int> EndOfSpeechMs(const UtteranceSpec& spec) {
  if (spec.words.empty()) return std::nullopt;
  return spec.words.back().end_ms;
}

std::optional<int> EndOfSpeechBefore(const UtteranceSpec& spec, int time_ms) {
  std::optional<int> out;
  for (const auto& w : spec.words) {
    if (w.start_ms >= time_ms) break;
    out = w.end_ms;
  }
  return out;
}

std::string ToJsonLine(const UtteranceSpec& spec) {
  json words = json::array();
  for (const auto& w : spec.words) {
    words.push_back({{"text", w.text},
                     {"start_ms", w.start_ms},
                     {"end_ms", w.end_ms},
                     {"hesitation", w.hesitation}});
  }
  json j = {{"id", spec.id},
            {"domain_kind", ToString(spec.domain_kind)},
            {"total_ms", spec.total_ms},
            {"words", words}};
  return j.dump();
}

UtteranceSpec FromJsonLine(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
    UtteranceSpec spec;
    spec.id = j.at("id").get<std::string>();
    spec.domain_kind = DomainKindFromString(j.at("domain_kind").get<std::string>());
    spec.total_ms = j.at("total_ms").get<int>();
    for (const auto& w : j.at("words")) {
      spec.words.push_back({w.at("text").get<std::string>(),
                            w.at("start_ms").get<int>(), w.at("end_ms").get<int>(),
                            w.at("hesitation").get<bool>()});
    }
    int prev_end = 0;
    for (const auto& w : spec.words) {
      if (w.start_ms >= w.end_ms || w.start_ms < prev_end) {
        throw ConfigError("utterance " + spec.id + ": words overlap or unsorted");
      }
      prev_end = w.end_ms;
    }
    if (prev_end > spec.total_ms) {
      throw ConfigError("utterance " + spec.id + ": words exceed total_ms");
    }
    return spec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed corpus record: ") + e.what());
  }
}

void WriteCorpus(std::ostream& out, const std::vector<UtteranceSpec>& corpus) {
  for (const auto& spec : corpus) out << ToJsonLine(spec) << '\n';
}

std::vector<UtteranceSpec> ReadCorpus(std::istream& in) {
  std::vector<UtteranceSpec> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(FromJsonLine(line));
  }
  return out;
}

}  // namespace eosseg
