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

#include "eosseg/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "eosseg/common.h"

namespace eosseg {

using nlohmann::json;

void ExperimentConfig::Validate() const {
  corpus.Validate();
  acoustic.Validate();
  vad.Validate();
  first_pass.Validate();
  second_pass.Validate();
  pipeline.Validate();
  if (segmenters.empty()) throw ConfigError("segmenter grid is empty");
  if (strategies.empty()) throw ConfigError("strategy grid is empty");
  if (sweep_eos_thresholds.empty() || sweep_silence_thresholds_ms.empty())
    throw ConfigError("sweep grids must be non-empty");
  for (double t : sweep_eos_thresholds)
    if (t < 0) throw ConfigError("sweep eos thresholds must be >= 0");
  for (int t : sweep_silence_thresholds_ms)
    if (t <= 0) throw ConfigError("sweep silence thresholds must be positive");
  if (acoustic.frame_ms != pipeline.frame_ms || vad.frame_ms != pipeline.frame_ms)
    throw ConfigError("frame_ms differs between acoustic, vad and pipeline");
  if (acoustic.lag_ms() != pipeline.lag_ms)
    throw ConfigError("pipeline.lag_ms must equal acoustic right_context_frames * frame_ms");
  if (t_sil_ms <= 0 || t_sil_hes_ms < t_sil_ms)
    throw ConfigError("annotation thresholds need t_sil_hes_ms >= t_sil_ms > 0");
  if (oracle_sl_tolerance <= 0 || oracle_search_iterations <= 0)
    throw ConfigError("oracle search settings must be positive");
  if (latency_bin_ms <= 0 || length_bin_ms <= 0)
    throw ConfigError("histogram bin widths must be positive");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
}

ExperimentConfig ExperimentConfig::WithSeedApplied() const {
  ExperimentConfig c = *this;
  c.corpus.seed = seed;
  c.acoustic.seed = seed;
  return c;
}

namespace {

std::string PathMergeName(PathMerge m) { return m == PathMerge::kNone ? "none" : "bigram"; }

PathMerge PathMergeFromString(const std::string& s) {
  if (s == "none") return PathMerge::kNone;
  if (s == "bigram") return PathMerge::kBigram;
  throw ConfigError("unknown path_merge: " + s);
}

json BeamJson(const BeamConfig& b) {
  return {{"beam_size", b.beam_size},
          {"pruning_threshold", b.pruning_threshold},
          {"expansion_cutoff", b.expansion_cutoff},
          {"max_expansion_depth", b.max_expansion_depth},
          {"path_merge", PathMergeName(b.path_merge)},
          {"eos_threshold", b.eos_threshold}};
}

// Reads typed fields out of one JSON object and rejects leftovers.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(Where() + " must be an object");
  }

  void Read(const char* key, int& out) {
    if (const json* v = Take(key)) {
      if (!v->is_number_integer()) Fail(key, "an integer");
      out = v->get<int>();
    }
  }
  void Read(const char* key, uint64_t& out) {
    if (const json* v = Take(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<int64_t>() >= 0))
        Fail(key, "a non-negative integer");
      out = v->get<uint64_t>();
    }
  }
  void Read(const char* key, double& out) {
    if (const json* v = Take(key)) {
      if (!v->is_number()) Fail(key, "a number");
      out = v->get<double>();
    }
  }
  void Read(const char* key, bool& out) {
    if (const json* v = Take(key)) {
      if (!v->is_boolean()) Fail(key, "a boolean");
      out = v->get<bool>();
    }
  }
  void Read(const char* key, std::string& out) {
    if (const json* v = Take(key)) {
      if (!v->is_string()) Fail(key, "a string");
      out = v->get<std::string>();
    }
  }
  template <typename T>
  void ReadList(const char* key, std::vector<T>& out) {
    if (const json* v = Take(key)) {
      if (!v->is_array()) Fail(key, "a list");
      out.clear();
      for (const auto& e : *v) {
        bool ok;
        if constexpr (std::is_same_v<T, int>) ok = e.is_number_integer();
        else if constexpr (std::is_same_v<T, double>) ok = e.is_number();
        else ok = e.is_string();
        if (!ok) Fail(key, "a list of matching values");
        out.push_back(e.get<T>());
      }
    }
  }
  template <typename E, typename F>
  void ReadEnum(const char* key, E& out, F from_string) {
    std::string s;
    bool present = j_.contains(key);
    Read(key, s);
    if (present) out = from_string(s);
  }
  const json* Child(const char* key) { return Take(key); }
  std::string ChildPath(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void Finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown config key: " + ChildPath(it.key().c_str()));
    }
  }

 private:
  const json* Take(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  [[noreturn]] void Fail(const char* key, const char* what) const {
    throw ConfigError(ChildPath(key) + " must be " + what);
  }
  std::string Where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void ReadBeam(const json& j, const std::string& path, BeamConfig& b) {
  ObjectReader r(j, path);
  r.Read("beam_size", b.beam_size);
  r.Read("pruning_threshold", b.pruning_threshold);
  r.Read("expansion_cutoff", b.expansion_cutoff);
  r.Read("max_expansion_depth", b.max_expansion_depth);
  r.ReadEnum("path_merge", b.path_merge, PathMergeFromString);
  r.Read("eos_threshold", b.eos_threshold);
  r.Finish();
}

}  // namespace

json ToJson(const ExperimentConfig& c) {
  const CorpusConfig& k = c.corpus;
  const AcousticConfig& a = c.acoustic;
  json j;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  j["corpus"] = {{"num_utterances", k.num_utterances},
                 {"vocab", k.vocab},
                 {"hesitation_tokens", k.hesitation_tokens},
                 {"hesitation_prob", k.hesitation_prob},
                 {"short_query_fraction", k.short_query_fraction},
                 {"min_gap_ms", k.min_gap_ms},
                 {"max_gap_ms", k.max_gap_ms},
                 {"pause_prob", k.pause_prob},
                 {"pause_min_ms", k.pause_min_ms},
                 {"pause_max_ms", k.pause_max_ms},
                 {"long_pause_prob", k.long_pause_prob},
                 {"long_pause_min_ms", k.long_pause_min_ms},
                 {"long_pause_max_ms", k.long_pause_max_ms},
                 {"min_word_ms", k.min_word_ms},
                 {"max_word_ms", k.max_word_ms},
                 {"max_lead_silence_ms", k.max_lead_silence_ms},
                 {"min_trail_silence_ms", k.min_trail_silence_ms},
                 {"max_trail_silence_ms", k.max_trail_silence_ms},
                 {"short_query_cap_ms", k.short_query_cap_ms},
                 {"long_form_floor_ms", k.long_form_floor_ms},
                 {"long_form_target_ms", k.long_form_target_ms},
                 {"long_form_jitter_ms", k.long_form_jitter_ms}};
  j["acoustic"] = {{"dim", a.dim},
                   {"frame_ms", a.frame_ms},
                   {"right_context_frames", a.right_context_frames},
                   {"feature_noise", a.feature_noise},
                   {"causal_noise", a.causal_noise},
                   {"cascaded_noise", a.cascaded_noise},
                   {"eos_noise", a.eos_noise},
                   {"evidence_scale", a.evidence_scale},
                   {"word_margin", a.word_margin},
                   {"blank_margin", a.blank_margin},
                   {"match_width", a.match_width},
                   {"eos_base", a.eos_base},
                   {"eos_slope", a.eos_slope},
                   {"eos_slope_before", a.eos_slope_before},
                   {"eos_cost_cap", a.eos_cost_cap},
                   {"context_decay", a.context_decay},
                   {"silence_feature", a.silence_feature}};
  j["vad"] = {{"trigger_ms", c.vad.trigger_ms},
              {"frame_ms", c.vad.frame_ms},
              {"filter_enabled", c.vad.filter_enabled}};
  j["first_pass"] = BeamJson(c.first_pass);
  j["second_pass"] = BeamJson(c.second_pass);
  j["pipeline"] = {{"frame_ms", c.pipeline.frame_ms},
                   {"lag_ms", c.pipeline.lag_ms},
                   {"comp_latency_ms", c.pipeline.comp_latency_ms},
                   {"strategy", ToString(c.pipeline.strategy)},
                   {"segmenter", ToString(c.pipeline.segmenter)},
                   {"fixed_len_ms", c.pipeline.fixed_len_ms}};
  j["annotation"] = {{"t_sil_ms", c.t_sil_ms}, {"t_sil_hes_ms", c.t_sil_hes_ms}};
  std::vector<std::string> segs, strats;
  for (auto s : c.segmenters) segs.push_back(ToString(s));
  for (auto s : c.strategies) strats.push_back(ToString(s));
  j["grid"] = {{"segmenters", segs}, {"strategies", strats}};
  j["sweep"] = {{"eos_thresholds", c.sweep_eos_thresholds},
                {"silence_thresholds_ms", c.sweep_silence_thresholds_ms}};
  j["oracle"] = {{"sl_tolerance", c.oracle_sl_tolerance},
                 {"search_iterations", c.oracle_search_iterations}};
  j["report"] = {{"latency_bin_ms", c.latency_bin_ms}, {"length_bin_ms", c.length_bin_ms}};
  return j;
}

ExperimentConfig FromJson(const json& j) {
  ExperimentConfig c;
  ObjectReader root(j, "");
  root.Read("seed", c.seed);
  root.Read("output_dir", c.output_dir);
  root.Read("threads", c.threads);
  if (const json* v = root.Child("corpus")) {
    CorpusConfig& k = c.corpus;
    ObjectReader r(*v, "corpus");
    r.Read("num_utterances", k.num_utterances);
    r.ReadList("vocab", k.vocab);
    r.ReadList("hesitation_tokens", k.hesitation_tokens);
    r.Read("hesitation_prob", k.hesitation_prob);
    r.Read("short_query_fraction", k.short_query_fraction);
    r.Read("min_gap_ms", k.min_gap_ms);
    r.Read("max_gap_ms", k.max_gap_ms);
    r.Read("pause_prob", k.pause_prob);
    r.Read("pause_min_ms", k.pause_min_ms);
    r.Read("pause_max_ms", k.pause_max_ms);
    r.Read("long_pause_prob", k.long_pause_prob);
    r.Read("long_pause_min_ms", k.long_pause_min_ms);
    r.Read("long_pause_max_ms", k.long_pause_max_ms);
    r.Read("min_word_ms", k.min_word_ms);
    r.Read("max_word_ms", k.max_word_ms);
    r.Read("max_lead_silence_ms", k.max_lead_silence_ms);
    r.Read("min_trail_silence_ms", k.min_trail_silence_ms);
    r.Read("max_trail_silence_ms", k.max_trail_silence_ms);
    r.Read("short_query_cap_ms", k.short_query_cap_ms);
    r.Read("long_form_floor_ms", k.long_form_floor_ms);
    r.Read("long_form_target_ms", k.long_form_target_ms);
    r.Read("long_form_jitter_ms", k.long_form_jitter_ms);
    r.Finish();
  }
  if (const json* v = root.Child("acoustic")) {
    AcousticConfig& a = c.acoustic;
    ObjectReader r(*v, "acoustic");
    r.Read("dim", a.dim);
    r.Read("frame_ms", a.frame_ms);
    r.Read("right_context_frames", a.right_context_frames);
    r.Read("feature_noise", a.feature_noise);
    r.Read("causal_noise", a.causal_noise);
    r.Read("cascaded_noise", a.cascaded_noise);
    r.Read("eos_noise", a.eos_noise);
    r.Read("evidence_scale", a.evidence_scale);
    r.Read("word_margin", a.word_margin);
    r.Read("blank_margin", a.blank_margin);
    r.Read("match_width", a.match_width);
    r.Read("eos_base", a.eos_base);
    r.Read("eos_slope", a.eos_slope);
    r.Read("eos_slope_before", a.eos_slope_before);
    r.Read("eos_cost_cap", a.eos_cost_cap);
    r.Read("context_decay", a.context_decay);
    r.ReadList("silence_feature", a.silence_feature);
    r.Finish();
  }
  if (const json* v = root.Child("vad")) {
    ObjectReader r(*v, "vad");
    r.Read("trigger_ms", c.vad.trigger_ms);
    r.Read("frame_ms", c.vad.frame_ms);
    r.Read("filter_enabled", c.vad.filter_enabled);
    r.Finish();
  }
  if (const json* v = root.Child("first_pass")) ReadBeam(*v, "first_pass", c.first_pass);
  if (const json* v = root.Child("second_pass")) ReadBeam(*v, "second_pass", c.second_pass);
  if (const json* v = root.Child("pipeline")) {
    ObjectReader r(*v, "pipeline");
    r.Read("frame_ms", c.pipeline.frame_ms);
    r.Read("lag_ms", c.pipeline.lag_ms);
    r.Read("comp_latency_ms", c.pipeline.comp_latency_ms);
    r.ReadEnum("strategy", c.pipeline.strategy, StrategyFromString);
    r.ReadEnum("segmenter", c.pipeline.segmenter, SegmenterKindFromString);
    r.Read("fixed_len_ms", c.pipeline.fixed_len_ms);
    r.Finish();
  }
  if (const json* v = root.Child("annotation")) {
    ObjectReader r(*v, "annotation");
    r.Read("t_sil_ms", c.t_sil_ms);
    r.Read("t_sil_hes_ms", c.t_sil_hes_ms);
    r.Finish();
  }
  if (const json* v = root.Child("grid")) {
    ObjectReader r(*v, "grid");
    std::vector<std::string> names;
    if (v->contains("segmenters")) {
      r.ReadList("segmenters", names);
      c.segmenters.clear();
      for (const auto& n : names) c.segmenters.push_back(SegmenterKindFromString(n));
    }
    if (v->contains("strategies")) {
      r.ReadList("strategies", names);
      c.strategies.clear();
      for (const auto& n : names) c.strategies.push_back(StrategyFromString(n));
    }
    r.Finish();
  }
  if (const json* v = root.Child("sweep")) {
    ObjectReader r(*v, "sweep");
    r.ReadList("eos_thresholds", c.sweep_eos_thresholds);
    r.ReadList("silence_thresholds_ms", c.sweep_silence_thresholds_ms);
    r.Finish();
  }
  if (const json* v = root.Child("oracle")) {
    ObjectReader r(*v, "oracle");
    r.Read("sl_tolerance", c.oracle_sl_tolerance);
    r.Read("search_iterations", c.oracle_search_iterations);
    r.Finish();
  }
  if (const json* v = root.Child("report")) {
    ObjectReader r(*v, "report");
    r.Read("latency_bin_ms", c.latency_bin_ms);
    r.Read("length_bin_ms", c.length_bin_ms);
    r.Finish();
  }
  root.Finish();
  return c;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  json j;
  try {
    j = json::parse(in, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw ConfigError("malformed config " + path + ": " + e.what());
  }
  return FromJson(j);
}

void ApplyOverride(json& j, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json* node = &j;
  std::stringstream parts(key);
  std::string part;
  while (std::getline(parts, part, '.')) {
    if (!node->is_object() || !node->contains(part))
      throw ConfigError("unknown config key in override: " + key);
    node = &(*node)[part];
  }
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  *node = value;
}

}  // namespace eosseg
