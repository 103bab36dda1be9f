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

#include "eosseg/decoder.h"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "eosseg/common.h"

namespace eosseg {

void BeamConfig::Validate() const {
  if (beam_size <= 0 || pruning_threshold <= 0 || expansion_cutoff <= 0 ||
      max_expansion_depth <= 0 || eos_threshold < 0) {
    throw ConfigError("beam parameters must be positive");
  }
}

Beam Beam::Initial(int context) {
  Beam b;
  Hypothesis h;
  h.merge_context = context;
  b.hyps.push_back(std::move(h));
  return b;
}

namespace {

bool HypLess(const Hypothesis& a, const Hypothesis& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  return a.tokens < b.tokens;
}

}  // namespace

std::optional<std::string> CheckBeam(const Beam& beam, const BeamConfig& config) {
  if (static_cast<int>(beam.hyps.size()) > config.beam_size) {
    return "beam exceeds beam_size";
  }
  for (size_t i = 0; i < beam.hyps.size(); ++i) {
    const auto& h = beam.hyps[i];
    if (h.cost < 0) return "negative hypothesis cost";
    if (h.tokens.size() != h.token_end_ms.size()) return "timestamp count mismatch";
    if (!std::is_sorted(h.token_end_ms.begin(), h.token_end_ms.end())) {
      return "timestamps decrease";
    }
    if (i > 0 && HypLess(h, beam.hyps[i - 1])) return "beam not sorted";
    if (h.cost - beam.hyps.front().cost > config.pruning_threshold) {
      return "hypothesis outside pruning threshold";
    }
    for (size_t j = 0; j < i; ++j) {
      if (beam.hyps[j].tokens == h.tokens) return "duplicate token sequence";
    }
  }
  return std::nullopt;
}

double ClosingCost(const PosteriorFrame& frame, int num_tokens) {
  const double blank = frame.costs[frame.costs.size() - 2];
  if (num_tokens == 0) return blank;
  return (num_tokens - 1) * blank;
}

namespace {

struct Partial {
  int hyp = 0;
  double acc = 0.0;  // cost added this frame, excluding the closing blank
  std::vector<int> seq;
  std::vector<double> cum;  // acc after each token
  uint64_t hash = 0;
};

struct Candidate {
  int hyp = 0;
  double cost = 0.0;
  const Partial* partial = nullptr;
  uint64_t hash = 0;
};

bool SameSequence(const Beam& beam, const Candidate& a, const Candidate& b) {
  const auto& ta = beam.hyps[a.hyp].tokens;
  const auto& tb = beam.hyps[b.hyp].tokens;
  const auto& sa = a.partial->seq;
  const auto& sb = b.partial->seq;
  if (ta.size() + sa.size() != tb.size() + sb.size()) return false;
  auto at = [](const std::vector<int>& t, const std::vector<int>& s, size_t i) {
    return i < t.size() ? t[i] : s[i - t.size()];
  };
  for (size_t i = 0; i < ta.size() + sa.size(); ++i) {
    if (at(ta, sa, i) != at(tb, sb, i)) return false;
  }
  return true;
}

bool SequenceLess(const Beam& beam, const Candidate& a, const Candidate& b) {
  const auto& ta = beam.hyps[a.hyp].tokens;
  const auto& tb = beam.hyps[b.hyp].tokens;
  const auto& sa = a.partial->seq;
  const auto& sb = b.partial->seq;
  size_t na = ta.size() + sa.size(), nb = tb.size() + sb.size();
  for (size_t i = 0; i < std::min(na, nb); ++i) {
    int x = i < ta.size() ? ta[i] : sa[i - ta.size()];
    int y = i < tb.size() ? tb[i] : sb[i - tb.size()];
    if (x != y) return x < y;
  }
  return na < nb;
}

}  // namespace

Beam ExpandCandidates(const Beam& beam, const PosteriorFrame& frame,
                      const BeamConfig& config, int frame_end_ms, int cap) {
  EOSSEG_REQUIRE(!beam.empty(), "decode step on an empty beam");
  const int blank = static_cast<int>(frame.costs.size()) - 2;
  std::vector<int> expandable;
  for (int v = 0; v < blank; ++v) {
    if (frame.costs[v] < config.expansion_cutoff) expandable.push_back(v);
  }
  std::sort(expandable.begin(), expandable.end(), [&](int a, int b) {
    return frame.costs[a] != frame.costs[b] ? frame.costs[a] < frame.costs[b]
                                            : a < b;
  });

  // All partial expansions, level by level; `levels` owns them.
  std::vector<std::vector<Partial>> levels(1);
  for (size_t h = 0; h < beam.hyps.size(); ++h) {
    levels[0].push_back({static_cast<int>(h), 0.0, {}, {}, beam.hyps[h].seq_hash});
  }
  for (int depth = 1; depth <= config.max_expansion_depth && !expandable.empty();
       ++depth) {
    std::vector<Partial> next;
    for (const auto& p : levels.back()) {
      for (int v : expandable) {
        Partial q = p;
        q.acc += frame.costs[v];
        q.seq.push_back(v);
        q.cum.push_back(q.acc);
        q.hash = HashCombine(q.hash, static_cast<uint64_t>(v));
        next.push_back(std::move(q));
      }
    }
    if (next.empty()) break;
    // Every state at one depth pays the same closing cost, so keeping the
    // best `cap` per depth cannot drop a final candidate that would make
    // the overall top `cap`.
    auto key = [&](const Partial& p) { return beam.hyps[p.hyp].cost + p.acc; };
    std::stable_sort(next.begin(), next.end(), [&](const Partial& a, const Partial& b) {
      return key(a) < key(b);
    });
    if (static_cast<int>(next.size()) > cap) next.resize(cap);
    levels.push_back(std::move(next));
  }

  std::vector<Candidate> finals;
  for (size_t depth = 0; depth < levels.size(); ++depth) {
    for (const auto& p : levels[depth]) {
      double c = beam.hyps[p.hyp].cost + p.acc +
                 ClosingCost(frame, static_cast<int>(depth));
      finals.push_back({p.hyp, c, &p, p.hash});
    }
  }
  std::sort(finals.begin(), finals.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return SequenceLess(beam, a, b);
  });

  Beam out;
  std::unordered_map<uint64_t, std::vector<size_t>> seen;
  for (const auto& c : finals) {
    if (static_cast<int>(out.hyps.size()) >= cap) break;
    auto& bucket = seen[c.hash];
    bool dup = false;
    for (size_t idx : bucket) {
      if (SameSequence(beam, finals[idx], c)) {
        dup = true;
        break;
      }
    }
    if (dup) continue;  // a cheaper alignment of the same sequence exists
    bucket.push_back(&c - finals.data());

    const Hypothesis& parent = beam.hyps[c.hyp];
    Hypothesis h = parent;
    for (size_t i = 0; i < c.partial->seq.size(); ++i) {
      int v = c.partial->seq[i];
      h.tokens.push_back(v);
      h.token_end_ms.push_back(frame_end_ms);
      h.pending.emplace_back(v, parent.cost + c.partial->cum[i]);
      h.merge_context = v;
    }
    h.cost = c.cost;
    h.seq_hash = c.hash;
    out.hyps.push_back(std::move(h));
  }
  return out;
}

Beam Prune(Beam beam, const BeamConfig& config) {
  if (beam.empty()) return beam;
  const double best = beam.hyps.front().cost;
  size_t keep = 0;
  while (keep < beam.hyps.size() && static_cast<int>(keep) < config.beam_size &&
         beam.hyps[keep].cost - best <= config.pruning_threshold) {
    ++keep;
  }
  beam.hyps.resize(keep);
  return beam;
}

Beam DecodeStep(const Beam& beam, const PosteriorFrame& frame,
                const BeamConfig& config, int frame_end_ms) {
  return Prune(ExpandCandidates(beam, frame, config, frame_end_ms, config.beam_size),
               config);
}

void RecordArcs(Beam& beam, Lattice& lattice, int frame_index, bool shared_nodes) {
  for (auto& h : beam.hyps) {
    if (h.pending.empty()) continue;
    int prev = h.node;
    double prev_cost = h.node_cost;
    for (size_t i = 0; i < h.pending.size(); ++i) {
      auto [token, cum] = h.pending[i];
      bool last = i + 1 == h.pending.size();
      int node = last && shared_nodes ? lattice.GetOrAddNode(frame_index, token)
                                      : lattice.AddNode(frame_index, token);
      if (node != prev) lattice.AddArc(prev, node, token, cum - prev_cost);
      prev = node;
      prev_cost = cum;
    }
    h.node = prev;
    h.node_cost = prev_cost;
    h.pending.clear();
  }
}

Beam MergePaths(Beam beam, Lattice& lattice, int frame_index) {
  RecordArcs(beam, lattice, frame_index, /*shared_nodes=*/true);
  // Key: (context, whether the hypothesis has tokens in this segment).
  std::map<std::pair<int, bool>, size_t> survivor_of;
  std::vector<bool> drop(beam.hyps.size(), false);
  auto link = [&](Hypothesis& h, int target) {
    if (h.node == target) return;
    lattice.AddArc(h.node, target, kEpsilon, h.cost - h.node_cost);
  };
  for (size_t i = 0; i < beam.hyps.size(); ++i) {
    auto& h = beam.hyps[i];
    auto key = std::make_pair(h.merge_context, h.tokens.empty());
    auto [it, inserted] = survivor_of.try_emplace(key, i);
    if (inserted) continue;
    Hypothesis& s = beam.hyps[it->second];
    int target = lattice.GetOrAddNode(frame_index, h.merge_context);
    if (s.node != target) {
      link(s, target);
      s.node = target;
      s.node_cost = s.cost;
    }
    link(h, target);
    drop[i] = true;
  }
  Beam out;
  for (size_t i = 0; i < beam.hyps.size(); ++i) {
    if (!drop[i]) out.hyps.push_back(std::move(beam.hyps[i]));
  }
  return out;
}

std::optional<int> EosCheck(const Beam& beam, const PosteriorFrame& frame,
                            const BeamConfig& config, int frame_end_ms) {
  if (beam.empty() || beam.top().tokens.empty()) return std::nullopt;
  const double eos_cost = frame.costs.back();
  if (eos_cost < config.eos_threshold) return frame_end_ms;
  return std::nullopt;
}

FinalizeResult Finalize(const Beam& beam) {
  EOSSEG_REQUIRE(!beam.empty(), "finalize on an empty beam");
  FinalizeResult r;
  r.final = beam.top();
  r.carryover = Beam::Initial(r.final.merge_context);
  return r;
}

StreamDecoder::StreamDecoder(BeamConfig config, int frame_ms)
    : config_(config), frame_ms_(frame_ms), beam_(Beam::Initial()),
      lattice_(-1, kNoContext) {
  config_.Validate();
}

void StreamDecoder::Step(const PosteriorFrame& frame) {
  const int end_ms = (frame.frame_index + 1) * frame_ms_;
  if (config_.path_merge == PathMerge::kBigram) {
    Beam cands = ExpandCandidates(beam_, frame, config_, end_ms,
                                  4 * config_.beam_size);
    beam_ = Prune(MergePaths(std::move(cands), lattice_, frame.frame_index),
                  config_);
  } else {
    beam_ = DecodeStep(beam_, frame, config_, end_ms);
    RecordArcs(beam_, lattice_, frame.frame_index, /*shared_nodes=*/false);
  }
}

std::optional<int> StreamDecoder::CheckEos(const PosteriorFrame& frame) const {
  return EosCheck(beam_, frame, config_, (frame.frame_index + 1) * frame_ms_);
}

FinalizedSegment StreamDecoder::FinalizeSegment(int frame_index) {
  for (const auto& h : beam_.hyps) lattice_.MarkEnd(h.node);
  FinalizeResult r = Finalize(beam_);
  FinalizedSegment seg{std::move(r.final), std::move(lattice_)};
  lattice_ = Lattice(frame_index, seg.best.merge_context);
  beam_ = std::move(r.carryover);
  return seg;
}

}  // namespace eosseg
