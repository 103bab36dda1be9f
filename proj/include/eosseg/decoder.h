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

#ifndef EOSSEG_DECODER_H_
#define EOSSEG_DECODER_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "eosseg/acoustics.h"
#include "eosseg/lattice.h"

namespace eosseg {

enum class PathMerge { kNone, kBigram };

struct BeamConfig {
  int beam_size = 4;
  double pruning_threshold = 5.0;
  double expansion_cutoff = 5.0;
  int max_expansion_depth = 10;
  PathMerge path_merge = PathMerge::kNone;
  double eos_threshold = 3.7;

  static BeamConfig FirstPass() { return BeamConfig{}; }
  static BeamConfig SecondPass() {
    BeamConfig c;
    c.beam_size = 8;
    return c;
  }
  void Validate() const;
};

struct Hypothesis {
  std::vector<int> tokens;        // non-blank tokens of the current segment
  std::vector<int> token_end_ms;  // emission time of each token
  double cost = 0.0;
  int merge_context = kNoContext;  // last token, carried across segments

  // Lattice bookkeeping: node reached by the last recorded token, the
  // hypothesis cost at that node, and tokens emitted since (token,
  // cumulative cost right after the token).
  int node = 0;
  double node_cost = 0.0;
  std::vector<std::pair<int, double>> pending;
  uint64_t seq_hash = 0;
};

// Hypotheses sorted by (cost, token sequence); no duplicate sequences.
struct Beam {
  std::vector<Hypothesis> hyps;

  bool empty() const { return hyps.empty(); }
  const Hypothesis& top() const { return hyps.front(); }
  static Beam Initial(int context = kNoContext);
};

// Returns a description of the first violated beam invariant, or nullopt.
std::optional<std::string> CheckBeam(const Beam& beam, const BeamConfig& config);

// Cost of closing a frame after n emitted tokens: blank alone pays the blank
// cost, one token closes for free, every token beyond the first pays blank.
double ClosingCost(const PosteriorFrame& frame, int num_tokens);

// Breadth-first expansion of every hypothesis by up to max_expansion_depth
// tokens, each below expansion_cutoff, then a closing blank. Returns the
// candidates sorted and deduplicated, capped at `cap` (no threshold pruning).
Beam ExpandCandidates(const Beam& beam, const PosteriorFrame& frame,
                      const BeamConfig& config, int frame_end_ms, int cap);
// Keeps at most beam_size hypotheses within pruning_threshold of the best.
Beam Prune(Beam beam, const BeamConfig& config);
// Expand + Prune.
Beam DecodeStep(const Beam& beam, const PosteriorFrame& frame,
                const BeamConfig& config, int frame_end_ms);

// Writes pending tokens of every hypothesis into the lattice. With
// `shared_nodes` the last token of each chain lands on the (frame, token)
// node, otherwise every emission gets a fresh node.
void RecordArcs(Beam& beam, Lattice& lattice, int frame_index, bool shared_nodes);
// Bigram recombination: records arcs, then merges hypotheses sharing the
// last token. The cheapest survives; the others reach its node by epsilon.
Beam MergePaths(Beam beam, Lattice& lattice, int frame_index);

// EOS when the top hypothesis emitted something in this segment and the
// frame's EOS cost is under eos_threshold.
std::optional<int> EosCheck(const Beam& beam, const PosteriorFrame& frame,
                            const BeamConfig& config, int frame_end_ms);

struct FinalizeResult {
  Hypothesis final;
  Beam carryover;
};
FinalizeResult Finalize(const Beam& beam);

struct FinalizedSegment {
  Hypothesis best;
  Lattice lattice;
};

// One decoding stream: beam plus the lattice of the open segment.
class StreamDecoder {
 public:
  StreamDecoder(BeamConfig config, int frame_ms);

  void Step(const PosteriorFrame& frame);
  std::optional<int> CheckEos(const PosteriorFrame& frame) const;
  FinalizedSegment FinalizeSegment(int frame_index);

  const Beam& beam() const { return beam_; }
  const Lattice& lattice() const { return lattice_; }
  const BeamConfig& config() const { return config_; }

 private:
  BeamConfig config_;
  int frame_ms_;
  Beam beam_;
  Lattice lattice_;
};

}  // namespace eosseg

#endif  // EOSSEG_DECODER_H_
