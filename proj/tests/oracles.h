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

// Independent reference implementations used to check the scorers.

#ifndef EOSSEG_TESTS_ORACLES_H_
#define EOSSEG_TESTS_ORACLES_H_

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <vector>

#include "eosseg/common.h"
#include "eosseg/lattice.h"

namespace eosseg {
namespace oracles {

// Bit-parallel Levenshtein distance (Myers 1999, Hyyrö's global variant).
// Symbols must lie in [0, 64); the reference must hold at most 64 words.
inline int BitParallelDistance(const std::vector<int>& ref, const std::vector<int>& hyp) {
  const int m = static_cast<int>(ref.size());
  if (m == 0) return static_cast<int>(hyp.size());
  std::array<uint64_t, 64> peq{};
  for (int i = 0; i < m; ++i) peq[ref[i]] |= uint64_t{1} << i;
  const uint64_t high = uint64_t{1} << (m - 1);
  uint64_t pv = ~uint64_t{0}, mv = 0;
  int score = m;
  for (int c : hyp) {
    const uint64_t eq = peq[c];
    const uint64_t xv = eq | mv;
    const uint64_t xh = (((eq & pv) + pv) ^ pv) | eq;
    uint64_t ph = mv | ~(xh | pv);
    uint64_t mh = pv & xh;
    if (ph & high) ++score;
    if (mh & high) --score;
    ph = (ph << 1) | 1;
    mh <<= 1;
    pv = mh | ~(xv | ph);
    mv = ph & xv;
  }
  return score;
}

// Minimum over every alignment, enumerated recursively without memoization.
inline int ExhaustiveDistance(const std::vector<int>& ref, const std::vector<int>& hyp,
                              size_t i = 0, size_t j = 0) {
  if (i == ref.size()) return static_cast<int>(hyp.size() - j);
  if (j == hyp.size()) return static_cast<int>(ref.size() - i);
  int best = (ref[i] != hyp[j]) + ExhaustiveDistance(ref, hyp, i + 1, j + 1);
  best = std::min(best, 1 + ExhaustiveDistance(ref, hyp, i + 1, j));
  best = std::min(best, 1 + ExhaustiveDistance(ref, hyp, i, j + 1));
  return best;
}

// All token sequences a lattice spells from its start to an end node; a
// lattice that spells nothing contributes the empty sequence.
inline std::vector<std::vector<int>> SpelledSequences(const Lattice& lat) {
  std::set<std::vector<int>> out;
  if (!lat.empty()) {
    std::vector<int> seq;
    std::function<void(int)> walk = [&](int n) {
      if (lat.nodes()[n].is_end) out.insert(seq);
      for (const auto& a : lat.arcs()) {
        if (a.from != n) continue;
        if (a.token != kEpsilon) seq.push_back(a.token);
        walk(a.to);
        if (a.token != kEpsilon) seq.pop_back();
      }
    };
    walk(lat.start());
  }
  if (out.empty()) out.insert(std::vector<int>{});
  return {out.begin(), out.end()};
}

// Minimum edit distance over every combination of one path per segment.
inline int BruteForceOracleErrors(const std::vector<Lattice>& segments,
                                  const std::vector<int>& ref) {
  std::vector<std::vector<std::vector<int>>> choices;
  for (const auto& l : segments) choices.push_back(SpelledSequences(l));
  int best = std::numeric_limits<int>::max();
  std::vector<int> hyp;
  std::function<void(size_t)> rec = [&](size_t s) {
    if (s == choices.size()) {
      best = std::min(best, ExhaustiveDistance(ref, hyp));
      return;
    }
    for (const auto& c : choices[s]) {
      hyp.insert(hyp.end(), c.begin(), c.end());
      rec(s + 1);
      hyp.resize(hyp.size() - c.size());
    }
  };
  rec(0);
  return best;
}

// Small random lattice: node ids double as frame indices, so every arc runs
// forward; a few arcs are epsilon.
inline Lattice RandomLattice(Rng& rng, int max_nodes, int alphabet) {
  const int nodes = static_cast<int>(rng.UniformInt(1, max_nodes));
  Lattice lat(0, kNoContext);
  for (int i = 1; i < nodes; ++i) lat.AddNode(i, i);
  const int arcs = nodes == 1 ? 0 : static_cast<int>(rng.UniformInt(0, 2 * nodes));
  for (int k = 0; k < arcs; ++k) {
    int a = static_cast<int>(rng.UniformInt(0, nodes - 2));
    int b = static_cast<int>(rng.UniformInt(a + 1, nodes - 1));
    int tok = rng.Bernoulli(0.15) ? kEpsilon : static_cast<int>(rng.UniformInt(0, alphabet - 1));
    lat.AddArc(a, b, tok, rng.Uniform());
  }
  for (int i = 0; i < nodes; ++i)
    if (rng.Bernoulli(0.4)) lat.MarkEnd(i);
  return lat;
}

}  // namespace oracles
}  // namespace eosseg

#endif  // EOSSEG_TESTS_ORACLES_H_
