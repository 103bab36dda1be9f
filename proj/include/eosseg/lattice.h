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

#ifndef EOSSEG_LATTICE_H_
#define EOSSEG_LATTICE_H_

#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

namespace eosseg {

inline constexpr int kEpsilon = -1;
inline constexpr int kNoContext = -1;

struct LatticeNode {
  int frame_index = 0;
  int context = kNoContext;  // last token (order-2 LM state)
  bool is_end = false;
};

struct LatticeArc {
  int from = 0;
  int to = 0;
  int token = kEpsilon;
  double cost = 0.0;
};

// Token lattice of one segment. Arcs carry one token or epsilon; paths run
// from start() to any node flagged is_end. Node 0 is the start node.
class Lattice {
 public:
  Lattice() = default;
  Lattice(int start_frame, int start_context);

  bool empty() const { return nodes_.empty(); }
  int start() const { return 0; }
  const std::vector<LatticeNode>& nodes() const { return nodes_; }
  const std::vector<LatticeArc>& arcs() const { return arcs_; }

  int AddNode(int frame_index, int context);
  // Shared node keyed by (frame_index, context); created on first use.
  int GetOrAddNode(int frame_index, int context);
  void AddArc(int from, int to, int token, double cost);
  void MarkEnd(int node) { nodes_.at(node).is_end = true; }

  // Arcs leaving each node, in insertion order.
  std::vector<std::vector<int>> OutArcs() const;
  // Kahn order; throws ContractViolation on a cycle or a backwards-in-time arc.
  std::vector<int> TopologicalOrder() const;

  void Write(std::ostream& out) const;
  static Lattice Read(std::istream& in);

 private:
  std::vector<LatticeNode> nodes_;
  std::vector<LatticeArc> arcs_;
  std::map<std::pair<int, int>, int> keyed_;
};

struct LatticePathsResult {
  std::vector<std::vector<int>> paths;  // distinct token sequences, sorted
  bool truncated = false;
};

// Enumerates start-to-end paths; stops and flags truncation once more than
// `limit` raw paths have been visited.
LatticePathsResult LatticePaths(const Lattice& lattice, int limit);

}  // namespace eosseg

#endif  // EOSSEG_LATTICE_H_
