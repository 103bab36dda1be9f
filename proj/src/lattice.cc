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

#include "eosseg/lattice.h"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "eosseg/common.h"

namespace eosseg {

Lattice::Lattice(int start_frame, int start_context) {
  AddNode(start_frame, start_context);
}

int Lattice::AddNode(int frame_index, int context) {
  nodes_.push_back({frame_index, context, false});
  return static_cast<int>(nodes_.size()) - 1;
}

int Lattice::GetOrAddNode(int frame_index, int context) {
  auto [it, inserted] = keyed_.try_emplace({frame_index, context}, -1);
  if (inserted) it->second = AddNode(frame_index, context);
  return it->second;
}

void Lattice::AddArc(int from, int to, int token, double cost) {
  EOSSEG_REQUIRE(from >= 0 && from < static_cast<int>(nodes_.size()) && to >= 0 &&
                     to < static_cast<int>(nodes_.size()) && from != to,
                 "lattice arc endpoints out of range");
  arcs_.push_back({from, to, token, cost});
}

std::vector<std::vector<int>> Lattice::OutArcs() const {
  std::vector<std::vector<int>> out(nodes_.size());
  for (size_t a = 0; a < arcs_.size(); ++a) {
    out[arcs_[a].from].push_back(static_cast<int>(a));
  }
  return out;
}

std::vector<int> Lattice::TopologicalOrder() const {
  std::vector<int> indegree(nodes_.size(), 0);
  for (const auto& a : arcs_) {
    EOSSEG_REQUIRE(nodes_[a.from].frame_index <= nodes_[a.to].frame_index,
                   "lattice arc runs backwards in frame order");
    ++indegree[a.to];
  }
  auto out_arcs = OutArcs();
  std::vector<int> order;
  std::vector<int> ready;
  for (size_t n = 0; n < nodes_.size(); ++n) {
    if (indegree[n] == 0) ready.push_back(static_cast<int>(n));
  }
  // Lowest id first keeps the order deterministic.
  std::reverse(ready.begin(), ready.end());
  while (!ready.empty()) {
    int n = ready.back();
    ready.pop_back();
    order.push_back(n);
    for (int a : out_arcs[n]) {
      if (--indegree[arcs_[a].to] == 0) ready.push_back(arcs_[a].to);
    }
  }
  EOSSEG_REQUIRE(order.size() == nodes_.size(), "lattice contains a cycle");
  return order;
}

void Lattice::Write(std::ostream& out) const {
  out << "lattice " << nodes_.size() << ' ' << arcs_.size() << '\n';
  for (size_t n = 0; n < nodes_.size(); ++n) {
    out << "node " << n << ' ' << nodes_[n].frame_index << ' '
        << nodes_[n].context << ' ' << (nodes_[n].is_end ? 1 : 0) << '\n';
  }
  for (const auto& a : arcs_) {
    out << "arc " << a.from << ' ' << a.to << ' ' << a.token << ' ' << a.cost
        << '\n';
  }
}

Lattice Lattice::Read(std::istream& in) {
  Lattice lat;
  std::string kw;
  size_t num_nodes = 0, num_arcs = 0;
  if (!(in >> kw >> num_nodes >> num_arcs) || kw != "lattice") {
    throw ConfigError("lattice text: missing header");
  }
  for (size_t i = 0; i < num_nodes; ++i) {
    size_t id;
    int frame, context, end;
    if (!(in >> kw >> id >> frame >> context >> end) || kw != "node" || id != i) {
      throw ConfigError("lattice text: bad node record");
    }
    int n = lat.AddNode(frame, context);
    if (end) lat.MarkEnd(n);
    lat.keyed_.try_emplace({frame, context}, n);
  }
  for (size_t i = 0; i < num_arcs; ++i) {
    int from, to, token;
    double cost;
    if (!(in >> kw >> from >> to >> token >> cost) || kw != "arc") {
      throw ConfigError("lattice text: bad arc record");
    }
    lat.AddArc(from, to, token, cost);
  }
  return lat;
}

LatticePathsResult LatticePaths(const Lattice& lattice, int limit) {
  LatticePathsResult result;
  if (lattice.empty()) return result;
  lattice.TopologicalOrder();  // validates acyclicity
  auto out_arcs = lattice.OutArcs();
  std::set<std::vector<int>> found;
  long visited = 0;
  std::vector<int> seq;
  // Explicit DFS stack of (node, next arc slot).
  std::vector<std::pair<int, size_t>> stack{{lattice.start(), 0}};
  std::vector<int> pushed_token{kEpsilon};
  if (lattice.nodes()[lattice.start()].is_end) {
    found.insert(seq);
    ++visited;
  }
  while (!stack.empty() && !result.truncated) {
    auto& [node, slot] = stack.back();
    if (slot == out_arcs[node].size()) {
      if (pushed_token.back() != kEpsilon) seq.pop_back();
      pushed_token.pop_back();
      stack.pop_back();
      continue;
    }
    const LatticeArc& arc = lattice.arcs()[out_arcs[node][slot++]];
    if (arc.token != kEpsilon) seq.push_back(arc.token);
    pushed_token.push_back(arc.token);
    stack.push_back({arc.to, 0});
    if (lattice.nodes()[arc.to].is_end) {
      if (++visited > limit) {
        result.truncated = true;
        break;
      }
      found.insert(seq);
    }
  }
  result.paths.assign(found.begin(), found.end());
  return result;
}

}  // namespace eosseg
