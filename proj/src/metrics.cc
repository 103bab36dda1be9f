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

#include "eosseg/metrics.h"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "eosseg/common.h"
#include "json.hpp"

namespace eosseg {

double WerBreakdown::wer() const {
  EOSSEG_REQUIRE(ref_words > 0, "WER is undefined for an empty reference");
  return static_cast<double>(errors()) / static_cast<double>(ref_words);
}

WerBreakdown& WerBreakdown::operator+=(const WerBreakdown& o) {
  substitutions += o.substitutions;
  insertions += o.insertions;
  deletions += o.deletions;
  ref_words += o.ref_words;
  return *this;
}

namespace {

template <typename T>
Alignment AlignImpl(std::span<const T> ref, std::span<const T> hyp) {
  const size_t m = ref.size(), n = hyp.size(), w = n + 1;
  thread_local std::vector<int> cost;
  thread_local std::vector<EditOp> back;
  cost.assign((m + 1) * w, 0);
  back.assign((m + 1) * w, EditOp::kMatch);
  for (size_t j = 1; j <= n; ++j) {
    cost[j] = static_cast<int>(j);
    back[j] = EditOp::kInsertion;
  }
  for (size_t i = 1; i <= m; ++i) {
    cost[i * w] = static_cast<int>(i);
    back[i * w] = EditOp::kDeletion;
    for (size_t j = 1; j <= n; ++j) {
      const bool same = ref[i - 1] == hyp[j - 1];
      int best = cost[(i - 1) * w + j - 1] + (same ? 0 : 1);
      EditOp op = same ? EditOp::kMatch : EditOp::kSubstitution;
      if (cost[i * w + j - 1] + 1 < best) {
        best = cost[i * w + j - 1] + 1;
        op = EditOp::kInsertion;
      }
      if (cost[(i - 1) * w + j] + 1 < best) {
        best = cost[(i - 1) * w + j] + 1;
        op = EditOp::kDeletion;
      }
      cost[i * w + j] = best;
      back[i * w + j] = op;
    }
  }
  Alignment out;
  out.counts.ref_words = static_cast<int64_t>(m);
  size_t i = m, j = n;
  while (i > 0 || j > 0) {
    const EditOp op = back[i * w + j];
    switch (op) {
      case EditOp::kMatch:
      case EditOp::kSubstitution:
        --i, --j;
        out.pairs.push_back({op, static_cast<int>(i), static_cast<int>(j)});
        if (op == EditOp::kSubstitution) ++out.counts.substitutions;
        break;
      case EditOp::kInsertion:
        --j;
        out.pairs.push_back({op, -1, static_cast<int>(j)});
        ++out.counts.insertions;
        break;
      case EditOp::kDeletion:
        --i;
        out.pairs.push_back({op, static_cast<int>(i), -1});
        ++out.counts.deletions;
        break;
    }
  }
  std::reverse(out.pairs.begin(), out.pairs.end());
  return out;
}

// DP cell carrying the error breakdown of the preferred alignment.
struct Cell {
  int cost = INT_MAX / 2;
  int s = 0, i = 0, d = 0;
};

inline Cell Step(const Cell& c, int ds, int di, int dd) {
  return {c.cost + ds + di + dd, c.s + ds, c.i + di, c.d + dd};
}

// Ordering for equal costs mirrors the alignment tie-break.
inline bool Better(const Cell& a, const Cell& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  if (a.s != b.s) return a.s > b.s;
  return a.i > b.i;
}

template <typename T>
WerBreakdown CountImpl(std::span<const T> ref, std::span<const T> hyp) {
  const size_t m = ref.size(), n = hyp.size();
  thread_local std::vector<Cell> prev, cur;
  prev.assign(n + 1, Cell{});
  cur.assign(n + 1, Cell{});
  for (size_t j = 0; j <= n; ++j) prev[j] = {static_cast<int>(j), 0, static_cast<int>(j), 0};
  for (size_t i = 1; i <= m; ++i) {
    cur[0] = {static_cast<int>(i), 0, 0, static_cast<int>(i)};
    for (size_t j = 1; j <= n; ++j) {
      const bool same = ref[i - 1] == hyp[j - 1];
      Cell best = Step(prev[j - 1], same ? 0 : 1, 0, 0);
      Cell ins = Step(cur[j - 1], 0, 1, 0);
      if (ins.cost < best.cost) best = ins;
      Cell del = Step(prev[j], 0, 0, 1);
      if (del.cost < best.cost) best = del;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  WerBreakdown out;
  out.substitutions = prev[n].s;
  out.insertions = prev[n].i;
  out.deletions = prev[n].d;
  out.ref_words = static_cast<int64_t>(m);
  return out;
}

std::vector<std::string> WithoutEos(const std::vector<std::string>& words) {
  std::vector<std::string> out;
  for (const auto& w : words)
    if (w != kEosMarker) out.push_back(w);
  return out;
}

}  // namespace

Alignment Align(std::span<const int> ref, std::span<const int> hyp) {
  return AlignImpl<int>(ref, hyp);
}

Alignment Align(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  return AlignImpl<std::string>(ref, hyp);
}

WerBreakdown WordErrors(std::span<const int> ref, std::span<const int> hyp) {
  return CountImpl<int>(ref, hyp);
}

WerBreakdown Wer(std::span<const int> ref, std::span<const int> hyp) {
  EOSSEG_REQUIRE(!ref.empty(), "WER is undefined for an empty reference");
  return CountImpl<int>(ref, hyp);
}

WerBreakdown Wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  std::vector<std::string> r = WithoutEos(ref), h = WithoutEos(hyp);
  EOSSEG_REQUIRE(!r.empty(), "WER is undefined for an empty reference");
  return CountImpl<std::string>(r, h);
}

namespace {

// Deletions available without consuming hypothesis tokens.
void CloseDeletions(std::vector<Cell>& row) {
  for (size_t j = 1; j < row.size(); ++j) {
    Cell c = Step(row[j - 1], 0, 0, 1);
    if (Better(c, row[j])) row[j] = c;
  }
}

void MergeInto(std::vector<Cell>& dst, const std::vector<Cell>& src) {
  for (size_t j = 0; j < dst.size(); ++j)
    if (Better(src[j], dst[j])) dst[j] = src[j];
}

std::vector<Cell> PassLattice(const Lattice& lat, const std::vector<Cell>& in,
                              std::span<const int> ref) {
  if (lat.empty()) return in;
  const size_t width = in.size();
  const auto order = lat.TopologicalOrder();
  const auto out_arcs = lat.OutArcs();
  std::vector<std::vector<Cell>> rows(lat.nodes().size());
  rows[lat.start()] = in;
  std::vector<Cell> result(width);
  bool reached_end = false;
  for (int u : order) {
    if (rows[u].empty()) continue;
    CloseDeletions(rows[u]);
    const std::vector<Cell>& row = rows[u];
    if (lat.nodes()[u].is_end) {
      MergeInto(result, row);
      reached_end = true;
    }
    for (int a : out_arcs[u]) {
      const LatticeArc& arc = lat.arcs()[a];
      std::vector<Cell> next(width);
      if (arc.token == kEpsilon) {
        next = row;
      } else {
        next[0] = Step(row[0], 0, 1, 0);
        for (size_t j = 1; j < width; ++j) {
          Cell ins = Step(row[j], 0, 1, 0);
          Cell diag = Step(row[j - 1], ref[j - 1] == arc.token ? 0 : 1, 0, 0);
          next[j] = Better(diag, ins) || diag.cost == ins.cost ? diag : ins;
        }
      }
      std::vector<Cell>& dst = rows[arc.to];
      if (dst.empty()) dst.assign(width, Cell{});
      MergeInto(dst, next);
    }
    if (u != lat.start()) std::vector<Cell>().swap(rows[u]);
  }
  return reached_end ? result : in;
}

}  // namespace

WerBreakdown OracleWer(const std::vector<const Lattice*>& segments,
                       std::span<const int> ref) {
  const size_t m = ref.size();
  std::vector<Cell> row(m + 1);
  row[0] = {0, 0, 0, 0};
  CloseDeletions(row);
  for (const Lattice* lat : segments) {
    EOSSEG_REQUIRE(lat != nullptr, "null lattice");
    row = PassLattice(*lat, row, ref);
  }
  CloseDeletions(row);
  WerBreakdown out;
  out.substitutions = row[m].s;
  out.insertions = row[m].i;
  out.deletions = row[m].d;
  out.ref_words = static_cast<int64_t>(m);
  return out;
}

WerBreakdown OracleWer(const std::vector<Lattice>& segments, std::span<const int> ref) {
  std::vector<const Lattice*> ptrs;
  for (const auto& l : segments) ptrs.push_back(&l);
  return OracleWer(ptrs, ref);
}

LatencyMode LatencyModeFromString(const std::string& s) {
  if (s == "last_only") return LatencyMode::kLastOnly;
  if (s == "all") return LatencyMode::kAll;
  throw ConfigError("unknown latency mode: " + s);
}

EosLatencyResult EosLatency(const std::vector<SegmentResult>& segments,
                            const UtteranceSpec& spec, LatencyMode mode) {
  std::vector<int> picked;
  for (const auto& s : segments)
    if (!s.terminal) picked.push_back(s.eos_timestamp_ms);
  if (mode == LatencyMode::kLastOnly && picked.size() > 1)
    picked.erase(picked.begin(), picked.end() - 1);
  EosLatencyResult out;
  for (int t : picked) {
    std::optional<int> speech_end = EndOfSpeechBefore(spec, t);
    if (!speech_end) {
      ++out.excluded;
      continue;
    }
    out.latencies_ms.push_back(t - *speech_end);
  }
  return out;
}

double Percentile(std::vector<double> values, double p) {
  EOSSEG_REQUIRE(!values.empty(), "percentile of an empty list");
  EOSSEG_REQUIRE(p > 0.0 && p <= 1.0, "percentile fraction must be in (0, 1]");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  // The epsilon keeps p * n on an integer from rounding up (0.9 * 10).
  int64_t rank = static_cast<int64_t>(std::ceil(p * n - 1e-9));
  rank = std::clamp<int64_t>(rank, 1, static_cast<int64_t>(values.size()));
  return values[rank - 1];
}

LatencyStats LatencyStats::From(std::vector<double> values) {
  LatencyStats s;
  s.values_ms = std::move(values);
  if (!s.values_ms.empty()) {
    s.p50 = Percentile(s.values_ms, 0.5);
    s.p90 = Percentile(s.values_ms, 0.9);
  }
  return s;
}

std::string FormatFixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  std::string s = buf;
  if (s == "-0" || s.rfind("-0.", 0) == 0) {
    // Avoid "-0.00" for values that round to zero.
    bool all_zero = s.find_first_not_of("-0.") == std::string::npos;
    if (all_zero) s.erase(0, 1);
  }
  return s;
}

std::string DiffReport(
    const std::vector<std::string>& ref,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& runs) {
  std::ostringstream out;
  out << "REF:";
  for (const auto& w : ref) out << ' ' << w;
  out << '\n';
  const std::vector<std::string> clean_ref = WithoutEos(ref);
  for (const auto& [name, transcript] : runs) {
    std::vector<std::string> hyp;
    std::vector<int> eos_before;  // EOS count placed before hyp word k
    for (const auto& w : transcript) {
      if (w == kEosMarker) {
        if (eos_before.size() < hyp.size() + 1) eos_before.resize(hyp.size() + 1, 0);
        ++eos_before[hyp.size()];
      } else {
        hyp.push_back(w);
      }
    }
    eos_before.resize(hyp.size() + 1, 0);
    Alignment al = Align(clean_ref, hyp);
    out << "== " << name << "  S=" << al.counts.substitutions
        << " I=" << al.counts.insertions << " D=" << al.counts.deletions
        << " N=" << al.counts.ref_words;
    if (al.counts.ref_words > 0) out << " WER=" << FormatFixed(100.0 * al.counts.wer(), 2) << '%';
    out << '\n';
    std::vector<std::string> items;
    auto flush_eos = [&](int k) {
      for (; eos_before[k] > 0; --eos_before[k]) items.push_back(kEosMarker);
    };
    for (const auto& pr : al.pairs) {
      if (pr.hyp_index >= 0) flush_eos(pr.hyp_index);
      switch (pr.op) {
        case EditOp::kMatch: items.push_back(hyp[pr.hyp_index]); break;
        case EditOp::kSubstitution:
          items.push_back("[-" + clean_ref[pr.ref_index] + "-]{+" + hyp[pr.hyp_index] + "+}");
          break;
        case EditOp::kInsertion: items.push_back("{+" + hyp[pr.hyp_index] + "+}"); break;
        case EditOp::kDeletion: items.push_back("[-" + clean_ref[pr.ref_index] + "-]"); break;
      }
    }
    flush_eos(static_cast<int>(hyp.size()));
    for (size_t i = 0; i < items.size(); ++i) out << (i ? " " : "") << items[i];
    out << '\n';
  }
  return out.str();
}

const char* RunReport::CsvHeader() {
  return "segmenter,sl50_s,sl90_s,eos50_ms,eos90_ms,wer_2nd,wer_1st,ower";
}

namespace {

std::string Opt(const std::optional<double>& v, int digits) {
  return v ? FormatFixed(*v, digits) : "-";
}

nlohmann::ordered_json OptJson(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

void RunReport::WriteCsv(std::ostream& out) const {
  out << CsvHeader() << '\n';
  for (const auto& r : rows) {
    out << r.segmenter << ',' << Opt(r.sl50_s, 2) << ',' << Opt(r.sl90_s, 2) << ','
        << Opt(r.eos50_ms, 0) << ',' << Opt(r.eos90_ms, 0) << ','
        << FormatFixed(r.wer_2nd, 2) << ',' << FormatFixed(r.wer_1st, 2) << ','
        << Opt(r.ower, 2) << '\n';
  }
}

void RunReport::WriteJson(std::ostream& out) const {
  nlohmann::ordered_json rows_json = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["segmenter"] = r.segmenter;
    j["sl50_s"] = OptJson(r.sl50_s);
    j["sl90_s"] = OptJson(r.sl90_s);
    j["eos50_ms"] = OptJson(r.eos50_ms);
    j["eos90_ms"] = OptJson(r.eos90_ms);
    j["wer_2nd"] = r.wer_2nd;
    j["wer_1st"] = r.wer_1st;
    j["ower"] = OptJson(r.ower);
    rows_json.push_back(std::move(j));
  }
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["rows"] = std::move(rows_json);
  out << doc.dump(2) << '\n';
}

CorpusMetrics EvaluateCorpus(const std::vector<UtteranceSpec>& specs,
                             const std::vector<UtteranceResult>& results,
                             const TokenInventory& tokens, bool with_oracle) {
  EOSSEG_REQUIRE(specs.size() == results.size(), "one result per utterance expected");
  CorpusMetrics m;
  for (size_t u = 0; u < specs.size(); ++u) {
    const std::vector<int> ref = tokens.Ids(specs[u].WordTexts());
    const UtteranceResult& r = results[u];
    m.wer_1st += WordErrors(ref, r.Transcript1st());
    m.wer_2nd += WordErrors(ref, r.Transcript2nd());
    if (with_oracle) {
      std::vector<const Lattice*> lats;
      for (const auto& s : r.segments) lats.push_back(&s.lattice_2nd);
      m.ower += OracleWer(lats, ref);
    }
    bool any_eos = false;
    for (const auto& s : r.segments) {
      if (s.length_ms() > 0) m.segment_lengths_ms.push_back(s.length_ms());
      any_eos = any_eos || !s.terminal;
    }
    if (any_eos) ++m.utterances_with_eos;
    for (LatencyMode mode : {LatencyMode::kLastOnly, LatencyMode::kAll}) {
      EosLatencyResult e = EosLatency(r.segments, specs[u], mode);
      EosLatencyResult& dst = mode == LatencyMode::kLastOnly ? m.eos_last : m.eos_all;
      dst.latencies_ms.insert(dst.latencies_ms.end(), e.latencies_ms.begin(),
                              e.latencies_ms.end());
      dst.excluded += e.excluded;
    }
  }
  return m;
}

}  // namespace eosseg
