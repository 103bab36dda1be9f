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

#ifndef EOSSEG_METRICS_H_
#define EOSSEG_METRICS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eosseg/corpus.h"
#include "eosseg/lattice.h"
#include "eosseg/pipeline.h"

namespace eosseg {

struct WerBreakdown {
  int64_t substitutions = 0;
  int64_t insertions = 0;
  int64_t deletions = 0;
  int64_t ref_words = 0;

  int64_t errors() const { return substitutions + insertions + deletions; }
  // Throws ContractViolation when ref_words == 0.
  double wer() const;
  WerBreakdown& operator+=(const WerBreakdown& o);
};

enum class EditOp { kMatch, kSubstitution, kInsertion, kDeletion };

struct AlignedPair {
  EditOp op;
  int ref_index;  // -1 for insertions
  int hyp_index;  // -1 for deletions
};

struct Alignment {
  WerBreakdown counts;
  std::vector<AlignedPair> pairs;
};

// Unit-cost minimal edit alignment. Among equal-cost alignments the one
// preferring substitution, then insertion, then deletion at each step from
// the end is chosen.
Alignment Align(std::span<const int> ref, std::span<const int> hyp);
Alignment Align(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

// Counts only; same tie-break as Align. Accepts an empty reference.
WerBreakdown WordErrors(std::span<const int> ref, std::span<const int> hyp);
// Requires a non-empty reference. The string form ignores <EOS> markers.
WerBreakdown Wer(std::span<const int> ref, std::span<const int> hyp);
WerBreakdown Wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

// Minimum edit distance against ref over every choice of one path per
// segment lattice. A lattice with no reachable end node contributes nothing.
WerBreakdown OracleWer(const std::vector<const Lattice*>& segments,
                       std::span<const int> ref);
WerBreakdown OracleWer(const std::vector<Lattice>& segments, std::span<const int> ref);

enum class LatencyMode { kLastOnly, kAll };
LatencyMode LatencyModeFromString(const std::string& s);

struct EosLatencyResult {
  std::vector<int> latencies_ms;  // may be negative
  int excluded = 0;               // EOS with no speech before it
};
// Latency of every EOS (terminal flushes are not EOS) relative to the end
// of the last word starting before it.
EosLatencyResult EosLatency(const std::vector<SegmentResult>& segments,
                            const UtteranceSpec& spec, LatencyMode mode);

// Nearest rank: sorted[ceil(p * n) - 1]. Requires non-empty values, 0 < p <= 1.
double Percentile(std::vector<double> values, double p);

struct LatencyStats {
  std::vector<double> values_ms;
  double p50 = 0.0;
  double p90 = 0.0;

  static LatencyStats From(std::vector<double> values);
  bool empty() const { return values_ms.empty(); }
};

// Word-diff of each run against ref: [-deleted-], {+inserted+},
// [-ref-]{+hyp+} for substitutions, and <EOS> where the run emitted one.
std::string DiffReport(
    const std::vector<std::string>& ref,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& runs);

struct ReportRow {
  std::string segmenter;
  std::optional<double> sl50_s;
  std::optional<double> sl90_s;
  std::optional<double> eos50_ms;  // absent for fixed segmenters
  std::optional<double> eos90_ms;
  double wer_2nd = 0.0;  // percent
  double wer_1st = 0.0;
  std::optional<double> ower;
};

struct RunReport {
  std::vector<ReportRow> rows;

  static const char* CsvHeader();
  void WriteCsv(std::ostream& out) const;
  void WriteJson(std::ostream& out) const;
};

// Corpus-level fold over simulated utterances, in input order.
struct CorpusMetrics {
  WerBreakdown wer_1st;
  WerBreakdown wer_2nd;
  WerBreakdown ower;
  std::vector<double> segment_lengths_ms;
  EosLatencyResult eos_last;
  EosLatencyResult eos_all;
  int utterances_with_eos = 0;
};

CorpusMetrics EvaluateCorpus(const std::vector<UtteranceSpec>& specs,
                             const std::vector<UtteranceResult>& results,
                             const TokenInventory& tokens, bool with_oracle);

// Formats a fixed-point number the same way on every platform.
std::string FormatFixed(double v, int digits);

}  // namespace eosseg

#endif  // EOSSEG_METRICS_H_
