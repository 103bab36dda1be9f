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

#ifndef EOSSEG_EXPERIMENT_H_
#define EOSSEG_EXPERIMENT_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "eosseg/config.h"
#include "eosseg/metrics.h"
#include "eosseg/pipeline.h"

namespace eosseg {

SimulationConfig MakeSimulationConfig(const ExperimentConfig& config,
                                      SegmenterKind segmenter, Strategy strategy);

// Runs every utterance; results are in input order whatever `threads` is.
std::vector<UtteranceResult> SimulateCorpus(const TwoPassPipeline& pipeline,
                                            const std::vector<UtteranceSpec>& corpus,
                                            int threads);

struct CellOutcome {
  SegmenterKind segmenter;
  Strategy strategy;
  std::string label;
  CorpusMetrics metrics;
  std::vector<UtteranceResult> results;
};

struct LatencyRow {
  std::string segmenter;
  std::string strategy;
  double wer_2nd = 0.0;  // percent
  double algorithmic_ms = 0.0;    // median over EOS-finalized segments
  double computational_ms = 0.0;  // median; B2 reports the measured wait
  int segments = 0;
  int b2_fallback_segments = 0;
};

ReportRow MakeReportRow(const std::string& label, SegmenterKind segmenter,
                        const CorpusMetrics& metrics);
LatencyRow MakeLatencyRow(const CellOutcome& cell);

// Fixed-width histogram: bin_start_ms,bin_end_ms,count for non-empty range.
void WriteHistogramCsv(std::ostream& out, const std::vector<double>& values, int bin_ms);

struct ExperimentSummary {
  RunReport report;
  std::vector<LatencyRow> latency;
  std::vector<CellOutcome> cells;
};

// Segmenter x strategy grid. Writes report.csv, report.json, latency.csv,
// histogram CSVs and the resolved config into output_dir when `write`.
ExperimentSummary RunExperiment(const ExperimentConfig& config, bool write = true);

struct SweepRow {
  double eos_threshold = 0.0;
  int silence_length_threshold_ms = 0;
  double wer_2nd = 0.0;  // percent
  double sl50_s = 0.0;
};
// E2E segmenter over eos_threshold x silence-length grids; writes sweep.csv.
std::vector<SweepRow> RunSweep(const ExperimentConfig& config, bool write = true);

struct OracleRow {
  std::string segmenter;
  double sl50_s = 0.0;
  WerBreakdown wer_standard, ower_standard, wer_merged, ower_merged;
};
struct OracleStudy {
  std::vector<OracleRow> rows;
  double e2e_eos_threshold = 0.0;
  double vad_sl50_s = 0.0;
  double e2e_sl50_s = 0.0;
  bool sl50_matched = false;
};
// VAD and E2E with and without bigram path merging in the 2nd pass, the
// E2E threshold searched so both SL50 agree. Writes oracle.csv and
// oracle_meta.json.
OracleStudy RunOracleStudy(const ExperimentConfig& config, bool write = true);

// Corpus dump, per-utterance diff reports, one event log and lattices.
void RunReportCommand(const ExperimentConfig& config);

// Segment transcripts joined with <EOS> after each EOS-finalized segment.
std::vector<std::string> TranscriptWithEos(const UtteranceResult& result,
                                           const TokenInventory& tokens, bool second_pass);

const char* SweepCsvHeader();
const char* OracleCsvHeader();
const char* LatencyCsvHeader();
void WriteSweepCsv(std::ostream& out, const std::vector<SweepRow>& rows);
void WriteOracleCsv(std::ostream& out, const std::vector<OracleRow>& rows);
void WriteLatencyCsv(std::ostream& out, const std::vector<LatencyRow>& rows);

}  // namespace eosseg

#endif  // EOSSEG_EXPERIMENT_H_
