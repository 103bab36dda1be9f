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

#include "eosseg/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "eosseg/common.h"

namespace eosseg {

namespace fs = std::filesystem;

SimulationConfig MakeSimulationConfig(const ExperimentConfig& config,
                                      SegmenterKind segmenter, Strategy strategy) {
  SimulationConfig s;
  s.acoustic = config.acoustic;
  s.vad = config.vad;
  s.first_pass = config.first_pass;
  s.second_pass = config.second_pass;
  s.pipeline = config.pipeline;
  s.pipeline.segmenter = segmenter;
  s.pipeline.strategy = strategy;
  s.t_sil_ms = config.t_sil_ms;
  s.t_sil_hes_ms = config.t_sil_hes_ms;
  return s;
}

std::vector<UtteranceResult> SimulateCorpus(const TwoPassPipeline& pipeline,
                                            const std::vector<UtteranceSpec>& corpus,
                                            int threads) {
  std::vector<UtteranceResult> results(corpus.size());
  int n = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n = std::clamp(n, 1, std::max(1, static_cast<int>(corpus.size())));
  if (n == 1) {
    for (size_t i = 0; i < corpus.size(); ++i) results[i] = pipeline.Run(corpus[i]);
    return results;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> workers;
  for (int t = 0; t < n; ++t) {
    workers.emplace_back([&] {
      try {
        for (size_t i = next++; i < corpus.size() && !failed; i = next++)
          results[i] = pipeline.Run(corpus[i]);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
  return results;
}

namespace {

double Median(std::vector<double> v) { return v.empty() ? 0.0 : Percentile(std::move(v), 0.5); }

std::vector<double> ToDoubles(const std::vector<int>& v) {
  return std::vector<double>(v.begin(), v.end());
}

double Sl50Seconds(const CorpusMetrics& m) {
  if (m.segment_lengths_ms.empty()) return 0.0;
  return Percentile(m.segment_lengths_ms, 0.5) / 1000.0;
}

double Percent(const WerBreakdown& w) { return w.ref_words > 0 ? 100.0 * w.wer() : 0.0; }

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

template <typename F>
void WriteFile(const std::string& dir, const std::string& name, F&& body) {
  EnsureDir(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string FileSafe(std::string s) {
  for (auto& ch : s)
    if (ch == '+') ch = '_';
  return s;
}

struct Prepared {
  std::vector<UtteranceSpec> corpus;
  std::unique_ptr<SyntheticAcoustics> acoustics;
};

Prepared Prepare(const ExperimentConfig& config) {
  config.Validate();
  Prepared p;
  p.corpus = GenerateCorpus(config.corpus);
  p.acoustics = std::make_unique<SyntheticAcoustics>(config.acoustic,
                                                     TokenInventory(config.corpus.vocab));
  return p;
}

CorpusMetrics RunCell(const Prepared& p, const SimulationConfig& sim, int threads,
                      std::vector<UtteranceResult>* keep) {
  TwoPassPipeline pipeline(*p.acoustics, sim);
  std::vector<UtteranceResult> results = SimulateCorpus(pipeline, p.corpus, threads);
  CorpusMetrics m = EvaluateCorpus(p.corpus, results, p.acoustics->tokens(),
                                   !sim.first_pass_only);
  if (keep) *keep = std::move(results);
  return m;
}

}  // namespace

ReportRow MakeReportRow(const std::string& label, SegmenterKind segmenter,
                        const CorpusMetrics& m) {
  ReportRow row;
  row.segmenter = label;
  if (!m.segment_lengths_ms.empty()) {
    row.sl50_s = Percentile(m.segment_lengths_ms, 0.5) / 1000.0;
    row.sl90_s = Percentile(m.segment_lengths_ms, 0.9) / 1000.0;
  }
  if (segmenter != SegmenterKind::kFixed && !m.eos_last.latencies_ms.empty()) {
    LatencyStats s = LatencyStats::From(ToDoubles(m.eos_last.latencies_ms));
    row.eos50_ms = s.p50;
    row.eos90_ms = s.p90;
  }
  row.wer_2nd = Percent(m.wer_2nd);
  row.wer_1st = Percent(m.wer_1st);
  if (m.ower.ref_words > 0) row.ower = Percent(m.ower);
  return row;
}

LatencyRow MakeLatencyRow(const CellOutcome& cell) {
  LatencyRow row;
  row.segmenter = ToString(cell.segmenter);
  row.strategy = ToString(cell.strategy);
  row.wer_2nd = Percent(cell.metrics.wer_2nd);
  std::vector<double> alg, comp;
  for (const auto& r : cell.results) {
    for (const auto& s : r.segments) {
      if (s.terminal) continue;
      alg.push_back(s.finalize_algorithmic_ms);
      comp.push_back(s.finalize_computational_ms);
      if (s.b2_fallback) ++row.b2_fallback_segments;
    }
  }
  row.segments = static_cast<int>(alg.size());
  row.algorithmic_ms = Median(alg);
  row.computational_ms = Median(comp);
  return row;
}

void WriteHistogramCsv(std::ostream& out, const std::vector<double>& values, int bin_ms) {
  EOSSEG_REQUIRE(bin_ms > 0, "histogram bin width must be positive");
  out << "bin_start_ms,bin_end_ms,count\n";
  if (values.empty()) return;
  std::map<int64_t, int64_t> bins;
  for (double v : values)
    ++bins[static_cast<int64_t>(std::floor(v / bin_ms))];
  const int64_t lo = bins.begin()->first, hi = bins.rbegin()->first;
  for (int64_t b = lo; b <= hi; ++b) {
    auto it = bins.find(b);
    out << b * bin_ms << ',' << (b + 1) * bin_ms << ',' << (it == bins.end() ? 0 : it->second)
        << '\n';
  }
}

const char* LatencyCsvHeader() {
  return "segmenter,strategy,wer_2nd,algorithmic_ms,computational_ms,segments,b2_fallback_segments";
}

void WriteLatencyCsv(std::ostream& out, const std::vector<LatencyRow>& rows) {
  out << LatencyCsvHeader() << '\n';
  for (const auto& r : rows) {
    out << r.segmenter << ',' << r.strategy << ',' << FormatFixed(r.wer_2nd, 2) << ','
        << FormatFixed(r.algorithmic_ms, 0) << ',' << FormatFixed(r.computational_ms, 0)
        << ',' << r.segments << ',' << r.b2_fallback_segments << '\n';
  }
}

ExperimentSummary RunExperiment(const ExperimentConfig& raw, bool write) {
  const ExperimentConfig config = raw.WithSeedApplied();
  Prepared p = Prepare(config);
  ExperimentSummary summary;
  const bool tag_strategy = config.strategies.size() > 1;
  for (SegmenterKind seg : config.segmenters) {
    for (Strategy st : config.strategies) {
      CellOutcome cell{seg, st, ToString(seg), {}, {}};
      if (tag_strategy) cell.label += "+" + ToString(st);
      cell.metrics = RunCell(p, MakeSimulationConfig(config, seg, st), config.threads,
                             &cell.results);
      summary.report.rows.push_back(MakeReportRow(cell.label, seg, cell.metrics));
      summary.latency.push_back(MakeLatencyRow(cell));
      summary.cells.push_back(std::move(cell));
    }
  }
  if (!write) return summary;
  const std::string& dir = config.output_dir;
  WriteFile(dir, "report.csv", [&](std::ostream& o) { summary.report.WriteCsv(o); });
  WriteFile(dir, "report.json", [&](std::ostream& o) { summary.report.WriteJson(o); });
  WriteFile(dir, "latency.csv", [&](std::ostream& o) { WriteLatencyCsv(o, summary.latency); });
  for (const auto& cell : summary.cells) {
    const std::string tag = FileSafe(cell.label);
    WriteFile(dir, "hist_segment_length_" + tag + ".csv", [&](std::ostream& o) {
      WriteHistogramCsv(o, cell.metrics.segment_lengths_ms, config.length_bin_ms);
    });
    if (cell.segmenter == SegmenterKind::kFixed) continue;
    WriteFile(dir, "hist_eos_latency_" + tag + ".csv", [&](std::ostream& o) {
      WriteHistogramCsv(o, ToDoubles(cell.metrics.eos_all.latencies_ms), config.latency_bin_ms);
    });
  }
  WriteFile(dir, "config.json", [&](std::ostream& o) { o << ToJson(config).dump(2) << '\n'; });
  return summary;
}

const char* SweepCsvHeader() { return "eos_threshold,silence_length_threshold,wer_2nd,sl50"; }

void WriteSweepCsv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << SweepCsvHeader() << '\n';
  for (const auto& r : rows) {
    out << FormatFixed(r.eos_threshold, 3) << ',' << r.silence_length_threshold_ms << ','
        << FormatFixed(r.wer_2nd, 2) << ',' << FormatFixed(r.sl50_s, 2) << '\n';
  }
}

std::vector<SweepRow> RunSweep(const ExperimentConfig& raw, bool write) {
  const ExperimentConfig config = raw.WithSeedApplied();
  Prepared p = Prepare(config);
  std::vector<SweepRow> rows;
  for (int sil : config.sweep_silence_thresholds_ms) {
    for (double thr : config.sweep_eos_thresholds) {
      SimulationConfig sim =
          MakeSimulationConfig(config, SegmenterKind::kE2e, config.pipeline.strategy);
      sim.t_sil_ms = sil;
      sim.t_sil_hes_ms = 2 * sil;
      sim.first_pass.eos_threshold = thr;
      CorpusMetrics m = RunCell(p, sim, config.threads, nullptr);
      rows.push_back({thr, sil, Percent(m.wer_2nd), Sl50Seconds(m)});
    }
  }
  if (write) {
    WriteFile(config.output_dir, "sweep.csv", [&](std::ostream& o) { WriteSweepCsv(o, rows); });
  }
  return rows;
}

const char* OracleCsvHeader() {
  return "segmenter,sl50,wer_standard,ower_standard,wer_merged,ower_merged";
}

void WriteOracleCsv(std::ostream& out, const std::vector<OracleRow>& rows) {
  out << OracleCsvHeader() << '\n';
  for (const auto& r : rows) {
    out << r.segmenter << ',' << FormatFixed(r.sl50_s, 2) << ','
        << FormatFixed(Percent(r.wer_standard), 2) << ','
        << FormatFixed(Percent(r.ower_standard), 2) << ','
        << FormatFixed(Percent(r.wer_merged), 2) << ','
        << FormatFixed(Percent(r.ower_merged), 2) << '\n';
  }
}

OracleStudy RunOracleStudy(const ExperimentConfig& raw, bool write) {
  const ExperimentConfig config = raw.WithSeedApplied();
  Prepared p = Prepare(config);
  const Strategy strategy = config.pipeline.strategy;
  OracleStudy study;

  auto run_pair = [&](SimulationConfig sim, const std::string& name) {
    OracleRow row;
    row.segmenter = name;
    sim.second_pass.path_merge = PathMerge::kNone;
    CorpusMetrics standard = RunCell(p, sim, config.threads, nullptr);
    sim.second_pass.path_merge = PathMerge::kBigram;
    CorpusMetrics merged = RunCell(p, sim, config.threads, nullptr);
    row.sl50_s = Sl50Seconds(standard);
    row.wer_standard = standard.wer_2nd;
    row.ower_standard = standard.ower;
    row.wer_merged = merged.wer_2nd;
    row.ower_merged = merged.ower;
    return row;
  };

  study.rows.push_back(
      run_pair(MakeSimulationConfig(config, SegmenterKind::kVad, strategy), "vad"));
  study.vad_sl50_s = study.rows.back().sl50_s;

  // SL50 only depends on the 1st pass, so the search skips cascaded decoding.
  // Larger thresholds fire more often, so SL50 is non-increasing in it.
  SimulationConfig e2e = MakeSimulationConfig(config, SegmenterKind::kE2e, strategy);
  auto sl50_at = [&](double thr) {
    SimulationConfig s = e2e;
    s.first_pass.eos_threshold = thr;
    s.first_pass_only = true;
    return Sl50Seconds(RunCell(p, s, config.threads, nullptr));
  };
  const double target = study.vad_sl50_s;
  auto rel_err = [&](double sl) { return std::fabs(sl - target) / std::max(target, 1e-9); };
  double lo = 0.0;
  double hi = config.acoustic.eos_cost_cap + 6.0 * config.acoustic.eos_noise + 1.0;
  double best_thr = config.first_pass.eos_threshold;
  double best_sl = sl50_at(best_thr);
  for (int it = 0; it < config.oracle_search_iterations &&
                   rel_err(best_sl) > config.oracle_sl_tolerance;
       ++it) {
    const double mid = 0.5 * (lo + hi);
    const double sl = sl50_at(mid);
    if (rel_err(sl) < rel_err(best_sl)) {
      best_sl = sl;
      best_thr = mid;
    }
    if (sl > target) lo = mid;
    else hi = mid;
  }
  study.e2e_eos_threshold = best_thr;
  study.sl50_matched = rel_err(best_sl) <= config.oracle_sl_tolerance;
  e2e.first_pass.eos_threshold = best_thr;
  study.rows.push_back(run_pair(e2e, "e2e"));
  study.e2e_sl50_s = study.rows.back().sl50_s;

  if (write) {
    WriteFile(config.output_dir, "oracle.csv",
              [&](std::ostream& o) { WriteOracleCsv(o, study.rows); });
    WriteFile(config.output_dir, "oracle_meta.json", [&](std::ostream& o) {
      nlohmann::ordered_json j;
      j["e2e_eos_threshold"] = study.e2e_eos_threshold;
      j["vad_sl50_s"] = study.vad_sl50_s;
      j["e2e_sl50_s"] = study.e2e_sl50_s;
      j["sl50_matched"] = study.sl50_matched;
      j["tolerance"] = config.oracle_sl_tolerance;
      o << j.dump(2) << '\n';
    });
  }
  return study;
}

std::vector<std::string> TranscriptWithEos(const UtteranceResult& result,
                                           const TokenInventory& tokens, bool second_pass) {
  std::vector<std::string> out;
  for (const auto& s : result.segments) {
    for (int t : second_pass ? s.transcript_2nd : s.transcript_1st) out.push_back(tokens.Text(t));
    if (!s.terminal && (out.empty() || out.back() != kEosMarker)) out.push_back(kEosMarker);
  }
  return out;
}

void RunReportCommand(const ExperimentConfig& raw) {
  const ExperimentConfig config = raw.WithSeedApplied();
  Prepared p = Prepare(config);
  const std::string& dir = config.output_dir;
  WriteFile(dir, "corpus.jsonl", [&](std::ostream& o) { WriteCorpus(o, p.corpus); });

  const size_t shown = std::min<size_t>(p.corpus.size(), 5);
  std::vector<std::vector<std::pair<std::string, std::vector<std::string>>>> runs(shown);
  for (SegmenterKind seg : config.segmenters) {
    SimulationConfig sim = MakeSimulationConfig(config, seg, config.pipeline.strategy);
    sim.record_events = true;
    TwoPassPipeline pipeline(*p.acoustics, sim);
    for (size_t u = 0; u < shown; ++u) {
      UtteranceResult r = pipeline.Run(p.corpus[u]);
      runs[u].emplace_back(ToString(seg), TranscriptWithEos(r, p.acoustics->tokens(), true));
      if (u != 0) continue;
      const std::string tag = ToString(seg) + "_" + r.id;
      WriteFile(dir, "events_" + tag + ".jsonl",
                [&](std::ostream& o) { WriteEventLog(o, r.events); });
      WriteFile(dir, "lattices_" + tag + ".txt", [&](std::ostream& o) {
        for (const auto& s : r.segments) s.lattice_2nd.Write(o);
      });
    }
  }
  WriteFile(dir, "diff.txt", [&](std::ostream& o) {
    for (size_t u = 0; u < shown; ++u) {
      o << "# " << p.corpus[u].id << '\n';
      o << DiffReport(AnnotateEos(p.corpus[u], config.t_sil_ms, config.t_sil_hes_ms).tokens,
                      runs[u])
        << '\n';
    }
  });
}

}  // namespace eosseg
