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

// End-to-end acceptance checks on the seeded default corpus. Prints one
// PASS/FAIL line per criterion and exits non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "eosseg/experiment.h"
#include "oracles.h"
#include "test_util.h"

namespace eosseg {
namespace {

namespace fs = std::filesystem;
using testing_util::HelloWorld;
using testing_util::MakeSpec;

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Every finished run, kept for the permanence check.
struct RunLog {
  std::vector<std::string> problems;
  int runs = 0;

  // Finalized 2nd-pass text only ever grows, in segment order.
  void Check(const std::string& name, const UtteranceResult& r) {
    ++runs;
    std::vector<int> so_far;
    const std::vector<int> full = r.Transcript2nd();
    int last_time = 0;
    for (const auto& s : r.segments) {
      if (s.second_pass_finalized_ms < last_time) {
        problems.push_back(name + "/" + r.id + ": segment " + std::to_string(s.index) +
                           " finalized out of order");
      }
      last_time = s.second_pass_finalized_ms;
      so_far.insert(so_far.end(), s.transcript_2nd.begin(), s.transcript_2nd.end());
      if (so_far.size() > full.size() || !std::equal(so_far.begin(), so_far.end(), full.begin()))
        problems.push_back(name + "/" + r.id + ": finalized text retracted");
    }
    std::vector<int> logged;
    for (const auto& e : r.events) {
      if (e.kind != EventKind::kSegmentFinalized || e.payload["pass"] != 2) continue;
      auto t = e.payload["tokens"].get<std::vector<int>>();
      logged.insert(logged.end(), t.begin(), t.end());
      if (logged.size() > full.size() || !std::equal(logged.begin(), logged.end(), full.begin()))
        problems.push_back(name + "/" + r.id + ": logged finalization retracted");
    }
  }
  void Check(const std::string& name, const std::vector<UtteranceResult>& rs) {
    for (const auto& r : rs) Check(name, r);
  }
};

RunLog g_runs;

std::string Fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

AcousticConfig Noiseless() {
  AcousticConfig c;
  c.feature_noise = 0;
  c.causal_noise = 0;
  c.cascaded_noise = 0;
  c.eos_noise = 0;
  return c;
}

UtteranceResult RunCrafted(const SyntheticAcoustics& ac, const UtteranceSpec& spec,
                           Strategy strategy, SegmenterKind seg) {
  SimulationConfig c;
  c.acoustic = ac.config();
  c.pipeline.strategy = strategy;
  c.pipeline.segmenter = seg;
  c.record_events = true;
  UtteranceResult r = TwoPassPipeline(ac, c).Run(spec);
  g_runs.Check(ToString(seg) + "+" + ToString(strategy), r);
  return r;
}

std::string Join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& w : v) s += (s.empty() ? "" : " ") + w;
  return "\"" + s + "\"";
}

Verdict DeletionMechanism() {
  SyntheticAcoustics ac(Noiseless(), TokenInventory({"hello", "world"}));
  auto b1 = RunCrafted(ac, HelloWorld(), Strategy::kB1Immediate, SegmenterKind::kE2e);
  auto e2 = RunCrafted(ac, HelloWorld(), Strategy::kE2DummyLast, SegmenterKind::kE2e);
  auto b1_text = ac.tokens().Texts(b1.Transcript2nd());
  auto e2_text = ac.tokens().Texts(e2.Transcript2nd());
  const bool eos_at_end = !b1.segments.empty() && !b1.segments[0].terminal;
  return {eos_at_end && b1_text == std::vector<std::string>{"hello"} &&
              e2_text == std::vector<std::string>{"hello", "world"},
          "B1 " + Join(b1_text) + ", E2 " + Join(e2_text)};
}

Verdict LatencyBookkeeping() {
  SyntheticAcoustics ac(Noiseless(), TokenInventory({"hello", "world"}));
  // The stream continues, so B2 waits on real frames.
  auto spec = MakeSpec({{"hello", 100, 350, false},
                        {"world", 450, 1300, false},
                        {"hello", 2500, 3000, false}},
                       5000);
  struct Want {
    Strategy s;
    int alg, comp;  // comp < 0: only checked for being non-negative
  };
  bool ok = true;
  std::string detail;
  for (Want w : {Want{Strategy::kB1Immediate, 0, -1}, Want{Strategy::kB2Wait, 900, -1},
                 Want{Strategy::kE1DummyZero, 0, 208}, Want{Strategy::kE2DummyLast, 0, 208}}) {
    auto r = RunCrafted(ac, spec, w.s, SegmenterKind::kE2e);
    for (const auto& seg : r.segments) {
      if (seg.terminal) continue;
      ok = ok && seg.finalize_algorithmic_ms == w.alg &&
           (w.comp < 0 ? seg.finalize_computational_ms >= 0
                       : seg.finalize_computational_ms == w.comp);
      ok = ok && !seg.b2_fallback;
    }
    ok = ok && r.segments.size() >= 2;
    const auto& s0 = r.segments.front();
    detail += ToString(w.s) + " " + std::to_string(s0.finalize_algorithmic_ms) + "/" +
              std::to_string(s0.finalize_computational_ms) + " ";
  }
  return {ok, detail + "(algorithmic/computational ms)"};
}

ExperimentConfig DefaultCorpusConfig() {
  ExperimentConfig c;
  c.output_dir = (fs::temp_directory_path() / "eosseg_acceptance").string();
  return c;
}

std::vector<CellOutcome> g_cells;  // e2e B1/E1/E2 and vad E2 on the default corpus

const CellOutcome& Cell(SegmenterKind seg, Strategy st) {
  for (const auto& c : g_cells)
    if (c.segmenter == seg && c.strategy == st) return c;
  throw std::logic_error("cell not simulated");
}

Verdict DummyFrameOrdering() {
  ExperimentConfig c = DefaultCorpusConfig();
  c.segmenters = {SegmenterKind::kE2e};
  c.strategies = {Strategy::kB1Immediate, Strategy::kE1DummyZero, Strategy::kE2DummyLast};
  for (auto& cell : RunExperiment(c, false).cells) g_cells.push_back(std::move(cell));
  auto wer = [](Strategy s) { return 100.0 * Cell(SegmenterKind::kE2e, s).metrics.wer_2nd.wer(); };
  const double b1 = wer(Strategy::kB1Immediate), e1 = wer(Strategy::kE1DummyZero),
               e2 = wer(Strategy::kE2DummyLast);
  return {e2 < e1 && e2 < b1, "WER B1 " + Fmt("%.2f", b1) + "%, E1 " + Fmt("%.2f", e1) +
                                  "%, E2 " + Fmt("%.2f", e2) + "%"};
}

Verdict VadLatencyFloor() {
  ExperimentConfig c = DefaultCorpusConfig();
  c.segmenters = {SegmenterKind::kVad};
  c.strategies = {Strategy::kE2DummyLast};
  for (auto& cell : RunExperiment(c, false).cells) g_cells.push_back(std::move(cell));
  const auto& vad = Cell(SegmenterKind::kVad, Strategy::kE2DummyLast).metrics.eos_all;
  const auto& e2e = Cell(SegmenterKind::kE2e, Strategy::kE2DummyLast).metrics.eos_all;
  int vad_min = INT32_MAX, below = 0;
  for (int l : vad.latencies_ms) vad_min = std::min(vad_min, l);
  for (int l : e2e.latencies_ms) below += l < 200;
  return {!vad.latencies_ms.empty() && vad_min >= 200 && below >= 1,
          "VAD " + std::to_string(vad.latencies_ms.size()) + " EOS, min " +
              std::to_string(vad_min) + " ms; E2E " + std::to_string(below) + " of " +
              std::to_string(e2e.latencies_ms.size()) + " under 200 ms"};
}

Verdict MultiEosInSilence() {
  SyntheticAcoustics ac(AcousticConfig{}, TokenInventory({"you", "can"}));
  auto spec = MakeSpec({{"you", 0, 600, false}, {"can", 1100, 1700, false}}, 1800);
  auto count = [](const UtteranceResult& r) {
    int n = 0;
    for (const auto& e : r.events) n += e.kind == EventKind::kEosEmitted;
    return n;
  };
  const int vad = count(RunCrafted(ac, spec, Strategy::kE2DummyLast, SegmenterKind::kVad));
  const int e2e = count(RunCrafted(ac, spec, Strategy::kE2DummyLast, SegmenterKind::kE2e));
  return {vad >= 2 && e2e <= 1,
          "500 ms silence: VAD " + std::to_string(vad) + " EOS, E2E " + std::to_string(e2e)};
}

Verdict WerOracle() {
  std::vector<std::vector<int>> all{{}};
  for (size_t k = 0; k < all.size(); ++k) {
    if (all[k].size() == 8) continue;
    for (int c = 0; c < 3; ++c) {
      auto s = all[k];
      s.push_back(c);
      all.push_back(std::move(s));
    }
  }
  // The bit-parallel oracle is itself checked against explicit enumeration
  // of every alignment on the short strings.
  size_t short_count = 0;
  while (short_count < all.size() && all[short_count].size() <= 4) ++short_count;
  for (size_t i = 0; i < short_count; ++i)
    for (size_t j = 0; j < short_count; ++j)
      if (oracles::BitParallelDistance(all[i], all[j]) !=
          oracles::ExhaustiveDistance(all[i], all[j]))
        return {false, "bit-parallel oracle disagrees with enumeration"};
  long long pairs = 0, mismatches = 0;
  for (const auto& ref : all) {
    if (ref.empty()) continue;  // rate undefined
    for (const auto& hyp : all) {
      ++pairs;
      WerBreakdown w = Wer(ref, hyp);
      if (w.errors() != oracles::BitParallelDistance(ref, hyp) ||
          w.ref_words != static_cast<int64_t>(ref.size()))
        ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(pairs) + " pairs, " + std::to_string(mismatches) +
                               " mismatches"};
}

Verdict OracleWerEquivalence() {
  Rng rng(2024);
  int mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Lattice> segs;
    const int n = static_cast<int>(rng.UniformInt(1, 3));
    for (int s = 0; s < n; ++s) segs.push_back(oracles::RandomLattice(rng, 5, 3));
    std::vector<int> ref(rng.UniformInt(0, 6));
    for (auto& v : ref) v = static_cast<int>(rng.UniformInt(0, 2));
    if (OracleWer(segs, ref).errors() != oracles::BruteForceOracleErrors(segs, ref)) ++mismatches;
  }
  return {mismatches == 0, "500 cases, " + std::to_string(mismatches) + " mismatches"};
}

Verdict PathMergingDirection() {
  OracleStudy s = RunOracleStudy(DefaultCorpusConfig(), false);
  bool ok = s.sl50_matched;
  std::string detail = "SL50 VAD " + Fmt("%.2f", s.vad_sl50_s) + " s, E2E " +
                       Fmt("%.2f", s.e2e_sl50_s) + " s at threshold " +
                       Fmt("%.3f", s.e2e_eos_threshold) +
                       (s.sl50_matched ? " (matched)" : " (NOT matched)");
  for (const auto& r : s.rows) {
    ok = ok && r.ower_merged.errors() <= r.ower_standard.errors() &&
         r.ower_standard.errors() <= r.wer_standard.errors() &&
         r.ower_merged.errors() <= r.wer_merged.errors();
    detail += "; " + r.segmenter + " wer/ower standard " +
              Fmt("%.2f", 100 * r.wer_standard.wer()) + "/" +
              Fmt("%.2f", 100 * r.ower_standard.wer()) + ", merged " +
              Fmt("%.2f", 100 * r.wer_merged.wer()) + "/" + Fmt("%.2f", 100 * r.ower_merged.wer());
  }
  return {ok, detail};
}

Verdict AblationShape() {
  ExperimentConfig c = DefaultCorpusConfig();
  auto rows = RunSweep(c, false);
  bool ok = true;
  double prev_argmin = -1;
  std::string detail;
  for (int sil : c.sweep_silence_thresholds_ms) {
    double best = 1e300, arg = 0;
    detail += std::to_string(sil) + " ms:";
    for (const auto& r : rows) {
      if (r.silence_length_threshold_ms != sil) continue;
      detail += " " + Fmt("%.2f", r.wer_2nd);
      if (r.wer_2nd < best) {
        best = r.wer_2nd;
        arg = r.eos_threshold;
      }
    }
    detail += " (min at " + Fmt("%g", arg) + "); ";
    ok = ok && arg >= prev_argmin;
    prev_argmin = arg;
  }
  return {ok, detail + "WER % over thresholds " + [&] {
    std::string t;
    for (double x : c.sweep_eos_thresholds) t += (t.empty() ? "" : ",") + Fmt("%g", x);
    return t;
  }()};
}

std::string DirDigest(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    all += f.filename().string() + "\n" + s.str();
  }
  return all;
}

Verdict Permanence() {
  for (const auto& cell : g_cells) g_runs.Check(cell.label, cell.results);
  // Byte-identical reruns of every subcommand's outputs.
  ExperimentConfig c = DefaultCorpusConfig();
  c.corpus.num_utterances = 20;
  c.oracle_search_iterations = 6;
  c.sweep_eos_thresholds = {2.0, 6.0};
  c.sweep_silence_thresholds_ms = {600};
  // Same output directory both times: config.json records it.
  c.output_dir = (fs::temp_directory_path() / "eosseg_rerun").string();
  std::string digests[2];
  for (int k = 0; k < 2; ++k) {
    fs::remove_all(c.output_dir);
    ExperimentSummary s = RunExperiment(c, true);
    for (const auto& cell : s.cells) g_runs.Check(cell.label, cell.results);
    RunSweep(c, true);
    RunOracleStudy(c, true);
    RunReportCommand(c);
    digests[k] = DirDigest(c.output_dir);
  }
  const bool same = digests[0] == digests[1] && !digests[0].empty();
  return {same && g_runs.problems.empty(),
          std::to_string(g_runs.runs) + " utterance runs checked, " +
              std::to_string(g_runs.problems.size()) + " retractions" +
              (g_runs.problems.empty() ? "" : " (first: " + g_runs.problems[0] + ")") +
              "; reruns " + (same ? "byte-identical" : "DIFFER")};
}

}  // namespace
}  // namespace eosseg

int main() {
  using namespace eosseg;
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "deletion mechanism", DeletionMechanism},
      {2, "latency bookkeeping", LatencyBookkeeping},
      {3, "dummy-frame quality ordering", DummyFrameOrdering},
      {4, "VAD latency floor", VadLatencyFloor},
      {5, "multiple EOS in long silence", MultiEosInSilence},
      {6, "WER oracle equivalence", WerOracle},
      {7, "oracle WER equivalence", OracleWerEquivalence},
      {8, "path-merging direction", PathMergingDirection},
      {9, "ablation shape", AblationShape},
      {10, "finalization permanence", Permanence},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
