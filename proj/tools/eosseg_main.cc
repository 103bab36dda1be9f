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

// eosseg: streaming two-pass segmentation simulator.
//
//   eosseg experiment --config configs/default.json --out out/
//   eosseg sweep --config configs/default.json --set corpus.num_utterances=50
//   eosseg oracle --seed 3
//   eosseg report --out out/report

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eosseg/common.h"
#include "eosseg/config.h"
#include "eosseg/experiment.h"

namespace {

struct Options {
  std::string config_path;
  std::string out_dir;
  int64_t seed = -1;
  std::vector<std::string> overrides;
};

eosseg::ExperimentConfig Resolve(const Options& opt) {
  eosseg::ExperimentConfig base = opt.config_path.empty()
                                      ? eosseg::ExperimentConfig::Default()
                                      : eosseg::LoadConfig(opt.config_path);
  nlohmann::json j = eosseg::ToJson(base);
  for (const auto& o : opt.overrides) eosseg::ApplyOverride(j, o);
  eosseg::ExperimentConfig config = eosseg::FromJson(j);
  if (!opt.out_dir.empty()) config.output_dir = opt.out_dir;
  if (opt.seed >= 0) config.seed = static_cast<uint64_t>(opt.seed);
  config.Validate();
  return config;
}

void AddCommon(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config_path, "JSON config (comments allowed)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--seed", opt.seed, "seed for corpus and acoustics")->check(CLI::NonNegativeNumber);
  cmd->add_option("--set", opt.overrides, "dotted.key=value override (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming two-pass ASR segmentation simulator"};
  app.require_subcommand(1);
  Options opt;
  CLI::App* experiment = app.add_subcommand("experiment", "segmenter x strategy grid");
  CLI::App* sweep = app.add_subcommand("sweep", "EOS threshold x silence threshold sweep");
  CLI::App* oracle = app.add_subcommand("oracle", "oracle WER with and without path merging");
  CLI::App* report = app.add_subcommand("report", "corpus dump, diffs, event log, lattices");
  for (CLI::App* cmd : {experiment, sweep, oracle, report}) AddCommon(cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const eosseg::ExperimentConfig config = Resolve(opt);
    if (experiment->parsed()) {
      eosseg::RunExperiment(config).report.WriteCsv(std::cout);
    } else if (sweep->parsed()) {
      eosseg::WriteSweepCsv(std::cout, eosseg::RunSweep(config));
    } else if (oracle->parsed()) {
      eosseg::OracleStudy study = eosseg::RunOracleStudy(config);
      eosseg::WriteOracleCsv(std::cout, study.rows);
      if (!study.sl50_matched) {
        std::cerr << "warning: E2E SL50 " << study.e2e_sl50_s << " s could not be matched to VAD SL50 "
                  << study.vad_sl50_s << " s; closest threshold " << study.e2e_eos_threshold << '\n';
      }
    } else if (report->parsed()) {
      eosseg::RunReportCommand(config);
    }
  } catch (const eosseg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
