// include/dmtl/cli/commands.h

// Copyright 2026  The dysarthria-mtl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DMTL_CLI_COMMANDS_H_
#define DMTL_CLI_COMMANDS_H_

#include <ostream>
#include <string>
#include <vector>

#include "dmtl/cli/config.h"
#include "dmtl/cli/synth.h"
#include "dmtl/common/error.h"

namespace dmtl {

// An input another command should have produced is not on disk.
class MissingArtifactError : public Error {
 public:
  MissingArtifactError(const std::string &path, const std::string &producer)
      : Error("missing upstream artifact " + path + " (run `dmtl " + producer + "` first)"),
        path_(path) {}
  const std::string &path() const { return path_; }

 private:
  std::string path_;
};

// Stage output directories below the output root. Each name carries a hash of
// the stage inputs and settings, so differing configurations never collide.
struct StageDirs {
  std::string split;
  std::string features;
  std::string baseline;
  std::string mtl;
};

StageDirs ResolveStageDirs(const ExperimentConfig &config);

// Each command returns the directory it wrote.
std::string CmdSynth(const SynthConfig &synth, const std::string &out_dir, std::ostream &log);
std::string CmdSplit(const ExperimentConfig &config, std::ostream &log);
std::string CmdExtractFeatures(const ExperimentConfig &config, std::ostream &log);
std::string CmdTrainBaseline(const ExperimentConfig &config, std::ostream &log);
std::string CmdTrainMtl(const ExperimentConfig &config, std::ostream &log);
std::string CmdEvaluate(const ExperimentConfig &config, std::ostream &log);
std::string CmdAnalyze(const ExperimentConfig &config, std::ostream &log);
// run_a / run_b: train-mtl output directories or curves files. An empty
// out_dir places the result under the output root.
std::string CmdCompare(const ExperimentConfig &config, const std::string &run_a,
                       const std::string &run_b, const std::string &out_dir, std::ostream &log);

}  // namespace dmtl

#endif  // DMTL_CLI_COMMANDS_H_
