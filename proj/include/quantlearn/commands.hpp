// SPDX-License-Identifier: Apache-2.0
//
// Subcommand bodies behind the quantlearn executable. Each returns a process
// exit code; configuration problems surface as ConfigError and data/runtime
// problems as other exceptions, mapped to codes by the caller.
#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include "quantlearn/quantcore.hpp"
#include "quantlearn/records.hpp"
#include "quantlearn/run_config.hpp"

namespace quantlearn {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitVerifyFailed = 2, kExitRuntime = 3 };

/// `corrupt` swaps the named quantifier's relation for its dual's (negative control).
int cmd_verify(int max_total, std::ostream& out, std::optional<Quantifier> corrupt = std::nullopt);

int cmd_gen(const RunConfig& cfg, std::ostream& log);

/// Completed (condition, run, trial) shards under <out>/shards are reused on rerun.
int cmd_experiment(const RunConfig& cfg, unsigned jobs, std::ostream& log);

struct AnalyzeOptions {
  std::filesystem::path records;
  Quantifier qa = Quantifier::AllAB;
  Quantifier qb = Quantifier::OnlyAB;
  std::optional<long> m;  ///< default: (#conditions holding both) x (#evaluation steps)
  double alpha0 = 0.05;
  Split split = Split::Test;
  std::filesystem::path out_dir = ".";
};

int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out);

struct PlotOptions {
  std::filesystem::path records;
  char condition = 'a';
  int run = 0;
  std::filesystem::path out_dir = ".";
};

int cmd_plot(const PlotOptions& opts, std::ostream& out);

}  // namespace quantlearn
