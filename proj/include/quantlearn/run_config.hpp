// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "quantlearn/experiment.hpp"

namespace quantlearn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fully resolved settings for gen / experiment. Every field has a flat dotted
/// key (net.hidden_width, train.total_steps, data.base_seed, experiment.runs,
/// out.dir, ...); see config_keys().
struct RunConfig {
  std::vector<char> conditions{'a', 'b', 'c', 'd', 'e'};
  int runs = 3;
  int trials = 30;
  std::uint64_t base_seed = 1;
  NetConfig net;
  TrainConfig train;
  DataSizes data;
  bool record_train = false;
  std::filesystem::path out_dir = "results";

  void validate() const;
  TrialPlan base_plan() const;
};

inline constexpr const char* kSeedEnvVar = "QUANTLEARN_SEED";

std::vector<std::string> config_keys();

/// "paper": 3 runs x 30 trials, full data. "desk": 1 run x 5 trials, item counts x0.1.
void apply_profile(RunConfig& cfg, std::string_view profile);

/// Reads a JSON object of dotted keys.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// "key=value"; the value is parsed as JSON when possible, otherwise taken as a string.
void apply_assignment(RunConfig& cfg, std::string_view assignment);

void apply_seed_env(RunConfig& cfg);

/// Canonical JSON echo: every key, fixed order, no timestamps.
std::string to_json_text(const RunConfig& cfg);

}  // namespace quantlearn
