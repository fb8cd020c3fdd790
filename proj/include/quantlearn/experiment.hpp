// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "quantlearn/datagen.hpp"
#include "quantlearn/neural.hpp"
#include "quantlearn/records.hpp"

namespace quantlearn {

/// One of the five training distributions. The testing pair is fixed.
struct Condition {
  char id;
  std::array<Quantifier, 4> training;
  static constexpr std::array<Quantifier, 2> testing{Quantifier::AllAB, Quantifier::OnlyAB};

  int conservative_count() const noexcept;
  /// Training quantifiers followed by the testing pair.
  std::array<Quantifier, 6> quantifiers() const noexcept;
};

inline constexpr std::string_view kConditionIds = "abcde";

/// Throws std::invalid_argument for ids outside a..e.
const Condition& condition_spec(char id);

/// Items per quantifier. Defaults are the full-scale sizes.
struct DataSizes {
  std::size_t training_items = 6000;  ///< train items per training quantifier
  std::size_t testing_items = 750;    ///< train items per testing quantifier
  std::size_t test_items = 750;       ///< test items per quantifier
  double balance = 0.5;
};

DatasetSpec dataset_spec(const Condition& c, const DataSizes& sizes, std::uint64_t seed);

struct TrialPlan {
  char condition = 'a';
  int run = 0;
  int trial = 0;
  std::uint64_t base_seed = 0;
  NetConfig net;  ///< net.seed is replaced by the trial's derived seed
  TrainConfig train;
  DataSizes data;
  bool record_train = false;
};

/// Stable hash of (base seed, condition, run, trial).
std::uint64_t trial_seed(std::uint64_t base_seed, char condition, int run, int trial) noexcept;

/// Seeds of the three random streams a trial consumes.
struct TrialSeeds {
  std::uint64_t data;
  std::uint64_t init;
  std::uint64_t shuffle;
};
TrialSeeds trial_seeds(const TrialPlan& plan) noexcept;

/// Global steps at which accuracy is recorded: 1, 1 + eval_every, ... <= total_steps.
std::vector<int> evaluation_steps(const TrainConfig& cfg);

std::vector<AccuracyRecord> run_trial(const TrialPlan& plan);

class TrialError : public std::runtime_error {
 public:
  TrialError(char condition, int run, int trial, const std::string& what);
  char condition;
  int run;
  int trial;
};

using TrialDone = std::function<void(const TrialPlan&, const std::vector<AccuracyRecord>&)>;
using TrialRunner = std::function<std::vector<AccuracyRecord>(const TrialPlan&)>;

/// Runs plans on up to `jobs` worker threads and returns the merged records in
/// record order. `on_done` is called serially as each trial finishes. The first
/// failing plan (in plan order) is rethrown as TrialError.
std::vector<AccuracyRecord> run_plans(const std::vector<TrialPlan>& plans, unsigned jobs,
                                      const TrialDone& on_done = {},
                                      const TrialRunner& runner = run_trial);

/// One plan per (run, trial), built from `base` with condition, run and trial filled in.
std::vector<TrialPlan> experiment_plans(char condition, int runs, int trials, const TrialPlan& base);

std::vector<AccuracyRecord> run_experiment(char condition, int runs, int trials, const TrialPlan& base,
                                           unsigned jobs = 1, const TrialDone& on_done = {});

double median(std::vector<double> values);

/// quantifier -> (step, median accuracy across trials), steps ascending.
using MedianCurves = std::map<Quantifier, std::vector<std::pair<int, double>>>;

MedianCurves median_curves(std::span<const AccuracyRecord> records, char condition, int run,
                           Split split = Split::Test);

}  // namespace quantlearn
