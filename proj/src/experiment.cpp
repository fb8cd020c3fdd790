// SPDX-License-Identifier: Apache-2.0
#include "quantlearn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "quantlearn/classifier.hpp"

namespace quantlearn {
namespace {

using Q = Quantifier;

// d and e are the argument-swapped images of b and a; c is its own image.
constexpr std::array<Condition, 5> kConditions{{
    {'a', {Q::NotAllAB, Q::MostAB, Q::MostANonB, Q::ExactlyHalfAB}},
    {'b', {Q::NotAllAB, Q::MostAB, Q::MostANonB, Q::ExactlyHalfBA}},
    {'c', {Q::NotAllAB, Q::MostAB, Q::NotOnlyAB, Q::MostBA}},
    {'d', {Q::NotOnlyAB, Q::MostBA, Q::MostBNonA, Q::ExactlyHalfAB}},
    {'e', {Q::NotOnlyAB, Q::MostBA, Q::MostBNonA, Q::ExactlyHalfBA}},
}};

}  // namespace

int Condition::conservative_count() const noexcept {
  return static_cast<int>(
      std::count_if(training.begin(), training.end(), [](Q q) { return spec_of(q).conservative; }));
}

std::array<Quantifier, 6> Condition::quantifiers() const noexcept {
  return {training[0], training[1], training[2], training[3], testing[0], testing[1]};
}

const Condition& condition_spec(char id) {
  for (const auto& c : kConditions) {
    if (c.id == id) return c;
  }
  throw std::invalid_argument(std::string("unknown condition '") + id + "' (expected one of a..e)");
}

DatasetSpec dataset_spec(const Condition& c, const DataSizes& sizes, std::uint64_t seed) {
  DatasetSpec spec;
  spec.seed = seed;
  spec.balance = sizes.balance;
  for (Q q : c.training) {
    spec.train[index_of(q)] = sizes.training_items;
    spec.test[index_of(q)] = sizes.test_items;
  }
  for (Q q : Condition::testing) {
    spec.train[index_of(q)] = sizes.testing_items;
    spec.test[index_of(q)] = sizes.test_items;
  }
  return spec;
}

std::uint64_t trial_seed(std::uint64_t base_seed, char condition, int run, int trial) noexcept {
  std::uint64_t h = mix64(base_seed);
  h = mix64(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(condition)));
  h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(run)) << 32 |
                 static_cast<std::uint32_t>(trial)));
  return h;
}

TrialSeeds trial_seeds(const TrialPlan& plan) noexcept {
  const auto s = trial_seed(plan.base_seed, plan.condition, plan.run, plan.trial);
  return {derive_seed(s, 1), derive_seed(s, 2), derive_seed(s, 3)};
}

std::vector<int> evaluation_steps(const TrainConfig& cfg) {
  std::vector<int> steps;
  for (int s = 1; s <= cfg.total_steps; s += cfg.eval_every) steps.push_back(s);
  return steps;
}

std::vector<AccuracyRecord> run_trial(const TrialPlan& plan) {
  plan.train.validate();
  const Condition& cond = condition_spec(plan.condition);
  const TrialSeeds seeds = trial_seeds(plan);
  const Dataset data = generate_dataset(dataset_spec(cond, plan.data, seeds.data));

  NetConfig net = plan.net;
  net.seed = seeds.init;
  auto params = init_params<double>(net);
  Rng rng(seeds.shuffle);

  std::vector<AccuracyRecord> records;
  const auto quantifiers = cond.quantifiers();
  auto record = [&](int step, Split split, std::span<const Example> examples,
                    const ModelParams<double>& p) {
    const auto acc = evaluate_accuracy(p, examples);
    for (Q q : quantifiers) {
      const auto it = acc.find(q);
      if (it == acc.end()) continue;
      records.push_back({plan.condition, plan.run, plan.trial, step, q, split, it->second});
    }
  };
  train(params, data.train, plan.train, rng, [&](int step, const ModelParams<double>& p) {
    if ((step - 1) % plan.train.eval_every != 0) return;
    record(step, Split::Test, data.test, p);
    if (plan.record_train) record(step, Split::Train, data.train, p);
  });
  sort_records(records);
  return records;
}

TrialError::TrialError(char c, int r, int t, const std::string& what)
    : std::runtime_error(std::string("condition ") + c + " run " + std::to_string(r) + " trial " +
                         std::to_string(t) + ": " + what),
      condition(c),
      run(r),
      trial(t) {}

std::vector<AccuracyRecord> run_plans(const std::vector<TrialPlan>& plans, unsigned jobs,
                                      const TrialDone& on_done, const TrialRunner& runner) {
  std::vector<std::vector<AccuracyRecord>> results(plans.size());
  std::vector<std::exception_ptr> errors(plans.size());
  std::atomic<std::size_t> next{0};
  std::mutex done_mutex;

  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < plans.size();) {
      try {
        results[i] = runner(plans[i]);
        if (on_done) {
          std::lock_guard lock(done_mutex);
          on_done(plans[i], results[i]);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n_workers = std::clamp<unsigned>(jobs, 1u, static_cast<unsigned>(std::max<std::size_t>(plans.size(), 1)));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < plans.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const TrialError&) {
      throw;
    } catch (const std::exception& e) {
      throw TrialError(plans[i].condition, plans[i].run, plans[i].trial, e.what());
    }
  }
  std::vector<AccuracyRecord> merged;
  for (auto& r : results) merged.insert(merged.end(), r.begin(), r.end());
  sort_records(merged);
  return merged;
}

std::vector<TrialPlan> experiment_plans(char condition, int runs, int trials, const TrialPlan& base) {
  condition_spec(condition);
  if (runs < 1 || trials < 1) throw std::invalid_argument("runs and trials must be >= 1");
  std::vector<TrialPlan> plans;
  for (int r = 0; r < runs; ++r) {
    for (int t = 0; t < trials; ++t) {
      TrialPlan p = base;
      p.condition = condition;
      p.run = r;
      p.trial = t;
      plans.push_back(p);
    }
  }
  return plans;
}

std::vector<AccuracyRecord> run_experiment(char condition, int runs, int trials, const TrialPlan& base,
                                           unsigned jobs, const TrialDone& on_done) {
  return run_plans(experiment_plans(condition, runs, trials, base), jobs, on_done);
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

MedianCurves median_curves(std::span<const AccuracyRecord> records, char condition, int run, Split split) {
  std::map<Q, std::map<int, std::vector<double>>> grouped;
  for (const auto& r : records) {
    if (r.condition != condition || r.run != run || r.split != split) continue;
    grouped[r.quantifier][r.step].push_back(r.accuracy);
  }
  MedianCurves out;
  for (auto& [q, steps] : grouped) {
    auto& curve = out[q];
    for (auto& [step, values] : steps) curve.emplace_back(step, median(std::move(values)));
  }
  return out;
}

}  // namespace quantlearn
