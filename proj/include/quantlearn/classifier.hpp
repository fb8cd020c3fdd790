// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "quantlearn/datagen.hpp"
#include "quantlearn/neural.hpp"
#include "quantlearn/rng.hpp"

namespace quantlearn {

/// Encodes examples as a batch of input sequences (one column per example).
SequenceBatch<double> pack_examples(std::span<const Example> examples);
std::vector<int> labels_of(std::span<const Example> examples);

/// Predicts true iff P(true) > P(false); an exact tie predicts false.
std::vector<bool> predict(const ModelParams<double>& params, std::span<const Example> examples);

/// Fraction of correct predictions per quantifier. Quantifiers with no
/// examples are absent from the map.
std::map<Quantifier, double> evaluate_accuracy(const ModelParams<double>& params,
                                               std::span<const Example> examples);

using StepCallback = std::function<void(int step, const ModelParams<double>& params)>;

/// Runs cfg.total_steps minibatch updates over `data`, drawing batches from a
/// shuffled order that is reshuffled at each epoch boundary. A partial batch at
/// the end of an epoch is dropped. `after_step` sees the 1-based step number.
void train(ModelParams<double>& params, std::span<const Example> data, const TrainConfig& cfg,
           Rng& rng, const StepCallback& after_step = {});

}  // namespace quantlearn
