// SPDX-License-Identifier: Apache-2.0
#include "quantlearn/classifier.hpp"

#include <numeric>

namespace quantlearn {
namespace {

constexpr std::size_t kEvalChunk = 512;

}  // namespace

SequenceBatch<double> pack_examples(std::span<const Example> examples) {
  const auto batch = static_cast<Eigen::Index>(examples.size());
  constexpr auto steps = static_cast<Eigen::Index>(kSceneSize);
  SequenceBatch<double> out{Matrix<double>::Zero(kInputWidth, steps * batch), steps, batch};
  for (Eigen::Index b = 0; b < batch; ++b) {
    const Example& ex = examples[static_cast<std::size_t>(b)];
    const auto q_row = static_cast<Eigen::Index>(index_of(ex.quantifier));
    for (Eigen::Index t = 0; t < steps; ++t) {
      const Zone z = ex.scene[static_cast<std::size_t>(t)];
      out.x(q_row, t * batch + b) = 1.0;
      if (z != Zone::Null) {
        out.x(static_cast<Eigen::Index>(kQuantifierCount) + static_cast<Eigen::Index>(z), t * batch + b) = 1.0;
      }
    }
  }
  return out;
}

std::vector<int> labels_of(std::span<const Example> examples) {
  std::vector<int> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(ex.label ? 1 : 0);
  return out;
}

std::vector<bool> predict(const ModelParams<double>& params, std::span<const Example> examples) {
  std::vector<bool> out;
  out.reserve(examples.size());
  for (std::size_t start = 0; start < examples.size(); start += kEvalChunk) {
    const auto chunk = examples.subspan(start, std::min(kEvalChunk, examples.size() - start));
    const auto tape = forward_batch(params, pack_examples(chunk));
    for (Eigen::Index b = 0; b < tape.probs.cols(); ++b) out.push_back(tape.probs(1, b) > tape.probs(0, b));
  }
  return out;
}

std::map<Quantifier, double> evaluate_accuracy(const ModelParams<double>& params,
                                               std::span<const Example> examples) {
  const auto predictions = predict(params, examples);
  std::map<Quantifier, std::pair<std::size_t, std::size_t>> tally;  // correct, total
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto& [correct, total] = tally[examples[i].quantifier];
    correct += predictions[i] == examples[i].label ? 1 : 0;
    ++total;
  }
  std::map<Quantifier, double> out;
  for (const auto& [q, ct] : tally) {
    out[q] = static_cast<double>(ct.first) / static_cast<double>(ct.second);
  }
  return out;
}

void train(ModelParams<double>& params, std::span<const Example> data, const TrainConfig& cfg,
           Rng& rng, const StepCallback& after_step) {
  cfg.validate();
  if (data.empty()) throw std::invalid_argument("train: empty training set");
  const std::size_t batch = std::min(static_cast<std::size_t>(cfg.batch_size), data.size());
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (cfg.shuffle_each_epoch) rng.shuffle(std::span(order));

  auto opt = AdamState<double>::like(params);
  std::vector<Example> picked(batch);
  std::size_t cursor = 0;
  for (int step = 1; step <= cfg.total_steps; ++step) {
    if (cursor + batch > order.size()) {
      cursor = 0;
      if (cfg.shuffle_each_epoch) rng.shuffle(std::span(order));
    }
    for (std::size_t b = 0; b < batch; ++b) picked[b] = data[order[cursor + b]];
    cursor += batch;
    const auto labels = labels_of(picked);
    const auto result = loss_and_gradients(params, pack_examples(picked), std::span<const int>(labels));
    optimizer_step(opt, params, result.grads, cfg);
    if (after_step) after_step(step, params);
  }
}

}  // namespace quantlearn
