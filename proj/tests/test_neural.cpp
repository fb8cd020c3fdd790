// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gradcheck.hpp"
#include "quantlearn/classifier.hpp"
#include "quantlearn/datagen.hpp"
#include "quantlearn/experiment.hpp"
#include "quantlearn/neural.hpp"

using namespace quantlearn;

namespace {

bool same_params(const ModelParams<double>& a, const ModelParams<double>& b) {
  bool same = true;
  visit_tensors([&](std::string_view, const auto& x, const auto& y) { same = same && x == y; }, a, b);
  return same;
}

}  // namespace

TEST_CASE("initialisation") {
  NetConfig cfg;
  cfg.seed = 77;
  const auto a = init_params(cfg);
  const auto b = init_params(cfg);
  CHECK(same_params(a, b));
  cfg.seed = 78;
  CHECK_FALSE(same_params(a, init_params(cfg)));

  CHECK(a.proj_w.rows() == 8);
  CHECK(a.proj_w.cols() == 14);
  REQUIRE(a.layers.size() == 2);
  CHECK(a.layers[0].wi.cols() == 16);
  CHECK(a.layers[1].wi.cols() == 16);
  CHECK(a.head_w.rows() == 2);
  for (const auto& l : a.layers) {
    CHECK((l.bf.array() == 1.0).all());
    CHECK((l.bi.array() == 0.0).all());
    CHECK((l.bc.array() == 0.0).all());
    CHECK((l.bo.array() == 0.0).all());
  }
  visit_tensors(
      [](std::string_view name, const auto& t) {
        if (t.cols() == 1) return;
        const double limit = std::sqrt(6.0 / static_cast<double>(t.rows() + t.cols()));
        INFO(name);
        CHECK(t.cwiseAbs().maxCoeff() <= limit);
        CHECK(t.cwiseAbs().maxCoeff() > 0.5 * limit);
      },
      a);
  // 8*14+8 + 2 * 4*(8*16+8) + 2*8+2
  CHECK(a.parameter_count() == 120 + 2 * 544 + 18);
}

TEST_CASE("zero weights give a uniform output and zero hidden state") {
  const auto p = ModelParams<double>::zeros(NetConfig{});
  Rng rng(1);
  Scene s;
  for (auto& z : s) z = static_cast<Zone>(rng.below(5));
  const auto probs = forward(p, build_sequence(Quantifier::MostAB, s));
  CHECK(probs(0) == 0.5);
  CHECK(probs(1) == 0.5);

  const std::vector<Example> ex{{Quantifier::MostAB, s, true}};
  const auto tape = forward_batch(p, pack_examples(ex));
  CHECK(tape.layers.back().h.cwiseAbs().maxCoeff() == 0.0);
  const auto labels = labels_of(ex);
  CHECK(cross_entropy(tape, std::span<const int>(labels)) == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
}

TEST_CASE("output probabilities are normalised for any input") {
  Rng rng(2);
  const NetConfig cfg;
  for (int i = 0; i < 20; ++i) {
    const auto p = gradcheck::random_params(cfg, rng, 2.0);
    const auto batch = gradcheck::random_batch(14, 20, 3, rng);
    const auto tape = forward_batch(p, batch);
    CHECK(tape.probs.rows() == 2);
    CHECK(tape.probs.cols() == 3);
    for (Eigen::Index b = 0; b < 3; ++b) {
      CHECK(tape.probs.col(b).sum() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK((tape.probs.col(b).array() >= 0.0).all());
    }
  }
}

TEST_CASE("confident correct predictions have vanishing loss and gradient") {
  auto p = ModelParams<double>::zeros(NetConfig{});
  p.head_b << -40.0, 40.0;  // always predicts class 1
  Rng rng(3);
  const auto batch = gradcheck::random_batch(14, 5, 4, rng);
  const std::vector<int> labels{1, 1, 1, 1};
  const auto r = loss_and_gradients(p, batch, std::span<const int>(labels));
  CHECK(r.loss < 1e-30);
  visit_tensors([](std::string_view, const auto& g) { CHECK(g.cwiseAbs().maxCoeff() < 1e-30); }, r.grads);
}

TEST_CASE("analytic gradients match finite differences") {
  Rng rng(4);
  SUBCASE("hidden 3, two timesteps") {
    const NetConfig cfg{5, 3, 3, 2, 2, 0};
    const auto p = gradcheck::random_params(cfg, rng);
    const auto batch = gradcheck::random_batch(5, 2, 3, rng);
    const auto r = gradcheck::compare(p, batch, {0, 1, 1});
    INFO(r.worst_tensor);
    CHECK(r.worst < 1e-4);
    CHECK(r.components == p.parameter_count());
  }
  SUBCASE("default shape, full-length sequences") {
    const NetConfig cfg;
    const auto p = gradcheck::random_params(cfg, rng, 0.5);
    const auto batch = gradcheck::random_batch(14, 20, 2, rng);
    const auto r = gradcheck::compare(p, batch, {1, 0});
    INFO(r.worst_tensor);
    CHECK(r.worst < 1e-4);
  }
  SUBCASE("single layer") {
    const NetConfig cfg{4, 2, 4, 1, 2, 0};
    const auto p = gradcheck::random_params(cfg, rng);
    const auto batch = gradcheck::random_batch(4, 3, 1, rng);
    const auto r = gradcheck::compare(p, batch, {0});
    INFO(r.worst_tensor);
    CHECK(r.worst < 1e-4);
  }
}

TEST_CASE("forward and backward agree across scalar types") {
  Rng rng(5);
  const NetConfig cfg{6, 4, 3, 2, 2, 0};
  const auto p = gradcheck::random_params(cfg, rng);
  const auto batch = gradcheck::random_batch(6, 4, 2, rng);
  const std::vector<int> labels{0, 1};
  const auto d = loss_and_gradients(p, batch, std::span<const int>(labels));
  const SequenceBatch<long double> xl{batch.x.cast<long double>(), batch.steps, batch.batch};
  const auto l = loss_and_gradients(p.cast<long double>(), xl, std::span<const int>(labels));
  CHECK(d.loss == doctest::Approx(static_cast<double>(l.loss)).epsilon(1e-13));
  visit_tensors(
      [](std::string_view, const auto& a, const auto& b) {
        CHECK((a - b.template cast<double>()).cwiseAbs().maxCoeff() < 1e-13);
      },
      d.grads, l.grads);
}

TEST_CASE("adaptive-moment update") {
  Rng rng(6);
  const NetConfig cfg{4, 2, 2, 1, 2, 0};
  const auto p0 = gradcheck::random_params(cfg, rng);

  SUBCASE("zero gradient is a fixed point") {
    auto p = p0;
    auto state = AdamState<double>::like(p);
    const auto zero = ModelParams<double>::zeros(cfg);
    for (int i = 0; i < 5; ++i) optimizer_step(state, p, zero, TrainConfig{});
    CHECK(same_params(p, p0));
  }
  SUBCASE("first step moves each component by the learning rate against the gradient sign") {
    auto p = p0;
    auto state = AdamState<double>::like(p);
    const auto g = gradcheck::random_params(cfg, rng);
    TrainConfig tc;
    tc.epsilon = 0.0;
    optimizer_step(state, p, g, tc);
    visit_tensors(
        [&](std::string_view, const auto& after, const auto& before, const auto& grad) {
          for (Eigen::Index i = 0; i < after.size(); ++i) {
            const double expected = -tc.learning_rate * (grad.data()[i] > 0 ? 1.0 : -1.0);
            CHECK(after.data()[i] - before.data()[i] == doctest::Approx(expected).epsilon(1e-9));
          }
        },
        p, p0, g);
  }
  SUBCASE("mismatched gradient shapes are rejected") {
    auto p = p0;
    auto state = AdamState<double>::like(p);
    CHECK_THROWS_AS(optimizer_step(state, p, ModelParams<double>::zeros(NetConfig{}), TrainConfig{}),
                    std::invalid_argument);
  }
}

TEST_CASE("non-finite values are reported") {
  auto p = ModelParams<double>::zeros(NetConfig{});
  p.head_b(0) = std::numeric_limits<double>::quiet_NaN();
  Rng rng(7);
  CHECK_THROWS_AS(forward_batch(p, gradcheck::random_batch(14, 3, 2, rng)), NumericError);
}

TEST_CASE("predict and evaluate_accuracy") {
  const auto zero = ModelParams<double>::zeros(NetConfig{});
  const Dataset ds = generate_dataset(dataset_spec(condition_spec('a'), DataSizes{40, 40, 40, 0.5}, 2));
  for (bool b : predict(zero, ds.test)) CHECK_FALSE(b);
  const auto acc = evaluate_accuracy(zero, ds.test);
  CHECK(acc.size() == 6);
  for (const auto& [q, a] : acc) CHECK(a == 0.5);
  CHECK(evaluate_accuracy(zero, std::span<const Example>{}).empty());

  // A model that reads the true label: bias towards "true" and feed only true items.
  auto yes = zero;
  yes.head_b << 0.0, 1.0;
  std::vector<Example> truths;
  std::copy_if(ds.test.begin(), ds.test.end(), std::back_inserter(truths), [](const Example& e) { return e.label; });
  for (const auto& [q, a] : evaluate_accuracy(yes, truths)) CHECK(a == 1.0);
}

TEST_CASE("training is deterministic and can fit a small set") {
  const Dataset ds = generate_dataset(dataset_spec(condition_spec('a'), DataSizes{16, 16, 0, 0.5}, 12));
  REQUIRE(ds.train.size() == 96);
  NetConfig net;
  net.seed = 5;
  TrainConfig tc;
  tc.total_steps = 40;

  auto a = init_params(net);
  auto b = init_params(net);
  Rng ra(9), rb(9);
  std::vector<int> steps;
  train(a, ds.train, tc, ra, [&](int step, const ModelParams<double>&) { steps.push_back(step); });
  train(b, ds.train, tc, rb);
  CHECK(same_params(a, b));
  REQUIRE(steps.size() == 40);
  CHECK(steps.front() == 1);
  CHECK(steps.back() == 40);

  // 64 examples of one quantifier are memorised well before 2000 steps.
  std::vector<Example> few(ds.train.begin(), ds.train.begin() + 64);
  auto p = init_params(net);
  TrainConfig fit;
  fit.total_steps = 2000;
  fit.learning_rate = 1e-2;
  Rng rng(10);
  train(p, few, fit, rng);
  const auto acc = evaluate_accuracy(p, few);
  for (const auto& [q, v] : acc) {
    INFO(name_of(q));
    CHECK(v >= 0.95);
  }
}
