// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "quantlearn/rng.hpp"
#include "quantlearn/stats.hpp"

using namespace quantlearn;

namespace {

std::vector<AccuracyRecord> pair_records(int trials, int steps, double shift, double noise, std::uint64_t seed,
                                         char cond = 'a') {
  Rng rng(seed);
  std::vector<AccuracyRecord> out;
  for (int trial = 0; trial < trials; ++trial) {
    for (int s = 0; s < steps; ++s) {
      const int step = 1 + 50 * s;
      const double base = 0.5 + 0.3 * rng.uniform01();
      out.push_back({cond, 0, trial, step, Quantifier::OnlyAB, Split::Test, base});
      out.push_back({cond, 0, trial, step, Quantifier::AllAB, Split::Test,
                     base + shift + noise * rng.uniform(-1.0, 1.0)});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("incomplete beta against closed forms") {
  CHECK(incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(incomplete_beta(2.0, 1.0, 0.3) == doctest::Approx(0.09).epsilon(1e-14));
  CHECK(incomplete_beta(1.0, 3.0, 0.2) == doctest::Approx(1.0 - std::pow(0.8, 3)).epsilon(1e-14));
  CHECK(incomplete_beta(0.5, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(incomplete_beta(2.5, 4.0, 0.0) == 0.0);
  CHECK(incomplete_beta(2.5, 4.0, 1.0) == 1.0);
  for (double x : {0.1, 0.37, 0.8}) {
    CHECK(incomplete_beta(3.0, 2.0, x) == doctest::Approx(1.0 - incomplete_beta(2.0, 3.0, 1.0 - x)).epsilon(1e-13));
  }
}

TEST_CASE("t_cdf special values") {
  for (double df : {1.0, 2.0, 7.0, 100.0}) CHECK(t_cdf(0.0, df) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t_cdf(1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(t_cdf(-1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-14));
  // df = 2 has a closed form as well.
  for (double t : {-3.0, 0.4, 2.5}) {
    CHECK(t_cdf(t, 2.0) == doctest::Approx(0.5 + t / (2.0 * std::sqrt(2.0 + t * t))).epsilon(1e-14));
  }
  // 0.993382 to six places; the commonly quoted 0.9934 is this rounded to four.
  CHECK(std::round(t_cdf(4.2426, 4.0) * 1e4) / 1e4 == doctest::Approx(0.9934).epsilon(1e-12));
  CHECK(t_cdf(4.2426, 4.0) == doctest::Approx(oracle::t_cdf(4.2426, 4.0)).epsilon(1e-13));
}

TEST_CASE("t_cdf matches the quadrature oracle") {
  for (double df : {1.0, 2.0, 3.0, 4.0, 9.0, 29.0, 60.0, 250.0}) {
    for (double t : {-12.0, -4.2426, -2.0, -0.5, 0.0, 0.1, 0.5, 1.0, 2.0, 4.2426, 10.0, 30.0}) {
      INFO("df=" << df << " t=" << t);
      CHECK(std::fabs(t_cdf(t, df) - oracle::t_cdf(t, df)) < 1e-12);
    }
  }
}

TEST_CASE("t_cdf is symmetric and monotone") {
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    const double df = 1 + std::floor(rng.uniform(0.0, 80.0));
    const double t = rng.uniform(-15.0, 15.0);
    CHECK(t_cdf(t, df) + t_cdf(-t, df) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(t_cdf(t + 0.01, df) >= t_cdf(t, df));
    CHECK(t_cdf(t, df) >= 0.0);
    CHECK(t_cdf(t, df) <= 1.0);
  }
}

TEST_CASE("paired t-test examples") {
  const std::vector<double> xs{1, 2, 3, 4, 5}, zero(5, 0.0);
  const auto r = paired_t_test(xs, zero);
  CHECK(r.df == 4);
  CHECK(r.t == doctest::Approx(3.0 / (std::sqrt(2.5) / std::sqrt(5.0))).epsilon(1e-14));
  CHECK(r.t == doctest::Approx(4.2426).epsilon(1e-4));
  CHECK(r.p == doctest::Approx(oracle::two_sided_p(r.t, 4)).epsilon(1e-12));
  CHECK(r.p == doctest::Approx(0.0132).epsilon(5e-3));

  const std::vector<double> a{0.3, 0.7}, b{0.5, 0.5};
  const auto zero_mean = paired_t_test(a, b);
  CHECK(zero_mean.t == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(zero_mean.p == doctest::Approx(1.0));

  CHECK_THROWS_AS(paired_t_test(xs, xs), DegenerateSampleError);
  CHECK_THROWS_AS(paired_t_test(std::vector<double>{1.0}, std::vector<double>{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(paired_t_test(xs, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST_CASE("paired t-test invariances") {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + rng.below(30);
    std::vector<double> x(n), y(n), x_shift(n), y_shift(n);
    const double c = rng.uniform(-5, 5);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = rng.uniform01();
      y[k] = rng.uniform01();
      x_shift[k] = x[k] + c;
      y_shift[k] = y[k] + c;
    }
    const auto xy = paired_t_test(x, y);
    const auto yx = paired_t_test(y, x);
    CHECK(xy.t == doctest::Approx(-yx.t).epsilon(1e-12));
    CHECK(xy.p == doctest::Approx(yx.p).epsilon(1e-12));
    const auto shifted = paired_t_test(x_shift, y_shift);
    CHECK(shifted.t == doctest::Approx(xy.t).epsilon(1e-8));
    CHECK(xy.p >= 0.0);
    CHECK(xy.p <= 1.0);
    CHECK(xy.df == static_cast<int>(n) - 1);
  }
}

TEST_CASE("bonferroni and hypothesis counts") {
  CHECK(hypothesis_count(5, 61) == 305);
  CHECK(hypothesis_count(3, 61) == 183);
  CHECK(hypothesis_count(1, 1) == 1);
  const auto p305 = bonferroni(0.05, 305);
  CHECK(p305.alpha == doctest::Approx(0.000163934426).epsilon(1e-9));
  CHECK(std::round(p305.alpha * 1e6) == 164);
  const auto p183 = bonferroni(0.05, 183);
  CHECK(p183.alpha == doctest::Approx(0.000273224044).epsilon(1e-9));
  CHECK(std::round(p183.alpha * 1e6) == 273);
  CHECK(bonferroni(0.05, 1).alpha == 0.05);
  CHECK_THROWS_AS(bonferroni(0.05, 0), std::invalid_argument);
  CHECK_THROWS_AS(hypothesis_count(0, 61), std::invalid_argument);
}

TEST_CASE("compare_pair on identical accuracies is degenerate everywhere") {
  auto recs = pair_records(10, 5, 0.0, 0.0, 1);
  const auto rows = compare_pair(recs, Quantifier::AllAB, Quantifier::OnlyAB, bonferroni(0.05, 5));
  REQUIRE(rows.size() == 5);
  for (const auto& r : rows) {
    CHECK(r.degenerate());
    CHECK_FALSE(r.significant);
    CHECK(r.n == 10);
  }
}

TEST_CASE("compare_pair detects a large consistent gap") {
  const auto recs = pair_records(30, 61, 0.2, 0.01, 2);
  const auto plan = bonferroni(0.05, 305);
  const auto rows = compare_pair(recs, Quantifier::AllAB, Quantifier::OnlyAB, plan);
  REQUIRE(rows.size() == 61);
  for (const auto& r : rows) {
    REQUIRE(r.test);
    CHECK(r.significant);
    CHECK(r.test->df == 29);
    CHECK(r.test->p < 0.000164);
    CHECK(r.test->p == doctest::Approx(oracle::two_sided_p(r.test->t, 29)).epsilon(1e-6));
  }
}

TEST_CASE("compare_pair pairs trials across conditions and rejects thin data") {
  auto recs = pair_records(3, 2, 0.05, 0.02, 3, 'a');
  const auto more = pair_records(4, 2, 0.05, 0.02, 4, 'e');
  recs.insert(recs.end(), more.begin(), more.end());
  const auto rows = compare_pair(recs, Quantifier::AllAB, Quantifier::OnlyAB, bonferroni(0.05, 4));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].n == 7);

  const auto single = pair_records(1, 2, 0.05, 0.02, 5);
  CHECK_THROWS_AS(compare_pair(single, Quantifier::AllAB, Quantifier::OnlyAB, bonferroni(0.05, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(compare_pair(recs, Quantifier::MostAB, Quantifier::OnlyAB, bonferroni(0.05, 2)),
                  std::invalid_argument);
  // Train-split records are ignored when testing the test split.
  auto train_only = pair_records(5, 2, 0.05, 0.02, 6);
  for (auto& r : train_only) r.split = Split::Train;
  CHECK_THROWS_AS(compare_pair(train_only, Quantifier::AllAB, Quantifier::OnlyAB, bonferroni(0.05, 2)),
                  std::invalid_argument);
  CHECK(compare_pair(train_only, Quantifier::AllAB, Quantifier::OnlyAB, bonferroni(0.05, 2), Split::Train).size() ==
        2);
}

TEST_CASE("significance CSV layout") {
  const auto dir = testutil::scratch_dir("stats");
  auto recs = pair_records(6, 2, 0.0, 0.0, 7);
  recs.back().accuracy += 0.01;  // last step is no longer degenerate
  const auto plan = bonferroni(0.05, 2);
  const auto rows = compare_pair(recs, Quantifier::AllAB, Quantifier::OnlyAB, plan);
  write_significance(dir / "sig.csv", rows, plan);
  const std::string text = testutil::slurp(dir / "sig.csv");
  CHECK(text.rfind(std::string(kSignificanceHeader) + "\n", 0) == 0);
  CHECK(text.find("\n1,nan,5,nan,2.500000000e-02,0,1\n") != std::string::npos);
  CHECK(text.find("\n51,") != std::string::npos);
}
