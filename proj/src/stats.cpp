// SPDX-License-Identifier: Apache-2.0
#include "quantlearn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

#include "quantlearn/datagen.hpp"

namespace quantlearn {
namespace {

// Continued fraction for I_x(a, b) by the modified Lentz method.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10'000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete_beta: x outside [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The fraction converges quickly only left of the mean; use the reflection otherwise.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_cdf(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("t_cdf: df must be positive");
  if (std::isnan(t)) return t;
  if (t == 0.0) return 0.5;
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
  return t > 0 ? 1.0 - tail : tail;
}

TTestResult paired_t_test(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("paired_t_test: samples differ in length");
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("paired_t_test: need at least 2 pairs");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = xs[i] - ys[i];
  if (std::all_of(d.begin(), d.end(), [&](double v) { return v == d.front(); })) {
    throw DegenerateSampleError("paired_t_test: paired differences have zero variance");
  }
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  const int df = static_cast<int>(n - 1);
  const double p = std::min(1.0, 2.0 * t_cdf(-std::fabs(t), df));
  return {t, df, p};
}

CorrectionPlan bonferroni(double alpha0, long m) {
  if (m < 1) throw std::invalid_argument("bonferroni: m must be >= 1");
  if (!(alpha0 > 0.0 && alpha0 <= 1.0)) throw std::invalid_argument("bonferroni: alpha0 outside (0, 1]");
  return {alpha0, m, alpha0 / static_cast<double>(m)};
}

long hypothesis_count(long conditions, long eval_steps) {
  if (conditions < 1 || eval_steps < 1) throw std::invalid_argument("hypothesis_count: counts must be >= 1");
  return conditions * eval_steps;
}

std::vector<StepComparison> compare_pair(std::span<const AccuracyRecord> records, Quantifier qa,
                                         Quantifier qb, const CorrectionPlan& plan, Split split) {
  using Key = std::tuple<char, int, int>;
  // step -> trial key -> (qa accuracy, qb accuracy)
  std::map<int, std::map<Key, std::pair<std::optional<double>, std::optional<double>>>> by_step;
  for (const auto& r : records) {
    if (r.split != split || (r.quantifier != qa && r.quantifier != qb)) continue;
    auto& slot = by_step[r.step][Key{r.condition, r.run, r.trial}];
    (r.quantifier == qa ? slot.first : slot.second) = r.accuracy;
  }
  std::vector<StepComparison> out;
  for (const auto& [step, trials] : by_step) {
    std::vector<double> xs, ys;
    for (const auto& [key, pair] : trials) {
      if (pair.first && pair.second) {
        xs.push_back(*pair.first);
        ys.push_back(*pair.second);
      }
    }
    if (xs.empty()) continue;
    if (xs.size() < 2) {
      throw std::invalid_argument("compare_pair: step " + std::to_string(step) +
                                  " has a single matched trial; the paired test needs n >= 2");
    }
    StepComparison row{step, static_cast<int>(xs.size()), std::nullopt, false};
    try {
      row.test = paired_t_test(xs, ys);
      row.significant = row.test->p < plan.alpha;
    } catch (const DegenerateSampleError&) {
    }
    out.push_back(row);
  }
  if (out.empty()) {
    throw std::invalid_argument("compare_pair: no trials record both " + std::string(name_of(qa)) +
                                " and " + std::string(name_of(qb)));
  }
  return out;
}

void write_significance(const std::filesystem::path& path, std::span<const StepComparison> rows,
                        const CorrectionPlan& plan) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << kSignificanceHeader << '\n';
  char buf[160];
  for (const auto& r : rows) {
    if (r.test) {
      std::snprintf(buf, sizeof buf, "%d,%.10g,%d,%.9e,%.9e,%d,0\n", r.step, r.test->t, r.test->df,
                    r.test->p, plan.alpha, r.significant ? 1 : 0);
    } else {
      std::snprintf(buf, sizeof buf, "%d,nan,%d,nan,%.9e,0,1\n", r.step, r.n - 1, plan.alpha);
    }
    out << buf;
  }
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace quantlearn
