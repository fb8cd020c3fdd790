// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "quantlearn/records.hpp"

namespace quantlearn {

/// Regularized incomplete beta function I_x(a, b), a, b > 0, x in [0, 1].
double incomplete_beta(double a, double b, double x);

/// Distribution function of the central Student t with `df` degrees of freedom.
double t_cdf(double t, double df);

struct TTestResult {
  double t;
  int df;
  double p;  ///< two-tailed
};

/// All paired differences are identical, so the statistic is undefined.
class DegenerateSampleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

TTestResult paired_t_test(std::span<const double> xs, std::span<const double> ys);

struct CorrectionPlan {
  double alpha0;
  long m;
  double alpha;
};

CorrectionPlan bonferroni(double alpha0, long m);
long hypothesis_count(long conditions, long eval_steps);

struct StepComparison {
  int step;
  int n;
  std::optional<TTestResult> test;  ///< empty when degenerate
  bool significant;

  bool degenerate() const noexcept { return !test.has_value(); }
};

/// Pairs the accuracies of qa and qb by (condition, run, trial) at each step
/// of the given split and tests each step at plan.alpha.
std::vector<StepComparison> compare_pair(std::span<const AccuracyRecord> records, Quantifier qa,
                                         Quantifier qb, const CorrectionPlan& plan,
                                         Split split = Split::Test);

inline constexpr const char* kSignificanceHeader = "step,t,df,p,alpha,significant,degenerate";

void write_significance(const std::filesystem::path& path, std::span<const StepComparison> rows,
                        const CorrectionPlan& plan);

}  // namespace quantlearn
