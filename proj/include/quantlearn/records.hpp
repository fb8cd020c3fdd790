// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "quantlearn/quantcore.hpp"

namespace quantlearn {

enum class Split : std::uint8_t { Train = 0, Test = 1 };

std::string_view name_of(Split s) noexcept;

/// Accuracy of one quantifier on one split at one evaluation step of one trial.
struct AccuracyRecord {
  char condition = 'a';
  int run = 0;
  int trial = 0;
  int step = 0;
  Quantifier quantifier = Quantifier::AllAB;
  Split split = Split::Test;
  double accuracy = 0.0;

  friend bool operator==(const AccuracyRecord&, const AccuracyRecord&) = default;
};

/// Orders by (condition, run, trial, step, quantifier table index, split).
bool record_order(const AccuracyRecord& a, const AccuracyRecord& b) noexcept;
void sort_records(std::vector<AccuracyRecord>& records);

inline constexpr std::string_view kRecordsHeader = "condition,run,trial,step,quantifier,split,accuracy";

/// CSV row without trailing newline; accuracy printed with 6 decimals.
std::string format_record(const AccuracyRecord& r);

void write_records(const std::filesystem::path& path, const std::vector<AccuracyRecord>& records);
std::vector<AccuracyRecord> read_records(const std::filesystem::path& path);

}  // namespace quantlearn
