// SPDX-License-Identifier: Apache-2.0
#include "quantlearn/records.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include "quantlearn/datagen.hpp"

namespace quantlearn {
namespace {

template <typename T>
T parse_number(std::string_view field, std::size_t line_no, const char* what) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError(std::string("bad ") + what + " '" + std::string(field) + "'", line_no);
  }
  return value;
}

}  // namespace

std::string_view name_of(Split s) noexcept { return s == Split::Train ? "train" : "test"; }

bool record_order(const AccuracyRecord& a, const AccuracyRecord& b) noexcept {
  return std::tuple(a.condition, a.run, a.trial, a.step, index_of(a.quantifier), a.split) <
         std::tuple(b.condition, b.run, b.trial, b.step, index_of(b.quantifier), b.split);
}

void sort_records(std::vector<AccuracyRecord>& records) {
  std::stable_sort(records.begin(), records.end(), record_order);
}

std::string format_record(const AccuracyRecord& r) {
  char acc[32];
  std::snprintf(acc, sizeof acc, "%.6f", r.accuracy);
  std::string out;
  out += r.condition;
  out += ',' + std::to_string(r.run) + ',' + std::to_string(r.trial) + ',' + std::to_string(r.step) + ',';
  out += name_of(r.quantifier);
  out += ',';
  out += name_of(r.split);
  out += ',';
  out += acc;
  return out;
}

void write_records(const std::filesystem::path& path, const std::vector<AccuracyRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << kRecordsHeader << '\n';
  for (const auto& r : records) out << format_record(r) << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

std::vector<AccuracyRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kRecordsHeader) {
    throw DataError("records file must start with header '" + std::string(kRecordsHeader) + "'", 1);
  }
  std::vector<AccuracyRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
      fields.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    fields.push_back(rest);
    if (fields.size() != 7) throw DataError("expected 7 fields", line_no);
    AccuracyRecord r;
    if (fields[0].size() != 1) throw DataError("bad condition '" + std::string(fields[0]) + "'", line_no);
    r.condition = fields[0][0];
    r.run = parse_number<int>(fields[1], line_no, "run");
    r.trial = parse_number<int>(fields[2], line_no, "trial");
    r.step = parse_number<int>(fields[3], line_no, "step");
    const auto q = parse_quantifier(fields[4]);
    if (!q) throw DataError("unknown quantifier '" + std::string(fields[4]) + "'", line_no);
    r.quantifier = *q;
    if (fields[5] == "train") {
      r.split = Split::Train;
    } else if (fields[5] == "test") {
      r.split = Split::Test;
    } else {
      throw DataError("bad split '" + std::string(fields[5]) + "'", line_no);
    }
    r.accuracy = parse_number<double>(fields[6], line_no, "accuracy");
    if (!(r.accuracy >= 0.0 && r.accuracy <= 1.0)) throw DataError("accuracy outside [0, 1]", line_no);
    out.push_back(r);
  }
  return out;
}

}  // namespace quantlearn
