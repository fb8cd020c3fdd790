// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "quantlearn/quantcore.hpp"
#include "quantlearn/rng.hpp"

namespace quantlearn {

inline constexpr int kEntityWidth = 4;
inline constexpr int kInputWidth = static_cast<int>(kQuantifierCount) + kEntityWidth;

using EntityVector = Eigen::Matrix<double, kEntityWidth, 1>;
using QuantifierVector = Eigen::Matrix<double, static_cast<int>(kQuantifierCount), 1>;
/// One column per timestep; 14 rows: quantifier one-hot, then entity one-hot.
using InputSequence = Eigen::Matrix<double, kInputWidth, static_cast<int>(kSceneSize)>;

struct Example {
  Quantifier quantifier;
  Scene scene;
  bool label;

  friend bool operator==(const Example&, const Example&) = default;
};

struct DatasetSpec {
  std::array<std::size_t, kQuantifierCount> train{};
  std::array<std::size_t, kQuantifierCount> test{};
  std::uint64_t seed = 0;
  double balance = 0.5;

  std::size_t train_total() const noexcept;
  std::size_t test_total() const noexcept;
};

struct Dataset {
  std::vector<Example> train;
  std::vector<Example> test;
};

/// Raised for generation failures and malformed dataset files. `line()` is
/// 1-based, or 0 when the error is not tied to a line.
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

EntityVector encode_entity(Zone zone) noexcept;
QuantifierVector encode_quantifier(Quantifier q) noexcept;
InputSequence build_sequence(Quantifier q, const Scene& scene) noexcept;

/// Uniform over zone-count tuples (total 20, nulls included) that give
/// `target` under q, followed by a uniform permutation of the slots.
Scene sample_scene(Rng& rng, Quantifier q, bool target);

/// Number of true labels among n items at the given balance; ties round up.
std::size_t true_label_count(std::size_t n, double balance);

Dataset generate_dataset(const DatasetSpec& spec);

void write_dataset(const std::filesystem::path& path, const std::vector<Example>& examples);
std::vector<Example> read_dataset(const std::filesystem::path& path);

/// Single-record codec behind the dataset files.
std::string format_example(const Example& ex);
Example parse_example(const std::string& line, std::size_t line_no);

}  // namespace quantlearn
