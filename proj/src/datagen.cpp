// SPDX-License-Identifier: Apache-2.0
#include "quantlearn/datagen.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "json.hpp"

namespace quantlearn {
namespace {

constexpr std::size_t kRetryBudget = 10'000;

using SatisfyingTable = std::array<std::array<std::vector<ZoneCounts>, 2>, kQuantifierCount>;

const SatisfyingTable& satisfying_counts() {
  static const SatisfyingTable table = [] {
    SatisfyingTable t;
    for_each_counts(static_cast<int>(kSceneSize), [&](const ZoneCounts& c) {
      for (const auto& q : quantifier_table()) {
        t[index_of(q.id)][evaluate(q, c) ? 1 : 0].push_back(c);
      }
    });
    return t;
  }();
  return table;
}

std::vector<Example> sample_split(Rng& rng, Quantifier q, std::size_t n, double balance,
                                  const std::set<Scene>* exclude) {
  const std::size_t n_true = true_label_count(n, balance);
  std::vector<std::uint8_t> order(n, 0);
  std::fill_n(order.begin(), n_true, std::uint8_t{1});
  rng.shuffle(std::span(order));

  std::vector<Example> out;
  out.reserve(n);
  for (std::uint8_t label : order) {
    std::size_t rejections = 0;
    Scene scene = sample_scene(rng, q, label != 0);
    while (exclude && exclude->contains(scene)) {
      if (++rejections >= kRetryBudget) {
        throw DataError("could not draw a test scene for " + std::string(name_of(q)) +
                        " disjoint from the training split after " +
                        std::to_string(kRetryBudget) + " attempts");
      }
      scene = sample_scene(rng, q, label != 0);
    }
    out.push_back({q, scene, label != 0});
  }
  return out;
}

}  // namespace

DataError::DataError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

std::size_t DatasetSpec::train_total() const noexcept {
  return std::accumulate(train.begin(), train.end(), std::size_t{0});
}

std::size_t DatasetSpec::test_total() const noexcept {
  return std::accumulate(test.begin(), test.end(), std::size_t{0});
}

EntityVector encode_entity(Zone zone) noexcept {
  EntityVector v = EntityVector::Zero();
  if (zone != Zone::Null) v(static_cast<int>(zone)) = 1.0;
  return v;
}

QuantifierVector encode_quantifier(Quantifier q) noexcept {
  QuantifierVector v = QuantifierVector::Zero();
  v(static_cast<int>(index_of(q))) = 1.0;
  return v;
}

InputSequence build_sequence(Quantifier q, const Scene& scene) noexcept {
  InputSequence seq;
  const QuantifierVector qv = encode_quantifier(q);
  for (std::size_t t = 0; t < kSceneSize; ++t) {
    const auto col = static_cast<Eigen::Index>(t);
    seq.col(col).head<static_cast<int>(kQuantifierCount)>() = qv;
    seq.col(col).tail<kEntityWidth>() = encode_entity(scene[t]);
  }
  return seq;
}

Scene sample_scene(Rng& rng, Quantifier q, bool target) {
  const auto& pool = satisfying_counts()[index_of(q)][target ? 1 : 0];
  if (pool.empty()) {
    throw DataError(std::string(name_of(q)) + " cannot be " + (target ? "true" : "false") +
                    " with " + std::to_string(kSceneSize) + " slots");
  }
  const ZoneCounts& c = pool[rng.below(pool.size())];
  Scene scene{};
  auto it = scene.begin();
  it = std::fill_n(it, c.a_only, Zone::AOnly);
  it = std::fill_n(it, c.ab, Zone::AAndB);
  it = std::fill_n(it, c.b_only, Zone::BOnly);
  it = std::fill_n(it, c.outside, Zone::Outside);
  std::fill_n(it, c.null, Zone::Null);
  rng.shuffle(std::span(scene));
  return scene;
}

std::size_t true_label_count(std::size_t n, double balance) {
  if (!(balance >= 0.0 && balance <= 1.0)) {
    throw std::invalid_argument("balance must lie in [0, 1]");
  }
  const auto n_true = static_cast<std::size_t>(std::floor(static_cast<double>(n) * balance + 0.5));
  return std::min(n_true, n);
}

Dataset generate_dataset(const DatasetSpec& spec) {
  if (!(spec.balance >= 0.0 && spec.balance <= 1.0)) {
    throw std::invalid_argument("balance must lie in [0, 1]");
  }
  Dataset ds;
  ds.train.reserve(spec.train_total());
  ds.test.reserve(spec.test_total());
  for (Quantifier q : all_quantifiers()) {
    const std::size_t qi = index_of(q);
    if (spec.train[qi] == 0 && spec.test[qi] == 0) continue;
    Rng rng(derive_seed(spec.seed, qi + 1));
    auto train = sample_split(rng, q, spec.train[qi], spec.balance, nullptr);
    const std::set<Scene> seen = [&] {
      std::set<Scene> s;
      for (const auto& ex : train) s.insert(ex.scene);
      return s;
    }();
    auto test = sample_split(rng, q, spec.test[qi], spec.balance, &seen);
    ds.train.insert(ds.train.end(), train.begin(), train.end());
    ds.test.insert(ds.test.end(), test.begin(), test.end());
  }
  return ds;
}

std::string format_example(const Example& ex) {
  nlohmann::ordered_json j;
  j["q"] = name_of(ex.quantifier);
  auto& slots = j["slots"] = nlohmann::ordered_json::array();
  for (Zone z : ex.scene) slots.push_back(static_cast<int>(z));
  j["label"] = ex.label ? 1 : 0;
  return j.dump();
}

Example parse_example(const std::string& line, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed record: ") + e.what(), line_no);
  }
  if (!j.is_object() || !j.contains("q") || !j.contains("slots") || !j.contains("label")) {
    throw DataError("record needs fields q, slots, label", line_no);
  }
  if (!j["q"].is_string()) throw DataError("q must be a string", line_no);
  const auto name = j["q"].get<std::string>();
  const auto q = parse_quantifier(name);
  if (!q) throw DataError("unknown quantifier '" + name + "'", line_no);

  const auto& slots = j["slots"];
  if (!slots.is_array() || slots.size() != kSceneSize) {
    throw DataError("slots must list exactly " + std::to_string(kSceneSize) + " zones, got " +
                        (slots.is_array() ? std::to_string(slots.size()) : "non-array"),
                    line_no);
  }
  Example ex{*q, {}, false};
  for (std::size_t i = 0; i < kSceneSize; ++i) {
    if (!slots[i].is_number_integer()) throw DataError("slot codes must be integers", line_no);
    const auto code = slots[i].get<long long>();
    if (code < 0 || code >= static_cast<long long>(kZoneCount)) {
      throw DataError("slot code " + std::to_string(code) + " out of range 0..4", line_no);
    }
    ex.scene[i] = static_cast<Zone>(code);
  }
  const auto& label = j["label"];
  if (!label.is_number_integer() || (label.get<long long>() != 0 && label.get<long long>() != 1)) {
    throw DataError("label must be 0 or 1", line_no);
  }
  ex.label = label.get<long long>() == 1;
  if (ex.label != evaluate(ex.quantifier, zone_counts(ex.scene))) {
    throw DataError("label disagrees with the semantics of " + name, line_no);
  }
  return ex;
}

void write_dataset(const std::filesystem::path& path, const std::vector<Example>& examples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  for (const auto& ex : examples) out << format_example(ex) << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

std::vector<Example> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<Example> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    out.push_back(parse_example(line, line_no));
  }
  return out;
}

}  // namespace quantlearn
