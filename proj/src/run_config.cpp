// SPDX-License-Identifier: Apache-2.0
#include "quantlearn/run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>

#include "json.hpp"

namespace quantlearn {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

template <typename T>
T get_as(const json& v, std::string_view key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for " + std::string(key) + ": " + v.dump());
  }
}

std::vector<char> parse_conditions(const json& v) {
  std::string ids;
  if (v.is_string()) {
    ids = v.get<std::string>();
  } else if (v.is_array()) {
    for (const auto& e : v) ids += get_as<std::string>(e, "experiment.conditions");
  } else {
    throw ConfigError("experiment.conditions must be a string like \"a,e\" or an array");
  }
  std::vector<char> out;
  for (char c : ids) {
    if (c == ',' || c == ' ') continue;
    if (kConditionIds.find(c) == std::string_view::npos) {
      throw ConfigError(std::string("unknown condition '") + c + "'");
    }
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  return out;
}

struct Field {
  std::function<void(RunConfig&, const json&)> set;
  std::function<ordered_json(const RunConfig&)> get;
};

template <typename T, typename Access>
Field field(std::string_view key, Access access) {
  return {[key, access](RunConfig& c, const json& v) { access(c) = get_as<T>(v, key); },
          [access](const RunConfig& c) { return ordered_json(access(c)); }};
}

#define QL_FIELD(T, key, member) \
  {key, field<T>(key, [](auto& c) -> auto& { return c.member; })}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"experiment.conditions",
       {[](RunConfig& c, const json& v) { c.conditions = parse_conditions(v); },
        [](const RunConfig& c) { return ordered_json(std::string(c.conditions.begin(), c.conditions.end())); }}},
      QL_FIELD(int, "experiment.runs", runs),
      QL_FIELD(int, "experiment.trials", trials),
      QL_FIELD(bool, "experiment.record_train", record_train),
      QL_FIELD(std::uint64_t, "data.base_seed", base_seed),
      QL_FIELD(std::size_t, "data.training_items", data.training_items),
      QL_FIELD(std::size_t, "data.testing_items", data.testing_items),
      QL_FIELD(std::size_t, "data.test_items", data.test_items),
      QL_FIELD(double, "data.balance", data.balance),
      QL_FIELD(int, "net.embed_width", net.embed_width),
      QL_FIELD(int, "net.hidden_width", net.hidden_width),
      QL_FIELD(int, "net.num_layers", net.num_layers),
      QL_FIELD(int, "train.batch_size", train.batch_size),
      QL_FIELD(int, "train.total_steps", train.total_steps),
      QL_FIELD(int, "train.eval_every", train.eval_every),
      QL_FIELD(double, "train.learning_rate", train.learning_rate),
      QL_FIELD(double, "train.beta1", train.beta1),
      QL_FIELD(double, "train.beta2", train.beta2),
      QL_FIELD(double, "train.epsilon", train.epsilon),
      QL_FIELD(bool, "train.shuffle_each_epoch", train.shuffle_each_epoch),
      {"out.dir",
       {[](RunConfig& c, const json& v) { c.out_dir = get_as<std::string>(v, "out.dir"); },
        [](const RunConfig& c) { return ordered_json(c.out_dir.generic_string()); }}},
  };
  return table;
}

#undef QL_FIELD

void apply_setting(RunConfig& cfg, std::string_view key, const json& value) {
  for (const auto& [name, f] : fields()) {
    if (name == key) {
      f.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

void RunConfig::validate() const {
  if (conditions.empty()) throw ConfigError("no conditions");
  if (runs < 1 || trials < 1) throw ConfigError("experiment.runs and experiment.trials must be >= 1");
  if (!(data.balance >= 0.0 && data.balance <= 1.0)) throw ConfigError("data.balance must lie in [0, 1]");
  try {
    net.validate();
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

TrialPlan RunConfig::base_plan() const {
  TrialPlan p;
  p.base_seed = base_seed;
  p.net = net;
  p.train = train;
  p.data = data;
  p.record_train = record_train;
  return p;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [name, f] : fields()) out.push_back(name);
  return out;
}

void apply_profile(RunConfig& cfg, std::string_view profile) {
  const DataSizes full;
  if (profile == "paper") {
    cfg.runs = 3;
    cfg.trials = 30;
    cfg.data = full;
  } else if (profile == "desk") {
    cfg.runs = 1;
    cfg.trials = 5;
    cfg.data.training_items = full.training_items / 10;
    cfg.data.testing_items = full.testing_items / 10;
    cfg.data.test_items = full.test_items / 10;
  } else {
    throw ConfigError("unknown profile '" + std::string(profile) + "' (expected paper or desk)");
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse config " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object of dotted keys");
  for (const auto& [key, value] : doc.items()) apply_setting(cfg, key, value);
}

void apply_assignment(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  apply_setting(cfg, key, value);
}

void apply_seed_env(RunConfig& cfg) {
  const char* env = std::getenv(kSeedEnvVar);
  if (!env || !*env) return;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || env[0] == '-') {
    throw ConfigError(std::string(kSeedEnvVar) + " must be a non-negative integer");
  }
  cfg.base_seed = v;
}

std::string to_json_text(const RunConfig& cfg) {
  ordered_json out;
  for (const auto& [name, f] : fields()) out[name] = f.get(cfg);
  return out.dump(2) + "\n";
}

}  // namespace quantlearn
