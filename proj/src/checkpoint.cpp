// SPDX-License-Identifier: Apache-2.0
#include "quantlearn/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace quantlearn {
namespace {

using nlohmann::ordered_json;

template <typename Derived>
ordered_json tensor_to_json(const Eigen::MatrixBase<Derived>& t) {
  ordered_json out = ordered_json::array();
  if constexpr (Derived::ColsAtCompileTime == 1) {
    for (Eigen::Index i = 0; i < t.rows(); ++i) out.push_back(t(i, 0));
  } else {
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      ordered_json row = ordered_json::array();
      for (Eigen::Index j = 0; j < t.cols(); ++j) row.push_back(t(i, j));
      out.push_back(std::move(row));
    }
  }
  return out;
}

double as_number(const ordered_json& v, std::string_view key) {
  if (!v.is_number()) throw CheckpointError("tensor " + std::string(key) + " holds a non-number");
  return v.get<double>();
}

void fill_tensor(Matrix<double>& t, const ordered_json& j, std::string_view key) {
  const auto mismatch = [&] {
    return CheckpointError("shape mismatch for " + std::string(key) + ": expected " +
                           std::to_string(t.rows()) + "x" + std::to_string(t.cols()));
  };
  if (!j.is_array() || j.size() != static_cast<std::size_t>(t.rows())) throw mismatch();
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(t.cols())) throw mismatch();
    for (Eigen::Index c = 0; c < t.cols(); ++c) t(i, c) = as_number(row[static_cast<std::size_t>(c)], key);
  }
}

void fill_tensor(Vector<double>& t, const ordered_json& j, std::string_view key) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(t.size())) {
    throw CheckpointError("shape mismatch for " + std::string(key) + ": expected length " +
                          std::to_string(t.size()));
  }
  for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = as_number(j[static_cast<std::size_t>(i)], key);
}

NetConfig config_from_json(const ordered_json& j) {
  NetConfig cfg;
  try {
    cfg.input_width = j.at("input_width").get<int>();
    cfg.embed_width = j.at("embed_width").get<int>();
    cfg.hidden_width = j.at("hidden_width").get<int>();
    cfg.num_layers = j.at("num_layers").get<int>();
    cfg.num_classes = j.at("num_classes").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.validate();
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  }
  return cfg;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams<double>& params,
                     const NetConfig& cfg) {
  ordered_json doc;
  doc["format_version"] = kCheckpointFormat;
  doc["config"] = {{"input_width", cfg.input_width}, {"embed_width", cfg.embed_width},
                   {"hidden_width", cfg.hidden_width}, {"num_layers", cfg.num_layers},
                   {"num_classes", cfg.num_classes},   {"seed", cfg.seed}};
  auto& tensors = doc["tensors"] = ordered_json::object();
  visit_tensors([&](std::string_view name, const auto& t) { tensors[std::string(name)] = tensor_to_json(t); },
                params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open " + path.string() + " for writing");
  out << doc.dump(1) << '\n';
  if (!out) throw CheckpointError("write failed for " + path.string());
}

std::pair<ModelParams<double>, NetConfig> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError("cannot parse " + path.string() + ": " + e.what());
  }
  if (!doc.is_object() || doc.value("format_version", "") != std::string(kCheckpointFormat)) {
    throw CheckpointError("unsupported checkpoint format in " + path.string());
  }
  if (!doc.contains("config") || !doc.contains("tensors")) {
    throw CheckpointError("checkpoint lacks config or tensors");
  }
  const NetConfig cfg = config_from_json(doc["config"]);
  auto params = ModelParams<double>::zeros(cfg);
  const auto& tensors = doc["tensors"];
  std::size_t seen = 0;
  visit_tensors(
      [&](std::string_view name, auto& t) {
        const std::string key(name);
        if (!tensors.contains(key)) throw CheckpointError("checkpoint lacks tensor " + key);
        fill_tensor(t, tensors[key], name);
        ++seen;
      },
      params);
  if (seen != tensors.size()) throw CheckpointError("checkpoint has unexpected extra tensors");
  return {std::move(params), cfg};
}

std::pair<ModelParams<double>, NetConfig> load_checkpoint(const std::filesystem::path& path,
                                                          const NetConfig& expected) {
  auto loaded = load_checkpoint(path);
  NetConfig stored = loaded.second;
  stored.seed = expected.seed;
  if (!(stored == expected)) {
    throw CheckpointError("shape mismatch: checkpoint architecture differs from the requested network");
  }
  return loaded;
}

}  // namespace quantlearn
