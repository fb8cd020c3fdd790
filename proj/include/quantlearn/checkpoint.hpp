// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <stdexcept>
#include <utility>

#include "quantlearn/neural.hpp"

namespace quantlearn {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kCheckpointFormat = "1";

/// JSON document: {"format_version": "1", "config": {...}, "tensors": {"proj.w": [[...]], ...}}.
/// Matrices are stored row by row; vectors as flat arrays. Values round-trip exactly.
void save_checkpoint(const std::filesystem::path& path, const ModelParams<double>& params,
                     const NetConfig& cfg);

/// Loads a checkpoint, checking every tensor against the shapes implied by its own header.
std::pair<ModelParams<double>, NetConfig> load_checkpoint(const std::filesystem::path& path);

/// As above, and additionally requires the stored architecture to match `expected`
/// (the seed is not compared).
std::pair<ModelParams<double>, NetConfig> load_checkpoint(const std::filesystem::path& path,
                                                          const NetConfig& expected);

}  // namespace quantlearn
