// SPDX-License-Identifier: Apache-2.0
#include <fstream>

#include "doctest.h"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "quantlearn/checkpoint.hpp"

using namespace quantlearn;

TEST_CASE("save then load is bit-exact") {
  const auto dir = testutil::scratch_dir("checkpoint");
  Rng rng(1);
  NetConfig cfg;
  cfg.seed = 99;
  // Full-range doubles, not just the initialisation range.
  auto p = gradcheck::random_params(cfg, rng, 1e3);
  p.head_b(0) = 1e-300;
  p.head_b(1) = -0.1;
  save_checkpoint(dir / "model.json", p, cfg);

  const auto [q, stored] = load_checkpoint(dir / "model.json");
  CHECK(stored == cfg);
  visit_tensors([](std::string_view, const auto& a, const auto& b) { CHECK(a == b); }, p, q);

  NetConfig other_seed = cfg;
  other_seed.seed = 1;
  CHECK_NOTHROW(load_checkpoint(dir / "model.json", other_seed));

  const std::string text = testutil::slurp(dir / "model.json");
  CHECK(text.find("\"format_version\": \"1\"") != std::string::npos);
  CHECK(text.find("\"lstm.1.bf\"") != std::string::npos);
}

TEST_CASE("truncated and malformed files are rejected") {
  const auto dir = testutil::scratch_dir("checkpoint_bad");
  NetConfig cfg;
  save_checkpoint(dir / "model.json", init_params(cfg), cfg);
  const std::string text = testutil::slurp(dir / "model.json");
  {
    std::ofstream out(dir / "cut.json", std::ios::binary);
    out << text.substr(0, text.size() / 2);
  }
  CHECK_THROWS_AS(load_checkpoint(dir / "cut.json"), CheckpointError);
  CHECK_THROWS_AS(load_checkpoint(dir / "missing.json"), CheckpointError);
  {
    std::ofstream out(dir / "version.json", std::ios::binary);
    out << R"({"format_version":"2","config":{},"tensors":{}})";
  }
  CHECK_THROWS_AS(load_checkpoint(dir / "version.json"), CheckpointError);
}

TEST_CASE("architecture mismatch is a shape error") {
  const auto dir = testutil::scratch_dir("checkpoint_shape");
  NetConfig small{14, 8, 4, 2, 2, 0};
  save_checkpoint(dir / "small.json", init_params(small), small);
  try {
    load_checkpoint(dir / "small.json", NetConfig{});
    FAIL("expected a shape mismatch");
  } catch (const CheckpointError& e) {
    CHECK(std::string(e.what()).find("shape mismatch") != std::string::npos);
  }

  // Header claims the default net but the tensors are smaller.
  NetConfig lie = NetConfig{};
  auto text = testutil::slurp(dir / "small.json");
  const auto pos = text.find("\"hidden_width\": 4");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 17, "\"hidden_width\": 8");
  {
    std::ofstream out(dir / "lie.json", std::ios::binary);
    out << text;
  }
  try {
    load_checkpoint(dir / "lie.json", lie);
    FAIL("expected a shape mismatch");
  } catch (const CheckpointError& e) {
    CHECK(std::string(e.what()).find("shape mismatch") != std::string::npos);
  }
}
