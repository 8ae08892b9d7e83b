// SPDX-License-Identifier: Apache-2.0
#include <string>

#include "doctest.h"
#include "extinctd/config.hpp"
#include "helpers.hpp"

using namespace extinctd;
using testutil::code_of;

namespace {

const char* kGood = R"(model:
  name: linear
  params:
    A: [[-1, 0], [0, -3]]
    Sigma: [[0, 0], [0, 0]]
experiment: slope
seed: 7
replicas: 3
sim:
  dt: 0.001
  t_final: 5
ics:
  - [1, 1]
  - {x: [0.5, 2], regime: 0}
estimator:
  window: 0.4
output: results
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parses a full config") {
  const ExperimentConfig c = parse_config_text(kGood);
  CHECK(c.model == "linear");
  CHECK(c.experiment == ExperimentKind::Slope);
  CHECK(c.seed.value() == 7);
  CHECK(c.replicas == 3);
  CHECK(c.sim.t_final == 5.0);
  CHECK(c.ics.size() == 2);
  CHECK(c.ics[1].x[1] == 2.0);
  CHECK(c.estimator.window == 0.4);
  CHECK(c.output == "results");
  CHECK(c.params.matrix("A")[1][1] == -3.0);
}

TEST_CASE("emit and parse round trip") {
  const ExperimentConfig a = parse_config_text(kGood);
  const ExperimentConfig b = parse_config_text(emit_config(a));
  CHECK(emit_config(a) == emit_config(b));
  CHECK(b.ics.size() == a.ics.size());
  CHECK(b.sim.dt == a.sim.dt);
}

TEST_CASE("unknown keys are errors with a location") {
  try {
    (void)parse_config_text(replace(kGood, "replicas", "replcas"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownKey);
    const std::string msg = e.what();
    CHECK(msg.find("replcas") != std::string::npos);
    CHECK(msg.find("line 8") != std::string::npos);
  }
  CHECK(code_of([] { (void)parse_config_text(replace(kGood, "dt:", "step:")); }) == ErrorCode::UnknownKey);
}

TEST_CASE("seed is required") {
  const ExperimentConfig c = parse_config_text(replace(kGood, "seed: 7\n", ""));
  CHECK_FALSE(c.seed.has_value());
  CHECK(code_of([&] { validate_config(c); }) == ErrorCode::MissingField);
}

TEST_CASE("malformed values") {
  CHECK(code_of([] { (void)parse_config_text("model: [unclosed"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { (void)parse_config_text(""); }) == ErrorCode::ParseError);
  CHECK(code_of([] { (void)parse_config_text(replace(kGood, "replicas: 3", "replicas: many")); }) ==
        ErrorCode::InvalidConfig);
  CHECK(code_of([] { (void)parse_config_text(replace(kGood, "dt: 0.001", "dt: \"0.001\"")); }) ==
        ErrorCode::InvalidConfig);
  CHECK(code_of([] { (void)parse_config_text(replace(kGood, "experiment: slope", "experiment: fit")); }) ==
        ErrorCode::InvalidConfig);
}

TEST_CASE("semantic validation") {
  ExperimentConfig c = parse_config_text(kGood);
  c.ics[0].x.push_back(1.0);
  CHECK(code_of([&] { validate_config(c); }) == ErrorCode::DimensionMismatch);
  c = parse_config_text(kGood);
  c.ics.clear();
  CHECK(code_of([&] { validate_config(c); }) == ErrorCode::MissingField);
  c = parse_config_text(replace(kGood, "name: linear", "name: linearr"));
  CHECK(code_of([&] { validate_config(c); }) == ErrorCode::UnknownModel);
  c = parse_config_text(kGood);
  c.estimator.window = 1.5;
  CHECK(code_of([&] { validate_config(c); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("missing files") {
  CHECK(code_of([] { (void)parse_config("/nonexistent/config.yaml"); }) == ErrorCode::IoError);
}

}
