// SPDX-License-Identifier: Apache-2.0
#include <cstring>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "extinctd/extinctd.h"

namespace {

const char* kConfig = R"(model:
  name: linear
  params:
    A: [[-1, 0], [0, -3]]
    Sigma: [[0.2, 0], [0, 0.1]]
experiment: slope
seed: 3
replicas: 2
sim: {dt: 0.01, t_final: 5}
ics: [[1, 1]]
)";

std::filesystem::path scratch(const char* name) {
  return std::filesystem::temp_directory_path() / (std::string("extinctd_capi_") + name);
}

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("version and status names") {
  CHECK(std::strlen(extinctd_version()) > 0);
  CHECK(std::string(extinctd_status_name(EXTINCTD_UNKNOWN_KEY)) == "UnknownKey");
  CHECK(std::string(extinctd_status_name(EXTINCTD_OK)) == "Ok");
  CHECK(extinctd_model_count() >= 5);
  for (size_t i = 0; i < extinctd_model_count(); ++i) {
    CHECK(extinctd_model_name(i) != nullptr);
    CHECK(extinctd_model_summary(i) != nullptr);
  }
  CHECK(extinctd_model_name(1000) == nullptr);
}

TEST_CASE("errors come back as codes with a message") {
  extinctd_config* cfg = nullptr;
  std::string bad(kConfig);
  bad.replace(bad.find("replicas"), 8, "replcas");
  CHECK(extinctd_config_parse(bad.c_str(), &cfg) == EXTINCTD_UNKNOWN_KEY);
  CHECK(cfg == nullptr);
  CHECK(std::string(extinctd_last_error()).find("replcas") != std::string::npos);
  CHECK(extinctd_config_parse(nullptr, &cfg) == EXTINCTD_INVALID_ARGUMENT);
  CHECK(extinctd_config_load("/nonexistent.yaml", &cfg) == EXTINCTD_IO_ERROR);
  CHECK(extinctd_run(nullptr, 1, nullptr) == EXTINCTD_INVALID_ARGUMENT);
}

TEST_CASE("overrides, emit and validate") {
  extinctd_config* cfg = nullptr;
  REQUIRE(extinctd_config_parse(kConfig, &cfg) == EXTINCTD_OK);
  CHECK(extinctd_config_set_seed(cfg, 99) == EXTINCTD_OK);
  CHECK(extinctd_config_set_replicas(cfg, 0) == EXTINCTD_INVALID_CONFIG);
  CHECK(extinctd_config_validate(cfg) == EXTINCTD_OK);
  char* text = nullptr;
  REQUIRE(extinctd_config_emit(cfg, &text) == EXTINCTD_OK);
  CHECK(std::string(text).find("99") != std::string::npos);
  extinctd_string_free(text);
  extinctd_config_free(cfg);
}

TEST_CASE("a run writes its files") {
  const auto dir = scratch("run");
  std::filesystem::remove_all(dir);
  extinctd_config* cfg = nullptr;
  REQUIRE(extinctd_config_parse(kConfig, &cfg) == EXTINCTD_OK);
  REQUIRE(extinctd_config_set_output(cfg, dir.string().c_str()) == EXTINCTD_OK);
  extinctd_result* res = nullptr;
  REQUIRE(extinctd_run(cfg, 2, &res) == EXTINCTD_OK);
  CHECK(std::string(extinctd_result_report(res)).find("\"trajectory_slope\"") != std::string::npos);
  CHECK(extinctd_result_file_count(res) >= 2);
  for (size_t i = 0; i < extinctd_result_file_count(res); ++i)
    CHECK(std::filesystem::exists(extinctd_result_file(res, i)));
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "exponents.csv"));
  extinctd_result_free(res);
  extinctd_config_free(cfg);
  std::filesystem::remove_all(dir);
}

TEST_CASE("a failed run leaves no partial output") {
  const auto dir = scratch("fail");
  std::filesystem::remove_all(dir);
  std::string text(kConfig);
  text.replace(text.find("ics: [[1, 1]]"), 13, "ics: [[1, 1, 1]]");
  extinctd_config* cfg = nullptr;
  REQUIRE(extinctd_config_parse(text.c_str(), &cfg) == EXTINCTD_OK);
  extinctd_config_set_output(cfg, dir.string().c_str());
  extinctd_result* res = nullptr;
  CHECK(extinctd_run(cfg, 1, &res) == EXTINCTD_DIMENSION_MISMATCH);
  CHECK(res == nullptr);
  CHECK_FALSE(std::filesystem::exists(dir / "report.json"));
  extinctd_config_free(cfg);
  std::filesystem::remove_all(dir);
}

}
