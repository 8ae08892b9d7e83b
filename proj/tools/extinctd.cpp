// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end; talks to the library only through extinctd.h.
//
// Exit codes: 0 success, 1 invalid config, 2 usage error, 3 run failure.
#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "extinctd/extinctd.h"

namespace {

struct ConfigHandle {
  extinctd_config* ptr = nullptr;
  ~ConfigHandle() { extinctd_config_free(ptr); }
};

int report_failure(extinctd_status st, int exit_code) {
  std::fprintf(stderr, "extinctd: error [%s]: %s\n", extinctd_status_name(st), extinctd_last_error());
  return exit_code;
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replicas;
  std::optional<std::string> out;
};

int load(const std::string& path, const Overrides& ov, ConfigHandle& h) {
  extinctd_status st = extinctd_config_load(path.c_str(), &h.ptr);
  if (st != EXTINCTD_OK) return report_failure(st, 1);
  if (ov.seed) extinctd_config_set_seed(h.ptr, *ov.seed);
  if (ov.replicas && (st = extinctd_config_set_replicas(h.ptr, *ov.replicas)) != EXTINCTD_OK)
    return report_failure(st, 1);
  if (ov.out) extinctd_config_set_output(h.ptr, ov.out->c_str());
  if ((st = extinctd_config_validate(h.ptr)) != EXTINCTD_OK) return report_failure(st, 1);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"extinctd: numerical checks of stochastic extinction criteria"};
  app.set_version_flag("--version", std::string(extinctd_version()));
  app.require_subcommand(1);

  Overrides ov;
  unsigned threads = 0;
  std::string config_path;

  const auto add_overrides = [&](CLI::App* sub) {
    sub->add_option("--seed", ov.seed, "override the config seed");
    sub->add_option("--replicas", ov.replicas, "override the replica count")->check(CLI::PositiveNumber);
    sub->add_option("--out", ov.out, "override the output directory");
  };

  CLI::App* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "YAML config")->required();
  add_overrides(run);
  run->add_option("--threads", threads, "worker threads (default: $EXTINCTD_THREADS or 1)");

  CLI::App* validate = app.add_subcommand("validate", "parse and check a config without running it");
  validate->add_option("config", config_path, "YAML config")->required();
  add_overrides(validate);
  bool print = false;
  validate->add_flag("--print", print, "print the normalized config");

  CLI::App* list = app.add_subcommand("list-models", "list registered models");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    for (std::size_t i = 0; i < extinctd_model_count(); ++i)
      std::printf("%-14s %s\n", extinctd_model_name(i), extinctd_model_summary(i));
    return 0;
  }

  ConfigHandle h;
  if (const int rc = load(config_path, ov, h)) return rc;

  if (validate->parsed()) {
    if (print) {
      char* text = nullptr;
      const extinctd_status st = extinctd_config_emit(h.ptr, &text);
      if (st != EXTINCTD_OK) return report_failure(st, 1);
      std::fputs(text, stdout);
      extinctd_string_free(text);
    } else {
      std::printf("ok\n");
    }
    return 0;
  }

  extinctd_result* result = nullptr;
  const extinctd_status st = extinctd_run(h.ptr, threads, &result);
  if (st != EXTINCTD_OK) return report_failure(st, 3);
  for (std::size_t i = 0; i < extinctd_result_file_count(result); ++i)
    std::printf("wrote %s\n", extinctd_result_file(result, i));
  extinctd_result_free(result);
  return 0;
}
