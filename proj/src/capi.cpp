// SPDX-License-Identifier: Apache-2.0
#include "extinctd/extinctd.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "extinctd/config.hpp"
#include "extinctd/experiment.hpp"
#include "extinctd/models.hpp"
#include "extinctd/parallel.hpp"

struct extinctd_config {
  extinctd::ExperimentConfig cfg;
};

struct extinctd_result {
  extinctd::RunResult run;
};

namespace {

thread_local std::string last_error;

template <class F>
extinctd_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return EXTINCTD_OK;
  } catch (const extinctd::Error& e) {
    last_error = e.what();
    return static_cast<extinctd_status>(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return EXTINCTD_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return EXTINCTD_INTERNAL;
  }
}

extinctd_status null_arg(const char* what) {
  last_error = std::string(what) + " must not be null";
  return EXTINCTD_INVALID_ARGUMENT;
}

const std::vector<std::string>& names() {
  static const std::vector<std::string> n = extinctd::model_names();
  return n;
}

const std::vector<std::string>& summaries() {
  static const std::vector<std::string> s = [] {
    std::vector<std::string> out;
    for (const auto& n : names()) out.push_back(extinctd::model_summary(n));
    return out;
  }();
  return s;
}

}  // namespace

extern "C" {

const char* extinctd_version(void) { return "0.1.0"; }

const char* extinctd_last_error(void) { return last_error.c_str(); }

const char* extinctd_status_name(extinctd_status code) {
  if (code == EXTINCTD_INTERNAL) return "Internal";
  return extinctd::error_code_name(static_cast<extinctd::ErrorCode>(code));
}

extinctd_status extinctd_config_load(const char* path, extinctd_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new extinctd_config{extinctd::load_config_unchecked(path)}; });
}

extinctd_status extinctd_config_parse(const char* yaml_text, extinctd_config** out) {
  if (!yaml_text) return null_arg("yaml_text");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new extinctd_config{extinctd::parse_config_text(yaml_text)}; });
}

void extinctd_config_free(extinctd_config* cfg) { delete cfg; }

extinctd_status extinctd_config_set_seed(extinctd_config* cfg, uint64_t seed) {
  if (!cfg) return null_arg("cfg");
  cfg->cfg.seed = seed;
  return EXTINCTD_OK;
}

extinctd_status extinctd_config_set_replicas(extinctd_config* cfg, uint64_t replicas) {
  if (!cfg) return null_arg("cfg");
  if (replicas == 0) {
    last_error = "replicas must be >= 1";
    return EXTINCTD_INVALID_CONFIG;
  }
  cfg->cfg.replicas = static_cast<std::size_t>(replicas);
  return EXTINCTD_OK;
}

extinctd_status extinctd_config_set_output(extinctd_config* cfg, const char* dir) {
  if (!cfg) return null_arg("cfg");
  if (!dir) return null_arg("dir");
  cfg->cfg.output = dir;
  return EXTINCTD_OK;
}

extinctd_status extinctd_config_validate(const extinctd_config* cfg) {
  if (!cfg) return null_arg("cfg");
  return guarded([&] { extinctd::validate_config(cfg->cfg); });
}

extinctd_status extinctd_config_emit(const extinctd_config* cfg, char** yaml_out) {
  if (!cfg) return null_arg("cfg");
  if (!yaml_out) return null_arg("yaml_out");
  return guarded([&] {
    const std::string text = extinctd::emit_config(cfg->cfg);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *yaml_out = buf;
  });
}

extinctd_status extinctd_run(const extinctd_config* cfg, unsigned threads, extinctd_result** out) {
  if (!cfg) return null_arg("cfg");
  return guarded([&] {
    extinctd::RunOptions opts;
    opts.threads = threads > 0 ? threads : extinctd::default_thread_count();
    auto* r = new extinctd_result{extinctd::run_experiment(cfg->cfg, opts)};
    if (out) {
      *out = r;
    } else {
      delete r;
    }
  });
}

const char* extinctd_result_report(const extinctd_result* result) {
  return result ? result->run.report_json.c_str() : "";
}

size_t extinctd_result_file_count(const extinctd_result* result) {
  return result ? result->run.files.size() : 0;
}

const char* extinctd_result_file(const extinctd_result* result, size_t index) {
  if (!result || index >= result->run.files.size()) return nullptr;
  return result->run.files[index].c_str();
}

void extinctd_result_free(extinctd_result* result) { delete result; }

size_t extinctd_model_count(void) { return names().size(); }

const char* extinctd_model_name(size_t index) {
  return index < names().size() ? names()[index].c_str() : nullptr;
}

const char* extinctd_model_summary(size_t index) {
  return index < summaries().size() ? summaries()[index].c_str() : nullptr;
}

void extinctd_string_free(char* s) { std::free(s); }

}  // extern "C"
