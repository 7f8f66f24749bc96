#include "ldplab.h"

#include <string>

#include "config.hpp"
#include "runner.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

}  // namespace

struct ldplab_config {
  ldplab::config::ExperimentConfig cfg;
  std::string serialized;  // buffer for ldplab_config_serialize
};

extern "C" {

const char* ldplab_last_error(void) { return g_last_error.c_str(); }

const char* ldplab_version(void) { return ldplab::runner::version(); }

int ldplab_config_parse(const char* text, ldplab_config** out) {
  if (!text || !out) {
    set_error("null argument");
    return LDPLAB_EINVAL;
  }
  try {
    auto* h = new ldplab_config;
    h->cfg = ldplab::config::parse_text(text);
    *out = h;
    g_last_error.clear();
    return LDPLAB_OK;
  } catch (const std::exception& e) {
    set_error(e.what());
    return LDPLAB_ESCHEMA;
  }
}

int ldplab_config_load(const char* path, ldplab_config** out) {
  if (!path || !out) {
    set_error("null argument");
    return LDPLAB_EINVAL;
  }
  try {
    auto* h = new ldplab_config;
    h->cfg = ldplab::config::load_file(path);
    *out = h;
    g_last_error.clear();
    return LDPLAB_OK;
  } catch (const std::exception& e) {
    set_error(e.what());
    return LDPLAB_ESCHEMA;
  }
}

void ldplab_config_free(ldplab_config* cfg) { delete cfg; }

int ldplab_config_validate(ldplab_config* cfg) {
  if (!cfg) {
    set_error("null handle");
    return LDPLAB_EINVAL;
  }
  try {
    ldplab::config::validate(cfg->cfg);
    g_last_error.clear();
    return LDPLAB_OK;
  } catch (const std::exception& e) {
    set_error(e.what());
    return LDPLAB_ESCHEMA;
  }
}

const char* ldplab_config_serialize(ldplab_config* cfg) {
  if (!cfg) {
    set_error("null handle");
    return nullptr;
  }
  cfg->serialized = ldplab::config::serialize(cfg->cfg);
  return cfg->serialized.c_str();
}

int ldplab_config_set_out_dir(ldplab_config* cfg, const char* out_dir) {
  if (!cfg) {
    set_error("null handle");
    return LDPLAB_EINVAL;
  }
  if (out_dir) cfg->cfg.out_dir = out_dir;
  return LDPLAB_OK;
}

int ldplab_config_set_workers(ldplab_config* cfg, int workers) {
  if (!cfg) {
    set_error("null handle");
    return LDPLAB_EINVAL;
  }
  if (workers > 0) cfg->cfg.workers = workers;
  return LDPLAB_OK;
}

int ldplab_config_set_seed(ldplab_config* cfg, int64_t seed) {
  if (!cfg) {
    set_error("null handle");
    return LDPLAB_EINVAL;
  }
  if (seed >= 0) cfg->cfg.seed = static_cast<uint64_t>(seed);
  return LDPLAB_OK;
}

int ldplab_run(ldplab_config* cfg, int* exit_code) {
  if (!cfg || !exit_code) {
    set_error("null argument");
    return LDPLAB_EINVAL;
  }
  try {
    auto res = ldplab::runner::run(cfg->cfg);
    *exit_code = res.exit_code;
    if (res.exit_code == 1) {
      set_error(res.bundle.summary.value("error", "run failed"));
      return LDPLAB_ERUN;
    }
    g_last_error.clear();
    return LDPLAB_OK;
  } catch (const std::exception& e) {
    set_error(e.what());
    *exit_code = 1;
    return LDPLAB_ERUN;
  }
}

const char* ldplab_list_models(void) {
  static const std::string catalog = ldplab::runner::list_models();
  return catalog.c_str();
}

}  // extern "C"
