#include "bifi/bifi.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "config.hpp"
#include "errors.hpp"
#include "runner.hpp"

struct bifi_config {
  bifi::RunConfig cfg;
};

struct bifi_result {
  bifi::RunOutcome outcome;
};

namespace {

thread_local std::string g_last_error;

bifi_status fail(bifi_status code, const char* what) {
  g_last_error = what ? what : "";
  return code;
}

template <typename Fn>
bifi_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return BIFI_OK;
  } catch (const bifi::ConfigError& e) {
    return fail(BIFI_ERR_ARGUMENT, e.what());
  } catch (const bifi::ArgumentError& e) {
    return fail(BIFI_ERR_ARGUMENT, e.what());
  } catch (const bifi::DivergedError& e) {
    return fail(BIFI_ERR_DIVERGED, e.what());
  } catch (const bifi::IoError& e) {
    return fail(BIFI_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(BIFI_ERR_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

const char* bifi_version(void) { return "0.1.0"; }

const char* bifi_last_error(void) { return g_last_error.c_str(); }

bifi_status bifi_config_create(bifi_config** out) {
  if (!out) return fail(BIFI_ERR_ARGUMENT, "bifi_config_create: null output pointer");
  return guarded([&] { *out = new bifi_config(); });
}

void bifi_config_free(bifi_config* cfg) { delete cfg; }

bifi_status bifi_config_load_file(bifi_config* cfg, const char* path) {
  if (!cfg || !path) return fail(BIFI_ERR_ARGUMENT, "bifi_config_load_file: null argument");
  return guarded([&] { cfg->cfg = bifi::parse_config(path); });
}

bifi_status bifi_config_set(bifi_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value)
    return fail(BIFI_ERR_ARGUMENT, "bifi_config_set: null argument");
  return guarded([&] { bifi::apply_override(cfg->cfg, key, value); });
}

bifi_status bifi_config_render(const bifi_config* cfg, char** out) {
  if (!cfg || !out) return fail(BIFI_ERR_ARGUMENT, "bifi_config_render: null argument");
  return guarded([&] {
    std::string text = bifi::render_canonical(cfg->cfg);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

void bifi_text_free(char* text) { std::free(text); }

bifi_status bifi_execute(const bifi_config* cfg, bifi_result** out) {
  if (!cfg || !out) return fail(BIFI_ERR_ARGUMENT, "bifi_execute: null argument");
  *out = nullptr;
  bifi_status st = guarded([&] {
    auto res = new bifi_result{bifi::execute(cfg->cfg)};
    *out = res;
  });
  if (st != BIFI_OK) return st;
  if ((*out)->outcome.selftest_failures > 0)
    return fail(BIFI_ERR_SELFTEST, "selftest reported failures");
  return BIFI_OK;
}

void bifi_result_free(bifi_result* res) { delete res; }

const char* bifi_result_summary(const bifi_result* res) {
  return res ? res->outcome.summary.c_str() : "";
}

int bifi_result_selftest_failures(const bifi_result* res) {
  return res ? res->outcome.selftest_failures : -1;
}

const double* bifi_result_profile(const bifi_result* res, const char* name, size_t* len) {
  if (!res || !name) return nullptr;
  const bifi::RunOutcome& o = res->outcome;
  const std::vector<double>* v = nullptr;
  std::string key(name);
  if (key == "x") v = &o.x;
  else if (key == "qoi") v = &o.qoi;
  else if (key == "mean_bf") v = &o.mean_bf;
  else if (key == "std_bf") v = &o.std_bf;
  else if (key == "mean_ref") v = &o.mean_ref;
  else if (key == "std_ref") v = &o.std_ref;
  if (!v || v->empty()) return nullptr;
  if (len) *len = v->size();
  return v->data();
}

bifi_status bifi_result_errors(const bifi_result* res, double* e_mean, double* e_std) {
  if (!res) return fail(BIFI_ERR_ARGUMENT, "bifi_result_errors: null result");
  if (e_mean) *e_mean = res->outcome.e_mean;
  if (e_std) *e_std = res->outcome.e_std;
  return BIFI_OK;
}

}  // extern "C"
