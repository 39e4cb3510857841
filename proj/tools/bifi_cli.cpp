// Command-line front end; talks to the solver library through the C API only.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "bifi/bifi.h"

namespace {

int status_to_exit(bifi_status st) {
  switch (st) {
    case BIFI_OK:
      return 0;
    case BIFI_ERR_ARGUMENT:
      return 2;
    default:
      return 1;  // diverged solver, I/O failure, selftest failures
  }
}

struct ConfigHandle {
  bifi_config* cfg = nullptr;
  ConfigHandle() { bifi_config_create(&cfg); }
  ~ConfigHandle() { bifi_config_free(cfg); }
};

int apply(bifi_config* cfg, const char* key, const std::string& value) {
  bifi_status st = bifi_config_set(cfg, key, value.c_str());
  if (st != BIFI_OK) {
    std::fprintf(stderr, "error: %s\n", bifi_last_error());
    return status_to_exit(st);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bi-fidelity collocation driver for multiscale transport UQ"};
  app.require_subcommand(0, 1);

  std::string config_path, epsilon, n, n_list, candidates, seed, out_dir, workers, lf_scale,
      z_values, preset;
  bool print_config = false;

  app.add_option("--config", config_path, "Config file (strict key = value format)");
  app.add_option("--preset", preset, "Benchmark preset id 1..5 or 'custom'");
  app.add_option("--epsilon", epsilon, "Knudsen number override (or 'preset')");
  app.add_option("--n", n, "Number of selected high-fidelity samples");
  app.add_option("--n-list", n_list, "Comma-separated n values for sweep");
  app.add_option("--candidates", candidates, "Candidate-set size");
  app.add_option("--seed", seed, "Candidate sampling seed");
  app.add_option("--out", out_dir, "Report output directory");
  app.add_option("--workers", workers, "Worker threads (0 = all cores)");
  app.add_option("--lf-sigma-scale", lf_scale, "Low-fidelity effective scattering factor");
  app.add_option("--z", z_values, "Parameter point for solve commands, e.g. \"0 0 0 0 0\"");
  app.add_flag("--print-config", print_config, "Print the canonical config and exit");

  const char* commands[] = {"run-test", "sweep", "solve-hf", "solve-lf", "reference",
                            "selftest"};
  for (const char* c : commands) app.add_subcommand(c, "")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  ConfigHandle handle;
  if (!handle.cfg) {
    std::fprintf(stderr, "error: could not allocate configuration\n");
    return 1;
  }
  bifi_config* cfg = handle.cfg;

  if (!config_path.empty()) {
    bifi_status st = bifi_config_load_file(cfg, config_path.c_str());
    if (st != BIFI_OK) {
      std::fprintf(stderr, "error: %s\n", bifi_last_error());
      return status_to_exit(st);
    }
  }

  // BIFI_WORKERS stands in for --workers when the flag is absent.
  if (workers.empty()) {
    if (const char* env = std::getenv("BIFI_WORKERS")) workers = env;
  }

  for (auto* sub : app.get_subcommands())
    if (int rc = apply(cfg, "run.command", sub->get_name())) return rc;
  const std::pair<const char*, const std::string*> overrides[] = {
      {"run.preset", &preset},          {"run.epsilon", &epsilon},
      {"selection.n", &n},              {"selection.n_list", &n_list},
      {"selection.candidates", &candidates}, {"run.seed", &seed},
      {"run.out", &out_dir},            {"run.workers", &workers},
      {"model.lf_sigma_scale", &lf_scale}, {"run.z", &z_values},
  };
  for (const auto& [key, value] : overrides)
    if (!value->empty())
      if (int rc = apply(cfg, key, *value)) return rc;

  if (print_config) {
    char* text = nullptr;
    bifi_status st = bifi_config_render(cfg, &text);
    if (st != BIFI_OK) {
      std::fprintf(stderr, "error: %s\n", bifi_last_error());
      return status_to_exit(st);
    }
    std::fputs(text, stdout);
    bifi_text_free(text);
    return 0;
  }

  bifi_result* result = nullptr;
  bifi_status st = bifi_execute(cfg, &result);
  if (result) std::fputs(bifi_result_summary(result), stdout);
  if (st != BIFI_OK && st != BIFI_ERR_SELFTEST)
    std::fprintf(stderr, "error: %s\n", bifi_last_error());
  int rc = status_to_exit(st);
  bifi_result_free(result);
  return rc;
}
