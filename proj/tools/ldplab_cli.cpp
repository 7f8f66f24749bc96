#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "ldplab.h"

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo laboratory for precise large deviations of "
               "heavy-tailed time series"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int workers = -1;
  long long seed = -1;

  auto* run = app.add_subcommand("run", "Run the experiment in a config file");
  run->add_option("--config", config_path, "Config file (key=value or JSON)")
      ->required();
  run->add_option("--out", out_dir, "Output directory override");
  run->add_option("--workers", workers, "Worker thread count override");
  run->add_option("--seed", seed, "Seed override");

  auto* lm = app.add_subcommand("list-models", "Print the model catalog");

  auto* vc = app.add_subcommand("validate-config", "Validate a config file");
  vc->add_option("--config", config_path, "Config file to validate")->required();

  CLI11_PARSE(app, argc, argv);

  if (lm->parsed()) {
    std::fputs(ldplab_list_models(), stdout);
    return 0;
  }

  ldplab_config* cfg = nullptr;
  if (ldplab_config_load(config_path.c_str(), &cfg) != LDPLAB_OK) {
    std::fprintf(stderr, "%s\n", ldplab_last_error());
    return 1;
  }

  if (vc->parsed()) {
    int rc = ldplab_config_validate(cfg);
    if (rc != LDPLAB_OK) {
      std::fprintf(stderr, "%s\n", ldplab_last_error());
      ldplab_config_free(cfg);
      return 1;
    }
    std::printf("ok\n");
    ldplab_config_free(cfg);
    return 0;
  }

  if (!out_dir.empty()) ldplab_config_set_out_dir(cfg, out_dir.c_str());
  ldplab_config_set_workers(cfg, workers);
  ldplab_config_set_seed(cfg, seed);

  int exit_code = 1;
  int rc = ldplab_run(cfg, &exit_code);
  if (rc != LDPLAB_OK && exit_code == 1)
    std::fprintf(stderr, "%s\n", ldplab_last_error());
  ldplab_config_free(cfg);
  return exit_code;
}
