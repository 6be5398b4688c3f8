// Command-line front end. Links only the C API.
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "misobc.h"

namespace {

struct ConfigDeleter {
  void operator()(misobc_config* c) const { misobc_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<misobc_config, ConfigDeleter>;

struct CommonOpts {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--config", opts->config_path, "config file (key = value)");
  const auto add_override = [cmd, opts](const std::string& flag,
                                        const std::string& key,
                                        const std::string& help) {
    cmd->add_option_function<std::string>(
        flag,
        [opts, key](const std::string& v) { opts->overrides.emplace_back(key, v); },
        help);
  };
  add_override("--seed", "seed", "master seed (u64)");
  add_override("--out", "out", "output directory");
  add_override("--alpha", "alpha", "CSIT quality exponent");
  add_override("--doppler", "doppler", "Doppler model: v,fc,tf,c");
  add_override("--doppler-f", "doppler_f", "raw normalized Doppler F");
  add_override("--gamma", "gamma", "training resource factor");
  add_override("--schemes", "schemes", "comma list: zf,mat,mat_variant,hybrid");
  add_override("--pgrid", "pgrid", "power grid in dB: start:step:stop or list");
  add_override("--trials", "trials", "Monte-Carlo trials per grid point");
  add_override("--threads", "threads", "worker threads (0 = auto)");
  add_override("--zeta", "zeta", "quantizer truncation exponent margin");
  add_override("--delta", "delta", "multicast rate back-off");
  add_override("--eps", "eps", "range-bound exponent split");
  add_override("--eps1", "eps1", "outage slack");
  add_override("--eps2", "eps2", "rate slack");
  add_override("--dec-bits", "dec_bits", "decode codebook bits");
  add_override("--m", "m", "transmit antennas");
}

ConfigPtr build_config(const CommonOpts& opts) {
  ConfigPtr cfg(opts.config_path.empty()
                    ? misobc_config_create()
                    : misobc_config_load(opts.config_path.c_str()));
  if (!cfg) {
    std::fprintf(stderr, "error: %s\n", misobc_last_error());
    return nullptr;
  }
  for (const auto& [key, value] : opts.overrides) {
    if (misobc_config_set(cfg.get(), key.c_str(), value.c_str()) != MISOBC_OK) {
      std::fprintf(stderr, "error: %s\n", misobc_last_error());
      return nullptr;
    }
  }
  return cfg;
}

int run_sweep_cmd(const CommonOpts& opts) {
  ConfigPtr cfg = build_config(opts);
  if (!cfg) return 1;
  misobc_result* res = misobc_sweep_run(cfg.get());
  if (res == nullptr) {
    std::fprintf(stderr, "error: %s\n", misobc_last_error());
    return 1;
  }
  if (misobc_result_write(res, nullptr) != MISOBC_OK) {
    std::fprintf(stderr, "error: %s\n", misobc_last_error());
    misobc_result_destroy(res);
    return 1;
  }
  char out_dir[512];
  if (misobc_config_get(cfg.get(), "out", out_dir, sizeof(out_dir)) != MISOBC_OK)
    out_dir[0] = '\0';
  std::printf("wrote %s/samples.csv, dof_alpha.csv, run_meta.txt (%d samples)\n",
              out_dir, misobc_result_sample_count(res));
  for (const char* name : {"zf", "mat", "mat_variant", "hybrid"}) {
    double slope = 0.0, se = 0.0;
    if (misobc_result_estimate(res, name, &slope, &se) == MISOBC_OK)
      std::printf("%-12s per-user DoF slope %.4f (se %.4f)\n", name, slope, se);
  }
  misobc_result_destroy(res);
  return 0;
}

int run_theory_cmd(const std::string& out_dir, const std::string& grid) {
  double a0 = 0.0, a1 = 1.0, step = 0.05;
  if (!grid.empty() &&
      std::sscanf(grid.c_str(), "%lf:%lf:%lf", &a0, &step, &a1) != 3) {
    std::fprintf(stderr, "error: --alpha-grid wants start:step:stop\n");
    return 1;
  }
  const std::string path = out_dir + "/dof_alpha.csv";
  if (misobc_emit_theory(path.c_str(), a0, a1, step) != MISOBC_OK) {
    std::fprintf(stderr, "error: %s\n", misobc_last_error());
    return 1;
  }
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int run_validate_cmd(const CommonOpts& opts) {
  ConfigPtr cfg = build_config(opts);
  if (!cfg) return 1;
  const int failures = misobc_validate(cfg.get(), nullptr);
  if (failures < 0) {
    std::fprintf(stderr, "error: %s\n", misobc_last_error());
    return 1;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"misobc: two-user MISO broadcast link-level simulator"};
  app.require_subcommand(1);

  CommonOpts sweep_opts;
  CLI::App* sweep = app.add_subcommand("sweep", "run a Monte-Carlo power sweep");
  add_common(sweep, &sweep_opts);

  std::string theory_out = "out";
  std::string theory_grid;
  CLI::App* theory = app.add_subcommand("theory", "emit closed-form DoF curves");
  theory->add_option("--out", theory_out, "output directory");
  theory->add_option("--alpha-grid", theory_grid, "alpha grid start:step:stop");

  CommonOpts validate_opts;
  CLI::App* validate =
      app.add_subcommand("validate", "run the invariant/property suite");
  add_common(validate, &validate_opts);

  CLI11_PARSE(app, argc, argv);

  if (sweep->parsed()) return run_sweep_cmd(sweep_opts);
  if (theory->parsed()) return run_theory_cmd(theory_out, theory_grid);
  if (validate->parsed()) return run_validate_cmd(validate_opts);
  return 1;
}
