#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "misobc/channel.hpp"
#include "misobc/schemes.hpp"

namespace misobc {

enum class Scheme { kZf = 1, kMat = 2, kMatVariant = 3, kHybrid = 4 };

const char* scheme_name(Scheme s);
std::optional<Scheme> scheme_from_name(const std::string& name);

// Experiment configuration. Every CLI flag has a config-file twin
// (flat `key = value` text); the CLI overrides the file.
struct SimConfig {
  std::size_t m = 2;
  bool use_doppler = false;
  double alpha = 0.5;
  DopplerConfig doppler;
  std::vector<double> p_grid_db = {30, 35, 40, 45, 50, 55, 60};
  std::size_t trials_per_point = 10000;
  std::uint64_t seed = 1;
  std::vector<Scheme> schemes = {Scheme::kHybrid};
  // Sweep slacks default near the zeta, delta -> 0 regime in which the
  // DoF statement is extracted; validation runs override them.
  AnalysisParams params{0.01, 0.01, 0.005, 0.1, 0.1};
  std::size_t dec_bits = 6;  // decode-codebook size 2^dec_bits
  unsigned threads = 0;      // 0 = hardware concurrency
  std::string out_dir = "out";

  // effective CSIT quality exponent (alpha, or 1-2F in Doppler mode)
  double effective_alpha() const;

  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  // throws std::invalid_argument listing every violation
  void validate() const;

  std::string to_text() const;
  static SimConfig from_text(const std::string& text);
  static SimConfig from_file(const std::string& path);
};

struct RateSample {
  double p_db = 0.0;
  Scheme scheme = Scheme::kHybrid;
  double rate = 0.0;  // per-user bits per channel use
  double freq_range_err = 0.0;
  double freq_mc_err = 0.0;
  double freq_mimo_err = 0.0;
  double kappa = 0.0;
  double beta_p = 0.0;
  double interference_power = 0.0;
};

struct DofEstimate {
  Scheme scheme = Scheme::kHybrid;
  double slope = 0.0;
  double std_err = 0.0;
  double p_db_min = 0.0;
  double p_db_max = 0.0;
};

// (2 - alpha)/(3 - 2 alpha) per user on [0, 1], and 1 beyond
double theoretical_dof(double alpha);
// best ZF/MAT selection per user: max(2/3, min(alpha, 1))
double baseline_dof(double alpha);

// Deterministic Monte-Carlo sweep over (P, scheme); per-trial seeds are
// derived from (seed, p index, scheme, trial), so serial and parallel
// execution produce identical samples.
std::vector<RateSample> run_sweep(const SimConfig& cfg);

// least-squares slope of rate against log2 P for one scheme
DofEstimate fit_dof(const std::vector<RateSample>& samples, Scheme scheme);

// Writes samples.csv, dof_alpha.csv and run_meta.txt under cfg.out_dir.
// run_meta.txt is itself a parseable config (replay support).
void emit_report(const std::vector<RateSample>& samples,
                 const std::vector<DofEstimate>& estimates,
                 const SimConfig& cfg);

// closed-form dof_alpha.csv rows over an alpha grid (no measurements)
void emit_theory(const std::string& path, double alpha_min, double alpha_max,
                 double alpha_step);

// CSV helpers shared by reports and tests (RFC 4180 quoting, %.9g floats)
std::string csv_field(const std::string& s);
std::string fmt_g9(double v);

}  // namespace misobc
