#include "misobc.h"

#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "misobc/errors.hpp"
#include "misobc/harness.hpp"
#include "misobc/validate.hpp"

using namespace misobc;

struct misobc_config {
  SimConfig cfg;
};

struct misobc_result {
  SimConfig cfg;
  std::vector<RateSample> samples;
};

namespace {

thread_local std::string g_last_error = "no error";

void set_error(const std::string& msg) { g_last_error = msg; }

misobc_status status_of(const std::exception& e) {
  set_error(e.what());
  if (dynamic_cast<const FormatError*>(&e)) return MISOBC_ERR_FORMAT;
  if (dynamic_cast<const IoError*>(&e)) return MISOBC_ERR_IO;
  if (dynamic_cast<const std::domain_error*>(&e)) return MISOBC_ERR_DOMAIN;
  if (dynamic_cast<const std::invalid_argument*>(&e))
    return MISOBC_ERR_INVALID_ARGUMENT;
  return MISOBC_ERR_INTERNAL;
}

template <typename Fn>
misobc_status guarded(Fn&& fn) {
  try {
    fn();
    return MISOBC_OK;
  } catch (const std::exception& e) {
    return status_of(e);
  } catch (...) {
    set_error("unknown failure");
    return MISOBC_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* misobc_version(void) { return "misobc 1.0.0"; }

const char* misobc_last_error(void) { return g_last_error.c_str(); }

misobc_config* misobc_config_create(void) {
  try {
    return new misobc_config{};
  } catch (...) {
    set_error("allocation failed");
    return nullptr;
  }
}

misobc_config* misobc_config_load(const char* path) {
  if (path == nullptr) {
    set_error("config path is null");
    return nullptr;
  }
  try {
    return new misobc_config{SimConfig::from_file(path)};
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

misobc_status misobc_config_set(misobc_config* cfg, const char* key,
                                const char* value) {
  if (cfg == nullptr || key == nullptr || value == nullptr) {
    set_error("null argument");
    return MISOBC_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { cfg->cfg.set(key, value); });
}

misobc_status misobc_config_get(const misobc_config* cfg, const char* key,
                                char* buf, size_t buf_size) {
  if (cfg == nullptr || key == nullptr || buf == nullptr || buf_size == 0) {
    set_error("null argument");
    return MISOBC_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const std::string v = cfg->cfg.get(key);
    if (v.size() + 1 > buf_size)
      throw std::invalid_argument("buffer too small for key '" +
                                  std::string(key) + "'");
    std::memcpy(buf, v.c_str(), v.size() + 1);
  });
}

void misobc_config_destroy(misobc_config* cfg) { delete cfg; }

misobc_status misobc_theoretical_dof(double alpha, double* out) {
  if (out == nullptr) {
    set_error("null output pointer");
    return MISOBC_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *out = theoretical_dof(alpha); });
}

misobc_status misobc_baseline_dof(double alpha, double* out) {
  if (out == nullptr) {
    set_error("null output pointer");
    return MISOBC_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *out = baseline_dof(alpha); });
}

misobc_status misobc_doppler_alpha(double v, double fc, double tf, double c,
                                   double* f_out, double* alpha_out) {
  if (f_out == nullptr || alpha_out == nullptr) {
    set_error("null output pointer");
    return MISOBC_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    DopplerConfig cfg;
    cfg.v = v;
    cfg.fc = fc;
    cfg.tf = tf;
    cfg.c = c;
    const auto [f, alpha] = doppler_alpha(cfg);
    *f_out = f;
    *alpha_out = alpha;
  });
}

misobc_result* misobc_sweep_run(const misobc_config* cfg) {
  if (cfg == nullptr) {
    set_error("null config");
    return nullptr;
  }
  try {
    auto* res = new misobc_result{cfg->cfg, {}};
    res->samples = run_sweep(cfg->cfg);
    return res;
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

misobc_status misobc_result_write(const misobc_result* res,
                                  const char* out_dir) {
  if (res == nullptr) {
    set_error("null result");
    return MISOBC_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    SimConfig cfg = res->cfg;
    if (out_dir != nullptr) cfg.out_dir = out_dir;
    std::vector<DofEstimate> estimates;
    for (Scheme s : cfg.schemes) {
      try {
        estimates.push_back(fit_dof(res->samples, s));
      } catch (const std::exception&) {
        // grid too small for a slope; report rates only
      }
    }
    emit_report(res->samples, estimates, cfg);
  });
}

int misobc_result_sample_count(const misobc_result* res) {
  if (res == nullptr) {
    set_error("null result");
    return -1;
  }
  return static_cast<int>(res->samples.size());
}

misobc_status misobc_result_estimate(const misobc_result* res,
                                     const char* scheme, double* slope,
                                     double* std_err) {
  if (res == nullptr || scheme == nullptr || slope == nullptr) {
    set_error("null argument");
    return MISOBC_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const auto s = scheme_from_name(scheme);
    if (!s)
      throw std::invalid_argument("unknown scheme '" + std::string(scheme) + "'");
    const DofEstimate est = fit_dof(res->samples, *s);
    *slope = est.slope;
    if (std_err != nullptr) *std_err = est.std_err;
  });
}

void misobc_result_destroy(misobc_result* res) { delete res; }

misobc_status misobc_emit_theory(const char* path, double alpha_min,
                                 double alpha_max, double alpha_step) {
  if (path == nullptr) {
    set_error("null path");
    return MISOBC_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { emit_theory(path, alpha_min, alpha_max, alpha_step); });
}

int misobc_validate(const misobc_config* cfg, const char* report_path) {
  if (cfg == nullptr) {
    set_error("null config");
    return -1;
  }
  try {
    const auto results = run_validation(cfg->cfg);
    FILE* out = stdout;
    FILE* file = nullptr;
    if (report_path != nullptr) {
      file = std::fopen(report_path, "w");
      if (file == nullptr) {
        set_error("cannot open report path: " + std::string(report_path));
        return -1;
      }
      out = file;
    }
    int failures = 0;
    for (const CheckResult& r : results) {
      if (!r.pass) ++failures;
      std::fprintf(out, "[%s] %s%s%s\n", r.pass ? "PASS" : "FAIL",
                   r.name.c_str(), r.detail.empty() ? "" : ": ",
                   r.detail.c_str());
    }
    std::fprintf(out, "%d/%zu checks passed\n",
                 static_cast<int>(results.size()) - failures, results.size());
    if (file != nullptr) std::fclose(file);
    return failures;
  } catch (const std::exception& e) {
    set_error(e.what());
    return -1;
  }
}

}  // extern "C"
