#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "misobc/linalg.hpp"
#include "misobc/rng.hpp"

namespace misobc {

// Channel state at one slot: row 0 is h_t^T (user 1), row 1 is g_t^T (user 2).
struct ChannelState {
  CMat s;  // 2 x m
  int t = 1;

  std::size_t antennas() const { return s.cols(); }
  CVec h() const { return s.row(0); }
  CVec g() const { return s.row(1); }
};

// Transmitter-side knowledge at the current slot: perfect past states,
// noisy current estimates with per-entry error variance sigma2 = P^{-alpha_p}.
// `truth` is the state the receivers know (perfect receiver CSI).
struct CsitView {
  std::vector<ChannelState> past;
  ChannelState truth;
  CVec h_hat;
  CVec g_hat;
  double sigma2 = 1.0;
  double alpha_p = 0.0;
};

struct DopplerConfig {
  double v = 0.0;      // mobile speed, m/s
  double fc = 2e9;     // carrier frequency, Hz
  double tf = 1e-3;    // slot duration, s
  double c = 3e8;      // light speed, m/s
  double gamma = 1.0;  // training resource factor, >= 1
  std::size_t length = 1024;
  // raw normalized Doppler in cycles/slot; bypasses the v*fc*tf/c formula
  std::optional<double> f_override;

  double max_doppler() const;
};

ChannelState sample_iid_state(std::size_t m, Rng& rng);

// Exact per-draw decomposition h = h_hat + delta with cov(h_hat) = (1-s2) I,
// cov(delta) = s2 I, h_hat and delta uncorrelated, s2 = min(1, p^{-alpha_p}).
CsitView make_csit(const ChannelState& state, double alpha_p, double p,
                   Rng& rng);

// Stationary unit-variance complex Gaussian sequence, band-limited to
// [-F, F] cycles/slot (windowed-sinc FIR driven by white noise).
std::vector<ChannelState> sample_doppler_process(const DopplerConfig& cfg,
                                                 std::size_t m, Rng& rng);

// FIR prototype used by the Doppler generator; unit energy.
std::vector<double> doppler_fir_taps(double f_doppler);
// deterministic autocorrelation of that generator at an integer lag
double doppler_autocorrelation(const std::vector<double>& taps, std::size_t lag);

// (F, alpha = 1 - 2F)
std::pair<double, double> doppler_alpha(const DopplerConfig& cfg);

// Windowed linear MMSE filtering / one-step prediction from noisy pilots
// s_tau = sqrt(P gamma) h_tau + nu_tau. Weights are real (the process
// autocorrelation is real and even); solved once per (F, P gamma).
class WienerFilter {
 public:
  static constexpr std::size_t kWindow = 64;

  WienerFilter(const std::vector<double>& autocorr, double pilot_snr);

  // inputs: normalized observations y = h + nu/sqrt(P gamma), oldest first
  // estimate of h_t from y_{t-W+1..t} (span length kWindow, newest = h_t slot)
  cplx estimate(const cplx* y_window) const;
  // prediction of h_t from y_{t-W..t-1}
  cplx predict(const cplx* y_window) const;

  double pilot_noise() const { return pilot_noise_; }
  // E|estimate - prediction|^2 per entry, in closed form
  double mismatch_variance() const { return mismatch_var_; }

 private:
  std::vector<double> w_est_, w_pred_;
  double pilot_noise_ = 0.0;
  double mismatch_var_ = 0.0;
};

struct TrainPredictResult {
  std::size_t first_slot = 0;            // first slot with both outputs
  std::vector<CVec> h_filtered;          // \tilde h_t, t >= first_slot
  std::vector<CVec> h_predicted;         // \hat h_t from pilots up to t-1
  std::vector<double> est_err2;          // ||h_t - \tilde h_t||^2
  std::vector<double> pred_err2;         // ||h_t - \hat h_t||^2
  double mismatch_var = 0.0;             // filter-algebra E|~h - ^h|^2 per entry
};

// Pilot-based training over a given state sequence (h row). Never aborts on
// conditioning: the normal equations carry a small diagonal loading.
TrainPredictResult doppler_train_and_predict(const DopplerConfig& cfg, double p,
                                             const std::vector<ChannelState>& states,
                                             Rng& rng);

// Draws fixed-length stationary windows of the band-limited scalar process
// with the FIR generator's exact autocovariance (Cholesky factor cached).
class DopplerWindowSampler {
 public:
  DopplerWindowSampler(double f_doppler, std::size_t window_len);
  std::vector<cplx> sample(Rng& rng) const;
  std::size_t window_len() const { return len_; }
  const std::vector<double>& autocorr() const { return autocorr_; }

 private:
  std::size_t len_;
  std::vector<double> autocorr_;
  std::vector<double> chol_;  // lower triangular, row-major len_ x len_
};

}  // namespace misobc
