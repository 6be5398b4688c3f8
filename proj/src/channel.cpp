#include "misobc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace misobc {

namespace {

constexpr std::size_t kFirTaps = 1025;   // odd, linear phase
constexpr double kKaiserBeta = 10.0;     // ~99 dB stopband
constexpr double kDiagLoading = 1e-9;    // normal-equation conditioning
constexpr double kCholJitter = 1e-12;    // band-limited covariances are
                                         // numerically rank deficient

double bessel_i0(double x) {
  // power series; converges fast for the argument range used here
  double sum = 1.0, term = 1.0;
  const double q = 0.25 * x * x;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Cholesky factor of a dense SPD matrix, row-major lower triangle.
std::vector<double> cholesky_lower(std::vector<double> a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      if (i == j) {
        if (s <= 0.0)
          throw std::runtime_error("cholesky: matrix not positive definite");
        a[i * n + j] = std::sqrt(s);
      } else {
        a[i * n + j] = s / a[j * n + j];
      }
    }
    for (std::size_t j = i + 1; j < n; ++j) a[i * n + j] = 0.0;
  }
  return a;
}

// solve (L L^T) x = b given the lower factor
std::vector<double> cholesky_solve(const std::vector<double>& l, std::size_t n,
                                   std::vector<double> b) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * b[k];
    b[i] = s / l[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l[k * n + ii] * b[k];
    b[ii] = s / l[ii * n + ii];
  }
  return b;
}

std::vector<double> toeplitz_from(const std::vector<double>& r, std::size_t n,
                                  double diag_add) {
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t lag = i > j ? i - j : j - i;
      a[i * n + j] = lag < r.size() ? r[lag] : 0.0;
      if (i == j) a[i * n + j] += diag_add;
    }
  return a;
}

std::vector<double> autocorr_sequence(const std::vector<double>& taps,
                                      std::size_t max_lag) {
  std::vector<double> r(max_lag + 1);
  for (std::size_t lag = 0; lag <= max_lag; ++lag)
    r[lag] = doppler_autocorrelation(taps, lag);
  return r;
}

}  // namespace

double DopplerConfig::max_doppler() const {
  if (f_override) return *f_override;
  if (!(c > 0.0) || !(tf > 0.0) || !(fc > 0.0) || v < 0.0)
    throw std::domain_error("doppler: v >= 0 and fc, tf, c > 0 required");
  return v * fc * tf / c;
}

ChannelState sample_iid_state(std::size_t m, Rng& rng) {
  if (m < 2) throw std::invalid_argument("sample_iid_state: need m >= 2");
  ChannelState st;
  st.s = CMat(2, m);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < m; ++c) st.s(r, c) = rng.cgauss();
  return st;
}

CsitView make_csit(const ChannelState& state, double alpha_p, double p,
                   Rng& rng) {
  if (!(p > 1.0)) throw std::domain_error("make_csit: p must be > 1");
  if (!(alpha_p >= 0.0)) throw std::domain_error("make_csit: alpha_p must be >= 0");
  const double s2 = std::min(1.0, std::pow(p, -alpha_p));
  // Conditional sampling of the estimate given the true state reproduces the
  // joint law of the MMSE decomposition: h_hat | h ~ CN((1-s2) h, s2 (1-s2) I),
  // so h = h_hat + delta holds exactly per draw with the stated covariances
  // and zero cross-covariance.
  const double mixing = std::sqrt(std::max(s2 * (1.0 - s2), 0.0));
  const std::size_t m = state.antennas();
  CsitView view;
  view.truth = state;
  view.sigma2 = s2;
  view.alpha_p = alpha_p;
  view.h_hat.resize(m);
  view.g_hat.resize(m);
  for (std::size_t j = 0; j < m; ++j)
    view.h_hat[j] = (1.0 - s2) * state.s(0, j) + mixing * rng.cgauss();
  for (std::size_t j = 0; j < m; ++j)
    view.g_hat[j] = (1.0 - s2) * state.s(1, j) + mixing * rng.cgauss();
  return view;
}

std::vector<double> doppler_fir_taps(double f_doppler) {
  if (!(f_doppler > 0.0 && f_doppler < 0.5))
    throw std::domain_error("doppler_fir_taps: need 0 < F < 1/2");
  const std::size_t n = kFirTaps;
  // Place the stopband edge at F so the generated spectrum stays inside
  // [-F, F]: cutoff = F - (transition width)/2, floored for very small F.
  const double atten_db = kKaiserBeta / 0.1102 + 8.7;
  const double trans = (atten_db - 7.95) / (14.36 * static_cast<double>(n));
  const double fc = std::max(f_doppler - 0.5 * trans, 0.5 * f_doppler);
  const double mid = 0.5 * static_cast<double>(n - 1);
  const double i0b = bessel_i0(kKaiserBeta);
  std::vector<double> taps(n);
  double energy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) - mid;
    const double win_arg = 2.0 * static_cast<double>(k) / static_cast<double>(n - 1) - 1.0;
    const double win = bessel_i0(kKaiserBeta * std::sqrt(std::max(0.0, 1.0 - win_arg * win_arg))) / i0b;
    taps[k] = 2.0 * fc * sinc(2.0 * fc * t) * win;
    energy += taps[k] * taps[k];
  }
  const double scale = 1.0 / std::sqrt(energy);  // unit output variance
  for (double& t : taps) t *= scale;
  return taps;
}

double doppler_autocorrelation(const std::vector<double>& taps, std::size_t lag) {
  if (lag >= taps.size()) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k + lag < taps.size(); ++k) s += taps[k] * taps[k + lag];
  return s;
}

std::vector<ChannelState> sample_doppler_process(const DopplerConfig& cfg,
                                                 std::size_t m, Rng& rng) {
  if (m < 2) throw std::invalid_argument("sample_doppler_process: need m >= 2");
  const double f = cfg.max_doppler();
  if (!(f < 0.5)) throw std::domain_error("sample_doppler_process: need F < 1/2");
  const std::size_t len = cfg.length;
  std::vector<ChannelState> states(len);
  for (std::size_t t = 0; t < len; ++t) {
    states[t].s = CMat(2, m);
    states[t].t = static_cast<int>(t) + 1;
  }
  if (f <= 1e-12) {
    // static channel
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < m; ++c) {
        const cplx x = rng.cgauss();
        for (std::size_t t = 0; t < len; ++t) states[t].s(r, c) = x;
      }
    return states;
  }
  const std::vector<double> taps = doppler_fir_taps(f);
  const std::size_t n = taps.size();
  std::vector<cplx> in(len + n - 1);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < m; ++c) {
      for (cplx& x : in) x = rng.cgauss();
      // every output uses a full tap window, so the sequence is stationary
      // from the first sample
      for (std::size_t t = 0; t < len; ++t) {
        cplx acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += taps[k] * in[t + n - 1 - k];
        states[t].s(r, c) = acc;
      }
    }
  return states;
}

std::pair<double, double> doppler_alpha(const DopplerConfig& cfg) {
  const double f = cfg.max_doppler();
  if (!(f < 0.5)) throw std::domain_error("doppler_alpha: need F < 1/2");
  return {f, 1.0 - 2.0 * f};
}

WienerFilter::WienerFilter(const std::vector<double>& autocorr,
                           double pilot_snr) {
  if (!(pilot_snr > 0.0))
    throw std::domain_error("WienerFilter: pilot SNR must be > 0");
  if (autocorr.size() < kWindow + 1)
    throw std::invalid_argument("WienerFilter: need autocorrelation to lag W");
  const std::size_t w = kWindow;
  pilot_noise_ = 1.0 / pilot_snr;
  const std::vector<double> l = cholesky_lower(
      toeplitz_from(autocorr, w, pilot_noise_ + kDiagLoading), w);
  std::vector<double> c_est(w), c_pred(w);
  for (std::size_t i = 0; i < w; ++i) {
    c_est[i] = autocorr[w - 1 - i];  // target h_t, obs t-W+1..t
    c_pred[i] = autocorr[w - i];     // target h_t, obs t-W..t-1
  }
  w_est_ = cholesky_solve(l, w, c_est);
  w_pred_ = cholesky_solve(l, w, c_pred);

  // closed-form E|estimate - prediction|^2 over the union window of W+1
  // observations: v^T (R + n I) v with the combined weight vector
  std::vector<double> v(w + 1, 0.0);
  for (std::size_t i = 0; i < w; ++i) {
    v[i + 1] += w_est_[i];
    v[i] -= w_pred_[i];
  }
  const std::vector<double> big = toeplitz_from(autocorr, w + 1, pilot_noise_);
  double acc = 0.0;
  for (std::size_t i = 0; i <= w; ++i)
    for (std::size_t j = 0; j <= w; ++j) acc += v[i] * big[i * (w + 1) + j] * v[j];
  mismatch_var_ = std::max(acc, 1e-300);
}

cplx WienerFilter::estimate(const cplx* y_window) const {
  cplx s = 0.0;
  for (std::size_t i = 0; i < kWindow; ++i) s += w_est_[i] * y_window[i];
  return s;
}

cplx WienerFilter::predict(const cplx* y_window) const {
  cplx s = 0.0;
  for (std::size_t i = 0; i < kWindow; ++i) s += w_pred_[i] * y_window[i];
  return s;
}

TrainPredictResult doppler_train_and_predict(const DopplerConfig& cfg, double p,
                                             const std::vector<ChannelState>& states,
                                             Rng& rng) {
  if (!(p > 1.0)) throw std::domain_error("doppler_train_and_predict: p must be > 1");
  if (!(cfg.gamma >= 1.0))
    throw std::domain_error("doppler_train_and_predict: gamma must be >= 1");
  const std::size_t w = WienerFilter::kWindow;
  if (states.size() < w + 2)
    throw std::invalid_argument("doppler_train_and_predict: sequence shorter than window");
  const double f = cfg.max_doppler();
  const std::size_t m = states[0].antennas();
  const std::size_t len = states.size();

  std::vector<double> r;
  if (f <= 1e-12) {
    r.assign(w + 1, 1.0);  // static channel: flat autocorrelation
  } else {
    r = autocorr_sequence(doppler_fir_taps(f), w);
  }
  const WienerFilter filter(r, p * cfg.gamma);
  const double pilot_scale = 1.0 / std::sqrt(p * cfg.gamma);

  // normalized pilot observations y = h + nu / sqrt(P gamma), per entry
  std::vector<std::vector<cplx>> y(m, std::vector<cplx>(len));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t t = 0; t < len; ++t)
      y[j][t] = states[t].s(0, j) + pilot_scale * rng.cgauss();

  TrainPredictResult out;
  out.first_slot = w;
  out.mismatch_var = filter.mismatch_variance();
  for (std::size_t t = w; t < len; ++t) {
    CVec est(m), pred(m);
    double e2 = 0.0, p2 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      est[j] = filter.estimate(&y[j][t - w + 1]);
      pred[j] = filter.predict(&y[j][t - w]);
      e2 += std::norm(states[t].s(0, j) - est[j]);
      p2 += std::norm(states[t].s(0, j) - pred[j]);
    }
    out.h_filtered.push_back(std::move(est));
    out.h_predicted.push_back(std::move(pred));
    out.est_err2.push_back(e2);
    out.pred_err2.push_back(p2);
  }
  return out;
}

DopplerWindowSampler::DopplerWindowSampler(double f_doppler,
                                           std::size_t window_len)
    : len_(window_len) {
  if (len_ < 1) throw std::invalid_argument("DopplerWindowSampler: empty window");
  if (f_doppler <= 1e-12) {
    autocorr_.assign(len_, 1.0);
  } else {
    autocorr_ = autocorr_sequence(doppler_fir_taps(f_doppler), len_ - 1);
  }
  chol_ = cholesky_lower(toeplitz_from(autocorr_, len_, kCholJitter), len_);
}

std::vector<cplx> DopplerWindowSampler::sample(Rng& rng) const {
  std::vector<cplx> z(len_);
  for (cplx& x : z) x = rng.cgauss();
  std::vector<cplx> out(len_);
  for (std::size_t i = 0; i < len_; ++i) {
    cplx s = 0.0;
    for (std::size_t j = 0; j <= i; ++j) s += chol_[i * len_ + j] * z[j];
    out[i] = s;
  }
  return out;
}

}  // namespace misobc
