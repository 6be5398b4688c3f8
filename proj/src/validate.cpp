#include "misobc/validate.hpp"

#include <cmath>
#include <sstream>

#include "misobc/quantizer.hpp"
#include "misobc/receiver.hpp"

namespace misobc {

namespace {

struct Suite {
  std::vector<CheckResult> results;

  void add(const std::string& name, bool pass, const std::string& detail) {
    results.push_back({name, pass, detail});
  }
};

std::string num(double v) { return fmt_g9(v); }

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(' ');
  return b == std::string::npos ? "" : s.substr(b);
}

double slope_of(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

void check_precoders(Suite& suite, Rng& rng) {
  double worst = 0.0;
  for (int it = 0; it < 1000; ++it) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.next_u64() % 3);
    CVec g(m), h(m);
    for (std::size_t j = 0; j < m; ++j) {
      g[j] = rng.cgauss();
      h[j] = rng.cgauss();
    }
    const PrecoderPair pp = build_precoders(g, h);
    // orthonormality
    const CMat wg = mul(hermitian(pp.w), pp.w);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        const cplx want = i == j ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
        worst = std::max(worst, std::abs(wg(i, j) - want));
      }
    // bilinear nulling and alignment
    worst = std::max(worst, std::abs(dotu(g, pp.w.col(0))) / vnorm(g));
    const CVec w2 = pp.w.col(1);
    const CVec gc = conj_vec(g);
    const double par = norm2(w2) * norm2(gc) - std::norm(vdot(w2, gc));
    worst = std::max(worst, std::abs(par) / norm2(gc));
  }
  suite.add("precoder-orthonormality", worst < 1e-12, "max deviation " + num(worst));
}

void check_det_identity(Suite& suite, Rng& rng) {
  double worst = 0.0;
  for (int it = 0; it < 10000; ++it) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.next_u64() % 3);
    CMat a(m, 2);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < 2; ++c) a(r, c) = rng.cgauss();
    const auto [lhs, rhs] = det_gram_identity(a);
    worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
  }
  suite.add("det-gram-identity", worst < 1e-10, "max rel error " + num(worst));
}

void check_eig2(Suite& suite, Rng& rng) {
  double worst = 0.0;
  for (int it = 0; it < 10000; ++it) {
    CMat b(2, 2);
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c) b(r, c) = rng.cgauss();
    const CMat h = mul(b, hermitian(b));
    const auto [mu1, mu2] = eig2(h);
    const double tr = h(0, 0).real() + h(1, 1).real();
    const double det = h(0, 0).real() * h(1, 1).real() - std::norm(h(0, 1));
    worst = std::max(worst, std::abs(mu1 + mu2 - tr) / (1.0 + std::abs(tr)));
    worst = std::max(worst, std::abs(mu1 * mu2 - det) / (1.0 + std::abs(det)));
  }
  suite.add("eig2-trace-det", worst < 1e-10, "max rel error " + num(worst));
}

void check_logdet_monotone(Suite& suite, Rng& rng) {
  bool ok = true;
  for (int it = 0; it < 1000 && ok; ++it) {
    CMat f(2, 2);
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c) f(r, c) = rng.cgauss();
    const double l1 = 50.0 * rng.uniform();
    const double l2 = 50.0 * rng.uniform();
    const double bump = 10.0 * rng.uniform();
    const double base = logdet_capacity(f, {l1, l2}, {1.0, 1.0});
    ok = ok && logdet_capacity(f, {l1 + bump, l2}, {1.0, 1.0}) >= base - 1e-12;
    ok = ok && logdet_capacity(f, {l1, l2 + bump}, {1.0, 1.0}) >= base - 1e-12;
  }
  suite.add("logdet-monotone-in-power", ok, ok ? "" : "monotonicity violated");
}

void check_csit_moments(Suite& suite, Rng& rng) {
  const std::size_t n = 100000;
  const std::size_t m = 2;
  const double p = 1e4, alpha = 0.5;
  const double s2 = std::pow(p, -alpha);
  double split_err = 0.0, dv = 0.0, hv = 0.0;
  cplx cross = 0.0;
  for (std::size_t it = 0; it < n; ++it) {
    const ChannelState st = sample_iid_state(m, rng);
    const CsitView cv = make_csit(st, alpha, p, rng);
    for (std::size_t j = 0; j < m; ++j) {
      const cplx delta = st.s(0, j) - cv.h_hat[j];
      split_err = std::max(split_err,
                           std::abs(st.s(0, j) - (cv.h_hat[j] + delta)));
      dv += std::norm(delta);
      hv += std::norm(cv.h_hat[j]);
      cross += cv.h_hat[j] * std::conj(delta);
    }
  }
  const double nd = static_cast<double>(n * m);
  dv /= nd;
  hv /= nd;
  const double cr = std::abs(cross) / nd;
  const bool ok = split_err < 1e-14 && std::abs(dv - s2) < 0.1 * s2 &&
                  std::abs(hv - (1.0 - s2)) < 0.02 && cr < 0.02;
  std::ostringstream det;
  det << "E|delta|^2 " << num(dv) << " (want " << num(s2) << "), E|h_hat|^2 "
      << num(hv) << ", |cross| " << num(cr);
  suite.add("csit-decomposition", ok, det.str());
}

void check_quantizer(Suite& suite, Rng& rng) {
  const QuantizerSpec spec{10.0};
  double worst = 0.0, mean_sq = 0.0;
  const std::size_t n = 1000000;
  for (std::size_t it = 0; it < n; ++it) {
    const cplx eta = {spec.eta_bar * (2.0 * rng.uniform() - 1.0),
                      spec.eta_bar * (2.0 * rng.uniform() - 1.0)};
    const QuantResult q = quantize(eta, spec);
    worst = std::max({worst, std::abs(q.xi.real()), std::abs(q.xi.imag())});
    mean_sq += std::norm(q.xi);
  }
  mean_sq /= static_cast<double>(n);
  bool codec_ok = true;
  for (int it = 0; it < 100000 && codec_ok; ++it) {
    const double span = 2.0 * std::ceil(spec.eta_bar);
    const cplx e1 = {std::floor(span * rng.uniform() - span / 2.0) + 0.5,
                     std::floor(span * rng.uniform() - span / 2.0) + 0.5};
    const cplx e2 = {std::floor(span * rng.uniform() - span / 2.0) + 0.5,
                     std::floor(span * rng.uniform() - span / 2.0) + 0.5};
    const QuantizedInterference q = quantize_pair(e1, e2, spec);
    const QuantizedInterference back = decode_indices(encode_indices(q, spec), spec);
    codec_ok = back.indices == q.indices && back.eta_hat1 == q.eta_hat1 &&
               back.eta_hat2 == q.eta_hat2;
  }
  const bool ok = worst <= 0.5 + 1e-12 && std::abs(mean_sq - 1.0 / 6.0) < 0.01 &&
                  codec_ok;
  suite.add("quantizer-law", ok,
            "max per-dim error " + num(worst) + ", mean |xi|^2 " + num(mean_sq) +
                (codec_ok ? "" : ", codec round-trip failed"));
}

void check_power_accounting(Suite& suite, Rng& rng) {
  const double p = 1000.0;
  const PowerAllocation alloc = allocate_power(p, 0.5);
  const AnalysisParams params;
  double acc = 0.0;
  const std::size_t n = 100000;
  for (std::size_t it = 0; it < n; ++it) {
    const ChannelState st = sample_iid_state(2, rng);
    const CsitView cv = make_csit(st, 0.5, p, rng);
    const std::array<cplx, 2> u = {std::sqrt(alloc.p1) * rng.cgauss(),
                                   std::sqrt(alloc.p2) * rng.cgauss()};
    const std::array<cplx, 2> v = {std::sqrt(alloc.p1) * rng.cgauss(),
                                   std::sqrt(alloc.p2) * rng.cgauss()};
    acc += norm2(hybrid_phase1(cv, alloc, u, v, params).x1);
  }
  acc /= static_cast<double>(n);
  const double want = 2.0 * (alloc.p1 + alloc.p2);
  const bool ok = std::abs(acc - want) < 0.02 * want && want <= p + 1e-9;
  suite.add("hybrid-power-accounting", ok,
            "E||x1||^2 " + num(acc) + " vs 2(p1+p2) " + num(want));
}

void check_eta_decomposition(Suite& suite, Rng& rng) {
  double worst = 0.0;
  const double p = 1e4;
  const PowerAllocation alloc = allocate_power(p, 0.5);
  for (int it = 0; it < 10000; ++it) {
    const ChannelState st = sample_iid_state(2, rng);
    const CsitView cv = make_csit(st, 0.5, p, rng);
    const std::array<cplx, 2> u = {std::sqrt(alloc.p1) * rng.cgauss(),
                                   std::sqrt(alloc.p2) * rng.cgauss()};
    const std::array<cplx, 2> v = {std::sqrt(alloc.p1) * rng.cgauss(),
                                   std::sqrt(alloc.p2) * rng.cgauss()};
    const HybridFrame fr = hybrid_phase1(cv, alloc, u, v, {});
    CVec delta(2);
    for (std::size_t j = 0; j < 2; ++j) delta[j] = st.s(0, j) - cv.h_hat[j];
    const cplx direct = fr.eta1;
    const cplx expanded = dotu(delta, fr.precoders.q.col(0)) * v[0] +
                          dotu(st.h(), fr.precoders.q.col(1)) * v[1];
    worst = std::max(worst, std::abs(direct - expanded) /
                                (1.0 + std::abs(direct)));
  }
  suite.add("eta1-decomposition", worst < 1e-12, "max rel error " + num(worst));
}

void check_multicast_dof(Suite& suite, Rng& rng) {
  std::vector<double> x, y;
  for (double db = 30.0; db <= 60.0 + 1e-9; db += 5.0) {
    const double p = std::pow(10.0, db / 10.0);
    double acc = 0.0;
    const std::size_t n = 10000;
    for (std::size_t it = 0; it < n; ++it) {
      const ChannelState st = sample_iid_state(2, rng);
      const double gain = std::min(std::norm(st.s(0, 0)), std::norm(st.s(1, 0)));
      acc += 0.99 * std::log2(1.0 + p * gain);
    }
    x.push_back(db * 0.1 * std::log2(10.0));
    y.push_back(acc / static_cast<double>(n));
  }
  const double slope = slope_of(x, y);
  suite.add("multicast-dof-slope", std::abs(slope - 1.0) < 0.05,
            "slope " + num(slope));
}

void check_range_bound(Suite& suite, const SimConfig& base) {
  SimConfig cfg = base;
  cfg.alpha = 0.5;
  cfg.use_doppler = false;
  cfg.schemes = {Scheme::kHybrid};
  cfg.params.zeta = 0.2;
  cfg.params.eps = 0.05;
  cfg.trials_per_point = 10000;
  cfg.p_grid_db = {30, 40, 50, 60};
  const auto samples = run_sweep(cfg);
  bool ok = true;
  std::ostringstream det;
  for (const RateSample& s : samples) {
    const double p = std::pow(10.0, s.p_db / 10.0);
    const double bound = range_error_bound(p, cfg.m, cfg.alpha, s.beta_p,
                                           cfg.params.zeta, cfg.params.eps);
    det << " " << num(s.freq_range_err) << "<=" << num(bound);
    ok = ok && s.freq_range_err <= bound;
  }
  suite.add("range-error-bound-dominance", ok, trimmed(det.str()));
}

void check_mat_subspaces(Suite& suite, Rng& rng) {
  bool ok = true;
  for (int it = 0; it < 1000 && ok; ++it) {
    const std::array<ChannelState, 3> st = {sample_iid_state(2, rng),
                                            sample_iid_state(2, rng),
                                            sample_iid_state(2, rng)};
    const CVec h1 = st[0].h(), g1 = st[0].g(), h2 = st[1].h();
    const cplx h21 = st[1].s(0, 0), h31 = st[2].s(0, 0);
    const CVec zero(2, cplx{0.0, 0.0});
    const auto scl = [](const CVec& v, cplx c) {
      CVec out(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = c * v[i];
      return out;
    };
    // original: signal rows (h1, 0, h31 g1), interference rows (0, h2, h31 h2)
    ok = ok && numeric_row_rank(CMat::from_rows({h1, zero, scl(g1, h31)}), 1e-8) == 2;
    ok = ok && numeric_row_rank(CMat::from_rows({zero, h2, scl(h2, h31)}), 1e-8) == 1;
    // variant: signal rows (h1, 0, h31 g1), interference rows (h1, h21 h1, 0)
    ok = ok && numeric_row_rank(CMat::from_rows({h1, scl(h1, h21), zero}), 1e-8) == 1;
  }
  suite.add("mat-subspace-ranks", ok, ok ? "" : "rank condition violated");
}

void check_rate_normalization(Suite& suite, Rng& rng) {
  const double p = 1e4;
  const PowerAllocation alloc = allocate_power(p, 0.5);
  const ChannelState st = sample_iid_state(2, rng);
  const CsitView cv = make_csit(st, 0.5, p, rng);
  const std::array<cplx, 2> u = {std::sqrt(alloc.p1) * rng.cgauss(),
                                 std::sqrt(alloc.p2) * rng.cgauss()};
  const HybridFrame fr = hybrid_phase1(cv, alloc, u, u, {});
  EquivMimo em;
  em.user = 1;
  em.f = CMat::identity(2);
  em.obs = {cplx{0, 0}, cplx{0, 0}};
  em.noise_second_moment = {1.0, 1.0};
  bool ok = true;
  const double base = effective_rate(fr, em, 0.0);
  for (double kappa : {0.5, 1.0, 2.0, 3.5})
    ok = ok && std::abs(effective_rate(fr, em, kappa) * (1.0 + kappa) - base) < 1e-12;
  suite.add("rate-normalization", ok, ok ? "" : "(1+kappa) scaling violated");
}

void check_outage_trend(Suite& suite, Rng& rng) {
  std::vector<double> probs;
  for (double db : {30.0, 45.0, 60.0}) {
    const double p = std::pow(10.0, db / 10.0);
    const PowerAllocation alloc = allocate_power(p, 0.5);
    const double r = 1.0 + alloc.beta_p - 0.2;
    probs.push_back(outage_probability(2000, r, 0.1, alloc, 0.5, 2, rng));
  }
  const bool ok = probs.back() <= probs.front() && probs.back() < 0.5;
  suite.add("outage-trend", ok,
            num(probs[0]) + " -> " + num(probs[1]) + " -> " + num(probs[2]));
}

void check_residual_trend(Suite& suite, Rng& rng) {
  // P[|dtilde^T x|^2 > P^0.1] must shrink with P (prediction-driven model)
  std::vector<double> fracs;
  for (double db : {30.0, 60.0}) {
    const double p = std::pow(10.0, db / 10.0);
    DopplerWindowSampler sampler(0.1, WienerFilter::kWindow + 1);
    WienerFilter filter(sampler.autocorr(), p);
    const double pilot_scale = 1.0 / std::sqrt(p);
    const double thresh = std::pow(p, 0.1);
    std::size_t hits = 0;
    const std::size_t n = 2000;
    for (std::size_t it = 0; it < n; ++it) {
      const std::size_t m = 2;
      CVec dh(m);
      CVec x(m);
      for (std::size_t j = 0; j < m; ++j) {
        const std::vector<cplx> win = sampler.sample(rng);
        std::vector<cplx> y(win.size());
        for (std::size_t i = 0; i < win.size(); ++i)
          y[i] = win[i] + pilot_scale * rng.cgauss();
        dh[j] = win[WienerFilter::kWindow] - filter.estimate(&y[1]);
        x[j] = std::sqrt(p / 2.0) * rng.cgauss();
      }
      if (std::norm(dotu(dh, x)) > thresh) ++hits;
    }
    fracs.push_back(static_cast<double>(hits) / static_cast<double>(n));
  }
  suite.add("residual-bounded-trend", fracs[1] <= fracs[0],
            num(fracs[0]) + " -> " + num(fracs[1]));
}

void check_determinism(Suite& suite, const SimConfig& base) {
  SimConfig cfg = base;
  cfg.alpha = 0.5;
  cfg.use_doppler = false;
  cfg.schemes = {Scheme::kHybrid, Scheme::kZf};
  cfg.trials_per_point = 200;
  cfg.p_grid_db = {30, 40, 50};
  cfg.threads = 1;
  const auto a = run_sweep(cfg);
  cfg.threads = 4;
  const auto b = run_sweep(cfg);
  bool ok = a.size() == b.size();
  for (std::size_t i = 0; ok && i < a.size(); ++i)
    ok = a[i].rate == b[i].rate && a[i].kappa == b[i].kappa &&
         a[i].freq_range_err == b[i].freq_range_err;
  suite.add("serial-parallel-determinism", ok,
            ok ? "" : "parallel run diverged from serial");
}

}  // namespace

std::vector<CheckResult> run_validation(const SimConfig& cfg) {
  Suite suite;
  Rng rng(mix64(cfg.seed ^ 0x76616c6964617465ULL));
  check_precoders(suite, rng);
  check_det_identity(suite, rng);
  check_eig2(suite, rng);
  check_logdet_monotone(suite, rng);
  check_csit_moments(suite, rng);
  check_quantizer(suite, rng);
  check_power_accounting(suite, rng);
  check_eta_decomposition(suite, rng);
  check_mat_subspaces(suite, rng);
  check_rate_normalization(suite, rng);
  check_multicast_dof(suite, rng);
  check_outage_trend(suite, rng);
  check_residual_trend(suite, rng);
  check_range_bound(suite, cfg);
  check_determinism(suite, cfg);
  return suite.results;
}

}  // namespace misobc
