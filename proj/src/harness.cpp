#include "misobc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "misobc/errors.hpp"
#include "misobc/quantizer.hpp"
#include "misobc/receiver.hpp"

namespace misobc {

namespace {

double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
double db_to_log2p(double db) { return db * 0.1 * std::log2(10.0); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw FormatError("config: bad numeric value for '" + key + "': " + s);
  }
}

std::uint64_t parse_u64(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw FormatError("config: bad integer value for '" + key + "': " + s);
  }
}

std::vector<double> parse_pgrid(const std::string& s) {
  std::vector<double> grid;
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw FormatError("config: pgrid wants start:step:stop");
    const double start = parse_double(parts[0], "pgrid");
    const double step = parse_double(parts[1], "pgrid");
    const double stop = parse_double(parts[2], "pgrid");
    if (!(step > 0.0)) throw FormatError("config: pgrid step must be > 0");
    for (double v = start; v <= stop + 1e-9; v += step) grid.push_back(v);
  } else {
    for (const auto& p : split(s, ',')) grid.push_back(parse_double(p, "pgrid"));
  }
  return grid;
}

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt_g17(v[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// per-trial records
// ---------------------------------------------------------------------------

struct TrialOut {
  CMat f1, f2;  // equivalent 2x2 channels (hybrid only)
  double kappa = 0.0;
  double xi1_sq = 0.0, xi2_sq = 0.0;
  bool inr1 = true, inr2 = true;
  bool range_ok = true, mc_ok = true, dec_ok = true;
  double sig = 0.0;  // conditional interference power, user average
  double resid1_sq = 0.0, resid2_sq = 0.0;
  double rate = 0.0;  // direct rate (zf / mat)
};

// precomputed per (grid point, scheme) state for prediction-driven runs
struct DopplerPoint {
  double alpha_eff = 0.0;
  double sigma2_mm = 1.0;
  double pilot_scale = 1.0;
  std::optional<DopplerWindowSampler> sampler;
  std::optional<WienerFilter> filter;
};

DopplerPoint make_doppler_point(const SimConfig& cfg, double p) {
  const double f = cfg.doppler.max_doppler();
  DopplerPoint dp;
  dp.sampler.emplace(f, WienerFilter::kWindow + 1);
  dp.filter.emplace(dp.sampler->autocorr(), p * cfg.doppler.gamma);
  dp.pilot_scale = 1.0 / std::sqrt(p * cfg.doppler.gamma);
  dp.sigma2_mm = dp.filter->mismatch_variance();
  dp.alpha_eff = std::max(-std::log(dp.sigma2_mm) / std::log(p), 0.0);
  return dp;
}

struct CsitDraw {
  CsitView csit;
  CVec h_true, g_true;  // channel the air actually applies
};

CsitDraw draw_csit(const SimConfig& cfg, double p, const DopplerPoint* dp,
                   Rng& rng) {
  CsitDraw d;
  if (!dp) {
    const ChannelState st = sample_iid_state(cfg.m, rng);
    d.csit = make_csit(st, cfg.alpha, p, rng);
    d.h_true = st.h();
    d.g_true = st.g();
    return d;
  }
  // Prediction-driven knowledge: receivers work from pilot estimates, the
  // transmitter precodes from one-step predictions.
  const std::size_t w = WienerFilter::kWindow;
  const std::size_t m = cfg.m;
  CVec h_est(m), g_est(m), h_pred(m), g_pred(m);
  d.h_true.resize(m);
  d.g_true.resize(m);
  for (std::size_t row = 0; row < 2; ++row)
    for (std::size_t j = 0; j < m; ++j) {
      const std::vector<cplx> win = dp->sampler->sample(rng);
      std::vector<cplx> y(win.size());
      for (std::size_t i = 0; i < win.size(); ++i)
        y[i] = win[i] + dp->pilot_scale * rng.cgauss();
      const cplx est = dp->filter->estimate(&y[1]);
      const cplx pred = dp->filter->predict(&y[0]);
      if (row == 0) {
        d.h_true[j] = win[w];
        h_est[j] = est;
        h_pred[j] = pred;
      } else {
        d.g_true[j] = win[w];
        g_est[j] = est;
        g_pred[j] = pred;
      }
    }
  d.csit.truth.s = CMat::from_rows({h_est, g_est});
  d.csit.h_hat = std::move(h_pred);
  d.csit.g_hat = std::move(g_pred);
  d.csit.sigma2 = dp->sigma2_mm;
  d.csit.alpha_p = dp->alpha_eff;
  return d;
}

TrialOut hybrid_trial(const SimConfig& cfg, double p, const DopplerPoint* dp,
                      Rng& rng) {
  const double alpha_p = dp ? dp->alpha_eff : cfg.alpha;
  const CsitDraw draw = draw_csit(cfg, p, dp, rng);
  const PowerAllocation alloc = allocate_power(p, alpha_p);
  const std::size_t cb_size = std::size_t{1} << cfg.dec_bits;
  const Codebook cb_u = make_codebook(cb_size, {alloc.p1, alloc.p2}, rng);
  const Codebook cb_v = make_codebook(cb_size, {alloc.p1, alloc.p2}, rng);
  const HybridFrame frame = hybrid_phase1(draw.csit, alloc, cb_u.entries[0],
                                          cb_v.entries[0], cfg.params);

  const cplx e1 = rng.cgauss();
  const cplx b1 = rng.cgauss();
  const cplx y1 = dotu(draw.h_true, frame.x1) + e1;
  const cplx z1 = dotu(draw.g_true, frame.x1) + b1;

  TrialOut out;
  if (dp) {
    // residual channel mismatch rides on the own observation (§-style
    // prediction-driven model); the receiver knows only the pilot estimate
    CVec dh(cfg.m), dg(cfg.m);
    for (std::size_t j = 0; j < cfg.m; ++j) {
      dh[j] = draw.h_true[j] - draw.csit.truth.s(0, j);
      dg[j] = draw.g_true[j] - draw.csit.truth.s(1, j);
    }
    out.resid1_sq = std::norm(dotu(dh, frame.x1));
    out.resid2_sq = std::norm(dotu(dg, frame.x1));
  }

  const QuantizerSpec qspec =
      QuantizerSpec::for_power(p, cfg.params.zeta, std::sqrt(draw.csit.sigma2));
  const QuantResult q1 = quantize(frame.eta1, qspec);
  const QuantResult q2 = quantize(frame.eta2, qspec);
  const QuantizedInterference qi = quantize_pair(frame.eta1, frame.eta2, qspec);
  out.inr1 = q1.in_range;
  out.inr2 = q2.in_range;
  out.range_ok = q1.in_range && q2.in_range;
  out.xi1_sq = std::norm(q1.xi);
  out.xi2_sq = std::norm(q2.xi);

  out.kappa = multicast_slots(p, alpha_p, cfg.params.zeta, cfg.params.delta);
  const std::size_t mc_len = static_cast<std::size_t>(std::ceil(out.kappa));
  std::vector<ChannelState> mc_states;
  mc_states.reserve(mc_len);
  for (std::size_t t = 0; t < mc_len; ++t)
    mc_states.push_back(sample_iid_state(cfg.m, rng));
  out.mc_ok = simulate_multicast(bit_budget(qspec), out.kappa, mc_states, p,
                                 cfg.params.delta);

  const EquivMimo em1 = assemble_equiv_mimo(frame, draw.csit.truth, y1, qi, 1);
  const EquivMimo em2 = assemble_equiv_mimo(frame, draw.csit.truth, z1, qi, 2);
  out.f1 = em1.f;
  out.f2 = em2.f;
  out.dec_ok = min_distance_decode(em1, cb_u) == 0 &&
               min_distance_decode(em2, cb_v) == 0;

  const auto [sig1, sig2] =
      interference_power(draw.csit, alloc, frame.precoders);
  out.sig = 0.5 * (sig1 + sig2);
  return out;
}

TrialOut zf_trial(const SimConfig& cfg, double p, const DopplerPoint* dp,
                  Rng& rng) {
  TrialOut out;
  const CsitDraw draw = draw_csit(cfg, p, dp, rng);
  if (!dp) {
    const ZfResult r = zf_baseline(draw.csit, p);
    out.rate = 0.5 * (r.rate1 + r.rate2);
    return out;
  }
  // prediction-driven ZF: beams from predictions, known channel is the
  // pilot estimate, residual mismatch enters each denominator
  const std::size_t m = cfg.m;
  const CVec g_dir = unit_aligned(draw.csit.g_hat);
  const CVec h_dir = unit_aligned(draw.csit.h_hat);
  const CVec w_u = zf_beam(draw.csit.h_hat, g_dir, 1);
  const CVec q_v = zf_beam(draw.csit.g_hat, h_dir, 1);
  const CVec h_est = draw.csit.truth.h();
  const CVec g_est = draw.csit.truth.g();
  CVec dh(m), dg(m);
  for (std::size_t j = 0; j < m; ++j) {
    dh[j] = draw.h_true[j] - h_est[j];
    dg[j] = draw.g_true[j] - g_est[j];
  }
  const double hp = 0.5 * p;
  const double res1 = hp * (std::norm(dotu(dh, w_u)) + std::norm(dotu(dh, q_v)));
  const double res2 = hp * (std::norm(dotu(dg, w_u)) + std::norm(dotu(dg, q_v)));
  const double sinr1 = std::norm(dotu(h_est, w_u)) * hp /
                       (1.0 + std::norm(dotu(h_est, q_v)) * hp + res1);
  const double sinr2 = std::norm(dotu(g_est, q_v)) * hp /
                       (1.0 + std::norm(dotu(g_est, w_u)) * hp + res2);
  out.rate = 0.5 * (std::log2(1.0 + sinr1) + std::log2(1.0 + sinr2));
  return out;
}

double safe_inv(double x) { return 1.0 / std::max(x, 1e-300); }

TrialOut mat_trial(const SimConfig& cfg, double p, bool variant, Rng& rng) {
  const std::size_t m = cfg.m;
  const std::array<ChannelState, 3> st = {sample_iid_state(m, rng),
                                          sample_iid_state(m, rng),
                                          sample_iid_state(m, rng)};
  const double lam = variant ? p / (2.0 * static_cast<double>(m))
                             : p / static_cast<double>(m);
  const double s = std::sqrt(lam);
  CVec u(m), v(m);
  for (std::size_t j = 0; j < m; ++j) {
    u[j] = s * rng.cgauss();
    v[j] = s * rng.cgauss();
  }
  const MatObservations obs = variant ? mat_variant(st, u, v, p, &rng)
                                      : mat_original(st, u, v, p, &rng);

  const double h21 = std::norm(st[1].s(0, 0)) * obs.scale2 * obs.scale2;
  const double h31 = std::norm(st[2].s(0, 0)) * obs.scale3 * obs.scale3;
  const double g21 = std::norm(st[1].s(1, 0)) * obs.scale2 * obs.scale2;
  const double g31 = std::norm(st[2].s(1, 0)) * obs.scale3 * obs.scale3;

  const auto gram = [lam](const CVec& a, const CVec& b) {
    CMat f = CMat::from_rows({a, b});
    CMat g = mul(f, hermitian(f));
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) g(i, j) *= lam;
    return g;
  };

  double r1 = 0.0, r2 = 0.0;
  if (!variant) {
    // user 1 sees (y1, y3/h31 - y2); user 2 sees (z3/g31 - z1, z2)
    r1 = logdet_psd2(gram(st[0].h(), st[0].g()), {1.0, 1.0 + safe_inv(h31)});
    r2 = logdet_psd2(gram(st[1].h(), st[1].g()), {1.0 + safe_inv(g31), 1.0});
  } else {
    // user 1: (y1 - y2/h21, y3/h31); user 2: (z1 - z3/g31, z2/g21)
    r1 = logdet_psd2(gram(st[0].h(), st[0].g()),
                     {1.0 + safe_inv(h21), safe_inv(h31)});
    r2 = logdet_psd2(gram(st[0].g(), st[0].h()),
                     {1.0 + safe_inv(g31), safe_inv(g21)});
  }
  TrialOut out;
  out.rate = (r1 + r2) / 6.0;  // per user over three slots
  return out;
}

RateSample fold_point(const SimConfig& cfg, double p_db, Scheme scheme,
                      const std::vector<TrialOut>& outs, const DopplerPoint* dp) {
  const double n = static_cast<double>(outs.size());
  RateSample sample;
  sample.p_db = p_db;
  sample.scheme = scheme;
  if (scheme != Scheme::kHybrid) {
    double acc = 0.0;
    for (const TrialOut& t : outs) acc += t.rate;
    sample.rate = acc / n;
    if (scheme != Scheme::kZf) sample.kappa = 2.0;
    return sample;
  }

  const double p = db_to_lin(p_db);
  const double alpha_p = dp ? dp->alpha_eff : cfg.alpha;
  const PowerAllocation alloc = allocate_power(p, alpha_p);

  // conditional quantization-noise moments, measured in range (the range
  // event is tallied separately as E_Delta)
  double e1 = 0.0, e2 = 0.0, er1 = 0.0, er2 = 0.0, sig = 0.0;
  std::size_t n1 = 0, n2 = 0, d_cnt = 0, mc_cnt = 0, dec_cnt = 0;
  for (const TrialOut& t : outs) {
    if (t.inr1) {
      e1 += t.xi1_sq;
      ++n1;
    }
    if (t.inr2) {
      e2 += t.xi2_sq;
      ++n2;
    }
    er1 += t.resid1_sq;
    er2 += t.resid2_sq;
    sig += t.sig;
    if (!t.range_ok) ++d_cnt;
    if (!t.mc_ok) ++mc_cnt;
    if (!t.dec_ok) ++dec_cnt;
  }
  e1 = n1 ? e1 / static_cast<double>(n1) : 1.0 / 6.0;
  e2 = n2 ? e2 / static_cast<double>(n2) : 1.0 / 6.0;
  er1 /= n;
  er2 /= n;

  double rate_acc = 0.0, kappa_acc = 0.0;
  for (const TrialOut& t : outs) {
    const double r1 = logdet_capacity(t.f1, {alloc.p1, alloc.p2},
                                      {1.0 + e1 + er1, e2});
    const double r2 = logdet_capacity(t.f2, {alloc.p1, alloc.p2},
                                      {e1, 1.0 + e2 + er2});
    rate_acc += 0.5 * (r1 + r2) / (1.0 + t.kappa);
    kappa_acc += t.kappa;
  }
  sample.rate = rate_acc / n;
  sample.kappa = kappa_acc / n;
  sample.beta_p = alloc.beta_p;
  sample.freq_range_err = static_cast<double>(d_cnt) / n;
  sample.freq_mc_err = static_cast<double>(mc_cnt) / n;
  sample.freq_mimo_err = static_cast<double>(dec_cnt) / n;
  sample.interference_power = sig / n;
  return sample;
}

}  // namespace

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kZf:
      return "zf";
    case Scheme::kMat:
      return "mat";
    case Scheme::kMatVariant:
      return "mat_variant";
    case Scheme::kHybrid:
      return "hybrid";
  }
  return "unknown";
}

std::optional<Scheme> scheme_from_name(const std::string& name) {
  if (name == "zf") return Scheme::kZf;
  if (name == "mat") return Scheme::kMat;
  if (name == "mat_variant") return Scheme::kMatVariant;
  if (name == "hybrid") return Scheme::kHybrid;
  return std::nullopt;
}

double SimConfig::effective_alpha() const {
  return use_doppler ? doppler_alpha(doppler).second : alpha;
}

void SimConfig::set(const std::string& key, const std::string& value) {
  if (key == "m") {
    m = static_cast<std::size_t>(parse_u64(value, key));
  } else if (key == "alpha") {
    alpha = parse_double(value, key);
    use_doppler = false;
  } else if (key == "doppler") {
    const auto parts = split(value, ',');
    if (parts.size() != 4)
      throw FormatError("config: doppler wants v,fc,tf,c");
    doppler.v = parse_double(parts[0], key);
    doppler.fc = parse_double(parts[1], key);
    doppler.tf = parse_double(parts[2], key);
    doppler.c = parse_double(parts[3], key);
    doppler.f_override.reset();
    use_doppler = true;
  } else if (key == "doppler_f") {
    doppler.f_override = parse_double(value, key);
    use_doppler = true;
  } else if (key == "gamma") {
    doppler.gamma = parse_double(value, key);
  } else if (key == "pgrid") {
    p_grid_db = parse_pgrid(value);
  } else if (key == "trials") {
    trials_per_point = static_cast<std::size_t>(parse_u64(value, key));
  } else if (key == "seed") {
    seed = parse_u64(value, key);
  } else if (key == "schemes") {
    schemes.clear();
    for (const auto& name : split(value, ',')) {
      if (name.empty()) continue;
      const auto s = scheme_from_name(name);
      if (!s) throw FormatError("config: unknown scheme '" + name + "'");
      schemes.push_back(*s);
    }
  } else if (key == "zeta") {
    params.zeta = parse_double(value, key);
  } else if (key == "delta") {
    params.delta = parse_double(value, key);
  } else if (key == "eps") {
    params.eps = parse_double(value, key);
  } else if (key == "eps1") {
    params.eps1 = parse_double(value, key);
  } else if (key == "eps2") {
    params.eps2 = parse_double(value, key);
  } else if (key == "dec_bits") {
    dec_bits = static_cast<std::size_t>(parse_u64(value, key));
  } else if (key == "threads") {
    threads = static_cast<unsigned>(parse_u64(value, key));
  } else if (key == "out") {
    out_dir = value;
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

std::string SimConfig::get(const std::string& key) const {
  if (key == "m") return std::to_string(m);
  if (key == "alpha") return fmt_g17(alpha);
  if (key == "doppler")
    return fmt_g17(doppler.v) + "," + fmt_g17(doppler.fc) + "," +
           fmt_g17(doppler.tf) + "," + fmt_g17(doppler.c);
  if (key == "doppler_f")
    return doppler.f_override ? fmt_g17(*doppler.f_override) : "";
  if (key == "gamma") return fmt_g17(doppler.gamma);
  if (key == "pgrid") return join_doubles(p_grid_db);
  if (key == "trials") return std::to_string(trials_per_point);
  if (key == "seed") return std::to_string(seed);
  if (key == "schemes") {
    std::string out;
    for (std::size_t i = 0; i < schemes.size(); ++i) {
      if (i) out += ",";
      out += scheme_name(schemes[i]);
    }
    return out;
  }
  if (key == "zeta") return fmt_g17(params.zeta);
  if (key == "delta") return fmt_g17(params.delta);
  if (key == "eps") return fmt_g17(params.eps);
  if (key == "eps1") return fmt_g17(params.eps1);
  if (key == "eps2") return fmt_g17(params.eps2);
  if (key == "dec_bits") return std::to_string(dec_bits);
  if (key == "threads") return std::to_string(threads);
  if (key == "out") return out_dir;
  if (key == "mode") return use_doppler ? "doppler" : "alpha";
  throw std::invalid_argument("config: unknown key '" + key + "'");
}

void SimConfig::validate() const {
  std::vector<std::string> problems;
  if (m < 2 || m > 8) problems.push_back("m must be in [2, 8]");
  if (p_grid_db.size() < 2) problems.push_back("pgrid needs at least 2 points");
  for (std::size_t i = 0; i + 1 < p_grid_db.size(); ++i)
    if (!(p_grid_db[i] < p_grid_db[i + 1])) {
      problems.push_back("pgrid must be strictly increasing");
      break;
    }
  if (!p_grid_db.empty() && p_grid_db.front() < 5.0)
    problems.push_back("pgrid points must be >= 5 dB");
  if (trials_per_point < 100) problems.push_back("trials must be >= 100");
  if (schemes.empty()) problems.push_back("scheme set must not be empty");
  if (!(params.zeta > 0.0)) problems.push_back("zeta must be > 0");
  if (!(params.delta > 0.0 && params.delta < 1.0))
    problems.push_back("delta must be in (0,1)");
  if (!(params.eps > 0.0)) problems.push_back("eps must be > 0");
  if (!(params.eps1 > 0.0)) problems.push_back("eps1 must be > 0");
  if (!(params.eps2 > 0.0)) problems.push_back("eps2 must be > 0");
  if (dec_bits < 1 || dec_bits > 10)
    problems.push_back("dec_bits must be in [1, 10]");
  if (!use_doppler) {
    if (!(alpha >= 0.0)) problems.push_back("alpha must be >= 0");
  } else {
    try {
      if (!(doppler.max_doppler() < 0.5))
        problems.push_back("doppler F must be < 1/2");
    } catch (const std::exception& e) {
      problems.push_back(e.what());
    }
    if (!(doppler.gamma >= 1.0)) problems.push_back("gamma must be >= 1");
    for (Scheme s : schemes)
      if (s == Scheme::kMat || s == Scheme::kMatVariant) {
        problems.push_back("mat schemes require the alpha model");
        break;
      }
  }
  if (!problems.empty()) {
    std::string msg = "invalid config:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw std::invalid_argument(msg);
  }
}

std::string SimConfig::to_text() const {
  std::ostringstream os;
  os << "# misobc run configuration\n";
  os << "m = " << m << "\n";
  if (use_doppler) {
    if (doppler.f_override) {
      os << "doppler_f = " << fmt_g17(*doppler.f_override) << "\n";
    } else {
      os << "doppler = " << get("doppler") << "\n";
    }
    os << "gamma = " << fmt_g17(doppler.gamma) << "\n";
  } else {
    os << "alpha = " << fmt_g17(alpha) << "\n";
  }
  os << "pgrid = " << join_doubles(p_grid_db) << "\n";
  os << "trials = " << trials_per_point << "\n";
  os << "seed = " << seed << "\n";
  os << "schemes = " << get("schemes") << "\n";
  os << "zeta = " << fmt_g17(params.zeta) << "\n";
  os << "delta = " << fmt_g17(params.delta) << "\n";
  os << "eps = " << fmt_g17(params.eps) << "\n";
  os << "eps1 = " << fmt_g17(params.eps1) << "\n";
  os << "eps2 = " << fmt_g17(params.eps2) << "\n";
  os << "dec_bits = " << dec_bits << "\n";
  os << "threads = " << threads << "\n";
  os << "out = " << out_dir << "\n";
  return os.str();
}

SimConfig SimConfig::from_text(const std::string& text) {
  SimConfig cfg;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

SimConfig SimConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

double theoretical_dof(double alpha) {
  if (!(alpha >= 0.0)) throw std::domain_error("theoretical_dof: alpha must be >= 0");
  if (alpha > 1.0) return 1.0;
  return (2.0 - alpha) / (3.0 - 2.0 * alpha);
}

double baseline_dof(double alpha) {
  if (!(alpha >= 0.0)) throw std::domain_error("baseline_dof: alpha must be >= 0");
  return std::max(2.0 / 3.0, std::min(alpha, 1.0));
}

std::vector<RateSample> run_sweep(const SimConfig& cfg) {
  cfg.validate();
  std::vector<RateSample> samples;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nthreads = cfg.threads == 0 ? hw : cfg.threads;

  for (Scheme scheme : cfg.schemes) {
    for (std::size_t pi = 0; pi < cfg.p_grid_db.size(); ++pi) {
      const double p_db = cfg.p_grid_db[pi];
      const double p = db_to_lin(p_db);
      std::optional<DopplerPoint> dp;
      if (cfg.use_doppler) dp = make_doppler_point(cfg, p);
      const DopplerPoint* dpp = dp ? &*dp : nullptr;

      std::vector<TrialOut> outs(cfg.trials_per_point);
      const auto worker = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t t = lo; t < hi; ++t) {
          Rng rng(derive_seed(cfg.seed, pi, static_cast<std::uint64_t>(scheme), t));
          switch (scheme) {
            case Scheme::kZf:
              outs[t] = zf_trial(cfg, p, dpp, rng);
              break;
            case Scheme::kMat:
              outs[t] = mat_trial(cfg, p, false, rng);
              break;
            case Scheme::kMatVariant:
              outs[t] = mat_trial(cfg, p, true, rng);
              break;
            case Scheme::kHybrid:
              outs[t] = hybrid_trial(cfg, p, dpp, rng);
              break;
          }
        }
      };
      if (nthreads <= 1 || outs.size() < 2 * nthreads) {
        worker(0, outs.size());
      } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (outs.size() + nthreads - 1) / nthreads;
        for (unsigned k = 0; k < nthreads; ++k) {
          const std::size_t lo = k * chunk;
          const std::size_t hi = std::min(outs.size(), lo + chunk);
          if (lo >= hi) break;
          pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
      }
      samples.push_back(fold_point(cfg, p_db, scheme, outs, dpp));
    }
  }
  return samples;
}

DofEstimate fit_dof(const std::vector<RateSample>& samples, Scheme scheme) {
  std::vector<double> x, y;
  double db_min = 0.0, db_max = 0.0;
  for (const RateSample& s : samples) {
    if (s.scheme != scheme) continue;
    if (x.empty()) {
      db_min = db_max = s.p_db;
    } else {
      db_min = std::min(db_min, s.p_db);
      db_max = std::max(db_max, s.p_db);
    }
    x.push_back(db_to_log2p(s.p_db));
    y.push_back(s.rate);
  }
  if (x.size() < 3 || db_max - db_min < 20.0 - 1e-9)
    throw std::invalid_argument(
        "fit_dof: need >= 3 grid points spanning >= 20 dB");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
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
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss_res += r * r;
  }
  DofEstimate est;
  est.scheme = scheme;
  est.slope = slope;
  est.std_err = x.size() > 3 ? std::sqrt(ss_res / (n - 2.0) / sxx) : 0.0;
  est.p_db_min = db_min;
  est.p_db_max = db_max;
  return est;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string fmt_g9(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

std::string theory_row(double a, const std::string& measured) {
  std::ostringstream os;
  os << fmt_g9(a) << "," << measured << "," << fmt_g9(theoretical_dof(a)) << ","
     << fmt_g9(std::min(a, 1.0)) << "," << fmt_g9(2.0 / 3.0) << "\n";
  return os.str();
}

constexpr const char* kDofHeader =
    "alpha,hybrid_measured,hybrid_theory,zf_theory,mat_theory\n";

}  // namespace

void emit_report(const std::vector<RateSample>& samples,
                 const std::vector<DofEstimate>& estimates,
                 const SimConfig& cfg) {
  if (samples.empty())
    throw std::invalid_argument("emit_report: no samples");
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out_dir);

  std::ostringstream csv;
  csv << "p_db,scheme,rate,err_range,err_mc,err_mimo,kappa,beta_p,interference\n";
  for (const RateSample& s : samples) {
    csv << fmt_g9(s.p_db) << "," << csv_field(scheme_name(s.scheme)) << ","
        << fmt_g9(s.rate) << "," << fmt_g9(s.freq_range_err) << ","
        << fmt_g9(s.freq_mc_err) << "," << fmt_g9(s.freq_mimo_err) << ","
        << fmt_g9(s.kappa) << "," << fmt_g9(s.beta_p) << ","
        << fmt_g9(s.interference_power) << "\n";
  }
  write_file(cfg.out_dir + "/samples.csv", csv.str());

  std::string measured;
  for (const DofEstimate& e : estimates)
    if (e.scheme == Scheme::kHybrid) measured = fmt_g9(e.slope);
  std::ostringstream dof;
  dof << kDofHeader << theory_row(cfg.effective_alpha(), measured);
  write_file(cfg.out_dir + "/dof_alpha.csv", dof.str());

  write_file(cfg.out_dir + "/run_meta.txt", cfg.to_text());
}

void emit_theory(const std::string& path, double alpha_min, double alpha_max,
                 double alpha_step) {
  if (!(alpha_min >= 0.0) || !(alpha_step > 0.0) || !(alpha_max >= alpha_min))
    throw std::domain_error("emit_theory: bad alpha grid");
  std::ostringstream os;
  os << kDofHeader;
  for (double a = alpha_min; a <= alpha_max + 1e-12; a += alpha_step)
    os << theory_row(std::min(a, alpha_max), "");
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  write_file(path, os.str());
}

}  // namespace misobc
