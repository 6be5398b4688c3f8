#include "misobc/schemes.hpp"

#include <cmath>
#include <stdexcept>

namespace misobc {

namespace {

constexpr double kZeroEstimateTol = 1e-12;

CVec standard_basis(std::size_t m, std::size_t j) {
  CVec e(m, cplx{0.0, 0.0});
  e[j] = 1.0;
  return e;
}

CVec estimate_or_axis(const CVec& v, std::size_t axis) {
  return vnorm(v) > kZeroEstimateTol ? v : standard_basis(v.size(), axis);
}

cplx scaled_interference(cplx raw, double p, double* scale) {
  // per-slot power clip on the retransmitted scalar
  const double mag = std::abs(raw);
  *scale = (mag * mag > p) ? std::sqrt(p) / mag : 1.0;
  return *scale * raw;
}

cplx noise_or_zero(Rng* rng) { return rng ? rng->cgauss() : cplx{0.0, 0.0}; }

}  // namespace

PowerAllocation allocate_power(double p, double alpha_p) {
  if (!(p > 2.0)) throw std::domain_error("allocate_power: p must be > 2");
  if (!(alpha_p >= 0.0))
    throw std::domain_error("allocate_power: alpha_p must be >= 0");
  PowerAllocation a;
  a.p = p;
  a.p2 = alpha_p <= 1.0 ? std::min(std::pow(p, 1.0 - alpha_p), 0.25 * p) : 1.0;
  a.p1 = 0.5 * p - a.p2;
  a.beta_p = std::log(a.p2) / std::log(p);
  return a;
}

PrecoderPair precoders_from_estimates(const CVec& g_hat, const CVec& h_hat) {
  if (g_hat.size() != h_hat.size() || g_hat.size() < 2)
    throw std::invalid_argument("precoders_from_estimates: bad dimensions");
  // Zero estimates (the no-CSIT endpoint alpha = 0) fall back to a fixed
  // axis: any orthonormal pair is equivalent under the isotropic law.
  return build_precoders(estimate_or_axis(g_hat, 0), estimate_or_axis(h_hat, 0));
}

HybridFrame hybrid_phase1(const CsitView& csit, const PowerAllocation& alloc,
                          const std::array<cplx, 2>& u_tilde,
                          const std::array<cplx, 2>& v_tilde,
                          const AnalysisParams& params) {
  const std::size_t m = csit.truth.antennas();
  if (csit.h_hat.size() != m || csit.g_hat.size() != m)
    throw std::invalid_argument("hybrid_phase1: estimate dimension mismatch");
  HybridFrame frame;
  frame.precoders = precoders_from_estimates(csit.g_hat, csit.h_hat);
  frame.alloc = alloc;
  frame.u_tilde = u_tilde;
  frame.v_tilde = v_tilde;
  frame.params = params;

  const CVec u = mul(frame.precoders.w, CVec{u_tilde[0], u_tilde[1]});
  const CVec v = mul(frame.precoders.q, CVec{v_tilde[0], v_tilde[1]});
  frame.x1.resize(m);
  for (std::size_t j = 0; j < m; ++j) frame.x1[j] = u[j] + v[j];

  frame.eta1 = dotu(csit.truth.h(), v);
  frame.eta2 = dotu(csit.truth.g(), u);
  return frame;
}

std::pair<double, double> interference_power(const CsitView& csit,
                                             const PowerAllocation& alloc,
                                             const PrecoderPair& prec) {
  const std::size_t m = csit.truth.antennas();
  if (csit.h_hat.size() != m || csit.g_hat.size() != m)
    throw std::invalid_argument("interference_power: dimension mismatch");
  const CVec h = csit.truth.h();
  const CVec g = csit.truth.g();
  CVec delta(m), eps(m);
  for (std::size_t j = 0; j < m; ++j) {
    delta[j] = h[j] - csit.h_hat[j];
    eps[j] = g[j] - csit.g_hat[j];
  }
  const double sig1 = std::norm(dotu(delta, prec.q.col(0))) * alloc.p1 +
                      std::norm(dotu(h, prec.q.col(1))) * alloc.p2;
  const double sig2 = std::norm(dotu(eps, prec.w.col(0))) * alloc.p1 +
                      std::norm(dotu(g, prec.w.col(1))) * alloc.p2;
  return {sig1, sig2};
}

Codebook make_codebook(std::size_t size, const std::array<double, 2>& power_shape,
                       Rng& rng) {
  if (size == 0) throw std::invalid_argument("make_codebook: empty codebook");
  if (!(power_shape[0] >= 0.0) || !(power_shape[1] >= 0.0))
    throw std::invalid_argument("make_codebook: negative power");
  Codebook cb;
  cb.power_shape = power_shape;
  cb.rate_bits = std::log2(static_cast<double>(size));
  cb.entries.resize(size);
  const double s1 = std::sqrt(power_shape[0]);
  const double s2 = std::sqrt(power_shape[1]);
  for (auto& e : cb.entries) e = {s1 * rng.cgauss(), s2 * rng.cgauss()};
  return cb;
}

MatObservations mat_original(const std::array<ChannelState, 3>& states,
                             const CVec& u, const CVec& v, double p,
                             Rng* noise) {
  const std::size_t m = states[0].antennas();
  if (u.size() != m || v.size() != m)
    throw std::invalid_argument("mat_original: signal dimension mismatch");
  if (!(p > 0.0)) throw std::domain_error("mat_original: p must be > 0");
  const CVec h1 = states[0].h(), g1 = states[0].g();
  const CVec h2 = states[1].h(), g2 = states[1].g();
  MatObservations obs;
  const cplx s = dotu(g1, u) + dotu(h2, v);
  const cplx x3 = scaled_interference(s, p, &obs.scale3);
  obs.y = {dotu(h1, u) + noise_or_zero(noise),
           dotu(h2, v) + noise_or_zero(noise),
           states[2].s(0, 0) * x3 + noise_or_zero(noise)};
  obs.z = {dotu(g1, u) + noise_or_zero(noise),
           dotu(g2, v) + noise_or_zero(noise),
           states[2].s(1, 0) * x3 + noise_or_zero(noise)};
  return obs;
}

MatObservations mat_variant(const std::array<ChannelState, 3>& states,
                            const CVec& u, const CVec& v, double p,
                            Rng* noise) {
  const std::size_t m = states[0].antennas();
  if (u.size() != m || v.size() != m)
    throw std::invalid_argument("mat_variant: signal dimension mismatch");
  if (!(p > 0.0)) throw std::domain_error("mat_variant: p must be > 0");
  const CVec h1 = states[0].h(), g1 = states[0].g();
  CVec x1(m);
  for (std::size_t j = 0; j < m; ++j) x1[j] = u[j] + v[j];
  MatObservations obs;
  const cplx x2 = scaled_interference(dotu(h1, v), p, &obs.scale2);
  const cplx x3 = scaled_interference(dotu(g1, u), p, &obs.scale3);
  obs.y = {dotu(h1, x1) + noise_or_zero(noise),
           states[1].s(0, 0) * x2 + noise_or_zero(noise),
           states[2].s(0, 0) * x3 + noise_or_zero(noise)};
  obs.z = {dotu(g1, x1) + noise_or_zero(noise),
           states[1].s(1, 0) * x2 + noise_or_zero(noise),
           states[2].s(1, 0) * x3 + noise_or_zero(noise)};
  return obs;
}

CVec zf_beam(const CVec& own_hat, const CVec& other_dir,
             std::size_t fallback_axis) {
  const std::size_t m = other_dir.size();
  CVec a = vnorm(own_hat) > kZeroEstimateTol ? conj_vec(own_hat)
                                             : standard_basis(m, fallback_axis);
  const cplx c = vdot(other_dir, a);
  for (std::size_t j = 0; j < m; ++j) a[j] -= c * other_dir[j];
  const double n = vnorm(a);
  if (n > 1e-9) {
    for (cplx& x : a) x /= n;
    return a;
  }
  return unit_null(other_dir);
}

ZfResult zf_baseline(const CsitView& csit, double p) {
  if (!(p > 1.0)) throw std::domain_error("zf_baseline: p must be > 1");
  const CVec g_dir = unit_aligned(estimate_or_axis(csit.g_hat, 0));
  const CVec h_dir = unit_aligned(estimate_or_axis(csit.h_hat, 0));
  const CVec w_u = zf_beam(csit.h_hat, g_dir, 1);  // user 1, nulls at g_hat
  const CVec q_v = zf_beam(csit.g_hat, h_dir, 1);  // user 2, nulls at h_hat

  const CVec h = csit.truth.h();
  const CVec g = csit.truth.g();
  const double half_p = 0.5 * p;
  ZfResult r;
  r.sinr1 = std::norm(dotu(h, w_u)) * half_p /
            (1.0 + std::norm(dotu(h, q_v)) * half_p);
  r.sinr2 = std::norm(dotu(g, q_v)) * half_p /
            (1.0 + std::norm(dotu(g, w_u)) * half_p);
  r.rate1 = std::log2(1.0 + r.sinr1);
  r.rate2 = std::log2(1.0 + r.sinr2);
  return r;
}

}  // namespace misobc
