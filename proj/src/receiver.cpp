#include "misobc/receiver.hpp"

#include <cmath>
#include <stdexcept>

namespace misobc {

double multicast_slots(double p, double alpha_p, double zeta, double delta) {
  if (!(p > 1.0)) throw std::domain_error("multicast_slots: p must be > 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("multicast_slots: delta must be in (0,1)");
  if (!(zeta > 0.0)) throw std::domain_error("multicast_slots: zeta must be > 0");
  const double kappa = 4.0 / ((1.0 - delta) * std::log2(p)) +
                       2.0 * (1.0 + zeta - alpha_p) / (1.0 - delta);
  return std::max(kappa, 0.0);
}

bool simulate_multicast(double bits, double kappa,
                        const std::vector<ChannelState>& states, double p,
                        double delta) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("simulate_multicast: kappa < 0");
  if (!(p > 0.0)) throw std::domain_error("simulate_multicast: p must be > 0");
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::domain_error("simulate_multicast: delta must be in [0,1)");
  const std::size_t slots = static_cast<std::size_t>(std::ceil(kappa));
  if (states.size() < slots)
    throw std::invalid_argument("simulate_multicast: not enough slot states");
  // single transmit antenna, worst-user SISO capacity, fractional last slot
  double total = 0.0;
  for (std::size_t t = 0; t < slots; ++t) {
    const double gain = std::min(std::norm(states[t].s(0, 0)),
                                 std::norm(states[t].s(1, 0)));
    const double weight = (t + 1 <= static_cast<std::size_t>(std::floor(kappa)))
                              ? 1.0
                              : kappa - std::floor(kappa);
    total += weight * std::log2(1.0 + p * gain);
  }
  return bits <= (1.0 - delta) * total;
}

EquivMimo assemble_equiv_mimo(const HybridFrame& frame,
                              const ChannelState& state1, cplx own_obs,
                              const QuantizedInterference& q, int user) {
  if (user != 1 && user != 2)
    throw std::invalid_argument("assemble_equiv_mimo: user must be 1 or 2");
  const cplx xi1 = frame.eta1 - q.eta_hat1;
  const cplx xi2 = frame.eta2 - q.eta_hat2;
  EquivMimo em;
  em.user = user;
  if (user == 1) {
    em.f = mul(state1.s, frame.precoders.w);
    em.obs = {own_obs - q.eta_hat1, q.eta_hat2};
    em.noise_second_moment = {1.0 + std::norm(xi1), std::norm(xi2)};
  } else {
    em.f = mul(state1.s, frame.precoders.q);
    em.obs = {q.eta_hat1, own_obs - q.eta_hat2};
    em.noise_second_moment = {std::norm(xi1), 1.0 + std::norm(xi2)};
  }
  return em;
}

double effective_rate(const HybridFrame& frame, const EquivMimo& equiv,
                      double kappa) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("effective_rate: kappa < 0");
  std::array<double, 2> noise = equiv.noise_second_moment;
  noise[equiv.user == 1 ? 0 : 1] += equiv.extra;
  if (!(noise[0] > 0.0 && noise[1] > 0.0))
    throw std::invalid_argument("effective_rate: noise moments must be > 0");
  return logdet_capacity(equiv.f, {frame.alloc.p1, frame.alloc.p2}, noise) /
         (1.0 + kappa);
}

std::size_t min_distance_decode(const EquivMimo& equiv, const Codebook& cb) {
  if (cb.entries.empty())
    throw std::invalid_argument("min_distance_decode: empty codebook");
  std::size_t best = 0;
  double best_d = 0.0;
  for (std::size_t i = 0; i < cb.entries.size(); ++i) {
    const auto& c = cb.entries[i];
    double d = 0.0;
    for (std::size_t r = 0; r < 2; ++r) {
      const cplx pred = equiv.f(r, 0) * c[0] + equiv.f(r, 1) * c[1];
      d += std::norm(equiv.obs[r] - pred);
    }
    if (i == 0 || d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

void classify_errors(const TrialRecord& rec, ErrorEventTally& tally) {
  ++tally.trials;
  if (!rec.range_ok) ++tally.e_delta;
  if (!rec.mc_ok) ++tally.e_mc;
  if (!rec.decode_ok) ++tally.e_mimo;
}

double range_error_bound(double p, std::size_t m, double alpha_p,
                         double beta_p, double zeta, double eps) {
  if (!(p > 1.0)) throw std::domain_error("range_error_bound: p must be > 1");
  if (!(zeta > eps && eps > 0.0))
    throw std::domain_error("range_error_bound: need zeta > eps > 0");
  if (m < 1) throw std::invalid_argument("range_error_bound: m must be >= 1");
  const double md = static_cast<double>(m);
  const double coeff = 1.0 / (4.0 * md * md);
  const double t1 = std::exp(-std::pow(p, eps));
  const double t2 = coeff * std::pow(p, -2.0 * (zeta - eps));
  const double t3 = coeff * std::pow(p, -2.0 * (zeta - eps + 1.0 - alpha_p - beta_p));
  return 4.0 * (t1 + t2 + t3);
}

double outage_probability(std::size_t trials, double r, double eps1,
                          const PowerAllocation& alloc, double alpha_p,
                          std::size_t m, Rng& rng) {
  if (trials < 1000)
    throw std::invalid_argument("outage_probability: need >= 1000 trials");
  if (!(r >= 0.0)) throw std::domain_error("outage_probability: r must be >= 0");
  const double threshold = (r + eps1) * std::log2(alloc.p);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const ChannelState st = sample_iid_state(m, rng);
    const CsitView csit = make_csit(st, alpha_p, alloc.p, rng);
    const PrecoderPair prec = precoders_from_estimates(csit.g_hat, csit.h_hat);
    const CMat f = mul(st.s, prec.w);
    const double ld = logdet_capacity(f, {alloc.p1, alloc.p2}, {1.0, 1.0});
    if (ld < threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace misobc
