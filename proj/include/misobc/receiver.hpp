#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "misobc/channel.hpp"
#include "misobc/quantizer.hpp"
#include "misobc/schemes.hpp"

namespace misobc {

// Channel uses needed to multicast the quantized interference indices:
// kappa = 4/((1-delta) log2 P) + 2(1+zeta-alpha_P)/(1-delta), floored at 0.
double multicast_slots(double p, double alpha_p, double zeta, double delta);

// Worst-user single-antenna multicast over ceil(kappa) slots with the last
// slot prorated: success iff
// bits <= (1-delta) * sum_t log2(1 + p * min(|h_t1|^2, |g_t1|^2)).
bool simulate_multicast(double bits, double kappa,
                        const std::vector<ChannelState>& states, double p,
                        double delta);

// Equivalent 2x2 MIMO channel after interference reconstruction.
// user 1: obs = (y1 - eta_hat1, eta_hat2), f = S1 W,
//         noise moments (1 + |xi1|^2, |xi2|^2);
// user 2: obs = (eta_hat1, z1 - eta_hat2), f = S1 Q,
//         noise moments (|xi1|^2, 1 + |xi2|^2).
// `extra` is an additional second moment on the own-observation component
// (the residual term of the prediction-driven variant).
struct EquivMimo {
  int user = 1;
  CMat f;  // 2x2
  std::array<cplx, 2> obs{};
  std::array<double, 2> noise_second_moment{};
  double extra = 0.0;
};

// Precondition: the multicast phase succeeded, i.e. both eta_hat are
// available at the receiver.
EquivMimo assemble_equiv_mimo(const HybridFrame& frame,
                              const ChannelState& state1, cplx own_obs,
                              const QuantizedInterference& q, int user);

// log-det rate of the equivalent channel normalized by the protocol
// length: logdet_capacity(f, Lambda, noise)/(1 + kappa)
double effective_rate(const HybridFrame& frame, const EquivMimo& equiv,
                      double kappa);

// argmin over codewords of ||obs - F c||, ties to the lowest index
std::size_t min_distance_decode(const EquivMimo& equiv, const Codebook& cb);

struct TrialRecord {
  bool range_ok = true;   // no real dimension of eta1/eta2 out of range
  bool mc_ok = true;      // multicast recovered
  bool decode_ok = true;  // both users decoded their message
};

struct ErrorEventTally {
  std::uint64_t trials = 0;
  std::uint64_t e_delta = 0;
  std::uint64_t e_mc = 0;
  std::uint64_t e_mimo = 0;

  void merge(const ErrorEventTally& other) {
    trials += other.trials;
    e_delta += other.e_delta;
    e_mc += other.e_mc;
    e_mimo += other.e_mimo;
  }
};

void classify_errors(const TrialRecord& rec, ErrorEventTally& tally);

// Union upper bound on P[E_Delta] over the four real dimensions:
// 4 (e^{-P^eps} + P^{-2(zeta-eps)}/(4 m^2)
//      + P^{-2(zeta-eps+1-alpha_P-beta_P)}/(4 m^2)).
double range_error_bound(double p, std::size_t m, double alpha_p,
                         double beta_p, double zeta, double eps);

// Empirical fraction of draws with
// log2 det(I + F Lambda F^H) < (r + eps1) log2 P, F = S1 W under the scheme.
double outage_probability(std::size_t trials, double r, double eps1,
                          const PowerAllocation& alloc, double alpha_p,
                          std::size_t m, Rng& rng);

}  // namespace misobc
