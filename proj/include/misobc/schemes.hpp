#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "misobc/channel.hpp"
#include "misobc/linalg.hpp"
#include "misobc/rng.hpp"

namespace misobc {

// Symmetric two-stream power split: lambda_l = phi_l = p_l, so the slot
// constraint is 2(p1 + p2) <= p.
struct PowerAllocation {
  double p = 0.0;
  double p1 = 0.0;   // stream orthogonal to the estimated channel
  double p2 = 0.0;   // stream aligned with the estimated channel
  double beta_p = 0.0;  // log(p2)/log(p)
};

// p2 = min(p^{1-alpha}, p/4) for alpha <= 1, else p2 = 1; p1 = p/2 - p2.
PowerAllocation allocate_power(double p, double alpha_p);

// Slack parameters of the achievability analysis (all > 0; the asymptotic
// statements send them to 0).
struct AnalysisParams {
  double zeta = 0.2;    // quantizer truncation exponent margin
  double delta = 0.05;  // multicast rate back-off
  double eps = 0.05;    // range-bound exponent split
  double eps1 = 0.1;    // outage slack (eps')
  double eps2 = 0.1;    // rate slack (eps'')
};

// One phase-1 round of the hybrid scheme: x1 = W u~ + Q v~ with the mutual
// interferences eta recorded against the receiver-known state.
struct HybridFrame {
  PrecoderPair precoders;
  PowerAllocation alloc;
  std::array<cplx, 2> u_tilde{};
  std::array<cplx, 2> v_tilde{};
  CVec x1;
  cplx eta1{};  // h1^T Q v~ seen by user 1
  cplx eta2{};  // g1^T W u~ seen by user 2
  AnalysisParams params;
};

// Precoders from the current estimates, falling back to fixed axis
// directions when an estimate is identically zero (the no-CSIT endpoint).
PrecoderPair precoders_from_estimates(const CVec& g_hat, const CVec& h_hat);

HybridFrame hybrid_phase1(const CsitView& csit, const PowerAllocation& alloc,
                          const std::array<cplx, 2>& u_tilde,
                          const std::array<cplx, 2>& v_tilde,
                          const AnalysisParams& params = {});

// Conditional interference powers (sig1, sig2) given states and precoders:
// sig1 = |delta1^T q1|^2 p1 + |h1^T q2|^2 p2, and symmetrically for user 2.
std::pair<double, double> interference_power(const CsitView& csit,
                                             const PowerAllocation& alloc,
                                             const PrecoderPair& prec);

struct Codebook {
  std::vector<std::array<cplx, 2>> entries;
  double rate_bits = 0.0;
  std::array<double, 2> power_shape{};  // diagonal covariance of entries
};

Codebook make_codebook(std::size_t size, const std::array<double, 2>& power_shape,
                       Rng& rng);

// One three-slot MAT round. Retransmitted interference is clipped to the
// per-slot power budget; the applied scales are recorded so receivers
// (which know the delayed states) can invert them.
struct MatObservations {
  std::array<cplx, 3> y{};  // user 1
  std::array<cplx, 3> z{};  // user 2
  double scale2 = 1.0;      // slot-2 clip factor (variant only)
  double scale3 = 1.0;      // slot-3 clip factor
};

// Original MAT: x1 = u, x2 = v, x3 = [g1^T u + h2^T v, 0]^T.
// `noise` may be null for the noiseless structural form.
MatObservations mat_original(const std::array<ChannelState, 3>& states,
                             const CVec& u, const CVec& v, double p,
                             Rng* noise);

// Variant: x1 = u + v, x2 = [h1^T v, 0]^T, x3 = [g1^T u, 0]^T.
MatObservations mat_variant(const std::array<ChannelState, 3>& states,
                            const CVec& u, const CVec& v, double p,
                            Rng* noise);

// Beam inside the Hermitian-orthogonal complement of `other_dir` (a unit
// direction), matched to the own estimate where the null space leaves
// freedom; falls back to a deterministic axis for zero estimates.
CVec zf_beam(const CVec& own_hat, const CVec& other_dir,
             std::size_t fallback_axis);

struct ZfResult {
  double sinr1 = 0.0;
  double sinr2 = 0.0;
  double rate1 = 0.0;  // bits per channel use
  double rate2 = 0.0;
};

// One-stream-per-user zero forcing against the other user's estimated
// channel, power p/2 each; residual leak evaluated against the known state.
ZfResult zf_baseline(const CsitView& csit, double p);

}  // namespace misobc
