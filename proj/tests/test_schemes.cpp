#include "misobc/schemes.hpp"

#include <cmath>
#include <stdexcept>

#include "testutil.hpp"

using namespace misobc;

namespace {

std::array<cplx, 2> draw_symbols(const PowerAllocation& a, Rng& rng) {
  return {std::sqrt(a.p1) * rng.cgauss(), std::sqrt(a.p2) * rng.cgauss()};
}

void test_allocate_power() {
  const PowerAllocation a = allocate_power(100.0, 0.5);
  CHECK_NEAR(a.p2, 10.0, 1e-12, "p = 100, alpha = 0.5: p2 = 10");
  CHECK_NEAR(a.p1, 40.0, 1e-12, "p1 = 40");
  CHECK_NEAR(a.beta_p, 0.5, 1e-12, "beta = 1/2");

  const PowerAllocation clip = allocate_power(100.0, 0.0);
  CHECK_NEAR(clip.p2, 25.0, 1e-12, "alpha 0 clips p2 at p/4");
  CHECK_NEAR(clip.p1, 25.0, 1e-12, "p1 = p/4 after clip");

  // pre-clip regime: log p2 vs log p slope is exactly 1 - alpha
  std::vector<double> lp, l2;
  for (double db = 30.0; db <= 60.0 + 1e-9; db += 5.0) {
    const double p = std::pow(10.0, db / 10.0);
    const PowerAllocation al = allocate_power(p, 0.3);
    CHECK(al.p2 < 0.25 * p, "clip inactive in this regime");
    lp.push_back(std::log(p));
    l2.push_back(std::log(al.p2));
  }
  CHECK_NEAR(testutil::ols_slope(lp, l2), 0.7, 1e-12, "slope 0.7 exactly");

  // feasibility and the beta constraint on [0, 1]
  Rng rng(0x301);
  for (int it = 0; it < 1000; ++it) {
    const double p = 10.0 + 1e5 * rng.uniform();
    const double alpha = rng.uniform();
    const PowerAllocation al = allocate_power(p, alpha);
    CHECK(al.p1 > 0.0 && al.p2 >= 0.0, "positive powers");
    CHECK(2.0 * (al.p1 + al.p2) <= p + 1e-9, "slot power budget");
    CHECK(al.beta_p <= 1.0 - alpha + 1e-12, "beta <= 1 - alpha");
  }
  CHECK_THROWS(allocate_power(1.5, 0.5), std::domain_error, "p <= 2 rejected");
}

void test_hybrid_phase1() {
  Rng rng(0x302);
  const double p = 1e4;
  const PowerAllocation alloc = allocate_power(p, 0.5);
  const ChannelState st = sample_iid_state(2, rng);
  const CsitView cv = make_csit(st, 0.5, p, rng);

  // v~ = 0 kills eta1
  const HybridFrame nov = hybrid_phase1(cv, alloc, draw_symbols(alloc, rng),
                                        {cplx{0, 0}, cplx{0, 0}}, {});
  CHECK_NEAR(std::abs(nov.eta1), 0.0, 1e-15, "no interference without signal");

  // perfect CSIT and p2 = 0: exact ZF, both etas vanish
  const CsitView perfect = make_csit(st, 60.0, p, rng);
  PowerAllocation zf_alloc;
  zf_alloc.p = p;
  zf_alloc.p1 = p / 2.0;
  zf_alloc.p2 = 0.0;
  zf_alloc.beta_p = 0.0;
  const std::array<cplx, 2> u = {std::sqrt(zf_alloc.p1) * rng.cgauss(), 0.0};
  const std::array<cplx, 2> v = {std::sqrt(zf_alloc.p1) * rng.cgauss(), 0.0};
  const HybridFrame zf = hybrid_phase1(perfect, zf_alloc, u, v, {});
  CHECK(std::abs(zf.eta1) < 1e-12 && std::abs(zf.eta2) < 1e-12,
        "sigma2 = 0, p2 = 0 gives exact zero forcing");

  // algebraic re-expansion oracle at 1e-12
  double worst = 0.0;
  for (int it = 0; it < 5000; ++it) {
    const ChannelState state = sample_iid_state(2, rng);
    const CsitView view = make_csit(state, 0.5, p, rng);
    const auto ut = draw_symbols(alloc, rng);
    const auto vt = draw_symbols(alloc, rng);
    const HybridFrame fr = hybrid_phase1(view, alloc, ut, vt, {});
    CVec delta(2);
    for (std::size_t j = 0; j < 2; ++j) delta[j] = state.s(0, j) - view.h_hat[j];
    const cplx expanded = dotu(delta, fr.precoders.q.col(0)) * vt[0] +
                          dotu(state.h(), fr.precoders.q.col(1)) * vt[1];
    worst = std::max(worst,
                     std::abs(fr.eta1 - expanded) / (1.0 + std::abs(fr.eta1)));
    // x1 really is W u~ + Q v~
    const CVec wu = mul(fr.precoders.w, CVec{ut[0], ut[1]});
    const CVec qv = mul(fr.precoders.q, CVec{vt[0], vt[1]});
    for (std::size_t j = 0; j < 2; ++j)
      worst = std::max(worst, std::abs(fr.x1[j] - (wu[j] + qv[j])));
  }
  CHECK(worst < 1e-12, "eta1 decomposition / x1 structure at 1e-12");
}

void test_power_accounting() {
  Rng rng(0x303);
  const double p = 500.0;
  const PowerAllocation alloc = allocate_power(p, 0.3);
  double acc = 0.0;
  const std::size_t n = 200000;
  for (std::size_t it = 0; it < n; ++it) {
    const ChannelState st = sample_iid_state(2, rng);
    const CsitView cv = make_csit(st, 0.3, p, rng);
    acc += norm2(hybrid_phase1(cv, alloc, draw_symbols(alloc, rng),
                               draw_symbols(alloc, rng), {})
                     .x1);
  }
  acc /= static_cast<double>(n);
  const double want = 2.0 * (alloc.p1 + alloc.p2);
  // 3 standard errors of the chi-square mean
  const double se = want / std::sqrt(static_cast<double>(2 * n));
  CHECK_NEAR(acc, want, 3.0 * se, "E||x1||^2 = 2(p1+p2)");
  CHECK(want <= p, "power constraint");
}

void test_interference_power() {
  Rng rng(0x304);
  const double p = 1e4;

  // sigma2 = 0 and p2 = 0: no interference at user 1
  const ChannelState st = sample_iid_state(2, rng);
  const CsitView perfect = make_csit(st, 60.0, p, rng);
  PowerAllocation za;
  za.p = p;
  za.p1 = p / 2.0;
  za.p2 = 0.0;
  const PrecoderPair prec = precoders_from_estimates(perfect.g_hat, perfect.h_hat);
  const auto [s1, s2] = interference_power(perfect, za, prec);
  CHECK(s1 < 1e-12 && s2 < 1e-12, "perfect CSIT, aligned stream off");

  // Monte-Carlo oracle: E|eta1|^2 over symbol draws at fixed states
  const PowerAllocation alloc = allocate_power(p, 0.5);
  const ChannelState state = sample_iid_state(2, rng);
  const CsitView cv = make_csit(state, 0.5, p, rng);
  const PrecoderPair pr = precoders_from_estimates(cv.g_hat, cv.h_hat);
  const auto [sig1, sig2] = interference_power(cv, alloc, pr);
  (void)sig2;
  double acc = 0.0, acc_sq = 0.0;
  const std::size_t n = 200000;
  for (std::size_t it = 0; it < n; ++it) {
    const auto vt = draw_symbols(alloc, rng);
    const HybridFrame fr = hybrid_phase1(cv, alloc, draw_symbols(alloc, rng), vt, {});
    const double e = std::norm(fr.eta1);
    acc += e;
    acc_sq += e * e;
  }
  acc /= static_cast<double>(n);
  acc_sq /= static_cast<double>(n);
  const double se = std::sqrt(std::max(acc_sq - acc * acc, 0.0) /
                              static_cast<double>(n));
  CHECK_NEAR(acc, sig1, 3.0 * se + 1e-9, "sample mean matches sig1");

  // scaling: E[sig1] grows like P^{1-alpha}
  std::vector<double> lp, ls;
  for (double db = 30.0; db <= 60.0 + 1e-9; db += 5.0) {
    const double pw = std::pow(10.0, db / 10.0);
    const PowerAllocation al = allocate_power(pw, 0.5);
    double mean = 0.0;
    const std::size_t trials = 20000;
    for (std::size_t it = 0; it < trials; ++it) {
      const ChannelState s = sample_iid_state(2, rng);
      const CsitView view = make_csit(s, 0.5, pw, rng);
      const PrecoderPair q = precoders_from_estimates(view.g_hat, view.h_hat);
      mean += interference_power(view, al, q).first;
    }
    lp.push_back(std::log(pw));
    ls.push_back(std::log(mean / static_cast<double>(trials)));
  }
  CHECK_NEAR(testutil::ols_slope(lp, ls), 0.5, 0.1,
             "interference exponent 1 - alpha");
}

void test_mat_original() {
  Rng rng(0x305);
  const std::array<ChannelState, 3> st = {sample_iid_state(2, rng),
                                          sample_iid_state(2, rng),
                                          sample_iid_state(2, rng)};
  CVec u = {rng.cgauss(), rng.cgauss()};
  CVec v = {rng.cgauss(), rng.cgauss()};
  const double p = 1e6;  // large enough that the clip never engages here

  const MatObservations obs = mat_original(st, u, v, p, nullptr);
  CHECK_NEAR(obs.scale3, 1.0, 0.0, "no clip at large p");
  const cplx want_y3 =
      st[2].s(0, 0) * (dotu(st[0].g(), u) + dotu(st[1].h(), v));
  CHECK_NEAR(std::abs(obs.y[2] - want_y3), 0.0, 1e-12,
             "y3 = h31 (g1^T u + h2^T v) exactly");
  CHECK_NEAR(std::abs(obs.y[0] - dotu(st[0].h(), u)), 0.0, 1e-12, "y1 = h1^T u");
  CHECK_NEAR(std::abs(obs.z[1] - dotu(st[1].g(), v)), 0.0, 1e-12, "z2 = g2^T v");

  // u = 0: user-1 observations carry only v terms; v-coefficient rows
  // stack to rank <= 2
  const CVec zero = {cplx{0, 0}, cplx{0, 0}};
  const MatObservations only_v = mat_original(st, zero, v, p, nullptr);
  CHECK_NEAR(std::abs(only_v.y[0]), 0.0, 1e-15, "y1 = 0 when u = 0");
  const cplx h31 = st[2].s(0, 0);
  const CVec h2 = st[1].h();
  CVec h2s(2);
  for (int j = 0; j < 2; ++j) h2s[j] = h31 * h2[j] * only_v.scale3;
  CHECK(numeric_row_rank(CMat::from_rows({zero, h2, h2s}), 1e-8) <= 2,
        "v-matrix rank <= 2");

  // power clip engages and is recorded
  CVec big_u = {cplx{100.0, 0.0}, cplx{0.0, 0.0}};
  const MatObservations clipped = mat_original(st, big_u, v, 4.0, nullptr);
  CHECK(clipped.scale3 < 1.0, "retransmission clipped");
  const cplx s = dotu(st[0].g(), big_u) + dotu(st[1].h(), v);
  CHECK_NEAR(std::norm(s) * clipped.scale3 * clipped.scale3, 4.0, 1e-9,
             "clipped retransmission sits at the power budget");
}

void test_mat_variant() {
  Rng rng(0x306);
  const std::array<ChannelState, 3> st = {sample_iid_state(2, rng),
                                          sample_iid_state(2, rng),
                                          sample_iid_state(2, rng)};
  CVec u = {rng.cgauss(), rng.cgauss()};
  CVec v = {rng.cgauss(), rng.cgauss()};
  const double p = 1e6;

  const MatObservations obs = mat_variant(st, u, v, p, nullptr);
  const cplx want_z2 = st[1].s(1, 0) * dotu(st[0].h(), v);
  CHECK_NEAR(std::abs(obs.z[1] - want_z2), 0.0, 1e-12, "z2 = g21 h1^T v exactly");
  const cplx want_y1 = dotu(st[0].h(), u) + dotu(st[0].h(), v);
  CHECK_NEAR(std::abs(obs.y[0] - want_y1), 0.0, 1e-12, "y1 = h1^T (u + v)");

  // v = 0: user-1 interference column vanishes
  const CVec zero = {cplx{0, 0}, cplx{0, 0}};
  const MatObservations nov = mat_variant(st, u, zero, p, nullptr);
  CHECK_NEAR(std::abs(nov.y[1]), 0.0, 1e-15, "slot-2 retransmission empty");
}

void test_mat_subspace_ranks() {
  Rng rng(0x307);
  bool ok = true;
  for (int it = 0; it < 1000 && ok; ++it) {
    const std::array<ChannelState, 3> st = {sample_iid_state(2, rng),
                                            sample_iid_state(2, rng),
                                            sample_iid_state(2, rng)};
    const CVec h1 = st[0].h(), g1 = st[0].g(), h2 = st[1].h();
    const cplx h21 = st[1].s(0, 0), h31 = st[2].s(0, 0);
    const CVec zero(2, cplx{0, 0});
    const auto scl = [](const CVec& w, cplx c) {
      CVec out(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) out[i] = c * w[i];
      return out;
    };
    // original MAT, user 1: signal rows (h1; 0; h31 g1), interference rows
    // (0; h2; h31 h2)
    ok = ok &&
         numeric_row_rank(CMat::from_rows({h1, zero, scl(g1, h31)}), 1e-8) == 2;
    ok = ok &&
         numeric_row_rank(CMat::from_rows({zero, h2, scl(h2, h31)}), 1e-8) == 1;
    // variant, user 1: signal rows (h1; 0; h31 g1), interference rows
    // (h1; h21 h1; 0)
    ok = ok &&
         numeric_row_rank(CMat::from_rows({h1, scl(h1, h21), zero}), 1e-8) == 1;
  }
  CHECK(ok, "signal rank 2 / interference rank 1 on all draws");
}

void test_zf_baseline() {
  Rng rng(0x308);

  // perfect CSIT: no leak, slope 1
  std::vector<double> lp, lr;
  for (double db = 30.0; db <= 60.0 + 1e-9; db += 5.0) {
    const double p = std::pow(10.0, db / 10.0);
    double mean = 0.0;
    const std::size_t n = 3000;
    for (std::size_t it = 0; it < n; ++it) {
      const ChannelState st = sample_iid_state(2, rng);
      const CsitView cv = make_csit(st, 100.0, p, rng);
      const ZfResult r = zf_baseline(cv, p);
      CHECK(r.sinr1 * 0 == 0, "finite sinr");
      mean += 0.5 * (r.rate1 + r.rate2);
    }
    lp.push_back(db * 0.1 * std::log2(10.0));
    lr.push_back(mean / static_cast<double>(n));
  }
  CHECK_NEAR(testutil::ols_slope(lp, lr), 1.0, 0.05, "perfect-CSIT ZF slope 1");

  // alpha = 0 saturates
  lp.clear();
  lr.clear();
  for (double db = 30.0; db <= 60.0 + 1e-9; db += 5.0) {
    const double p = std::pow(10.0, db / 10.0);
    double mean = 0.0;
    const std::size_t n = 3000;
    for (std::size_t it = 0; it < n; ++it) {
      const ChannelState st = sample_iid_state(2, rng);
      const CsitView cv = make_csit(st, 0.0, p, rng);
      const ZfResult r = zf_baseline(cv, p);
      mean += 0.5 * (r.rate1 + r.rate2);
    }
    lp.push_back(db * 0.1 * std::log2(10.0));
    lr.push_back(mean / static_cast<double>(n));
  }
  CHECK_NEAR(testutil::ols_slope(lp, lr), 0.0, 0.05, "no-CSIT ZF slope 0");

  // alpha = 0.5
  lp.clear();
  lr.clear();
  for (double db = 30.0; db <= 60.0 + 1e-9; db += 5.0) {
    const double p = std::pow(10.0, db / 10.0);
    double mean = 0.0;
    const std::size_t n = 4000;
    for (std::size_t it = 0; it < n; ++it) {
      const ChannelState st = sample_iid_state(2, rng);
      const CsitView cv = make_csit(st, 0.5, p, rng);
      const ZfResult r = zf_baseline(cv, p);
      mean += 0.5 * (r.rate1 + r.rate2);
    }
    lp.push_back(db * 0.1 * std::log2(10.0));
    lr.push_back(mean / static_cast<double>(n));
  }
  CHECK_NEAR(testutil::ols_slope(lp, lr), 0.5, 0.07, "alpha = 0.5 ZF slope");
}

}  // namespace

int main() {
  test_allocate_power();
  test_hybrid_phase1();
  test_power_accounting();
  test_interference_power();
  test_mat_original();
  test_mat_variant();
  test_mat_subspace_ranks();
  test_zf_baseline();
  return testutil::finish("test_schemes");
}
