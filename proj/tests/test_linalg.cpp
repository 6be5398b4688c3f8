#include "misobc/linalg.hpp"

#include <stdexcept>

#include "misobc/rng.hpp"
#include "testutil.hpp"

using namespace misobc;

namespace {

CMat random_mat(std::size_t r, std::size_t c, Rng& rng) {
  CMat m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.cgauss();
  return m;
}

void test_build_precoders_axis_aligned() {
  // g_hat = e1, h_hat = e2: w2 = e1, w1 = e2, q1 = e1, q2 = e2
  const PrecoderPair pp = build_precoders({1.0, 0.0}, {0.0, 1.0});
  CHECK_NEAR(std::abs(pp.w(0, 1) - cplx{1.0, 0.0}), 0.0, 1e-15, "w2 = e1");
  CHECK_NEAR(std::abs(pp.w(1, 0) - cplx{1.0, 0.0}), 0.0, 1e-15, "w1 = e2");
  CHECK_NEAR(std::abs(pp.q(1, 1) - cplx{1.0, 0.0}), 0.0, 1e-15, "q2 = e2");
  CHECK_NEAR(std::abs(pp.q(0, 0) - cplx{1.0, 0.0}), 0.0, 1e-15, "q1 = e1");

  // identical directions
  const PrecoderPair same = build_precoders({1.0, 0.0}, {1.0, 0.0});
  CHECK_NEAR(std::abs(same.w(0, 1) - cplx{1.0, 0.0}), 0.0, 1e-15, "w2 aligned");
  CHECK_NEAR(std::abs(same.q(0, 1) - cplx{1.0, 0.0}), 0.0, 1e-15, "q2 aligned");
  CHECK_NEAR(std::abs(same.w(1, 0) - cplx{1.0, 0.0}), 0.0, 1e-15, "w1 = e2");
}

void test_build_precoders_properties() {
  Rng rng(0x11);
  double worst_orth = 0.0, worst_null = 0.0, worst_par = 0.0;
  for (int it = 0; it < 2000; ++it) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.next_u64() % 3);
    CVec g(m), h(m);
    for (std::size_t j = 0; j < m; ++j) {
      g[j] = rng.cgauss();
      h[j] = rng.cgauss();
    }
    const PrecoderPair pp = build_precoders(g, h);
    for (const CMat* mat : {&pp.w, &pp.q}) {
      const CMat gram = mul(hermitian(*mat), *mat);
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
          const cplx want = i == j ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
          worst_orth = std::max(worst_orth, std::abs(gram(i, j) - want));
        }
    }
    worst_null = std::max(worst_null, std::abs(dotu(g, pp.w.col(0))) / vnorm(g));
    worst_null = std::max(worst_null, std::abs(dotu(h, pp.q.col(0))) / vnorm(h));
    // w2 parallel to conj(g): Gram determinant of the pair vanishes
    const CVec gc = conj_vec(g);
    const double par =
        norm2(pp.w.col(1)) * norm2(gc) - std::norm(vdot(pp.w.col(1), gc));
    worst_par = std::max(worst_par, std::abs(par) / norm2(gc));
  }
  CHECK(worst_orth < 1e-12, "W^H W = I within 1e-12");
  CHECK(worst_null < 1e-12, "g^T w1 = 0 within 1e-12");
  CHECK(worst_par < 1e-12, "w2 parallel to conj(g)");
}

void test_build_precoders_errors() {
  CHECK_THROWS(build_precoders({0.0, 0.0}, {1.0, 0.0}), std::invalid_argument,
               "zero estimate rejected");
  CHECK_THROWS(build_precoders({1.0}, {1.0}), std::invalid_argument,
               "m < 2 rejected");
  CHECK_THROWS(build_precoders({1.0, 0.0, 0.0}, {1.0, 0.0}),
               std::invalid_argument, "dimension mismatch rejected");
}

void test_det_gram_identity() {
  // orthonormal columns: det = 1
  CMat e(3, 2);
  e(0, 0) = 1.0;
  e(1, 1) = 1.0;
  auto [lhs1, rhs1] = det_gram_identity(e);
  CHECK_NEAR(lhs1, 1.0, 1e-15, "orthonormal lhs");
  CHECK_NEAR(rhs1, 1.0, 1e-15, "orthonormal rhs");

  // rank deficiency: a1 = a2
  Rng rng(0x22);
  CMat r(4, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    r(i, 0) = rng.cgauss();
    r(i, 1) = r(i, 0);
  }
  auto [lhs2, rhs2] = det_gram_identity(r);
  CHECK_NEAR(lhs2, 0.0, 1e-12, "rank-1 lhs = 0");
  CHECK_NEAR(rhs2, 0.0, 1e-12, "rank-1 rhs = 0");

  // 1e4 random draws, m in {2,3,4}
  double worst = 0.0;
  for (int it = 0; it < 10000; ++it) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.next_u64() % 3);
    const CMat a = random_mat(m, 2, rng);
    const auto [lhs, rhs] = det_gram_identity(a);
    worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
  }
  CHECK(worst < 1e-10, "identity holds to 1e-10 relative");

  CMat zero2(2, 2);
  zero2(0, 0) = 1.0;  // a2 = 0
  CHECK_THROWS(det_gram_identity(zero2), std::invalid_argument,
               "zero second column rejected");
}

void test_logdet_capacity() {
  const CMat eye = CMat::identity(2);
  CHECK_NEAR(logdet_capacity(eye, {3.0, 1.0}, {1.0, 1.0}), 3.0, 1e-12,
             "diagonal case log2 4 + log2 2 = 3");
  CHECK_NEAR(logdet_capacity(eye, {0.0, 0.0}, {1.0, 1.0}), 0.0, 1e-15,
             "zero power gives 0");

  // eigen-decomposition oracle at P = 1e3
  Rng rng(0x33);
  double worst = 0.0;
  for (int it = 0; it < 2000; ++it) {
    const CMat f = random_mat(2, 2, rng);
    const double p = 1e3;
    const double got = logdet_capacity(f, {p / 2, p / 2}, {1.0, 1.0});
    CMat gram(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        gram(i, j) = (p / 2) * (f(i, 0) * std::conj(f(j, 0)) +
                                f(i, 1) * std::conj(f(j, 1)));
    const auto [mu1, mu2] = eig2(gram);
    const double want = std::log2(1.0 + mu1) + std::log2(1.0 + mu2);
    worst = std::max(worst, std::abs(got - want) / (1.0 + std::abs(want)));
  }
  CHECK(worst < 1e-9, "matches eigenvalue evaluation within 1e-9 relative");

  // monotone nondecreasing in each diagonal entry of Lambda
  bool monotone = true;
  for (int it = 0; it < 1000 && monotone; ++it) {
    const CMat f = random_mat(2, 2, rng);
    const double l1 = 50.0 * rng.uniform();
    const double l2 = 50.0 * rng.uniform();
    const double bump = 10.0 * rng.uniform();
    const double base = logdet_capacity(f, {l1, l2}, {1.0, 2.0});
    monotone = logdet_capacity(f, {l1 + bump, l2}, {1.0, 2.0}) >= base - 1e-12 &&
               logdet_capacity(f, {l1, l2 + bump}, {1.0, 2.0}) >= base - 1e-12;
  }
  CHECK(monotone, "monotone in each Lambda entry");

  CMat bad = CMat::identity(2);
  bad(0, 0) = cplx{std::nan(""), 0.0};
  CHECK_THROWS(logdet_capacity(bad, {1.0, 1.0}, {1.0, 1.0}),
               std::invalid_argument, "non-finite rejected");
  CHECK_THROWS(logdet_capacity(eye, {1.0, 1.0}, {0.0, 1.0}),
               std::invalid_argument, "zero noise rejected");
  CHECK_THROWS(logdet_capacity(eye, {-1.0, 1.0}, {1.0, 1.0}),
               std::invalid_argument, "negative power rejected");
}

void test_eig2() {
  CMat d(2, 2);
  d(0, 0) = 5.0;
  d(1, 1) = 2.0;
  auto [m1, m2] = eig2(d);
  CHECK_NEAR(m1, 5.0, 1e-14, "diag eig 1");
  CHECK_NEAR(m2, 2.0, 1e-14, "diag eig 2");

  // rank-one xx^H with ||x||^2 = 7
  Rng rng(0x44);
  CVec x = {rng.cgauss(), rng.cgauss()};
  const double scale = std::sqrt(7.0 / norm2(x));
  for (cplx& v : x) v *= scale;
  CMat outer(2, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) outer(i, j) = x[i] * std::conj(x[j]);
  auto [r1, r2] = eig2(outer);
  CHECK_NEAR(r1, 7.0, 1e-12, "rank-one top eigenvalue");
  CHECK_NEAR(r2, 0.0, 1e-12, "rank-one null eigenvalue");

  double worst = 0.0;
  for (int it = 0; it < 10000; ++it) {
    const CMat b = random_mat(2, 2, rng);
    const CMat h = mul(b, hermitian(b));
    const auto [mu1, mu2] = eig2(h);
    const double tr = h(0, 0).real() + h(1, 1).real();
    const double det = h(0, 0).real() * h(1, 1).real() - std::norm(h(0, 1));
    worst = std::max(worst, std::abs(mu1 + mu2 - tr) / (1.0 + tr));
    worst = std::max(worst, std::abs(mu1 * mu2 - det) / (1.0 + std::abs(det)));
    CHECK(mu1 >= mu2 && mu2 >= 0.0, "ordering and PSD clipping");
  }
  CHECK(worst < 1e-10, "trace/det oracle within 1e-10");

  CMat nh(2, 2);
  nh(0, 1) = 1.0;
  nh(1, 0) = 5.0;  // far from conj-symmetric
  CHECK_THROWS(eig2(nh), std::invalid_argument, "non-Hermitian rejected");
}

void test_numeric_rank() {
  Rng rng(0x55);
  const CVec a = {rng.cgauss(), rng.cgauss(), rng.cgauss()};
  CVec b = a;
  for (cplx& v : b) v *= 2.0;
  const CVec c = {rng.cgauss(), rng.cgauss(), rng.cgauss()};
  CHECK(numeric_row_rank(CMat::from_rows({a, b}), 1e-8) == 1, "parallel rows");
  CHECK(numeric_row_rank(CMat::from_rows({a, c}), 1e-8) == 2, "generic rows");
  CHECK(numeric_row_rank(CMat::from_rows({a, b, c}), 1e-8) == 2,
        "three rows spanning two dims");
}

}  // namespace

int main() {
  test_build_precoders_axis_aligned();
  test_build_precoders_properties();
  test_build_precoders_errors();
  test_det_gram_identity();
  test_logdet_capacity();
  test_eig2();
  test_numeric_rank();
  return testutil::finish("test_linalg");
}
