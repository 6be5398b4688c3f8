#include "misobc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace misobc {

namespace {

constexpr double kDegenerateTol = 1e-12;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

CMat CMat::identity(std::size_t n) {
  CMat out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

CMat CMat::from_rows(const std::vector<CVec>& rows) {
  require(!rows.empty(), "from_rows: empty");
  CMat out(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require(rows[r].size() == out.cols(), "from_rows: ragged rows");
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = rows[r][c];
  }
  return out;
}

CMat CMat::from_cols(const std::vector<CVec>& cols) {
  require(!cols.empty(), "from_cols: empty");
  CMat out(cols[0].size(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    require(cols[c].size() == out.rows(), "from_cols: ragged columns");
    for (std::size_t r = 0; r < out.rows(); ++r) out(r, c) = cols[c][r];
  }
  return out;
}

CVec CMat::row(std::size_t r) const {
  CVec out(cols_);
  for (std::size_t c = 0; c < cols_; ++c) out[c] = (*this)(r, c);
  return out;
}

CVec CMat::col(std::size_t c) const {
  CVec out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

cplx dotu(const CVec& a, const CVec& b) {
  require(a.size() == b.size(), "dotu: size mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

cplx vdot(const CVec& a, const CVec& b) {
  require(a.size() == b.size(), "vdot: size mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double norm2(const CVec& a) {
  double s = 0.0;
  for (const cplx& x : a) s += std::norm(x);
  return s;
}

double vnorm(const CVec& a) { return std::sqrt(norm2(a)); }

CVec conj_vec(const CVec& a) {
  CVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::conj(a[i]);
  return out;
}

bool all_finite(const CVec& a) {
  for (const cplx& x : a)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
  return true;
}

bool all_finite(const CMat& a) {
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) {
      const cplx x = a(r, c);
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    }
  return true;
}

CMat mul(const CMat& a, const CMat& b) {
  require(a.cols() == b.rows(), "mul: dimension mismatch");
  CMat out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx av = a(r, k);
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += av * b(k, c);
    }
  return out;
}

CVec mul(const CMat& a, const CVec& x) {
  require(a.cols() == x.size(), "mul: dimension mismatch");
  CVec out(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    cplx s = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) s += a(r, c) * x[c];
    out[r] = s;
  }
  return out;
}

CMat hermitian(const CMat& a) {
  CMat out(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = std::conj(a(r, c));
  return out;
}

CVec unit_aligned(const CVec& v) {
  const double n = vnorm(v);
  require(n > kDegenerateTol, "unit_aligned: degenerate direction");
  CVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::conj(v[i]) / n;
  return out;
}

CVec unit_null(const CVec& aligned_unit) {
  const std::size_t m = aligned_unit.size();
  require(m >= 2, "unit_null: need dimension >= 2");
  // Gram-Schmidt the best-conditioned standard basis vector against the
  // aligned direction; the argmin choice makes the output deterministic.
  std::size_t j = 0;
  double best = std::abs(aligned_unit[0]);
  for (std::size_t i = 1; i < m; ++i) {
    const double a = std::abs(aligned_unit[i]);
    if (a < best) {
      best = a;
      j = i;
    }
  }
  CVec r(m);
  const cplx proj = std::conj(aligned_unit[j]);  // <aligned, e_j>^* form
  for (std::size_t i = 0; i < m; ++i) r[i] = -aligned_unit[i] * proj;
  r[j] += 1.0;
  const double n = vnorm(r);
  require(n > kDegenerateTol, "unit_null: degenerate direction");
  for (cplx& x : r) x /= n;
  return r;
}

PrecoderPair build_precoders(const CVec& g_hat, const CVec& h_hat) {
  require(g_hat.size() == h_hat.size(), "build_precoders: dimension mismatch");
  require(g_hat.size() >= 2, "build_precoders: need m >= 2");
  require(all_finite(g_hat) && all_finite(h_hat),
          "build_precoders: non-finite input");
  require(vnorm(g_hat) > kDegenerateTol && vnorm(h_hat) > kDegenerateTol,
          "build_precoders: degenerate direction (zero estimate)");
  const CVec w2 = unit_aligned(g_hat);
  const CVec w1 = unit_null(w2);
  const CVec q2 = unit_aligned(h_hat);
  const CVec q1 = unit_null(q2);
  return {CMat::from_cols({w1, w2}), CMat::from_cols({q1, q2})};
}

std::pair<double, double> det_gram_identity(const CMat& a) {
  require(a.cols() == 2 && a.rows() >= 2, "det_gram_identity: need m x 2");
  const CVec a1 = a.col(0);
  const CVec a2 = a.col(1);
  const double n2 = norm2(a2);
  require(n2 > 0.0, "det_gram_identity: degenerate second column");
  // route 1: 2x2 determinant of the Gram matrix
  const double lhs = norm2(a1) * n2 - std::norm(vdot(a1, a2));
  // route 2: ||a2||^2 a1^H (I - a2_bar a2_bar^H) a1
  const cplx c = vdot(a2, a1) / std::sqrt(n2);
  const double rhs = n2 * (norm2(a1) - std::norm(c));
  return {lhs, rhs};
}

double logdet_psd2(const CMat& gram, const std::array<double, 2>& noise) {
  require(gram.rows() == 2 && gram.cols() == 2, "logdet_psd2: need 2x2");
  require(all_finite(gram), "logdet_psd2: non-finite entries");
  require(noise[0] > 0.0 && noise[1] > 0.0, "logdet_psd2: noise must be > 0");
  const double m00 = 1.0 + gram(0, 0).real() / noise[0];
  const double m11 = 1.0 + gram(1, 1).real() / noise[1];
  const double c01 = std::norm(gram(0, 1)) / (noise[0] * noise[1]);
  const double det = m00 * m11 - c01;
  return std::log2(std::max(det, 1.0));
}

double logdet_capacity(const CMat& f, const std::array<double, 2>& lambda,
                       const std::array<double, 2>& noise) {
  require(f.rows() == 2 && f.cols() == 2, "logdet_capacity: need 2x2");
  require(all_finite(f), "logdet_capacity: non-finite entries");
  require(lambda[0] >= 0.0 && lambda[1] >= 0.0,
          "logdet_capacity: lambda must be >= 0");
  CMat gram(2, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < 2; ++k)
        s += lambda[k] * f(i, k) * std::conj(f(j, k));
      gram(i, j) = s;
    }
  return logdet_psd2(gram, noise);
}

std::pair<double, double> eig2(const CMat& h) {
  require(h.rows() == 2 && h.cols() == 2, "eig2: need 2x2");
  require(all_finite(h), "eig2: non-finite entries");
  double scale = 0.0;
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) scale = std::max(scale, std::abs(h(r, c)));
  const double tol = 1e-8 * (1.0 + scale);
  require(std::abs(h(0, 1) - std::conj(h(1, 0))) <= tol &&
              std::abs(h(0, 0).imag()) <= tol && std::abs(h(1, 1).imag()) <= tol,
          "eig2: matrix not Hermitian within tolerance");
  const double a = h(0, 0).real();
  const double d = h(1, 1).real();
  const double off = std::abs(0.5 * (h(0, 1) + std::conj(h(1, 0))));
  const double mid = 0.5 * (a + d);
  const double rad = std::hypot(0.5 * (a - d), off);
  double mu1 = mid + rad;
  double mu2 = mid - rad;
  mu1 = std::max(mu1, 0.0);
  mu2 = std::max(mu2, 0.0);
  return {mu1, mu2};
}

std::size_t numeric_row_rank(const CMat& a, double tol) {
  require(a.rows() >= 1 && a.cols() >= 1, "numeric_row_rank: empty matrix");
  double max_norm = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    max_norm = std::max(max_norm, vnorm(a.row(r)));
  if (max_norm == 0.0) return 0;
  const double thresh = tol * max_norm;
  std::vector<CVec> basis;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    CVec v = a.row(r);
    for (int pass = 0; pass < 2; ++pass)
      for (const CVec& b : basis) {
        const cplx c = vdot(b, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
      }
    const double n = vnorm(v);
    if (n > thresh) {
      for (cplx& x : v) x /= n;
      basis.push_back(std::move(v));
    }
  }
  return basis.size();
}

}  // namespace misobc
