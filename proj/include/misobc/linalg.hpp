#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace misobc {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

// Row-major complex matrix. Everything in this simulator is tiny
// (m <= 8 rows, 2 columns for precoders, 2x2 equivalent channels),
// so a flat vector is all we need.
class CMat {
 public:
  CMat() = default;
  CMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), e_(rows * cols) {}

  static CMat identity(std::size_t n);
  static CMat from_rows(const std::vector<CVec>& rows);
  static CMat from_cols(const std::vector<CVec>& cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return e_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return e_[r * cols_ + c];
  }

  CVec row(std::size_t r) const;
  CVec col(std::size_t c) const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<cplx> e_;
};

// bilinear product sum_i a_i b_i (the h^T x convention used throughout)
cplx dotu(const CVec& a, const CVec& b);
// sesquilinear product sum_i conj(a_i) b_i
cplx vdot(const CVec& a, const CVec& b);
double norm2(const CVec& a);
double vnorm(const CVec& a);
CVec conj_vec(const CVec& a);
bool all_finite(const CVec& a);
bool all_finite(const CMat& a);

CMat mul(const CMat& a, const CMat& b);
CVec mul(const CMat& a, const CVec& x);
CMat hermitian(const CMat& a);

// conj(v)/||v||, the unit direction d with v^T d real and maximal
CVec unit_aligned(const CVec& v);
// deterministic unit vector Hermitian-orthogonal to a unit direction
// (equivalently, bilinear-orthogonal to its conjugate)
CVec unit_null(const CVec& aligned_unit);

struct PrecoderPair {
  CMat w;  // m x 2, columns [w1 w2]
  CMat q;  // m x 2, columns [q1 q2]
};

// Orthonormal per-user precoders: column 2 aligned with the estimated
// channel (conjugate convention), column 1 in its bilinear null space.
PrecoderPair build_precoders(const CVec& g_hat, const CVec& h_hat);

// Both sides of det[A^H A] = ||a2||^2 a1^H (I - a2_bar a2_bar^H) a1
// for an m x 2 matrix A; used as an oracle pair.
std::pair<double, double> det_gram_identity(const CMat& a);

// log2 det(I + N^{-1/2} F Lambda F^H N^{-1/2}) for a 2x2 F with diagonal
// Lambda >= 0 and diagonal noise > 0. Returns bits per channel use.
double logdet_capacity(const CMat& f, const std::array<double, 2>& lambda,
                       const std::array<double, 2>& noise);

// same quantity given the 2x2 PSD Gram matrix G = F Lambda F^H
double logdet_psd2(const CMat& gram, const std::array<double, 2>& noise);

// eigenvalues of a 2x2 Hermitian PSD matrix, mu1 >= mu2 >= 0 (clipped)
std::pair<double, double> eig2(const CMat& h);

// numerical row rank via modified Gram-Schmidt with re-orthogonalization
std::size_t numeric_row_rank(const CMat& a, double tol);

}  // namespace misobc
