#pragma once

#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <lgtsim/lgtsim.hpp>

namespace testutil {

using namespace lgtsim;

inline CVec random_vector(index_t n, unsigned seed = 7) {
  std::mt19937 rng(seed);
  std::normal_distribution<real> g;
  CVec v(n);
  for (index_t i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v.normalized();
}

inline CMat random_unitary(int n, unsigned seed = 11) {
  std::mt19937 rng(seed);
  std::normal_distribution<real> g;
  CMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<CMat> qr(a);
  return qr.householderQ();
}

inline CMat kron(const CMat& a, const CMat& b) {
  CMat k(a.rows() * b.rows(), a.cols() * b.cols());
  for (index_t i = 0; i < a.rows(); ++i)
    for (index_t j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

// exp(-i t H) for a Hermitian matrix by dense diagonalization.
inline CMat dense_expm(const CMat& H, real t) {
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  CVec ph(H.rows());
  for (index_t i = 0; i < H.rows(); ++i) ph(i) = expi(-t * es.eigenvalues()(i));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

// Dense Jordan-Wigner annihilator for mode k of an unrestricted hybrid layout.
inline CMat annihilator(const RegisterLayout& L, int k) {
  const index_t n = L.dim(), B = L.block_dim();
  CMat a = CMat::Zero(n, n);
  const int M = L.num_modes();
  for (index_t o = 0; o < L.outer_dim(); ++o)
    for (index_t r = 0; r < B; ++r) {
      const std::uint32_t c = L.configs()[r];
      const std::uint32_t bit = 1u << (M - 1 - k);
      if (!(c & bit)) continue;
      int before = 0;
      for (int j = 0; j < k; ++j) before += (c >> (M - 1 - j)) & 1u;
      const index_t r2 = L.rank(c & ~bit);
      if (r2 < 0) continue;
      a(o * B + r2, o * B + r) = (before & 1) ? -1.0 : 1.0;
    }
  return a;
}

// Matrix-vector wrapper around a dense Hermitian matrix.
struct DenseOp {
  CMat m;
  index_t dim() const { return m.rows(); }
  void apply(const CVec& in, CVec& out) const { out.noalias() = m * in; }
};

inline CMat sparse_to_dense(const SparseMat& s) { return CMat(s); }

}  // namespace testutil
