#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Eigenvalues>

#include "../core.hpp"

namespace lgtsim {

struct KrylovOptions {
  int max_dim = 30;
  int max_substeps = 200000;
};

namespace detail {

// Lanczos basis with full reorthogonalization; returns the number of basis vectors built.
template <class Op>
int lanczos_basis(const Op& op, const CVec& v0, int m, CMat& V, RVec& alpha, RVec& beta, real& beta_last) {
  const index_t n = v0.size();
  V.resize(n, m);
  alpha.setZero(m);
  beta.setZero(m);
  V.col(0) = v0 / v0.norm();
  CVec w(n);
  int k = 0;
  beta_last = 0.0;
  for (; k < m; ++k) {
    op.apply(V.col(k), w);
    alpha(k) = V.col(k).dot(w).real();
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j <= k; ++j) w -= V.col(j) * V.col(j).dot(w);
    const real b = w.norm();
    if (k + 1 == m) {
      beta_last = b;
      ++k;
      break;
    }
    if (b < 1e-12 * std::max<real>(1.0, std::abs(alpha(k)))) {
      beta_last = 0.0;
      ++k;
      break;
    }
    beta(k) = b;
    V.col(k + 1) = w / b;
  }
  return k;
}

inline Eigen::SelfAdjointEigenSolver<RMat> tridiag_eigen(const RVec& alpha, const RVec& beta, int k) {
  RMat T = RMat::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    T(i, i) = alpha(i);
    if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta(i);
  }
  return Eigen::SelfAdjointEigenSolver<RMat>(T);
}

}  // namespace detail

// exp(-i H t) v by restarted Lanczos with adaptive substeps; the local error estimate per
// substep is kept below tol * tau / t.
template <class Op>
CVec exact_evolve(const Op& op, const CVec& v, real t, real tol = 1e-10, KrylovOptions opt = {}) {
  require(std::isfinite(t), "evolution time must be finite");
  CVec cur = v;
  const real nrm = v.norm();
  if (t == 0.0 || nrm == 0.0) return cur;
  const real total = std::abs(t);
  const real dir = t > 0 ? 1.0 : -1.0;
  real done = 0.0;
  real tau = total;
  CMat V;
  RVec alpha, beta;
  int substeps = 0;
  while (done < total) {
    if (++substeps > opt.max_substeps) throw numeric_failure("Krylov evolution did not converge");
    real beta_last = 0.0;
    const real cn = cur.norm();
    const int k = detail::lanczos_basis(op, cur, std::min<index_t>(opt.max_dim, cur.size()), V, alpha, beta, beta_last);
    const auto es = detail::tridiag_eigen(alpha, beta, k);
    const RMat& Q = es.eigenvectors();
    const RVec& lam = es.eigenvalues();
    tau = std::min(tau * 2.0, total - done);
    CVec y;
    for (int tries = 0;; ++tries) {
      CVec c(k);
      for (int i = 0; i < k; ++i) c(i) = expi(-dir * lam(i) * tau) * Q(0, i);
      y = Q.cast<cplx>() * c;
      const real err = cn * beta_last * std::abs(y(k - 1));
      const real budget = tol * tau / total;
      if (err <= budget || beta_last == 0.0) break;
      if (tries > 60) throw numeric_failure("Krylov step size underflow");
      tau *= 0.5;
    }
    cur = cn * (V.leftCols(k) * y);
    done += tau;
    if (total - done < 1e-14 * total) break;
  }
  // keep the norm exactly; Lanczos rounding only perturbs it at the 1e-14 level
  cur *= nrm / cur.norm();
  return cur;
}

struct EigenPair {
  real energy = 0.0;
  CVec state;
  int iterations = 0;
};

// Fixes the global phase: the first component of maximal modulus becomes real positive.
inline void fix_phase(CVec& v) {
  index_t best = 0;
  real bm = -1.0;
  for (index_t i = 0; i < v.size(); ++i) {
    const real a = std::abs(v(i));
    if (a > bm + 1e-12) {
      bm = a;
      best = i;
    }
  }
  if (bm > 0) v *= std::conj(v(best)) / bm;
}

// Lowest eigenpair reachable from the start vector (restarted Lanczos, full reorthogonalization).
template <class Op>
EigenPair ground_state(const Op& op, const CVec& start, real tol = 1e-10, int krylov_dim = 80, int max_restarts = 200) {
  require(start.size() == op.dim() && start.norm() > 0, "bad start vector");
  CVec v = start.normalized();
  CMat V;
  RVec alpha, beta;
  EigenPair out;
  CVec hv(v.size());
  for (int r = 0; r < max_restarts; ++r) {
    real beta_last = 0.0;
    const int k = detail::lanczos_basis(op, v, std::min<index_t>(krylov_dim, v.size()), V, alpha, beta, beta_last);
    const auto es = detail::tridiag_eigen(alpha, beta, k);
    v = V.leftCols(k) * es.eigenvectors().col(0).cast<cplx>();
    v.normalize();
    op.apply(v, hv);
    const real e = v.dot(hv).real();
    const real res = (hv - e * v).norm();
    out.energy = e;
    out.iterations = r + 1;
    if (res < tol) {
      fix_phase(v);
      out.state = v;
      return out;
    }
  }
  throw numeric_failure("ground state search did not converge");
}

}  // namespace lgtsim
