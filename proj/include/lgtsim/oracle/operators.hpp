#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "../register.hpp"

namespace lgtsim {

using SparseMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor, std::int64_t>;

// Sparse Hermitian operator with an optional labelled decomposition into terms.
struct SparseOperator {
  SparseMat m;
  std::vector<std::pair<std::string, SparseMat>> terms;

  index_t dim() const { return m.rows(); }
  void apply(const CVec& in, CVec& out) const { out.noalias() = m * in; }

  const SparseMat& term(const std::string& label) const {
    for (const auto& t : terms)
      if (t.first == label) return t.second;
    throw invalid_parameter("unknown term: " + label);
  }
};

inline real hermiticity_error(const SparseMat& m) {
  const SparseMat d = m - SparseMat(m.adjoint());
  real e = 0.0;
  for (index_t k = 0; k < d.outerSize(); ++k)
    for (SparseMat::InnerIterator it(d, k); it; ++it) e = std::max(e, std::abs(it.value()));
  return e;
}

inline real expectation_value(const SparseMat& m, const CVec& v) { return v.dot(m * v).real(); }

// Retained flat indices of a parent layout.
struct SectorBasis {
  LayoutPtr parent;
  std::vector<index_t> indices;

  index_t size() const { return static_cast<index_t>(indices.size()); }
  CVec restrict_vec(const CVec& v) const {
    require(v.size() == parent->dim(), "vector does not match parent layout");
    CVec r(size());
    for (index_t i = 0; i < size(); ++i) r(i) = v(indices[i]);
    return r;
  }
  CVec embed(const CVec& r) const {
    require(r.size() == size(), "vector does not match sector");
    CVec v = CVec::Zero(parent->dim());
    for (index_t i = 0; i < size(); ++i) v(indices[i]) = r(i);
    return v;
  }
};

// Indices of an unrestricted layout whose fermion configuration has the given particle number.
inline SectorBasis fermion_number_sector(const LayoutPtr& parent, int n) {
  require(parent->fermion_number() < 0, "parent layout must keep all fillings");
  SectorBasis s{parent, {}};
  const index_t B = parent->block_dim();
  for (index_t o = 0; o < parent->outer_dim(); ++o)
    for (index_t r = 0; r < B; ++r)
      if (std::popcount(parent->configs()[r]) == n) s.indices.push_back(o * B + r);
  return s;
}

// Coordinate-list text dump: header with dimension and term labels, then "row col re im" lines.
inline void write_operator(std::ostream& os, const SparseOperator& op) {
  os << "lgtsim-operator 1\n";
  os << "dimension " << op.dim() << "\n";
  os << "terms " << op.terms.size();
  for (const auto& t : op.terms) os << ' ' << t.first;
  os << "\nnonzero " << op.m.nonZeros() << "\n";
  char buf[128];
  for (index_t k = 0; k < op.m.outerSize(); ++k)
    for (SparseMat::InnerIterator it(op.m, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%lld %lld %.17g %.17g\n", static_cast<long long>(it.row()),
                    static_cast<long long>(it.col()), it.value().real(), it.value().imag());
      os << buf;
    }
}

template <class Op>
CMat dense_operator(const Op& op) {
  const index_t n = op.dim();
  require(n <= 20000, "dense operator too large");
  CMat m(n, n);
  CVec e = CVec::Zero(n), out(n);
  for (index_t j = 0; j < n; ++j) {
    e.setZero();
    e(j) = 1.0;
    op.apply(e, out);
    m.col(j) = out;
  }
  return m;
}

// Largest singular value of a linear map by power iteration on A^dag A (deterministic start).
inline real operator_norm_estimate(index_t n, const std::function<CVec(const CVec&)>& A,
                                   const std::function<CVec(const CVec&)>& Adag, int iters = 60) {
  CVec v(n);
  std::uint64_t s = 0x9E3779B97F4A7C15ull;
  for (index_t i = 0; i < n; ++i) {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    v(i) = cplx(static_cast<real>(s % 2001) / 1000.0 - 1.0, static_cast<real>((s >> 20) % 2001) / 1000.0 - 1.0);
  }
  v.normalize();
  real sigma = 0.0;
  for (int k = 0; k < iters; ++k) {
    CVec w = A(v);
    sigma = w.norm();
    if (sigma < 1e-300) return 0.0;
    CVec u = Adag(w);
    const real nu = u.norm();
    if (nu < 1e-300) return sigma;
    v = u / nu;
  }
  return sigma;
}

}  // namespace lgtsim
