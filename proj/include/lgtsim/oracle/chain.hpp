#pragma once

#include <string>
#include <vector>

#include "../circuits.hpp"
#include "operators.hpp"

namespace lgtsim {

using Triplet = Eigen::Triplet<cplx, std::int64_t>;

// Truncated link basis: the retained irrep rows of the group Fourier matrix (rows x group elements).
inline CMat truncated_link_basis(const GroupTable& G) {
  const IrrepBasis b = group_fourier(G);
  const auto rows = b.retained_rows();
  CMat T(static_cast<index_t>(rows.size()), G.d);
  for (std::size_t r = 0; r < rows.size(); ++r) T.row(static_cast<index_t>(r)) = b.F.row(rows[r]);
  return T;
}

// Chain Hamiltonian  sum_l E_l^2 + mu sum_n (-1)^n n_n - i x sum_n s_n (psi^dag_n U_n psi_{n+1} - h.c.)
// on a layout with truncated links (radix = retained irrep rows) and fixed fermion number.
struct ChainModel {
  int N = 0;
  real mu = 0.0, x = 0.0;
  GroupPtr group;
  CMat link_basis;                  // retained rows x group elements
  LayoutPtr layout;
  SparseOperator H;                 // terms electric_l, mass_n, hopping_n
  SparseMat H0, Hx;
  std::vector<SparseMat> bond_hop;  // psi^dag_n U_n psi_{n+1} per bond (no coupling factors)
  ChainGeometry geo;

  int fermion_number() const { return layout->fermion_number(); }
};

// Link-space matrix (radix x radix) of a group-basis operator in the given link basis.
inline CMat link_operator(const CMat& basis, const CMat& group_op) { return basis * group_op * basis.adjoint(); }

// U_{ab} link matrices: the group-diagonal D(g)_{ab} expressed in the link basis.
inline std::vector<CMat> link_rep_matrices(const GroupTable& G, const CMat& basis) {
  const int n = G.rep_dim();
  std::vector<CMat> out;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      CVec diag(G.d);
      for (int g = 0; g < G.d; ++g) diag(g) = G.rep[g](a, b);
      out.push_back(link_operator(basis, diag.asDiagonal().toDenseMatrix()));
    }
  return out;
}

namespace detail {

// Triplets of  sum_ab psi^dag_{n,a} (Ulink_ab) psi_{m,b}  on the given layout.
inline void hop_triplets(const RegisterLayout& L, const ChainGeometry& geo, int n, int m, int link,
                         const std::vector<CMat>& U, int rep_dim, std::vector<Triplet>& t) {
  const index_t B = L.block_dim();
  const int d = L.radix(link);
  const index_t stride = L.qudit_stride(link);
  for (int a = 0; a < rep_dim; ++a)
    for (int b = 0; b < rep_dim; ++b) {
      const CMat& u = U[a * rep_dim + b];
      const int ma = geo.mode(n, a) - L.num_qudits();
      const int mb = geo.mode(m, b) - L.num_qudits();
      for (index_t r = 0; r < B; ++r) {
        const std::uint32_t c = L.configs()[r];
        if (!(c & L.mode_bit(mb))) continue;
        std::uint32_t y = c & ~L.mode_bit(mb);
        int sgn = (std::popcount(y & L.mask_before(mb)) & 1) ? -1 : 1;
        if (y & L.mode_bit(ma)) continue;
        sgn *= (std::popcount(y & L.mask_before(ma)) & 1) ? -1 : 1;
        y |= L.mode_bit(ma);
        const index_t r2 = L.rank(y);
        if (r2 < 0) continue;
        for (index_t o = 0; o < L.outer_dim(); ++o) {
          const int k = L.qudit_digit(o, link);
          for (int j = 0; j < d; ++j) {
            const cplx w = u(j, k);
            if (std::abs(w) < 1e-15) continue;
            const index_t o2 = o + (j - k) * stride;
            t.emplace_back(o2 * B + r2, o * B + r, static_cast<real>(sgn) * w);
          }
        }
      }
    }
}

inline SparseMat from_triplets(index_t n, const std::vector<Triplet>& t) {
  SparseMat m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.prune(cplx(0.0), 1e-15);
  return m;
}

}  // namespace detail

inline ChainModel build_chain(int N, real mu, real x, int fermion_number, GroupPtr G = make_group("Q8")) {
  ChainModel cm;
  cm.geo = chain_geometry(N);
  cm.N = N;
  cm.mu = mu;
  cm.x = x;
  cm.group = G;
  cm.link_basis = truncated_link_basis(*G);
  const int radix = static_cast<int>(cm.link_basis.rows());
  cm.layout = make_layout(RegisterLayout::hybrid(std::vector<int>(N, radix), 2 * N, fermion_number));
  const RegisterLayout& L = *cm.layout;
  const index_t dim = L.dim();
  const index_t B = L.block_dim();
  const IrrepBasis basis = group_fourier(*G);
  const auto rows = basis.retained_rows();

  for (int l = 0; l < N; ++l) {
    std::vector<Triplet> t;
    for (index_t i = 0; i < dim; ++i) {
      const real e2 = basis.casimir[basis.row_irrep[rows[L.qudit_digit(i / B, l)]]];
      if (e2 != 0.0) t.emplace_back(i, i, e2);
    }
    cm.H.terms.emplace_back("electric_" + std::to_string(l), detail::from_triplets(dim, t));
  }
  for (int n = 0; n < N; ++n) {
    std::vector<Triplet> t;
    const real sgn = cm.geo.parity(n) * mu;
    for (index_t i = 0; i < dim; ++i) {
      const std::uint32_t c = L.configs()[i % B];
      int occ = 0;
      for (int a = 0; a < G->rep_dim(); ++a) occ += (c & L.mode_bit(cm.geo.mode(n, a) - N)) ? 1 : 0;
      if (occ) t.emplace_back(i, i, sgn * occ);
    }
    cm.H.terms.emplace_back("mass_" + std::to_string(n), detail::from_triplets(dim, t));
  }
  const auto U = link_rep_matrices(*G, cm.link_basis);
  for (int n = 0; n < N; ++n) {
    std::vector<Triplet> t;
    detail::hop_triplets(L, cm.geo, n, (n + 1) % N, cm.geo.link(n), U, G->rep_dim(), t);
    SparseMat A = detail::from_triplets(dim, t);
    const cplx coef = -I * x * static_cast<real>(cm.geo.bond_sign(n));
    SparseMat h = coef * (A - SparseMat(A.adjoint()));
    cm.bond_hop.push_back(std::move(A));
    cm.H.terms.emplace_back("hopping_" + std::to_string(n), std::move(h));
  }
  cm.H0 = SparseMat(dim, dim);
  cm.Hx = SparseMat(dim, dim);
  for (const auto& [label, m] : cm.H.terms) {
    if (label.rfind("hopping_", 0) == 0)
      cm.Hx += m;
    else
      cm.H0 += m;
  }
  cm.H.m = cm.H0 + cm.Hx;
  return cm;
}

// ---------------------------------------------------------------- chain symmetries

// Gauss transformation V_{x,h}: out-link g -> h g, in-link g -> g h^-1, site modes rotated by
// D(h^-1) (fermion_inverse) or D(h). Works on any chain layout whose links use link_basis.
inline void apply_chain_gauss(StateVector& st, const GroupTable& G, const CMat& link_basis, int N, int site, int h,
                              bool fermion_inverse = false) {
  const auto geo = chain_geometry(N);
  const int out_link = geo.link(site);
  const int in_link = geo.link((site - 1 + N) % N);
  apply_single(st, out_link, link_operator(link_basis, G.left_mult(h)));
  apply_single(st, in_link, link_operator(link_basis, G.right_mult(G.invert(h))));
  const CMat M = unitary_log(G.rep[fermion_inverse ? G.invert(h) : h]);
  apply_fermion_rotation(st, geo.site_modes(site), M);
}

// Projector onto gauge-invariant states: prod_x (1/|G|) sum_h V_{x,h}.
inline void apply_chain_gauss_projector(StateVector& st, const GroupTable& G, const CMat& link_basis, int N,
                                        bool fermion_inverse = false) {
  for (int site = 0; site < N; ++site) {
    CVec acc = CVec::Zero(st.dim());
    for (int h = 0; h < G.d; ++h) {
      StateVector w = st;
      apply_chain_gauss(w, G, link_basis, N, site, h, fermion_inverse);
      acc += w.amp;
    }
    st.amp = acc / static_cast<real>(G.d);
  }
}

// Lattice translation by `shift` sites (links and modes), with anti-periodic fermions across the boundary.
inline StateVector chain_translate(const StateVector& st, int N, int shift) {
  const RegisterLayout& L = *st.layout;
  const auto geo = chain_geometry(N);
  require(L.num_qudits() == N && L.num_modes() == 2 * N, "not a chain layout");
  shift = ((shift % N) + N) % N;
  StateVector out(st.layout);
  const index_t B = L.block_dim();
  std::vector<int> occ;
  for (index_t r = 0; r < B; ++r) {
    const std::uint32_t c = L.configs()[r];
    occ.clear();
    int wraps = 0;
    std::uint32_t c2 = 0;
    for (int k = 0; k < 2 * N; ++k)
      if (c & L.mode_bit(k)) {
        const int site = k / 2, alpha = k % 2;
        const int ns = site + shift;
        if (ns >= N) ++wraps;
        const int k2 = geo.mode(ns % N, alpha) - N;
        occ.push_back(k2);
        c2 |= L.mode_bit(k2);
      }
    int inv = 0;
    for (std::size_t i = 0; i < occ.size(); ++i)
      for (std::size_t j = i + 1; j < occ.size(); ++j)
        if (occ[i] > occ[j]) ++inv;
    const real sgn = ((inv + wraps) & 1) ? -1.0 : 1.0;
    const index_t r2 = L.rank(c2);
    for (index_t o = 0; o < L.outer_dim(); ++o) {
      index_t o2 = 0;
      for (int l = 0; l < N; ++l) o2 += L.qudit_digit(o, l) * L.qudit_stride((l + shift) % N);
      out.amp(o2 * B + r2) = sgn * st.amp(o * B + r);
    }
  }
  return out;
}

// Maps between the group-basis circuit layout and the truncated oracle layout of a chain.
inline StateVector chain_to_oracle(const StateVector& group_state, const ChainModel& cm) {
  std::vector<const CMat*> maps(cm.N, &cm.link_basis);
  return transform_qudits(group_state, cm.layout, maps);
}

inline StateVector chain_from_oracle(const StateVector& oracle_state, const ChainModel& cm) {
  const CMat back = cm.link_basis.adjoint();
  std::vector<const CMat*> maps(cm.N, &back);
  auto target = chain_layout(cm.N, cm.group->d, cm.fermion_number());
  return transform_qudits(oracle_state, target, maps);
}

}  // namespace lgtsim
