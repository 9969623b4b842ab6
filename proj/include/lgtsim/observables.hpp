#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "circuits.hpp"
#include "oracle.hpp"

namespace lgtsim {

// Expectation of every labelled term of an operator.
inline std::vector<std::pair<std::string, real>> local_energies(const SparseOperator& op, const CVec& v) {
  std::vector<std::pair<std::string, real>> out;
  for (const auto& [label, m] : op.terms) out.emplace_back(label, expectation_value(m, v));
  return out;
}

inline AhmEnergies local_energies(const AhmOperator& op, const CVec& v) { return op.energies(v); }

// <N_b> with N_b = (total occupation - number of sites) / 2, two modes per site.
inline real baryon_number(const StateVector& st) {
  const RegisterLayout& L = *st.layout;
  const int sites = L.num_modes() / 2;
  const index_t B = L.block_dim();
  real acc = 0.0, nrm = 0.0;
  for (index_t o = 0; o < L.outer_dim(); ++o)
    for (index_t r = 0; r < B; ++r) {
      const real w = std::norm(st.amp(o * B + r));
      acc += w * std::popcount(L.configs()[r]);
      nrm += w;
    }
  return 0.5 * (acc / nrm - sites);
}

inline real fidelity(const StateVector& a, const StateVector& b) { return std::norm(inner_product(a, b)); }

// ---------------------------------------------------------------- abelian Higgs quench traces

struct EnergyTrace {
  std::vector<real> t;
  std::vector<AhmEnergies> e;
};

// Exact evolution sampled on an increasing time grid starting at t >= 0.
inline EnergyTrace ahm_quench_exact(const AhmOperator& H, const CVec& psi0, const std::vector<real>& ts,
                                    real tol = 1e-10) {
  EnergyTrace tr;
  CVec v = psi0;
  real t = 0.0;
  for (real s : ts) {
    require(s >= t, "time grid must be non-decreasing and start at t >= 0");
    if (s > t) v = exact_evolve(H, v, s - t, tol);
    t = s;
    tr.t.push_back(s);
    tr.e.push_back(H.energies(v));
  }
  return tr;
}

// Trotter evolution sampled after every step, including t = 0.
inline EnergyTrace ahm_quench_trotter(const AhmOperator& H, const StateVector& psi0, const Circuit& step, real dt,
                                      int steps) {
  EnergyTrace tr;
  StateVector s = psi0;
  tr.t.push_back(0.0);
  tr.e.push_back(H.energies(s.amp));
  for (int k = 1; k <= steps; ++k) {
    run_circuit(s, step);
    tr.t.push_back(k * dt);
    tr.e.push_back(H.energies(s.amp));
  }
  return tr;
}

// ---------------------------------------------------------------- hadronic tensor

struct CorrelatorTable {
  int mu = 0, nu = 0, p = 0;
  std::vector<int> xs;
  std::vector<real> ts;
  RMat W;  // rows: x, cols: t
  std::vector<int> ks;
  std::vector<real> omegas;
  CMat W_ft;  // rows: k, cols: omega
};

// Current operators on super-site X (sites 2X, 2X+1) in the truncated chain basis.
inline SparseMat chain_current(const ChainModel& cm, int component, int X) {
  require(X >= 0 && 2 * X + 1 < cm.N, "super-site out of range");
  const RegisterLayout& L = *cm.layout;
  const index_t dim = L.dim(), B = L.block_dim();
  if (component == 0) {
    std::vector<Triplet> t;
    for (index_t i = 0; i < dim; ++i) {
      const std::uint32_t c = L.configs()[i % B];
      int occ = 0;
      for (int n : {2 * X, 2 * X + 1})
        for (int a = 0; a < 2; ++a) occ += (c & L.mode_bit(cm.geo.mode(n, a) - cm.N)) ? 1 : 0;
      if (occ) t.emplace_back(i, i, static_cast<real>(occ));
    }
    return detail::from_triplets(dim, t);
  }
  require(component == 1, "current component must be 0 or 1");
  const SparseMat& A = cm.bond_hop.at(2 * X);
  return A + SparseMat(A.adjoint());
}

// Time evolution used by the correlator: exact (Krylov) or Trotter circuits with renormalization.
struct EvolutionBackend {
  enum class Kind { exact, trotter } kind = Kind::exact;
  real dt = 0.05;
  int order = 2;
  real tol = 1e-11;
};

namespace detail {

// Evolves an oracle-basis vector by tau with the chosen backend.
inline CVec chain_propagate(const ChainModel& cm, const CVec& v, real tau, const EvolutionBackend& be,
                            const Circuit* step) {
  if (be.kind == EvolutionBackend::Kind::exact) return exact_evolve(cm.H, v, tau, be.tol);
  const int n = static_cast<int>(std::lround(tau / be.dt));
  require(std::abs(n * be.dt - tau) < 1e-9, "output spacing must be a multiple of the Trotter step");
  StateVector s = chain_from_oracle(StateVector(cm.layout, v), cm);
  for (int k = 0; k < n; ++k) run_circuit_renormalized(s, *step);
  return chain_to_oracle(s, cm).amp;
}

}  // namespace detail

// W^{mu nu}(x, t) = Re <phi(t)| j^mu_x |chi(t)>, phi = e^{-iHt} B, chi = e^{-iHt} j^nu_0 B.
inline CorrelatorTable hadronic_correlator(const ChainModel& cm, const StateVector& baryon, const EvolutionBackend& be,
                                           int mu, int nu, const std::vector<real>& ts, int p = 0) {
  require(*baryon.layout == *cm.layout, "baryon state must use the oracle layout");
  require(!ts.empty() && ts.front() >= 0.0, "time grid must start at t >= 0");
  for (std::size_t i = 1; i < ts.size(); ++i) require(ts[i] > ts[i - 1], "time grid must increase");
  CorrelatorTable tab;
  tab.mu = mu;
  tab.nu = nu;
  tab.p = p;
  tab.ts = ts;
  const int nx = cm.N / 2;
  for (int X = 0; X < nx; ++X) tab.xs.push_back(X);
  tab.W = RMat::Zero(nx, static_cast<index_t>(ts.size()));
  std::vector<SparseMat> j;
  for (int X = 0; X < nx; ++X) j.push_back(chain_current(cm, mu, X));
  CVec phi = baryon.amp;
  CVec chi = chain_current(cm, nu, 0) * baryon.amp;
  const real chi_norm = chi.norm();
  Circuit step;
  if (be.kind == EvolutionBackend::Kind::trotter) {
    CouplingSet c;
    c.mu = cm.mu;
    c.x = cm.x;
    c.dt = be.dt;
    c.order = be.order;
    step = chain_trotter_step(*cm.group, cm.N, c);
  }
  real t = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const real tau = ts[k] - t;
    if (tau > 0) {
      phi = detail::chain_propagate(cm, phi, tau, be, &step);
      chi = detail::chain_propagate(cm, chi, tau, be, &step);
      if (be.kind == EvolutionBackend::Kind::trotter) {
        phi.normalize();
        if (chi_norm > 0) chi *= chi_norm / chi.norm();
      }
      t = ts[k];
    }
    for (int X = 0; X < nx; ++X) tab.W(X, static_cast<index_t>(k)) = phi.dot(j[X] * chi).real();
  }
  return tab;
}

enum class Window { rectangular, hann };

// W(k, omega) = sum_x sum_t dt e^{-i(omega t + 2 pi k x / (N/2))} w(t) W(x, t) on a uniform grid.
inline void hadronic_ft(CorrelatorTable& tab, const std::vector<int>& ks, const std::vector<real>& omegas,
                        Window window = Window::rectangular) {
  const auto nt = tab.ts.size();
  require(nt >= 2, "transform needs at least two time samples");
  const real dt = tab.ts[1] - tab.ts[0];
  for (std::size_t i = 1; i < nt; ++i)
    require(std::abs((tab.ts[i] - tab.ts[i - 1]) - dt) < 1e-9 * std::max<real>(1.0, dt), "time grid must be uniform");
  const int nx = static_cast<int>(tab.xs.size());
  tab.ks = ks;
  tab.omegas = omegas;
  tab.W_ft = CMat::Zero(static_cast<index_t>(ks.size()), static_cast<index_t>(omegas.size()));
  const real T = tab.ts.back() - tab.ts.front();
  for (std::size_t a = 0; a < ks.size(); ++a)
    for (std::size_t b = 0; b < omegas.size(); ++b) {
      cplx acc = 0.0;
      for (int X = 0; X < nx; ++X)
        for (std::size_t i = 0; i < nt; ++i) {
          real w = 1.0;
          if (window == Window::hann && T > 0) w = 0.5 * (1.0 + std::cos(pi * (tab.ts[i] - tab.ts.front()) / T));
          acc += dt * w * tab.W(X, static_cast<index_t>(i)) *
                 expi(-(omegas[b] * tab.ts[i] + 2.0 * pi * ks[a] * tab.xs[X] / nx));
        }
      tab.W_ft(static_cast<index_t>(a), static_cast<index_t>(b)) = acc;
    }
}

}  // namespace lgtsim
