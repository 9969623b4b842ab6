#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "circuits.hpp"
#include "observables.hpp"
#include "oracle.hpp"

namespace lgtsim {

// ---------------------------------------------------------------- product states

// Product of per-qudit vectors with a fermion superposition given as {config -> amplitude}.
inline StateVector product_state(LayoutPtr layout, const std::vector<CVec>& qudit_vectors,
                                 const std::map<std::uint32_t, cplx>& fermions) {
  const RegisterLayout& L = *layout;
  require(static_cast<int>(qudit_vectors.size()) == L.num_qudits(), "one vector per qudit");
  for (int q = 0; q < L.num_qudits(); ++q) require(qudit_vectors[q].size() == L.radix(q), "qudit vector size mismatch");
  CVec outer = CVec::Ones(1);
  for (const auto& v : qudit_vectors) {
    CVec n(outer.size() * v.size());
    for (index_t i = 0; i < outer.size(); ++i) n.segment(i * v.size(), v.size()) = outer(i) * v;
    outer = std::move(n);
  }
  CVec block = CVec::Zero(L.block_dim());
  for (const auto& [c, a] : fermions) {
    const auto r = L.rank(c);
    require(r >= 0, "fermion configuration outside the layout sector");
    block(r) += a;
  }
  StateVector s(layout);
  for (index_t o = 0; o < L.outer_dim(); ++o) s.amp.segment(o * L.block_dim(), L.block_dim()) = outer(o) * block;
  return s;
}

// Sign and configuration of psi^dag_{m1} psi^dag_{m2} ... |0> (creation order as listed).
inline std::pair<std::uint32_t, real> fermion_config(const RegisterLayout& L, const std::vector<int>& modes) {
  std::uint32_t c = 0;
  int inv = 0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    require(!(c & L.mode_bit(modes[i])), "mode created twice");
    c |= L.mode_bit(modes[i]);
    for (std::size_t j = i + 1; j < modes.size(); ++j)
      if (modes[i] > modes[j]) ++inv;
  }
  return {c, (inv & 1) ? -1.0 : 1.0};
}

// ---------------------------------------------------------------- abelian Higgs flux string

// Links carrying one unit of electric flux must form a closed loop with nonzero winding.
inline void validate_flux_string(const LatticeSpec& lat, int d, const std::vector<int>& links) {
  require(lat.dim == 2, "flux strings need a 2D lattice");
  std::vector<int> m(lat.num_links(), 0);
  for (int l : links) {
    require(l >= 0 && l < lat.num_links(), "flux link out of range");
    require(m[l] == 0, "flux link listed twice");
    m[l] = 1;
  }
  for (const auto& s : lat.stars) {
    int div = 0;
    for (int a = 0; a < 4; ++a) div += s.sign[a] * m[s.links[a]];
    require(((div % d) + d) % d == 0, "flux string is not closed");
  }
  int wx = 0, wy = 0;
  for (int y = 0; y < lat.extent[1]; ++y) wx += m[lat.link_index(lat.site_index(0, y), 0)];
  for (int x = 0; x < lat.extent[0]; ++x) wy += m[lat.link_index(lat.site_index(x, 0), 1)];
  require(wx % d != 0 || wy % d != 0, "flux string does not wind around the torus");
}

// Product state with one electric unit on each string link, written in the group basis.
inline StateVector flux_string_state(const LatticeSpec& lat, const GroupTable& G, const std::vector<int>& links) {
  require(is_cyclic(G), "flux strings are defined for cyclic groups");
  validate_flux_string(lat, G.d, links);
  const IrrepBasis b = group_fourier(G);
  std::vector<CVec> v(lat.num_links(), b.F.row(0).adjoint());
  for (int l : links) v[l] = b.F.row(1).adjoint();
  return product_state(ahm_layout(lat, G.d), v, {{0u, 1.0}});
}

// Default string: the x links of row 0.
inline std::vector<int> default_flux_links(const LatticeSpec& lat) {
  std::vector<int> out;
  for (int x = 0; x < lat.extent[0]; ++x) out.push_back(lat.link_index(lat.site_index(x, 0), 0));
  return out;
}

// ---------------------------------------------------------------- chain states

// Link vector of the trivial irrep in a given link basis (identity basis = group basis).
inline CVec chain_link_vacuum(const GroupTable& G, const CMat& link_basis) {
  const IrrepBasis b = group_fourier(G);
  return link_basis * b.F.row(0).adjoint();
}

inline std::vector<int> vacuum_modes(int N) {
  std::vector<int> m;
  for (int n = 1; n < N; n += 2) {
    m.push_back(2 * n);
    m.push_back(2 * n + 1);
  }
  return m;
}

// Staggered vacuum |O>: odd sites doubly occupied, links in the trivial irrep.
inline StateVector chain_vacuum_state(LayoutPtr layout, const GroupTable& G, const CMat& link_basis, int N) {
  const auto [c, s] = fermion_config(*layout, vacuum_modes(N));
  return product_state(layout, std::vector<CVec>(N, chain_link_vacuum(G, link_basis)), {{c, s}});
}

// sum_{n even} e^{2 pi i p n / N} psi^dag_{n,1} psi^dag_{n,2} |O>, normalized.
inline StateVector baryon_reference_state(LayoutPtr layout, const GroupTable& G, const CMat& link_basis, int N, int p) {
  chain_geometry(N);
  require(p >= 0 && p < N / 2, "baryon momentum out of range");
  std::map<std::uint32_t, cplx> f;
  const auto vac = vacuum_modes(N);
  for (int n = 0; n < N; n += 2) {
    std::vector<int> modes{2 * n, 2 * n + 1};
    modes.insert(modes.end(), vac.begin(), vac.end());
    const auto [c, s] = fermion_config(*layout, modes);
    f[c] += s * expi(2.0 * pi * p * n / N) / std::sqrt(N / 2.0);
  }
  return product_state(layout, std::vector<CVec>(N, chain_link_vacuum(G, link_basis)), f);
}

inline StateVector baryon_reference_state(const ChainModel& cm, int p) {
  return baryon_reference_state(cm.layout, *cm.group, cm.link_basis, cm.N, p);
}

// ---------------------------------------------------------------- adiabatic preparation

struct RampKnot {
  real fraction = 0.0;  // position along the ramp in [0, 1]
  real x = 0.0;
  real mu = 0.0;
};

struct RampSchedule {
  std::vector<RampKnot> knots;  // sorted by fraction, first at 0 and last at 1
  int steps = 0;
  real dt = 0.05;

  static RampSchedule linear(real mu, real x0, real x1, int steps, real dt) {
    return RampSchedule{{{0.0, x0, mu}, {1.0, x1, mu}}, steps, dt};
  }
  RampKnot at(real s) const {
    require(knots.size() >= 2, "ramp needs at least two knots");
    for (std::size_t i = 1; i < knots.size(); ++i)
      if (s <= knots[i].fraction || i + 1 == knots.size()) {
        const auto& a = knots[i - 1];
        const auto& b = knots[i];
        const real w = b.fraction > a.fraction ? std::clamp((s - a.fraction) / (b.fraction - a.fraction), 0.0, 1.0) : 1.0;
        return {s, a.x + w * (b.x - a.x), a.mu + w * (b.mu - a.mu)};
      }
    return knots.back();
  }
};

struct PrepResult {
  StateVector state;
  std::vector<real> fidelity_trace;
  real fidelity = 0.0;
};

// Second-order Trotter evolution with couplings interpolated at each step midpoint.
// target (oracle layout) is optional; when given, the per-step fidelity is recorded.
inline PrepResult adiabatic_prepare(const StateVector& initial, const GroupTable& G, int N, const RampSchedule& ramp,
                                    const ChainModel* oracle = nullptr, const StateVector* target = nullptr) {
  PrepResult res;
  res.state = initial;
  auto fid = [&](const StateVector& s) {
    if (!oracle || !target) return 0.0;
    StateVector o = chain_to_oracle(s, *oracle);
    return fidelity(o, *target) / (o.amp.squaredNorm() * target->amp.squaredNorm());
  };
  res.fidelity_trace.push_back(fid(res.state));
  for (int k = 0; k < ramp.steps; ++k) {
    const auto knot = ramp.at((k + 0.5) / ramp.steps);
    CouplingSet c;
    c.mu = knot.mu;
    c.x = knot.x;
    c.dt = ramp.dt;
    c.order = 2;
    run_circuit_renormalized(res.state, chain_trotter_step(G, N, c));
    res.fidelity_trace.push_back(fid(res.state));
  }
  res.fidelity = res.fidelity_trace.back();
  return res;
}

// ---------------------------------------------------------------- variational preparation

struct NelderMeadOptions {
  int max_evals = 2000;
  real tol = 1e-9;
  real initial_step = 0.1;
  std::uint64_t seed = 12345;
};

struct NelderMeadResult {
  std::vector<real> x;
  real value = 0.0;
  int evals = 0;
  bool converged = false;
};

// Derivative-free minimization; the initial simplex is perturbed with a seeded generator.
inline NelderMeadResult nelder_mead(const std::function<real(const std::vector<real>&)>& f, std::vector<real> x0,
                                    const NelderMeadOptions& opt) {
  const std::size_t n = x0.size();
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<real> jitter(0.5, 1.5);
  std::vector<std::vector<real>> P(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) P[i + 1][i] += opt.initial_step * jitter(rng);
  std::vector<real> F(n + 1);
  NelderMeadResult res;
  for (std::size_t i = 0; i <= n; ++i) F[i] = f(P[i]);
  res.evals = static_cast<int>(n + 1);
  std::vector<std::size_t> idx(n + 1);
  while (res.evals < opt.max_evals) {
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return F[a] < F[b]; });
    const std::size_t best = idx[0], worst = idx[n], second = idx[n - 1];
    if (std::abs(F[worst] - F[best]) < opt.tol) {
      res.converged = true;
      break;
    }
    std::vector<real> cen(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) cen[k] += P[idx[i]][k] / static_cast<real>(n);
    auto along = [&](real t) {
      std::vector<real> y(n);
      for (std::size_t k = 0; k < n; ++k) y[k] = cen[k] + t * (P[worst][k] - cen[k]);
      return y;
    };
    auto xr = along(-1.0);
    const real fr = f(xr);
    ++res.evals;
    if (fr < F[best]) {
      auto xe = along(-2.0);
      const real fe = f(xe);
      ++res.evals;
      if (fe < fr) {
        P[worst] = xe;
        F[worst] = fe;
      } else {
        P[worst] = xr;
        F[worst] = fr;
      }
    } else if (fr < F[second]) {
      P[worst] = xr;
      F[worst] = fr;
    } else {
      const bool outside = fr < F[worst];
      auto xc = along(outside ? -0.5 : 0.5);
      const real fc = f(xc);
      ++res.evals;
      if (fc < (outside ? fr : F[worst])) {
        P[worst] = xc;
        F[worst] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          const std::size_t j = idx[i];
          for (std::size_t k = 0; k < n; ++k) P[j][k] = P[best][k] + 0.5 * (P[j][k] - P[best][k]);
          F[j] = f(P[j]);
          ++res.evals;
        }
      }
    }
  }
  const auto bi = static_cast<std::size_t>(std::min_element(F.begin(), F.end()) - F.begin());
  res.x = P[bi];
  res.value = F[bi];
  return res;
}

struct VariationalPlan {
  int blocks = 1;
  std::vector<real> angles;  // (theta0, thetax) per block; empty means default start
  NelderMeadOptions optimizer;
};

struct VariationalResult {
  std::vector<real> angles;
  real fidelity = 0.0;
  int evals = 0;
  bool converged = false;
};

inline Circuit variational_circuit(const GroupTable& G, int N, real mu, real x, const std::vector<real>& angles) {
  require(angles.size() % 2 == 0 && !angles.empty(), "angles come in (theta0, thetax) pairs");
  Circuit c;
  for (std::size_t b = 0; b < angles.size(); b += 2) c.append(chain_variational_block(G, N, mu, x, angles[b], angles[b + 1]));
  return c;
}

// Maximizes |<target|ansatz(angles)|initial>|^2; initial in the group-basis circuit layout, target in the oracle layout.
inline VariationalResult variational_prepare(const StateVector& initial, const ChainModel& cm, const StateVector& target,
                                             const VariationalPlan& plan) {
  require(plan.blocks >= 1, "plan needs at least one block");
  std::vector<real> x0 = plan.angles;
  if (x0.empty())
    for (int b = 0; b < plan.blocks; ++b) {
      x0.push_back(0.3);
      x0.push_back(0.3);
    }
  require(static_cast<int>(x0.size()) == 2 * plan.blocks, "angle vector does not match block count");
  auto infid = [&](const std::vector<real>& a) {
    StateVector s = initial;
    run_circuit_renormalized(s, variational_circuit(*cm.group, cm.N, cm.mu, cm.x, a));
    const StateVector o = chain_to_oracle(s, cm);
    return 1.0 - std::norm(o.amp.dot(target.amp)) / (o.amp.squaredNorm() * target.amp.squaredNorm());
  };
  const auto r = nelder_mead(infid, x0, plan.optimizer);
  return {r.x, 1.0 - r.value, r.evals, r.converged};
}

// Optimizes plans of 1..blocks blocks, each warm-started from the previous optimum plus a zero block.
inline std::vector<VariationalResult> variational_sweep(const StateVector& initial, const ChainModel& cm,
                                                        const StateVector& target, int blocks, NelderMeadOptions opt) {
  std::vector<VariationalResult> out;
  std::vector<real> warm;
  for (int b = 1; b <= blocks; ++b) {
    VariationalPlan plan;
    plan.blocks = b;
    plan.optimizer = opt;
    plan.angles = warm;
    if (b == 1) plan.angles = {0.3, 0.3};
    else {
      plan.angles.push_back(0.0);
      plan.angles.push_back(0.0);
    }
    auto r = variational_prepare(initial, cm, target, plan);
    if (!out.empty() && r.fidelity < out.back().fidelity) {
      // keep the nested optimum when the search did worse than the warm start
      r.angles = plan.angles;
      r.fidelity = out.back().fidelity;
    }
    warm = r.angles;
    out.push_back(r);
  }
  return out;
}

}  // namespace lgtsim
