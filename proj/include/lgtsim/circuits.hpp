#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gates.hpp"
#include "lattice.hpp"

namespace lgtsim {

struct CouplingSet {
  real lambda_E = 0.0;
  real lambda_B = 0.0;
  real lambda_M = 0.0;
  real lambda_J = 0.0;
  real mu = 0.0;
  real x = 0.0;
  real dt = 0.1;
  int order = 2;
};

struct Circuit {
  std::vector<GateOp> gates;
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<int> layer;  // layer index per gate, empty until assigned

  void add(GateOp g) {
    gates.push_back(std::move(g));
    layer.clear();
  }
  void append(const Circuit& c) {
    gates.insert(gates.end(), c.gates.begin(), c.gates.end());
    layer.clear();
  }
  std::size_t size() const { return gates.size(); }
  bool empty() const { return gates.empty(); }
};

// Greedy left-to-right packing: each gate goes one layer after the latest gate sharing a subsystem.
inline void assign_layers(Circuit& c) {
  c.layer.assign(c.gates.size(), 0);
  std::vector<int> last;
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    int l = 0;
    const auto sup = c.gates[i].support();
    for (int s : sup) {
      if (s >= static_cast<int>(last.size())) last.resize(s + 1, -1);
      l = std::max(l, last[s] + 1);
    }
    for (int s : sup) last[s] = l;
    c.layer[i] = l;
  }
}

inline int num_layers(const Circuit& c) {
  return c.layer.empty() ? 0 : *std::max_element(c.layer.begin(), c.layer.end()) + 1;
}

inline Circuit adjoint(const Circuit& c) {
  Circuit a;
  a.metadata = c.metadata;
  for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) a.gates.push_back(adjoint(*it));
  return a;
}

inline void run_circuit(StateVector& st, const Circuit& c) {
  for (const auto& g : c.gates) apply(st, g);
}

// Applies the step n_steps times; the callback (if any) sees step index 0..n_steps.
inline void evolve(StateVector& st, const Circuit& step, int n_steps,
                   const std::function<void(int, const StateVector&)>& callback = nullptr) {
  require(n_steps >= 0, "step count must be non-negative");
  if (callback) callback(0, st);
  for (int k = 1; k <= n_steps; ++k) {
    run_circuit(st, step);
    if (callback) callback(k, st);
  }
}

// Runs a circuit containing projective gates and rescales to the incoming norm.
inline real run_circuit_renormalized(StateVector& st, const Circuit& c) {
  const real before = st.norm();
  run_circuit(st, c);
  const real after = st.norm();
  if (after <= 0.0) throw numeric_failure("state annihilated by projective gates");
  st.amp *= before / after;
  return after / before;
}

inline CMat circuit_matrix(const LayoutPtr& layout, const Circuit& c) {
  return dense_matrix(layout, [&](StateVector& s) { run_circuit(s, c); });
}

// ---------------------------------------------------------------- building blocks

// Diagonal phase on the ordered product g1 g2 g3^-1 g4^-1, written into the first link.
inline Circuit plaquette_circuit_phases(const GroupTable& G, const std::array<int, 4>& links, const CVec& phases,
                                       const std::string& label) {
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) require(links[i] != links[j], "plaquette links must be distinct");
  require(phases.size() == G.d, "phase table size mismatch");
  Circuit c;
  const int t = links[0];
  c.add(theta_gate(G, t, links[1], ThetaVariant::R));
  c.add(theta_gate(G, t, links[2], ThetaVariant::Rinv));
  c.add(theta_gate(G, t, links[3], ThetaVariant::Rinv));
  c.add(diagonal_gate(t, phases, label));
  c.add(theta_gate(G, t, links[3], ThetaVariant::R));
  c.add(theta_gate(G, t, links[2], ThetaVariant::R));
  c.add(theta_gate(G, t, links[1], ThetaVariant::Rinv));
  return c;
}

inline CVec magnetic_phases(const GroupTable& G, real lambda, real dt) {
  CVec ph(G.d);
  for (int k = 0; k < G.d; ++k) ph(k) = magnetic_phase(G, k, lambda, dt);
  return ph;
}

inline Circuit plaquette_circuit(const GroupTable& G, const std::array<int, 4>& links, real lambda_B, real dt) {
  return plaquette_circuit_phases(G, links, magnetic_phases(G, lambda_B, dt), "U_B");
}

// Matter-gauge coupling on (site x, link l, site x'); the x qudit holds (g_x^-1 g_l g_x')^-1 at the middle gate.
inline Circuit higgs_coupling_circuit(const GroupTable& G, int x, int l, int xp, real lambda_J, real dt) {
  require(x != l && x != xp && l != xp, "higgs coupling needs three distinct qudits");
  Circuit c;
  c.add(theta_gate(G, l, xp, ThetaVariant::R));
  c.add(theta_gate(G, x, l, ThetaVariant::Linv));
  c.add(diagonal_gate(x, magnetic_phases(G, lambda_J, dt), "U_J"));
  c.add(theta_gate(G, x, l, ThetaVariant::L));
  c.add(theta_gate(G, l, xp, ThetaVariant::Rinv));
  return c;
}

// ---------------------------------------------------------------- abelian Higgs model on the 2x2 torus

inline void check_ahm_lattice(const LatticeSpec& lat, const GroupTable& G) {
  require(lat.dim == 2 && lat.extent.size() == 2 && lat.extent[0] == 2 && lat.extent[1] == 2,
          "the abelian Higgs step needs a 2x2 periodic lattice");
  require(is_cyclic(G), "the abelian Higgs step needs a cyclic group");
}

inline LayoutPtr ahm_layout(const LatticeSpec& lat, int d) { return make_layout(RegisterLayout::qudits(lat.num_links(), d)); }

// Coefficient multiplying (2 - P - P^dag) for the shift-type terms.
inline real shift_coefficient(real lambda, int d) { return lambda * d * d / (2.0 * pi * pi); }

// exp(-i c (2 - 2 cos(2 pi m/d)) tau) on the dual label m.
inline CVec shift_term_phases(int d, real lambda, real tau) {
  const real c = shift_coefficient(lambda, d);
  CVec ph(d);
  for (int m = 0; m < d; ++m) ph(m) = expi(-c * (2.0 - 2.0 * std::cos(2.0 * pi * m / d)) * tau);
  return ph;
}

inline Circuit fourier_layer(const GroupTable& G, int n_qudits, bool inverse_dir) {
  Circuit c;
  for (int q = 0; q < n_qudits; ++q) c.add(fourier_gate(G, q, inverse_dir));
  return c;
}

// Electric term, diagonal in the dual labels (apply between F and F^dag).
inline Circuit electric_dual_layer(const GroupTable& G, int n_links, real lambda_E, real tau) {
  Circuit c;
  const CVec ph = shift_term_phases(G.d, lambda_E, tau);
  for (int l = 0; l < n_links; ++l) c.add(diagonal_gate(l, ph, "U_E"));
  return c;
}

// exp(-i lambda_M 2 cos(phi) tau) expressed on the dual labels.
inline Circuit mass_dual_layer(const GroupTable& G, int n_links, real lambda_M, real tau) {
  const IrrepBasis b = group_fourier(G);
  const CVec ph = magnetic_phases(G, lambda_M, tau);
  const CMat U = b.F * ph.asDiagonal() * b.F.adjoint();
  Circuit c;
  for (int l = 0; l < n_links; ++l) c.add(single_gate(l, U, "U_M"));
  return c;
}

inline Circuit magnetic_layer(const LatticeSpec& lat, const GroupTable& G, real lambda_B, real tau) {
  Circuit c;
  for (const auto& p : lat.plaquettes) c.append(plaquette_circuit(G, p.links, lambda_B, tau));
  return c;
}

// Star term on the dual labels; the target is the outgoing y link.
inline Circuit star_dual_layer(const LatticeSpec& lat, const GroupTable& G, real lambda_J, real tau) {
  Circuit c;
  const CVec ph = shift_term_phases(G.d, lambda_J, tau);
  for (const auto& s : lat.stars) {
    const std::array<int, 4> order{s.links[1], s.links[0], s.links[2], s.links[3]};
    c.append(plaquette_circuit_phases(G, order, ph, "U_J"));
  }
  return c;
}

// Exact single-term factors in the group basis (used for gauge-invariance checks).
struct NamedCircuit {
  std::string name;
  Circuit circuit;
};

inline std::vector<NamedCircuit> ahm_factors(const LatticeSpec& lat, const GroupTable& G, const CouplingSet& c) {
  check_ahm_lattice(lat, G);
  const int n = lat.num_links();
  auto wrap = [&](const Circuit& inner) {
    Circuit w = fourier_layer(G, n, false);
    w.append(inner);
    w.append(fourier_layer(G, n, true));
    return w;
  };
  std::vector<NamedCircuit> out;
  out.push_back({"electric", wrap(electric_dual_layer(G, n, c.lambda_E, c.dt))});
  out.push_back({"magnetic", magnetic_layer(lat, G, c.lambda_B, c.dt)});
  out.push_back({"mass", wrap(mass_dual_layer(G, n, c.lambda_M, c.dt))});
  out.push_back({"star", wrap(star_dual_layer(lat, G, c.lambda_J, c.dt))});
  return out;
}

inline Circuit ahm_trotter_step(const LatticeSpec& lat, const GroupTable& G, const CouplingSet& c) {
  check_ahm_lattice(lat, G);
  require(c.dt > 0, "time step must be positive");
  require(c.order == 1 || c.order == 2, "Trotter order must be 1 or 2");
  const int n = lat.num_links();
  Circuit s;
  const real h = c.order == 2 ? 0.5 * c.dt : c.dt;
  s.append(fourier_layer(G, n, false));
  s.append(electric_dual_layer(G, n, c.lambda_E, h));
  s.append(mass_dual_layer(G, n, c.lambda_M, h));
  s.append(fourier_layer(G, n, true));
  s.append(magnetic_layer(lat, G, c.lambda_B, c.dt));
  s.append(fourier_layer(G, n, false));
  s.append(star_dual_layer(lat, G, c.lambda_J, c.dt));
  if (c.order == 2) {
    s.append(mass_dual_layer(G, n, c.lambda_M, h));
    s.append(electric_dual_layer(G, n, c.lambda_E, h));
  }
  s.append(fourier_layer(G, n, true));
  s.metadata = {{"model", "ahm"}, {"d", G.d},           {"lambda_E", c.lambda_E}, {"lambda_B", c.lambda_B},
                {"lambda_M", c.lambda_M}, {"lambda_J", c.lambda_J}, {"dt", c.dt}, {"order", c.order}};
  assign_layers(s);
  return s;
}

// ---------------------------------------------------------------- staggered fermion chain

struct ChainGeometry {
  int N = 2;
  int link(int n) const { return n; }
  int mode(int n, int alpha) const { return N + 2 * n + alpha; }
  std::vector<int> site_modes(int n) const { return {mode(n, 0), mode(n, 1)}; }
  int parity(int n) const { return (n % 2 == 0) ? 1 : -1; }
  int bond_sign(int n) const { return n == N - 1 ? -1 : 1; }
};

inline ChainGeometry chain_geometry(int N) {
  require(N >= 2 && N % 2 == 0, "chain length must be even and at least 2");
  return ChainGeometry{N};
}

// Group-basis layout: N link qudits then 2N modes; fermion_number < 0 keeps all fillings.
inline LayoutPtr chain_layout(int N, int d, int fermion_number = -1) {
  chain_geometry(N);
  return make_layout(RegisterLayout::hybrid(std::vector<int>(N, d), 2 * N, fermion_number));
}

inline Circuit chain_h0_layer(const GroupTable& G, int N, real mu, real tau) {
  const auto geo = chain_geometry(N);
  const IrrepBasis b = group_fourier(G);
  Circuit c;
  for (int n = 0; n < N; ++n) c.add(electric_gate(G, b, geo.link(n), 1.0, tau, ElectricMode::casimir));
  for (int n = 0; n < N; ++n) c.add(mass_phase_gate(geo.site_modes(n), mu, tau, geo.parity(n)));
  return c;
}

// V_{n|l} U_t V^dag_{n|l} for the bond (n, n+1 mod N).
inline Circuit chain_bond(const GroupTable& G, int N, int n, real x, real tau) {
  const auto geo = chain_geometry(N);
  const int m = (n + 1) % N;
  Circuit c;
  c.add(v_gate(G, geo.site_modes(n), geo.link(n), true));
  c.add(tunneling_gate(geo.site_modes(n), geo.site_modes(m), tau, geo.bond_sign(n), true, x));
  c.add(v_gate(G, geo.site_modes(n), geo.link(n), false));
  return c;
}

inline Circuit chain_bond_layer(const GroupTable& G, int N, int parity_class, real x, real tau) {
  Circuit c;
  for (int n = parity_class; n < N; n += 2) c.append(chain_bond(G, N, n, x, tau));
  return c;
}

inline Circuit chain_trotter_step(const GroupTable& G, int N, const CouplingSet& c) {
  chain_geometry(N);
  require(c.dt > 0, "time step must be positive");
  require(c.order == 1 || c.order == 2, "Trotter order must be 1 or 2");
  Circuit s;
  if (c.order == 1) {
    s.append(chain_h0_layer(G, N, c.mu, c.dt));
    s.append(chain_bond_layer(G, N, 0, c.x, c.dt));
    s.append(chain_bond_layer(G, N, 1, c.x, c.dt));
  } else {
    s.append(chain_h0_layer(G, N, c.mu, 0.5 * c.dt));
    s.append(chain_bond_layer(G, N, 0, c.x, 0.5 * c.dt));
    s.append(chain_bond_layer(G, N, 1, c.x, c.dt));
    s.append(chain_bond_layer(G, N, 0, c.x, 0.5 * c.dt));
    s.append(chain_h0_layer(G, N, c.mu, 0.5 * c.dt));
  }
  s.metadata = {{"model", "chain"}, {"N", N}, {"mu", c.mu}, {"x", c.x}, {"dt", c.dt}, {"order", c.order}};
  assign_layers(s);
  return s;
}

// One variational block exp(-i th0 H0/2) exp(-i thx Hx) exp(-i th0 H0/2), hopping split into even and odd bonds.
inline Circuit chain_variational_block(const GroupTable& G, int N, real mu, real x, real theta0, real thetax) {
  Circuit s;
  s.append(chain_h0_layer(G, N, mu, 0.5 * theta0));
  s.append(chain_bond_layer(G, N, 0, x, thetax));
  s.append(chain_bond_layer(G, N, 1, x, thetax));
  s.append(chain_h0_layer(G, N, mu, 0.5 * theta0));
  return s;
}

// ---------------------------------------------------------------- serialization

inline nlohmann::json to_json(const Circuit& c) {
  nlohmann::json j;
  j["format"] = "lgtsim-circuit";
  j["version"] = 1;
  j["metadata"] = c.metadata;
  j["gates"] = nlohmann::json::array();
  for (const auto& g : c.gates) j["gates"].push_back(to_json(g));
  if (!c.layer.empty()) j["layers"] = c.layer;
  return j;
}

inline Circuit circuit_from_json(const nlohmann::json& j) {
  require(j.value("format", "") == "lgtsim-circuit" && j.value("version", 0) == 1, "not a circuit file");
  Circuit c;
  c.metadata = j.value("metadata", nlohmann::json::object());
  for (const auto& g : j.at("gates")) c.gates.push_back(gate_from_json(g));
  if (j.contains("layers")) {
    c.layer = j["layers"].get<std::vector<int>>();
    require(c.layer.size() == c.gates.size(), "layer list size mismatch");
  }
  return c;
}

}  // namespace lgtsim
