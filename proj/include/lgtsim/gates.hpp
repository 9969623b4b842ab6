#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "groups.hpp"
#include "register.hpp"

namespace lgtsim {

enum class GateKind {
  single_general,
  single_diagonal,
  fourier,
  theta,
  controlled,
  tunneling,
  v_gate,
  mass_phase,
  multi_diagonal,
};

enum class GateClass { general_single, diagonal_single, two_qudit, fermionic };

enum class ThetaVariant { R, Rinv, L, Linv };

// One executable gate. Only the fields relevant to its kind are populated.
struct GateOp {
  GateKind kind = GateKind::single_general;
  GateClass cls = GateClass::general_single;
  std::vector<int> targets;       // theta: (target, control); fermion kinds: mode subsystems
  int control = -1;               // controlled / v_gate
  int control_value = 0;          // controlled
  CMat matrix;                    // single_general, fourier, controlled
  CVec phases;                    // single_diagonal, mass_phase (per mode), multi_diagonal (joint table)
  std::vector<int> perm;          // theta: perm[a*d+b]
  ThetaVariant variant = ThetaVariant::R;
  std::vector<CMat> generators;   // tunneling: one generator; v_gate: one per control value
  std::string label;

  std::vector<int> support() const {
    std::vector<int> s = targets;
    if (control >= 0) s.push_back(control);
    return s;
  }
};

inline const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::single_general: return "single-general";
    case GateKind::single_diagonal: return "single-diagonal";
    case GateKind::fourier: return "fourier";
    case GateKind::theta: return "theta";
    case GateKind::controlled: return "controlled";
    case GateKind::tunneling: return "tunneling";
    case GateKind::v_gate: return "v-gate";
    case GateKind::mass_phase: return "mass-phase";
    case GateKind::multi_diagonal: return "multi-diagonal";
  }
  return "?";
}

inline const char* to_string(GateClass c) {
  switch (c) {
    case GateClass::general_single: return "general-single";
    case GateClass::diagonal_single: return "diagonal-single";
    case GateClass::two_qudit: return "two-qudit";
    case GateClass::fermionic: return "fermionic";
  }
  return "?";
}

inline const char* to_string(ThetaVariant v) {
  switch (v) {
    case ThetaVariant::R: return "R";
    case ThetaVariant::Rinv: return "Rinv";
    case ThetaVariant::L: return "L";
    case ThetaVariant::Linv: return "Linv";
  }
  return "?";
}

inline ThetaVariant inverse(ThetaVariant v) {
  switch (v) {
    case ThetaVariant::R: return ThetaVariant::Rinv;
    case ThetaVariant::Rinv: return ThetaVariant::R;
    case ThetaVariant::L: return ThetaVariant::Linv;
    case ThetaVariant::Linv: return ThetaVariant::L;
  }
  return v;
}

// Gates that carry a control register (group multiplication and V gates).
inline bool is_controlled_class(const GateOp& g) {
  return g.kind == GateKind::theta || g.kind == GateKind::controlled || g.kind == GateKind::v_gate;
}

// ---------------------------------------------------------------- factories

inline GateOp single_gate(int q, CMat U, std::string label = "U", GateClass cls = GateClass::general_single) {
  GateOp g;
  g.kind = GateKind::single_general;
  g.cls = cls;
  g.targets = {q};
  g.matrix = std::move(U);
  g.label = std::move(label);
  return g;
}

inline GateOp diagonal_gate(int q, CVec phases, std::string label = "diag") {
  GateOp g;
  g.kind = GateKind::single_diagonal;
  g.cls = GateClass::diagonal_single;
  g.targets = {q};
  g.phases = std::move(phases);
  g.label = std::move(label);
  return g;
}

inline GateOp fourier_gate(const GroupTable& G, int q, bool inverse = false) {
  const IrrepBasis b = group_fourier(G);
  GateOp g;
  g.kind = GateKind::fourier;
  g.cls = GateClass::general_single;
  g.targets = {q};
  g.matrix = inverse ? CMat(b.F.adjoint()) : b.F;
  g.label = inverse ? "F_dag" : "F";
  return g;
}

inline GateOp electric_gate(const GroupTable& G, const IrrepBasis& basis, int q, real lambda_E, real dt,
                            ElectricMode mode) {
  return single_gate(q, electric_unitary(G, basis, lambda_E, dt, mode), "U_E");
}

inline GateOp magnetic_gate(const GroupTable& G, int q, real lambda_B, real dt) {
  CVec ph(G.d);
  for (int k = 0; k < G.d; ++k) ph(k) = magnetic_phase(G, k, lambda_B, dt);
  return diagonal_gate(q, std::move(ph), "U_B");
}

inline int theta_image(const GroupTable& G, int a, int b, ThetaVariant v) {
  switch (v) {
    case ThetaVariant::R: return G.compose(a, b);
    case ThetaVariant::Rinv: return G.compose(a, G.invert(b));
    case ThetaVariant::L: return G.compose(b, a);
    case ThetaVariant::Linv: return G.compose(G.invert(b), a);
  }
  return a;
}

inline std::vector<int> theta_table(const GroupTable& G, ThetaVariant v) {
  std::vector<int> perm(static_cast<std::size_t>(G.d) * G.d);
  for (int a = 0; a < G.d; ++a)
    for (int b = 0; b < G.d; ++b) perm[static_cast<std::size_t>(a) * G.d + b] = theta_image(G, a, b, v);
  return perm;
}

inline GateOp theta_gate(const GroupTable& G, int target, int control, ThetaVariant v) {
  require(target != control, "theta gate needs distinct qudits");
  require(target >= 0 && control >= 0, "qudit index out of range");
  GateOp g;
  g.kind = GateKind::theta;
  g.cls = GateClass::two_qudit;
  g.targets = {target, control};
  g.perm = theta_table(G, v);
  g.variant = v;
  g.label = std::string("Theta_") + to_string(v);
  return g;
}

inline GateOp controlled_gate(int control, int value, int target, CMat U, std::string label = "C_U") {
  require(control != target, "control overlaps target");
  GateOp g;
  g.kind = GateKind::controlled;
  g.cls = GateClass::two_qudit;
  g.targets = {target};
  g.control = control;
  g.control_value = value;
  g.matrix = std::move(U);
  g.label = std::move(label);
  return g;
}

// Theta as d-1 controlled permutations of the target, one per non-identity control value.
inline std::vector<GateOp> theta_factors(const GroupTable& G, int target, int control, ThetaVariant v) {
  require(target != control, "theta gate needs distinct qudits");
  std::vector<GateOp> out;
  for (int b = 0; b < G.d; ++b) {
    if (b == G.identity) continue;
    CMat p = CMat::Zero(G.d, G.d);
    for (int a = 0; a < G.d; ++a) p(theta_image(G, a, b, v), a) = 1.0;
    out.push_back(controlled_gate(control, b, target, std::move(p), "C_perm"));
  }
  return out;
}

// exp(-i dt s (psi^dag_a psi_b + h.c.)) per component pair, or with antisymmetric coupling
// exp(-i dt s (-i x)(psi^dag_a psi_b - h.c.)).
inline GateOp tunneling_gate(const std::vector<int>& modes_a, const std::vector<int>& modes_b, real dt, int sign,
                             bool antisymmetric = false, real x = 1.0) {
  require(modes_a.size() == modes_b.size() && !modes_a.empty(), "tunneling needs matching component lists");
  require(sign == 1 || sign == -1, "tunneling sign must be +1 or -1");
  const int r = static_cast<int>(modes_a.size());
  GateOp g;
  g.kind = GateKind::tunneling;
  g.cls = GateClass::fermionic;
  g.targets = modes_a;
  g.targets.insert(g.targets.end(), modes_b.begin(), modes_b.end());
  for (std::size_t i = 0; i < g.targets.size(); ++i)
    for (std::size_t j = i + 1; j < g.targets.size(); ++j)
      require(g.targets[i] != g.targets[j], "tunneling modes overlap");
  CMat M = CMat::Zero(2 * r, 2 * r);
  for (int a = 0; a < r; ++a) {
    if (antisymmetric) {
      M(a, r + a) = -dt * sign * x;
      M(r + a, a) = dt * sign * x;
    } else {
      M(a, r + a) = -I * dt * static_cast<real>(sign);
      M(r + a, a) = -I * dt * static_cast<real>(sign);
    }
  }
  g.generators = {M};
  g.label = "U_t";
  return g;
}

// Generic number-conserving fermion rotation exp(sum M_ab psi^dag_a psi_b).
inline GateOp fermion_rotation_gate(const std::vector<int>& modes, CMat M, std::string label = "U_f") {
  GateOp g;
  g.kind = GateKind::tunneling;
  g.cls = GateClass::fermionic;
  g.targets = modes;
  g.generators = {std::move(M)};
  g.label = std::move(label);
  return g;
}

// V_{x|l}: for link value g rotate the site modes by D(g); inverse gives the adjoint.
inline GateOp v_gate(const GroupTable& G, const std::vector<int>& site_modes, int control, bool inverse_dir = false) {
  require(static_cast<int>(site_modes.size()) == G.rep_dim(), "site mode count must equal the representation dimension");
  for (int m : site_modes) require(m != control, "control overlaps target");
  GateOp g;
  g.kind = GateKind::v_gate;
  g.cls = GateClass::fermionic;
  g.targets = site_modes;
  g.control = control;
  for (int k = 0; k < G.d; ++k) {
    CMat l = unitary_log(G.rep[k]);
    g.generators.push_back(inverse_dir ? CMat(-l) : l);
  }
  g.label = inverse_dir ? "V_dag" : "V";
  return g;
}

// Staggered mass phase e^{-i dt m parity n} on each listed mode.
inline GateOp mass_phase_gate(const std::vector<int>& modes, real m, real dt, int parity) {
  GateOp g;
  g.kind = GateKind::mass_phase;
  g.cls = GateClass::diagonal_single;
  g.targets = modes;
  g.phases = CVec::Constant(static_cast<index_t>(modes.size()), expi(-dt * m * parity));
  g.label = "U_m";
  return g;
}

inline GateOp multi_diagonal_gate(std::vector<int> subsystems, CVec table, std::string label = "diag_n") {
  GateOp g;
  g.kind = GateKind::multi_diagonal;
  g.cls = GateClass::diagonal_single;
  g.targets = std::move(subsystems);
  g.phases = std::move(table);
  g.label = std::move(label);
  return g;
}

// ---------------------------------------------------------------- execution

inline void apply(StateVector& st, const GateOp& g) {
  switch (g.kind) {
    case GateKind::single_general:
    case GateKind::fourier:
      apply_single(st, g.targets.at(0), g.matrix);
      return;
    case GateKind::single_diagonal:
      apply_single_diagonal(st, g.targets.at(0), g.phases);
      return;
    case GateKind::controlled:
      apply_single(st, g.targets.at(0), g.matrix, {g.control, g.control_value});
      return;
    case GateKind::theta:
      apply_qudit_permutation(st, g.targets.at(0), g.targets.at(1), g.perm);
      return;
    case GateKind::tunneling:
      apply_fermion_rotation(st, g.targets, g.generators.at(0));
      return;
    case GateKind::v_gate:
      apply_fermion_rotation_controlled(st, g.control, g.targets, g.generators);
      return;
    case GateKind::mass_phase:
      apply_mode_phases(st, g.targets, std::vector<cplx>(g.phases.data(), g.phases.data() + g.phases.size()));
      return;
    case GateKind::multi_diagonal:
      apply_diagonal(st, g.targets, g.phases);
      return;
  }
}

inline GateOp adjoint(const GateOp& g) {
  GateOp a = g;
  switch (g.kind) {
    case GateKind::single_general:
    case GateKind::fourier:
    case GateKind::controlled:
      a.matrix = g.matrix.adjoint();
      break;
    case GateKind::single_diagonal:
    case GateKind::mass_phase:
    case GateKind::multi_diagonal:
      a.phases = g.phases.conjugate();
      break;
    case GateKind::theta: {
      const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(g.perm.size()))));
      for (int b = 0; b < d; ++b)
        for (int x = 0; x < d; ++x) a.perm[static_cast<std::size_t>(g.perm[static_cast<std::size_t>(x) * d + b]) * d + b] = x;
      a.variant = inverse(g.variant);
      break;
    }
    case GateKind::tunneling:
    case GateKind::v_gate:
      for (auto& m : a.generators) m = -m;
      break;
  }
  a.label = g.label + "^dag";
  return a;
}

// Dense matrix of a linear map on a register (columns are images of basis states).
inline CMat dense_matrix(const LayoutPtr& layout, const std::function<void(StateVector&)>& op) {
  const index_t n = layout->dim();
  require(n <= 20000, "dense matrix too large");
  CMat m(n, n);
  for (index_t j = 0; j < n; ++j) {
    StateVector s(layout);
    s.amp(j) = 1.0;
    op(s);
    m.col(j) = s.amp;
  }
  return m;
}

inline CMat gate_matrix(const LayoutPtr& layout, const GateOp& g) {
  return dense_matrix(layout, [&](StateVector& s) { apply(s, g); });
}

// ---------------------------------------------------------------- serialization

namespace detail {
inline nlohmann::json mat_to_json(const CMat& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (index_t i = 0; i < m.rows(); ++i)
    for (index_t j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}
inline CMat mat_from_json(const nlohmann::json& j) {
  const index_t r = j.at("rows").get<index_t>(), c = j.at("cols").get<index_t>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  require(static_cast<index_t>(re.size()) == r * c && static_cast<index_t>(im.size()) == r * c, "matrix size mismatch");
  CMat m(r, c);
  for (index_t i = 0; i < r; ++i)
    for (index_t k = 0; k < c; ++k) m(i, k) = cplx(re[i * c + k].get<double>(), im[i * c + k].get<double>());
  return m;
}
inline nlohmann::json vec_to_json(const CVec& v) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (index_t i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return {{"re", re}, {"im", im}};
}
inline CVec vec_from_json(const nlohmann::json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  require(re.size() == im.size(), "vector size mismatch");
  CVec v(static_cast<index_t>(re.size()));
  for (index_t i = 0; i < v.size(); ++i) v(i) = cplx(re[i].get<double>(), im[i].get<double>());
  return v;
}
template <class E>
E enum_from(const std::string& s, std::initializer_list<E> all) {
  for (E e : all)
    if (s == to_string(e)) return e;
  throw invalid_parameter("unknown enum value: " + s);
}
}  // namespace detail

inline nlohmann::json to_json(const GateOp& g) {
  nlohmann::json j;
  j["kind"] = to_string(g.kind);
  j["class"] = to_string(g.cls);
  j["label"] = g.label;
  j["targets"] = g.targets;
  if (g.control >= 0) {
    j["control"] = g.control;
    j["control_value"] = g.control_value;
  }
  if (g.matrix.size()) j["matrix"] = detail::mat_to_json(g.matrix);
  if (g.phases.size()) j["phases"] = detail::vec_to_json(g.phases);
  if (!g.perm.empty()) {
    j["perm"] = g.perm;
    j["variant"] = to_string(g.variant);
  }
  if (!g.generators.empty()) {
    j["generators"] = nlohmann::json::array();
    for (const auto& m : g.generators) j["generators"].push_back(detail::mat_to_json(m));
  }
  return j;
}

inline GateOp gate_from_json(const nlohmann::json& j) {
  using K = GateKind;
  using C = GateClass;
  using V = ThetaVariant;
  GateOp g;
  g.kind = detail::enum_from<K>(j.at("kind").get<std::string>(),
                                {K::single_general, K::single_diagonal, K::fourier, K::theta, K::controlled,
                                 K::tunneling, K::v_gate, K::mass_phase, K::multi_diagonal});
  g.cls = detail::enum_from<C>(j.at("class").get<std::string>(),
                               {C::general_single, C::diagonal_single, C::two_qudit, C::fermionic});
  g.label = j.value("label", "");
  g.targets = j.at("targets").get<std::vector<int>>();
  g.control = j.value("control", -1);
  g.control_value = j.value("control_value", 0);
  if (j.contains("matrix")) g.matrix = detail::mat_from_json(j["matrix"]);
  if (j.contains("phases")) g.phases = detail::vec_from_json(j["phases"]);
  if (j.contains("perm")) {
    g.perm = j["perm"].get<std::vector<int>>();
    g.variant = detail::enum_from<V>(j.at("variant").get<std::string>(), {V::R, V::Rinv, V::L, V::Linv});
  }
  if (j.contains("generators"))
    for (const auto& m : j["generators"]) g.generators.push_back(detail::mat_from_json(m));
  return g;
}

}  // namespace lgtsim
