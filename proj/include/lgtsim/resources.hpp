#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include <json.hpp>

#include "circuits.hpp"

namespace lgtsim {

struct ResourceReport {
  std::map<GateClass, int> totals;
  std::map<GateClass, int> depth;  // max over subsystems of the class layers it takes part in
  int controlled = 0;              // group-multiplication and V gates
  int layers = 0;
  int gates = 0;
};

inline constexpr GateClass all_gate_classes[] = {GateClass::general_single, GateClass::diagonal_single,
                                                 GateClass::two_qudit, GateClass::fermionic};

inline ResourceReport count_gates(Circuit c) {
  if (c.layer.size() != c.gates.size()) assign_layers(c);
  ResourceReport r;
  for (GateClass k : all_gate_classes) {
    r.totals[k] = 0;
    r.depth[k] = 0;
  }
  std::map<GateClass, std::map<int, std::map<int, bool>>> seen;  // class -> subsystem -> layer
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const auto& g = c.gates[i];
    ++r.totals[g.cls];
    if (is_controlled_class(g)) ++r.controlled;
    for (int s : g.support()) seen[g.cls][s][c.layer[i]] = true;
  }
  for (const auto& [cls, subs] : seen)
    for (const auto& [s, layers] : subs) r.depth[cls] = std::max(r.depth[cls], static_cast<int>(layers.size()));
  r.layers = num_layers(c);
  r.gates = static_cast<int>(c.gates.size());
  return r;
}

// Upper bound on the number of laser pulse pairs for a general d-level gate.
inline int pulse_estimate(int d) {
  require(d >= 1, "d must be positive");
  return 3 * d * (d - 1) / 2;
}

using FidelityMap = std::map<GateClass, real>;

inline void check_fidelities(const FidelityMap& f) {
  for (const auto& [k, v] : f) require(v > 0.0 && v <= 1.0, "gate fidelities must lie in (0, 1]");
}

// Independent-error projection: product of the class fidelity over every counted gate.
inline real fidelity_estimate(const ResourceReport& r, const FidelityMap& f) {
  check_fidelities(f);
  real p = 1.0;
  for (const auto& [k, n] : r.totals) {
    auto it = f.find(k);
    if (it != f.end()) p *= std::pow(it->second, n);
  }
  return p;
}

// Same projection over the depth counts instead of the totals.
inline real fidelity_estimate_depth(const ResourceReport& r, const FidelityMap& f) {
  check_fidelities(f);
  real p = 1.0;
  for (const auto& [k, n] : r.depth) {
    auto it = f.find(k);
    if (it != f.end()) p *= std::pow(it->second, n);
  }
  return p;
}

// Projection counting only controlled-class gates at a single fidelity.
inline real controlled_fidelity(const ResourceReport& r, real f) {
  require(f > 0.0 && f <= 1.0, "gate fidelities must lie in (0, 1]");
  return std::pow(f, r.controlled);
}

// Largest number of repeated steps whose projected fidelity stays at or above the threshold.
inline int max_steps_above(real per_step, real threshold) {
  require(per_step > 0.0 && per_step <= 1.0 && threshold > 0.0 && threshold <= 1.0, "fidelities must lie in (0, 1]");
  if (per_step >= 1.0) return std::numeric_limits<int>::max();
  return static_cast<int>(std::floor(std::log(threshold) / std::log(per_step) + 1e-12));
}

inline nlohmann::json to_json(const ResourceReport& r) {
  nlohmann::json j;
  for (GateClass k : all_gate_classes) {
    j["totals"][to_string(k)] = r.totals.at(k);
    j["depth"][to_string(k)] = r.depth.at(k);
  }
  j["controlled"] = r.controlled;
  j["layers"] = r.layers;
  j["gates"] = r.gates;
  return j;
}

}  // namespace lgtsim
