#include "common.hpp"

using namespace lgtsim;

namespace {

Circuit sample_circuit() {
  const GroupTable z = cyclic_group(3);
  Circuit c;
  for (int k = 0; k < 3; ++k) c.add(diagonal_gate(0, CVec::Ones(3), "d"));
  c.add(diagonal_gate(1, CVec::Ones(3), "d"));
  c.add(fourier_gate(z, 1));
  c.add(theta_gate(z, 1, 0, ThetaVariant::L));
  c.add(fourier_gate(z, 2));
  return c;
}

}  // namespace

TEST(Resources, PulseEstimate) {
  EXPECT_EQ(pulse_estimate(2), 3);
  EXPECT_EQ(pulse_estimate(8), 84);
  EXPECT_EQ(pulse_estimate(1), 0);
  EXPECT_THROW(pulse_estimate(0), invalid_parameter);
}

TEST(Resources, EmptyCircuit) {
  const ResourceReport r = count_gates(Circuit{});
  EXPECT_EQ(r.gates, 0);
  EXPECT_EQ(r.layers, 0);
  EXPECT_EQ(r.controlled, 0);
  for (GateClass k : all_gate_classes) {
    EXPECT_EQ(r.totals.at(k), 0);
    EXPECT_EQ(r.depth.at(k), 0);
  }
  EXPECT_EQ(fidelity_estimate(r, {{GateClass::two_qudit, 0.9}}), 1.0);
}

TEST(Resources, SingleGateFidelity) {
  Circuit c;
  c.add(single_gate(0, testutil::random_unitary(3)));
  const ResourceReport r = count_gates(c);
  EXPECT_EQ(r.totals.at(GateClass::general_single), 1);
  EXPECT_NEAR(fidelity_estimate(r, {{GateClass::general_single, 0.996}}), 0.996, 1e-15);
  EXPECT_NEAR(fidelity_estimate(r, {{GateClass::two_qudit, 0.5}}), 1.0, 1e-15);
}

TEST(Resources, HandCountedCircuit) {
  const ResourceReport r = count_gates(sample_circuit());
  EXPECT_EQ(r.gates, 7);
  EXPECT_EQ(r.totals.at(GateClass::diagonal_single), 4);
  EXPECT_EQ(r.depth.at(GateClass::diagonal_single), 3);
  EXPECT_EQ(r.totals.at(GateClass::general_single), 2);
  EXPECT_EQ(r.depth.at(GateClass::general_single), 1);
  EXPECT_EQ(r.totals.at(GateClass::two_qudit), 1);
  EXPECT_EQ(r.depth.at(GateClass::two_qudit), 1);
  EXPECT_EQ(r.controlled, 1);
  // qudit 0 needs three layers before the theta gate
  EXPECT_EQ(r.layers, 4);
}

TEST(Resources, DisjointReorderingKeepsCounts) {
  const GroupTable z = cyclic_group(3);
  Circuit a, b;
  const GateOp g0 = fourier_gate(z, 0), g1 = diagonal_gate(1, CVec::Ones(3)), g2 = theta_gate(z, 3, 2, ThetaVariant::R);
  a.add(g0);
  a.add(g1);
  a.add(g2);
  b.add(g2);
  b.add(g0);
  b.add(g1);
  const ResourceReport ra = count_gates(a), rb = count_gates(b);
  EXPECT_EQ(ra.totals, rb.totals);
  EXPECT_EQ(ra.depth, rb.depth);
  EXPECT_EQ(ra.layers, rb.layers);
  EXPECT_EQ(ra.layers, 1);
}

TEST(Resources, CountsAreMonotoneUnderAppending) {
  const GroupTable q = quaternion_group();
  const Circuit step = chain_trotter_step(q, 4, [] {
    CouplingSet c;
    c.mu = 1.0;
    c.x = 0.8;
    c.dt = 0.1;
    c.order = 2;
    return c;
  }());
  Circuit acc;
  ResourceReport prev = count_gates(acc);
  for (const auto& g : step.gates) {
    acc.add(g);
    const ResourceReport r = count_gates(acc);
    for (GateClass k : all_gate_classes) {
      EXPECT_GE(r.totals.at(k), prev.totals.at(k));
      EXPECT_GE(r.depth.at(k), prev.depth.at(k));
      EXPECT_LE(r.depth.at(k), r.totals.at(k));
    }
    EXPECT_GE(r.layers, prev.layers);
    int sum = 0;
    for (const auto& [k, n] : r.totals) sum += n;
    EXPECT_EQ(sum, r.gates);
    prev = r;
  }
}

TEST(Resources, ChainStepControlledCount) {
  const GroupTable q = quaternion_group();
  for (int N : {2, 4, 6}) {
    CouplingSet c;
    c.mu = 1.0;
    c.x = 0.8;
    c.dt = 0.1;
    c.order = 1;
    EXPECT_EQ(count_gates(chain_trotter_step(q, N, c)).controlled, 2 * N);
  }
}

TEST(Resources, DepthProjectionIsNoWorseThanTotals) {
  const ResourceReport r = count_gates(sample_circuit());
  const FidelityMap f = {{GateClass::general_single, 0.99}, {GateClass::diagonal_single, 0.995}, {GateClass::two_qudit, 0.9}};
  EXPECT_GE(fidelity_estimate_depth(r, f), fidelity_estimate(r, f));
  EXPECT_NEAR(fidelity_estimate(r, f), std::pow(0.99, 2) * std::pow(0.995, 4) * 0.9, 1e-14);
  EXPECT_NEAR(controlled_fidelity(r, 0.9), 0.9, 1e-15);
  EXPECT_THROW(fidelity_estimate(r, {{GateClass::two_qudit, 0.0}}), invalid_parameter);
  EXPECT_THROW(fidelity_estimate(r, {{GateClass::two_qudit, 1.1}}), invalid_parameter);
  EXPECT_THROW(controlled_fidelity(r, -0.1), invalid_parameter);
}

TEST(Resources, MaxStepsAboveThreshold) {
  const int n = max_steps_above(0.9, 0.5);
  EXPECT_EQ(n, 6);
  EXPECT_GE(std::pow(0.9, n), 0.5);
  EXPECT_LT(std::pow(0.9, n + 1), 0.5);
  EXPECT_EQ(max_steps_above(0.5, 0.25), 2);
  EXPECT_EQ(max_steps_above(1.0, 0.5), std::numeric_limits<int>::max());
  EXPECT_THROW(max_steps_above(0.0, 0.5), invalid_parameter);
  EXPECT_THROW(max_steps_above(0.9, 1.5), invalid_parameter);
}

TEST(Resources, JsonReport) {
  const nlohmann::json j = to_json(count_gates(sample_circuit()));
  for (const char* key : {"totals", "depth", "controlled", "layers", "gates"}) EXPECT_TRUE(j.contains(key)) << key;
  for (GateClass k : all_gate_classes) {
    EXPECT_TRUE(j["totals"].contains(to_string(k)));
    EXPECT_TRUE(j["depth"].contains(to_string(k)));
  }
  EXPECT_EQ(j["totals"]["diagonal-single"], 4);
}
