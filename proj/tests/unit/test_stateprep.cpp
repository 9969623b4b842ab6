#include "common.hpp"

using namespace lgtsim;

TEST(StatePrep, FluxStringValidation) {
  const auto lat = build_lattice(2, {2, 2}, {true, true});
  const GroupTable z = cyclic_group(3);
  EXPECT_NO_THROW(validate_flux_string(lat, 3, default_flux_links(lat)));
  const std::vector<int> vertical = {lat.link_index(lat.site_index(0, 0), 1), lat.link_index(lat.site_index(0, 1), 1)};
  EXPECT_NO_THROW(validate_flux_string(lat, 3, vertical));
  EXPECT_THROW(validate_flux_string(lat, 3, {lat.link_index(0, 0)}), invalid_parameter);
  EXPECT_THROW(validate_flux_string(lat, 3, {0, 0}), invalid_parameter);
  EXPECT_THROW(validate_flux_string(lat, 3, {99}), invalid_parameter);
  EXPECT_THROW(validate_flux_string(lat, 3, {}), invalid_parameter);
  EXPECT_THROW(flux_string_state(lat, quaternion_group(), default_flux_links(lat)), invalid_parameter);
  EXPECT_NEAR(flux_string_state(lat, z, vertical).norm(), 1.0, 1e-12);
}

TEST(StatePrep, FermionConfigSign) {
  const auto L = chain_layout(2, 8);
  const auto [c1, s1] = fermion_config(*L, {0, 3});
  const auto [c2, s2] = fermion_config(*L, {3, 0});
  EXPECT_EQ(c1, c2);
  EXPECT_EQ(s1, -s2);
  EXPECT_THROW(fermion_config(*L, {1, 1}), invalid_parameter);
}

TEST(StatePrep, BaryonReferenceState) {
  const real mu = 0.7;
  const ChainModel cm = build_chain(4, mu, 0.0, 6);
  const ChainModel vac = build_chain(4, mu, 0.0, 4);
  const StateVector b = baryon_reference_state(cm, 0);
  EXPECT_NEAR(b.norm(), 1.0, 1e-14);
  EXPECT_NEAR(baryon_number(b), 1.0, 1e-14);
  const StateVector O = chain_vacuum_state(vac.layout, *vac.group, vac.link_basis, 4);
  EXPECT_NEAR(expectation_value(cm.H.m, b.amp) - expectation_value(vac.H.m, O.amp), 2.0 * mu, 1e-12);
  EXPECT_NEAR(fidelity(chain_translate(b, 4, 2), b), 1.0, 1e-12);
  EXPECT_THROW(baryon_reference_state(cm, 2), invalid_parameter);
  EXPECT_THROW(baryon_reference_state(cm, -1), invalid_parameter);
}

TEST(StatePrep, MovingBaryonPicksUpMomentumPhase) {
  const ChainModel cm = build_chain(4, 1.0, 0.0, 6);
  const StateVector b = baryon_reference_state(cm, 1);
  const StateVector t = chain_translate(b, 4, 2);
  EXPECT_NEAR(fidelity(t, b), 1.0, 1e-12);
  EXPECT_NEAR(fidelity(b, baryon_reference_state(cm, 0)), 0.0, 1e-12);
}

TEST(StatePrep, ReferenceStatesAreGaugeInvariant) {
  const ChainModel cm = build_chain(4, 1.0, 0.8, 6);
  StateVector b = baryon_reference_state(cm, 0);
  apply_chain_gauss_projector(b, *cm.group, cm.link_basis, cm.N);
  EXPECT_NEAR(b.amp.dot(baryon_reference_state(cm, 0).amp).real(), 1.0, 1e-12);
  const BaryonSetup s = baryon_setup(4, 1.0, 0.8);
  StateVector g = s.target;
  apply_chain_gauss_projector(g, *s.cm.group, s.cm.link_basis, s.cm.N);
  EXPECT_NEAR(std::abs(g.amp.dot(s.target.amp)), 1.0, 1e-9);
}

TEST(StatePrep, GroundStateIsTranslationInvariant) {
  const BaryonSetup s = baryon_setup(4, 1.0, 0.8);
  EXPECT_NEAR(fidelity(chain_translate(s.target, 4, 2), s.target), 1.0, 1e-8);
  EXPECT_NEAR(baryon_number(s.target), 1.0, 1e-12);
}

TEST(StatePrep, ZeroLengthRampKeepsTheState) {
  const BaryonSetup s = baryon_setup(2, 1.0, 0.8);
  const StateVector init = chain_from_oracle(s.reference, s.cm);
  const RampSchedule ramp = RampSchedule::linear(1.0, 0.0, 0.8, 0, 0.05);
  const PrepResult r = adiabatic_prepare(init, *s.cm.group, 2, ramp, &s.cm, &s.reference);
  ASSERT_EQ(r.fidelity_trace.size(), 1u);
  EXPECT_NEAR(r.fidelity, 1.0, 1e-12);
  EXPECT_LT((r.state.amp - init.amp).norm(), 1e-15);
}

TEST(StatePrep, OracleRoundTrip) {
  const BaryonSetup s = baryon_setup(2, 1.0, 0.8);
  const StateVector back = chain_to_oracle(chain_from_oracle(s.target, s.cm), s.cm);
  EXPECT_LT((back.amp - s.target.amp).norm(), 1e-12);
}

TEST(StatePrep, RampInterpolation) {
  RampSchedule r{{{0.0, 0.0, 1.0}, {0.5, 0.4, 1.0}, {1.0, 0.8, 2.0}}, 10, 0.1};
  EXPECT_NEAR(r.at(0.0).x, 0.0, 1e-15);
  EXPECT_NEAR(r.at(0.25).x, 0.2, 1e-15);
  EXPECT_NEAR(r.at(0.75).x, 0.6, 1e-15);
  EXPECT_NEAR(r.at(0.75).mu, 1.5, 1e-15);
  EXPECT_NEAR(r.at(1.0).x, 0.8, 1e-15);
  RampSchedule bad{{{0.0, 0.0, 1.0}}, 1, 0.1};
  EXPECT_THROW(bad.at(0.5), invalid_parameter);
}

TEST(StatePrep, NelderMeadFindsQuadraticMinimum) {
  auto f = [](const std::vector<real>& x) { return (x[0] - 1.0) * (x[0] - 1.0) + 3.0 * (x[1] + 0.5) * (x[1] + 0.5) + 2.0; };
  NelderMeadOptions opt;
  opt.tol = 1e-14;
  opt.max_evals = 5000;
  const auto r = nelder_mead(f, {0.0, 0.0}, opt);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x[1], -0.5, 1e-4);
  EXPECT_NEAR(r.value, 2.0, 1e-9);
  EXPECT_LE(r.evals, opt.max_evals + 3);
  const auto again = nelder_mead(f, {0.0, 0.0}, opt);
  EXPECT_EQ(again.x, r.x);
}

TEST(StatePrep, VariationalSweepIsMonotone) {
  const BaryonSetup s = baryon_setup(4, 1.0, 0.8);
  const StateVector init = chain_from_oracle(s.reference, s.cm);
  ASSERT_LT(fidelity(s.reference, s.target), 0.999);
  NelderMeadOptions opt;
  opt.max_evals = 40;
  const auto sweep = variational_sweep(init, s.cm, s.target, 3, opt);
  ASSERT_EQ(sweep.size(), 3u);
  for (std::size_t b = 0; b < sweep.size(); ++b) {
    EXPECT_EQ(sweep[b].angles.size(), 2 * (b + 1));
    EXPECT_LE(sweep[b].fidelity, 1.0 + 1e-12);
    if (b) EXPECT_GE(sweep[b].fidelity, sweep[b - 1].fidelity - 1e-12);
  }
  EXPECT_GT(sweep.back().fidelity, fidelity(s.reference, s.target));
  VariationalPlan bad;
  bad.blocks = 2;
  bad.angles = {0.1, 0.2};
  EXPECT_THROW(variational_prepare(init, s.cm, s.target, bad), invalid_parameter);
}
