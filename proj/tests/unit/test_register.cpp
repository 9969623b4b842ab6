#include <sstream>

#include "common.hpp"

using namespace lgtsim;
using testutil::annihilator;
using testutil::kron;

TEST(Register, BasisStateIndexing) {
  const auto L = make_layout(RegisterLayout::qudits(2, 3));
  const StateVector z = basis_state(L, {0, 0});
  EXPECT_EQ(z.amp(0), cplx(1.0));
  const StateVector s = basis_state(L, {1, 2});
  EXPECT_EQ(s.amp(5), cplx(1.0));
  EXPECT_NEAR(s.norm(), 1.0, 1e-15);
  EXPECT_THROW(basis_state(L, {3, 0}), invalid_parameter);
  EXPECT_THROW(basis_state(L, {0}), invalid_parameter);
}

TEST(Register, HybridIndexRoundTrip) {
  const auto L = make_layout(RegisterLayout::hybrid({3, 2}, 3));
  for (index_t i = 0; i < L->dim(); ++i) EXPECT_EQ(L->index_of(L->assignment_of(i)), i);
  const auto S = make_layout(RegisterLayout::hybrid({2}, 4, 2));
  EXPECT_EQ(S->dim(), 2 * 6);
  EXPECT_THROW(S->index_of({0, 1, 1, 1, 0}), invalid_parameter);
}

TEST(Register, SingleQuditGates) {
  const auto L = make_layout(RegisterLayout::qudits(1, 2));
  StateVector s = basis_state(L, {0});
  apply_single(s, 0, CMat::Identity(2, 2));
  EXPECT_EQ(s.amp(0), cplx(1.0));
  apply_single(s, 0, group_fourier(cyclic_group(2)).F);
  EXPECT_NEAR(std::abs(s.amp(0) - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.amp(1) - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_THROW(apply_single(s, 0, CMat::Identity(3, 3)), invalid_parameter);
}

TEST(Register, SingleQuditKernelMatchesKroneckerProduct) {
  const auto L = make_layout(RegisterLayout::hybrid({3, 4, 2}, 2));
  const CVec v = testutil::random_vector(L->dim());
  for (int q = 0; q < 3; ++q) {
    const CMat U = testutil::random_unitary(L->radix(q), 3 + q);
    CMat full = CMat::Identity(1, 1);
    for (int p = 0; p < 3; ++p) full = kron(full, p == q ? U : CMat(CMat::Identity(L->radix(p), L->radix(p))));
    full = kron(full, CMat::Identity(4, 4));
    StateVector s(L, v);
    apply_single(s, q, U);
    EXPECT_LT((s.amp - full * v).norm(), 1e-12);
    EXPECT_NEAR(s.norm(), 1.0, 1e-12);
  }
}

TEST(Register, DiagonalPhases) {
  const auto L = make_layout(RegisterLayout::qudits(2, 3));
  const CVec v = testutil::random_vector(L->dim());
  StateVector s(L, v);
  apply_diagonal(s, {0, 1}, [](const std::vector<int>&) { return cplx(1.0); });
  EXPECT_LT((s.amp - v).norm(), 1e-15);

  const GroupTable z3 = cyclic_group(3);
  StateVector b = basis_state(L, {0, 0});
  apply_diagonal(b, {0}, [&](const std::vector<int>& g) { return magnetic_phase(z3, g[0], 0.5, 0.1); });
  EXPECT_NEAR(std::abs(b.amp(0) - expi(-0.1)), 0.0, 1e-15);

  auto f = [](const std::vector<int>& g) { return expi(0.3 * g[0] + 1.1 * g[1] * g[0]); };
  apply_diagonal(s, {1, 0}, f);
  apply_diagonal(s, {1, 0}, [&](const std::vector<int>& g) { return std::conj(f(g)); });
  EXPECT_LT((s.amp - v).norm(), 1e-14);
}

TEST(Register, ControlledOperations) {
  const auto L = make_layout(RegisterLayout::qudits(2, 3));
  const CMat U = testutil::random_unitary(3);
  StateVector s = basis_state(L, {1, 2});
  apply_single(s, 0, U, {1, 0});
  EXPECT_EQ(s.amp, basis_state(L, {1, 2}).amp);

  // control in (|0> + |2>)/sqrt 2, target |1>: only the |2> branch is rotated
  StateVector sup(L);
  sup.amp(L->index_of({1, 0})) = 1.0 / std::sqrt(2.0);
  sup.amp(L->index_of({1, 2})) = 1.0 / std::sqrt(2.0);
  apply_single(sup, 0, U, {1, 2});
  for (int a = 0; a < 3; ++a) {
    EXPECT_NEAR(std::abs(sup.amp(L->index_of({a, 0})) - (a == 1 ? 1.0 / std::sqrt(2.0) : 0.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(sup.amp(L->index_of({a, 2})) - U(a, 1) / std::sqrt(2.0)), 0.0, 1e-14);
  }
  EXPECT_THROW(apply_single(s, 0, U, {0, 1}), invalid_parameter);
}

TEST(Register, FermionRotationExamples) {
  const auto L = make_layout(RegisterLayout::hybrid({}, 2));
  const StateVector s10 = fock_state(L, {}, {0});
  StateVector s = s10;
  apply_fermion_rotation(s, {0, 1}, CMat::Zero(2, 2));
  EXPECT_EQ(s.amp, s10.amp);

  CMat M(2, 2);
  M << 0, -I * pi / 2.0, -I * pi / 2.0, 0;
  apply_fermion_rotation(s, {0, 1}, M);
  EXPECT_LT((s.amp - (-I) * fock_state(L, {}, {1}).amp).norm(), 1e-14);

  const CMat logm = unitary_log(quaternion_group().rep[1]);
  StateVector a = s10;
  apply_fermion_rotation(a, {0, 1}, logm);
  EXPECT_LT((a.amp + s10.amp).norm(), 1e-14);
  const StateVector s11 = fock_state(L, {}, {0, 1});
  StateVector b = s11;
  apply_fermion_rotation(b, {0, 1}, logm);
  EXPECT_LT((b.amp - s11.amp).norm(), 1e-14);

  EXPECT_THROW(apply_fermion_rotation(b, {0, 1}, CMat::Identity(2, 2)), invalid_parameter);
}

TEST(Register, FermionRotationMatchesManyBodyExponential) {
  // non-adjacent modes with spectators in between, plus a qudit in front
  const auto L = make_layout(RegisterLayout::hybrid({2}, 4));
  const std::vector<int> modes = {L->mode_subsystem(3), L->mode_subsystem(0), L->mode_subsystem(2)};
  const std::vector<int> numbers = {3, 0, 2};
  CMat h = testutil::random_unitary(3, 5);
  h = (h + h.adjoint()).eval();
  const CMat M = -I * h;
  CMat G = CMat::Zero(L->dim(), L->dim());
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      G += M(a, b) * annihilator(*L, numbers[a]).adjoint() * annihilator(*L, numbers[b]);
  const CMat U = testutil::dense_expm(I * G, 1.0);  // exp(-i (iG)) = exp(G)
  const CVec v = testutil::random_vector(L->dim());
  StateVector s(L, v);
  apply_fermion_rotation(s, modes, M);
  EXPECT_LT((s.amp - U * v).norm(), 1e-12);
}

TEST(Register, FixedNumberSectorMatchesFullSpace) {
  const auto full = make_layout(RegisterLayout::hybrid({3}, 4));
  const auto sect = make_layout(RegisterLayout::hybrid({3}, 4, 2));
  const SectorBasis sb = fermion_number_sector(full, 2);
  ASSERT_EQ(sb.size(), sect->dim());
  CMat h = testutil::random_unitary(2, 9);
  h = (h + h.adjoint()).eval();
  const std::vector<int> modes = {full->mode_subsystem(1), full->mode_subsystem(3)};
  const CVec v = testutil::random_vector(sect->dim());
  StateVector a(full, sb.embed(v)), b(sect, v);
  apply_fermion_rotation(a, modes, -I * h);
  apply_fermion_rotation(b, modes, -I * h);
  EXPECT_LT((sb.restrict_vec(a.amp) - b.amp).norm(), 1e-13);
}

TEST(Register, CreationOrderSign) {
  const auto L = make_layout(RegisterLayout::hybrid({}, 3));
  EXPECT_LT((fock_state(L, {}, {2, 0}).amp + fock_state(L, {}, {0, 2}).amp).norm(), 1e-15);
  StateVector s = fock_state(L, {}, {});
  raise_mode(s, 0);
  raise_mode(s, 2);  // psi^dag_2 psi^dag_0 |0>
  EXPECT_LT((s.amp - fock_state(L, {}, {2, 0}).amp).norm(), 1e-15);
}

TEST(Register, InnerProducts) {
  const auto L = make_layout(RegisterLayout::qudits(2, 2));
  const StateVector a(L, testutil::random_vector(4));
  EXPECT_NEAR(std::abs(inner_product(a, a) - 1.0), 0.0, 1e-14);
  EXPECT_EQ(inner_product(basis_state(L, {0, 1}), basis_state(L, {1, 0})), cplx(0.0));
  const auto other = make_layout(RegisterLayout::qudits(2, 3));
  EXPECT_THROW(inner_product(a, basis_state(other, {0, 0})), invalid_parameter);
  SparseOperator id;
  id.m = SparseMat(4, 4);
  id.m.setIdentity();
  EXPECT_NEAR(std::abs(expectation(a, id) - 1.0), 0.0, 1e-14);
}

TEST(Register, StateSnapshotRoundTrip) {
  const auto L = make_layout(RegisterLayout::hybrid({3, 2}, 4, 2));
  const StateVector s(L, testutil::random_vector(L->dim()));
  std::stringstream ss;
  write_state(ss, s);
  const StateVector r = read_state(ss);
  EXPECT_TRUE(*r.layout == *L);
  EXPECT_EQ(r.amp, s.amp);
  std::stringstream bad("not-a-state 1");
  EXPECT_THROW(read_state(bad), invalid_parameter);
}

TEST(Register, QuditTransformRoundTrip) {
  const auto L = make_layout(RegisterLayout::hybrid({3, 3}, 2));
  const auto T = make_layout(RegisterLayout::hybrid({3, 3}, 2));
  const CMat U = testutil::random_unitary(3, 21);
  const CMat Ud = U.adjoint();
  const StateVector s(L, testutil::random_vector(L->dim()));
  const StateVector t = transform_qudits(s, T, {&U, nullptr});
  StateVector direct = s;
  apply_single(direct, 0, U);
  EXPECT_LT((t.amp - direct.amp).norm(), 1e-13);
  const StateVector back = transform_qudits(t, L, {&Ud, nullptr});
  EXPECT_LT((back.amp - s.amp).norm(), 1e-13);
}
