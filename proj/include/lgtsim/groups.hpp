#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "core.hpp"

namespace lgtsim {

// Finite group with element indices 0..d-1 and a faithful fundamental representation.
struct GroupTable {
  std::string name;
  int d = 0;
  std::vector<int> mult;  // row-major d*d, mult[a*d+b] = index of a*b
  std::vector<int> inv;
  int identity = 0;
  std::vector<CMat> rep;
  std::vector<cplx> chi;

  int rep_dim() const { return static_cast<int>(rep.front().rows()); }

  int compose(int a, int b) const {
    require(a >= 0 && a < d && b >= 0 && b < d, "group element out of range");
    return mult[static_cast<std::size_t>(a) * d + b];
  }
  int invert(int a) const {
    require(a >= 0 && a < d, "group element out of range");
    return inv[a];
  }

  // |g> -> |g h>
  CMat right_mult(int h) const {
    CMat p = CMat::Zero(d, d);
    for (int g = 0; g < d; ++g) p(compose(g, h), g) = 1.0;
    return p;
  }
  // |g> -> |h g>
  CMat left_mult(int h) const {
    CMat p = CMat::Zero(d, d);
    for (int g = 0; g < d; ++g) p(compose(h, g), g) = 1.0;
    return p;
  }
};

using GroupPtr = std::shared_ptr<const GroupTable>;

struct IrrepBasis {
  CMat F;                          // rows: irrep components, columns: group elements
  std::vector<std::string> labels;  // one per irrep
  std::vector<int> dims;
  std::vector<real> casimir;       // E^2 per irrep, +inf means deleted
  std::vector<int> row_irrep;      // irrep index for every row of F

  int size() const { return static_cast<int>(F.rows()); }
  std::vector<int> retained_rows() const {
    std::vector<int> rows;
    for (int r = 0; r < size(); ++r)
      if (std::isfinite(casimir[row_irrep[r]])) rows.push_back(r);
    return rows;
  }
};

namespace detail {
inline int match_element(const std::vector<CMat>& rep, const CMat& m) {
  for (std::size_t k = 0; k < rep.size(); ++k)
    if (max_abs(rep[k] - m) < 1e-9) return static_cast<int>(k);
  throw numeric_failure("product is not a group element");
}

inline void fill_from_rep(GroupTable& g) {
  g.d = static_cast<int>(g.rep.size());
  g.mult.assign(static_cast<std::size_t>(g.d) * g.d, 0);
  g.inv.assign(g.d, 0);
  g.chi.resize(g.d);
  for (int a = 0; a < g.d; ++a) {
    g.chi[a] = g.rep[a].trace();
    for (int b = 0; b < g.d; ++b) g.mult[static_cast<std::size_t>(a) * g.d + b] = match_element(g.rep, g.rep[a] * g.rep[b]);
  }
  g.identity = match_element(g.rep, CMat::Identity(g.rep_dim(), g.rep_dim()));
  for (int a = 0; a < g.d; ++a)
    for (int b = 0; b < g.d; ++b)
      if (g.mult[static_cast<std::size_t>(a) * g.d + b] == g.identity) g.inv[a] = b;
}
}  // namespace detail

// Z_d: element k is the phase e^{i 2 pi k / d}.
inline GroupTable cyclic_group(int d) {
  require(d >= 2, "cyclic group needs d >= 2");
  GroupTable g;
  g.name = "Z" + std::to_string(d);
  for (int k = 0; k < d; ++k) {
    CMat m(1, 1);
    m(0, 0) = expi(2.0 * pi * k / d);
    g.rep.push_back(m);
  }
  detail::fill_from_rep(g);
  return g;
}

// Element order: 1, -1, i sx, -i sx, i sy, -i sy, i sz, -i sz.
inline GroupTable quaternion_group() {
  GroupTable g;
  g.name = "Q8";
  CMat one = CMat::Identity(2, 2);
  CMat sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, -I, I, 0;
  sz << 1, 0, 0, -1;
  for (const CMat& m : {one, CMat(I * sx), CMat(I * sy), CMat(I * sz)}) {
    g.rep.push_back(m);
    g.rep.push_back(-m);
  }
  detail::fill_from_rep(g);
  return g;
}

inline GroupPtr make_group(const std::string& name) {
  if (name == "Q8") return std::make_shared<GroupTable>(quaternion_group());
  if (name.size() >= 2 && name[0] == 'Z') {
    int d = 0;
    try {
      d = std::stoi(name.substr(1));
    } catch (...) {
      throw invalid_parameter("bad group name: " + name);
    }
    return std::make_shared<GroupTable>(cyclic_group(d));
  }
  throw unsupported_feature("unsupported group: " + name);
}

inline int compose(const GroupTable& G, int g, int h) { return G.compose(g, h); }
inline int invert(const GroupTable& G, int g) { return G.invert(g); }

inline cplx magnetic_phase(const GroupTable& G, int g, real lambda_B, real dt) {
  require(g >= 0 && g < G.d, "group element out of range");
  return expi(-2.0 * lambda_B * G.chi[g].real() * dt);
}

inline bool is_cyclic(const GroupTable& G) { return G.name.size() > 1 && G.name[0] == 'Z'; }

inline IrrepBasis group_fourier(const GroupTable& G) {
  IrrepBasis b;
  const int d = G.d;
  if (is_cyclic(G)) {
    b.F.resize(d, d);
    for (int n = 0; n < d; ++n) {
      b.labels.push_back(std::to_string(n));
      b.dims.push_back(1);
      // Z_d electric levels are not a Casimir; keep them finite so nothing is deleted.
      b.casimir.push_back(static_cast<real>(std::min(n, d - n) * std::min(n, d - n)));
      b.row_irrep.push_back(n);
      for (int k = 0; k < d; ++k) b.F(n, k) = expi(2.0 * pi * n * k / d) / std::sqrt(static_cast<real>(d));
    }
    return b;
  }
  if (G.name == "Q8") {
    b.F = CMat::Zero(8, 8);
    b.labels = {"0", "1/2", "I", "J", "K"};
    b.dims = {1, 2, 1, 1, 1};
    b.casimir = {0.0, 0.75, std::numeric_limits<real>::infinity(), std::numeric_limits<real>::infinity(),
                 std::numeric_limits<real>::infinity()};
    const real s8 = 1.0 / std::sqrt(8.0);
    auto one_dim = [&](int row, int irrep, auto&& chi) {
      b.row_irrep.push_back(irrep);
      for (int g = 0; g < 8; ++g) b.F(row, g) = s8 * chi(g);
    };
    one_dim(0, 0, [](int) { return 1.0; });
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n) {
        const int row = 1 + 2 * m + n;
        b.row_irrep.push_back(1);
        for (int g = 0; g < 8; ++g) b.F(row, g) = 0.5 * std::conj(G.rep[g](m, n));
      }
    // one-dimensional irreps trivial on {+-1, +-i s_x}, {+-1, +-i s_y}, {+-1, +-i s_z}
    for (int k = 0; k < 3; ++k) {
      const int keep = 2 + 2 * k;
      one_dim(5 + k, 2 + k, [keep](int g) { return (g < 2 || g == keep || g == keep + 1) ? 1.0 : -1.0; });
    }
    return b;
  }
  throw unsupported_feature("no irrep data for group " + G.name);
}

enum class ElectricMode { cosine, transfer_matrix, casimir };

namespace detail {
inline RMat transfer_matrix(const GroupTable& G, real lambda_E) {
  RMat t(G.d, G.d);
  for (int a = 0; a < G.d; ++a)
    for (int b = 0; b < G.d; ++b) t(a, b) = std::exp((2.0 / lambda_E) * G.chi[G.compose(a, G.invert(b))].real());
  return t;
}
}  // namespace detail

inline RMat electric_transfer_matrix(const GroupTable& G, real lambda_E) {
  require(lambda_E > 0, "transfer matrix needs lambda_E > 0");
  return detail::transfer_matrix(G, lambda_E);
}

// Single-link electric evolution in the group basis.
//   cosine:          Z_d gate diagonal in the dual basis, phases e^{2 i lambda d^2/(2 pi^2) cos(2 pi n/d) dt}
//   transfer_matrix: exp(i dt log T_E) with the principal logarithm
//   casimir:         phases e^{-i lambda E_j^2 dt} per irrep, infinite-Casimir irreps projected out
inline CMat electric_unitary(const GroupTable& G, const IrrepBasis& basis, real lambda_E, real dt,
                             ElectricMode mode) {
  const int d = G.d;
  switch (mode) {
    case ElectricMode::cosine: {
      require(is_cyclic(G), "cosine electric gate is defined for Z_d only");
      const real c = lambda_E * d * d / (2.0 * pi * pi);
      CVec ph(d);
      for (int n = 0; n < d; ++n) ph(n) = expi(2.0 * c * std::cos(2.0 * pi * n / d) * dt);
      return basis.F.adjoint() * ph.asDiagonal() * basis.F;
    }
    case ElectricMode::transfer_matrix: {
      require(lambda_E > 0, "transfer matrix needs lambda_E > 0");
      Eigen::SelfAdjointEigenSolver<RMat> es(detail::transfer_matrix(G, lambda_E));
      if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
        throw numeric_failure("electric transfer matrix is not positive definite");
      CVec ph(d);
      for (int k = 0; k < d; ++k) ph(k) = expi(dt * std::log(es.eigenvalues()(k)));
      CMat v = es.eigenvectors().cast<cplx>();
      return v * ph.asDiagonal() * v.adjoint();
    }
    case ElectricMode::casimir: {
      CVec ph(basis.size());
      for (int r = 0; r < basis.size(); ++r) {
        const real e2 = basis.casimir[basis.row_irrep[r]];
        ph(r) = std::isfinite(e2) ? expi(-lambda_E * e2 * dt) : cplx(0.0);
      }
      return basis.F.adjoint() * ph.asDiagonal() * basis.F;
    }
  }
  throw invalid_parameter("unknown electric mode");
}

inline ElectricMode default_electric_mode(const GroupTable& G) {
  return is_cyclic(G) ? ElectricMode::cosine : ElectricMode::transfer_matrix;
}

// Principal matrix logarithm of a unitary: eigenphases in (-pi, pi], with -1 mapped to +i pi.
inline CMat unitary_log(const CMat& u) {
  Eigen::ComplexSchur<CMat> schur(u);  // normal matrix, so the triangular factor is diagonal
  const CMat& t = schur.matrixT();
  const CMat& q = schur.matrixU();
  const int n = static_cast<int>(u.rows());
  CVec l(n);
  for (int k = 0; k < n; ++k) {
    real a = std::arg(t(k, k));
    if (a <= -pi + 1e-12) a = pi;
    l(k) = cplx(0.0, a);
  }
  return q * l.asDiagonal() * q.adjoint();
}

}  // namespace lgtsim
