#pragma once

#include <vector>

#include "../circuits.hpp"
#include "../lattice.hpp"
#include "operators.hpp"

namespace lgtsim {

struct AhmEnergies {
  std::vector<real> electric;  // per link
  std::vector<real> magnetic;  // per plaquette
  std::vector<real> mass;      // per link
  std::vector<real> star;      // per star

  static real sum(const std::vector<real>& v) {
    real s = 0.0;
    for (real x : v) s += x;
    return s;
  }
  real gauge() const { return sum(electric) + sum(magnetic); }
  real matter() const { return sum(mass) + sum(star); }
  real total() const { return gauge() + matter(); }
};

// Matrix-free Hamiltonian of the dual abelian Higgs model in the group basis of every link:
//   c_E sum_l (2 - P_l - P_l^dag) + lambda_B sum_p 2 cos(phi_p) + lambda_M sum_l 2 cos(phi_l)
//   + c_J sum_s (2 - S_s - S_s^dag),  c = lambda d^2 / (2 pi^2), S_s the star shift.
class AhmOperator {
 public:
  AhmOperator(const LatticeSpec& lat, int d, const CouplingSet& c) : lat_(lat), d_(d), c_(c) {
    require(d >= 2, "d must be at least 2");
    require(lat.dim == 2 && lat.extent[0] == 2 && lat.extent[1] == 2, "the abelian Higgs oracle needs a 2x2 lattice");
    const int n = lat.num_links();
    stride_.assign(n, 1);
    dim_ = 1;
    for (int l = n - 1; l >= 0; --l) {
      stride_[l] = dim_;
      dim_ *= d;
    }
    cE_ = shift_coefficient(c.lambda_E, d);
    cJ_ = shift_coefficient(c.lambda_J, d);
    diag_.resize(dim_);
    std::vector<int> k(n, 0);
    for (index_t i = 0; i < dim_; ++i) {
      real v = 2.0 * cE_ * n + 2.0 * cJ_ * static_cast<real>(lat.stars.size());
      for (const auto& p : lat.plaquettes) v += 2.0 * c.lambda_B * std::cos(angle(plaquette_value(k, p)));
      for (int l = 0; l < n; ++l) v += 2.0 * c.lambda_M * std::cos(angle(k[l]));
      diag_(i) = v;
      increment(k);
    }
    if (cJ_ != 0.0) {
      for (const auto& s : lat.stars) {
        star_fwd_.push_back(star_map(s, -1));
        star_bwd_.push_back(star_map(s, +1));
      }
    }
  }

  index_t dim() const { return dim_; }
  int d() const { return d_; }
  const LatticeSpec& lattice() const { return lat_; }
  const CouplingSet& couplings() const { return c_; }

  void apply(const CVec& in, CVec& out) const {
    out.resize(dim_);
    out = diag_.cwiseProduct(in);
    if (cE_ != 0.0)
      for (int l = 0; l < lat_.num_links(); ++l) add_link_shifts(l, -cE_, in, out);
    for (std::size_t s = 0; s < star_fwd_.size(); ++s) {
      const auto& f = star_fwd_[s];
      const auto& b = star_bwd_[s];
      for (index_t i = 0; i < dim_; ++i) out(i) -= cJ_ * (in(f[i]) + in(b[i]));
    }
  }

  AhmEnergies energies(const CVec& v) const {
    AhmEnergies e;
    const int n = lat_.num_links();
    for (int l = 0; l < n; ++l) e.electric.push_back(cE_ * (2.0 - 2.0 * link_shift_overlap(v, l).real()));
    e.magnetic.assign(lat_.plaquettes.size(), 0.0);
    e.mass.assign(n, 0.0);
    std::vector<int> k(n, 0);
    for (index_t i = 0; i < dim_; ++i) {
      const real w = std::norm(v(i));
      if (w != 0.0) {
        for (std::size_t p = 0; p < lat_.plaquettes.size(); ++p)
          e.magnetic[p] += w * 2.0 * c_.lambda_B * std::cos(angle(plaquette_value(k, lat_.plaquettes[p])));
        for (int l = 0; l < n; ++l) e.mass[l] += w * 2.0 * c_.lambda_M * std::cos(angle(k[l]));
      }
      increment(k);
    }
    for (const auto& s : lat_.stars) {
      const auto f = star_map(s, -1);
      cplx ov = 0.0;
      for (index_t i = 0; i < dim_; ++i) ov += std::conj(v(i)) * v(f[i]);
      e.star.push_back(cJ_ * (2.0 - 2.0 * ov.real()));
    }
    return e;
  }

  // Gauss-type symmetry operators: star shift S_s and plaquette phase e^{i phi_p}.
  CVec star_shift(const CVec& v, int s) const {
    const auto f = star_map(lat_.stars.at(s), -1);
    CVec out(dim_);
    for (index_t i = 0; i < dim_; ++i) out(i) = v(f[i]);
    return out;
  }
  CVec star_shift_adjoint(const CVec& v, int s) const {
    const auto b = star_map(lat_.stars.at(s), +1);
    CVec out(dim_);
    for (index_t i = 0; i < dim_; ++i) out(i) = v(b[i]);
    return out;
  }
  CVec plaquette_phase(const CVec& v, int p, bool conj = false) const {
    CVec out(dim_);
    std::vector<int> k(lat_.num_links(), 0);
    for (index_t i = 0; i < dim_; ++i) {
      const real a = angle(plaquette_value(k, lat_.plaquettes.at(p)));
      out(i) = expi(conj ? -a : a) * v(i);
      increment(k);
    }
    return out;
  }

 private:
  real angle(int k) const { return 2.0 * pi * k / d_; }
  int mod(int k) const { return ((k % d_) + d_) % d_; }
  int plaquette_value(const std::vector<int>& k, const Plaquette& p) const {
    int v = 0;
    for (int a = 0; a < 4; ++a) v += p.sign[a] * k[p.links[a]];
    return mod(v);
  }
  void increment(std::vector<int>& k) const {
    for (int l = static_cast<int>(k.size()) - 1; l >= 0; --l) {
      if (++k[l] < d_) return;
      k[l] = 0;
    }
  }
  // flat index of k + dir * delta_s for every k
  std::vector<std::int32_t> star_map(const Star& s, int dir) const {
    std::vector<std::int32_t> m(dim_);
    const int n = lat_.num_links();
    std::vector<int> k(n, 0);
    for (index_t i = 0; i < dim_; ++i) {
      index_t j = i;
      for (int a = 0; a < 4; ++a) {
        const int l = s.links[a];
        const int nk = mod(k[l] + dir * s.sign[a]);
        j += (nk - k[l]) * stride_[l];
      }
      m[i] = static_cast<std::int32_t>(j);
      increment(k);
    }
    return m;
  }
  void add_link_shifts(int l, real coef, const CVec& in, CVec& out) const {
    const index_t s = stride_[l];
    const index_t span = s * d_;
    for (index_t hi = 0; hi < dim_; hi += span)
      for (int k = 0; k < d_; ++k) {
        const index_t dst = hi + k * s;
        const index_t dn = hi + mod(k - 1) * s;
        const index_t up = hi + mod(k + 1) * s;
        out.segment(dst, s) += coef * (in.segment(dn, s) + in.segment(up, s));
      }
  }
  cplx link_shift_overlap(const CVec& v, int l) const {
    const index_t s = stride_[l];
    const index_t span = s * d_;
    cplx acc = 0.0;
    for (index_t hi = 0; hi < dim_; hi += span)
      for (int k = 0; k < d_; ++k) acc += v.segment(hi + k * s, s).dot(v.segment(hi + mod(k - 1) * s, s));
    return acc;
  }

  LatticeSpec lat_;
  int d_;
  CouplingSet c_;
  real cE_ = 0.0, cJ_ = 0.0;
  index_t dim_ = 1;
  std::vector<index_t> stride_;
  RVec diag_;
  std::vector<std::vector<std::int32_t>> star_fwd_, star_bwd_;
};

// Sparse form of the same Hamiltonian with one labelled term per link, plaquette and star.
inline SparseOperator build_ahm(const LatticeSpec& lat, int d, const CouplingSet& c) {
  AhmOperator op(lat, d, c);
  const index_t n = op.dim();
  const int L = lat.num_links();
  std::vector<index_t> stride(L, 1);
  for (int l = L - 2; l >= 0; --l) stride[l] = stride[l + 1] * d;
  auto digit = [&](index_t i, int l) { return static_cast<int>((i / stride[l]) % d); };
  auto shifted = [&](index_t i, int l, int by) { return i + (((digit(i, l) + by) % d + d) % d - digit(i, l)) * stride[l]; };
  const real cE = shift_coefficient(c.lambda_E, d), cJ = shift_coefficient(c.lambda_J, d);
  SparseOperator out;
  auto finish = [&](std::vector<Eigen::Triplet<cplx, std::int64_t>>& t) {
    SparseMat m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
  };
  using Trip = Eigen::Triplet<cplx, std::int64_t>;
  for (int l = 0; l < L; ++l) {
    std::vector<Trip> t;
    for (index_t i = 0; i < n; ++i) {
      t.emplace_back(i, i, 2.0 * cE);
      t.emplace_back(shifted(i, l, 1), i, -cE);
      t.emplace_back(shifted(i, l, -1), i, -cE);
    }
    out.terms.emplace_back("electric_" + std::to_string(l), finish(t));
  }
  for (std::size_t p = 0; p < lat.plaquettes.size(); ++p) {
    std::vector<Trip> t;
    for (index_t i = 0; i < n; ++i) {
      int v = 0;
      for (int a = 0; a < 4; ++a) v += lat.plaquettes[p].sign[a] * digit(i, lat.plaquettes[p].links[a]);
      t.emplace_back(i, i, 2.0 * c.lambda_B * std::cos(2.0 * pi * v / d));
    }
    out.terms.emplace_back("magnetic_" + std::to_string(p), finish(t));
  }
  for (int l = 0; l < L; ++l) {
    std::vector<Trip> t;
    for (index_t i = 0; i < n; ++i) t.emplace_back(i, i, 2.0 * c.lambda_M * std::cos(2.0 * pi * digit(i, l) / d));
    out.terms.emplace_back("mass_" + std::to_string(l), finish(t));
  }
  for (std::size_t s = 0; s < lat.stars.size(); ++s) {
    std::vector<Trip> t;
    for (index_t i = 0; i < n; ++i) {
      index_t up = i, dn = i;
      for (int a = 0; a < 4; ++a) {
        up = shifted(up, lat.stars[s].links[a], lat.stars[s].sign[a]);
        dn = shifted(dn, lat.stars[s].links[a], -lat.stars[s].sign[a]);
      }
      t.emplace_back(i, i, 2.0 * cJ);
      t.emplace_back(up, i, -cJ);
      t.emplace_back(dn, i, -cJ);
    }
    out.terms.emplace_back("star_" + std::to_string(s), finish(t));
  }
  out.m = SparseMat(n, n);
  for (const auto& t : out.terms) out.m += t.second;
  out.m.prune(cplx(0.0));
  return out;
}

}  // namespace lgtsim
