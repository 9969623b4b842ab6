#pragma once

#include <algorithm>
#include <bit>
#include <cstdio>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "core.hpp"

namespace lgtsim {

enum class SubsystemKind { qudit, mode };

struct Subsystem {
  SubsystemKind kind = SubsystemKind::qudit;
  int radix = 2;
  bool operator==(const Subsystem&) const = default;
};

// Mixed-radix register: all qudits first, then fermionic modes in Jordan-Wigner order.
// Flat index = (row-major qudit index) * block_dim + rank(fermion configuration).
// An optional fixed fermion number restricts the configurations kept in the block.
class RegisterLayout {
 public:
  RegisterLayout() = default;

  explicit RegisterLayout(std::vector<Subsystem> subs, int fermion_number = -1)
      : subs_(std::move(subs)), fermion_number_(fermion_number) {
    bool seen_mode = false;
    for (const auto& s : subs_) {
      if (s.kind == SubsystemKind::mode) {
        require(s.radix == 2, "fermion modes have radix 2");
        seen_mode = true;
        ++modes_;
      } else {
        require(!seen_mode, "qudits must precede fermion modes");
        require(s.radix >= 1, "qudit radix must be positive");
        ++qudits_;
      }
    }
    require(modes_ <= 24, "too many fermion modes");
    require(fermion_number_ <= modes_, "fermion number exceeds mode count");
    strides_.assign(qudits_, 1);
    outer_ = 1;
    for (int q = qudits_ - 1; q >= 0; --q) {
      strides_[q] = outer_;
      outer_ *= subs_[q].radix;
    }
    const std::uint32_t full = 1u << modes_;
    rank_.assign(full, -1);
    for (std::uint32_t c = 0; c < full; ++c)
      if (fermion_number_ < 0 || std::popcount(c) == fermion_number_) {
        rank_[c] = static_cast<std::int32_t>(configs_.size());
        configs_.push_back(c);
      }
  }

  static RegisterLayout qudits(int n, int d) { return RegisterLayout(std::vector<Subsystem>(n, {SubsystemKind::qudit, d})); }

  static RegisterLayout hybrid(const std::vector<int>& radices, int n_modes, int fermion_number = -1) {
    std::vector<Subsystem> s;
    for (int r : radices) s.push_back({SubsystemKind::qudit, r});
    for (int k = 0; k < n_modes; ++k) s.push_back({SubsystemKind::mode, 2});
    return RegisterLayout(std::move(s), fermion_number);
  }

  int num_subsystems() const { return static_cast<int>(subs_.size()); }
  int num_qudits() const { return qudits_; }
  int num_modes() const { return modes_; }
  int fermion_number() const { return fermion_number_; }
  const Subsystem& subsystem(int s) const { return subs_.at(s); }
  const std::vector<Subsystem>& subsystems() const { return subs_; }
  bool is_mode(int s) const { return subs_.at(s).kind == SubsystemKind::mode; }
  int radix(int s) const { return subs_.at(s).radix; }
  int mode_number(int s) const {
    require(is_mode(s), "subsystem is not a fermion mode");
    return s - qudits_;
  }
  int mode_subsystem(int k) const { return qudits_ + k; }

  index_t outer_dim() const { return outer_; }
  index_t block_dim() const { return static_cast<index_t>(configs_.size()); }
  index_t dim() const { return outer_ * block_dim(); }
  index_t qudit_stride(int q) const { return strides_.at(q); }

  const std::vector<std::uint32_t>& configs() const { return configs_; }
  std::int32_t rank(std::uint32_t config) const { return rank_.at(config); }

  std::uint32_t mode_bit(int k) const { return 1u << (modes_ - 1 - k); }
  // modes earlier than k in the Jordan-Wigner order
  std::uint32_t mask_before(int k) const {
    const std::uint32_t all = (modes_ == 32) ? ~0u : ((1u << modes_) - 1u);
    return all & ~((mode_bit(k) << 1) - 1u);
  }

  int qudit_digit(index_t outer, int q) const { return static_cast<int>((outer / strides_[q]) % subs_[q].radix); }

  index_t index_of(const std::vector<int>& assignment) const {
    require(static_cast<int>(assignment.size()) == num_subsystems(), "assignment size mismatch");
    index_t o = 0;
    for (int q = 0; q < qudits_; ++q) {
      require(assignment[q] >= 0 && assignment[q] < subs_[q].radix, "basis index out of range");
      o += assignment[q] * strides_[q];
    }
    std::uint32_t c = 0;
    for (int k = 0; k < modes_; ++k) {
      const int v = assignment[qudits_ + k];
      require(v == 0 || v == 1, "mode occupation must be 0 or 1");
      if (v) c |= mode_bit(k);
    }
    const auto r = rank(c);
    require(r >= 0, "configuration outside the fermion-number sector");
    return o * block_dim() + r;
  }

  std::vector<int> assignment_of(index_t idx) const {
    std::vector<int> a(num_subsystems());
    const index_t o = idx / block_dim();
    const std::uint32_t c = configs_[idx % block_dim()];
    for (int q = 0; q < qudits_; ++q) a[q] = qudit_digit(o, q);
    for (int k = 0; k < modes_; ++k) a[qudits_ + k] = (c & mode_bit(k)) ? 1 : 0;
    return a;
  }

  bool operator==(const RegisterLayout& o) const { return subs_ == o.subs_ && fermion_number_ == o.fermion_number_; }

 private:
  std::vector<Subsystem> subs_;
  int fermion_number_ = -1;
  int qudits_ = 0;
  int modes_ = 0;
  std::vector<index_t> strides_;
  index_t outer_ = 1;
  std::vector<std::uint32_t> configs_;
  std::vector<std::int32_t> rank_;
};

using LayoutPtr = std::shared_ptr<const RegisterLayout>;

inline LayoutPtr make_layout(RegisterLayout l) { return std::make_shared<const RegisterLayout>(std::move(l)); }

struct StateVector {
  LayoutPtr layout;
  CVec amp;

  StateVector() = default;
  explicit StateVector(LayoutPtr l) : layout(std::move(l)), amp(CVec::Zero(layout->dim())) {}
  StateVector(LayoutPtr l, CVec a) : layout(std::move(l)), amp(std::move(a)) {
    require(amp.size() == layout->dim(), "amplitude vector size does not match layout");
  }
  index_t dim() const { return amp.size(); }
  real norm() const { return amp.norm(); }
};

// Restricts a kernel to the branch where one qudit holds a fixed value.
struct ControlFilter {
  int subsystem = -1;
  int value = 0;
  bool active() const { return subsystem >= 0; }
};

inline StateVector basis_state(LayoutPtr layout, const std::vector<int>& assignment) {
  StateVector s(layout);
  s.amp(layout->index_of(assignment)) = 1.0;
  return s;
}

inline cplx inner_product(const StateVector& a, const StateVector& b) {
  require(*a.layout == *b.layout, "layout mismatch");
  return a.amp.dot(b.amp);
}

template <class Op>
cplx expectation(const StateVector& s, const Op& op) {
  CVec out = CVec::Zero(s.dim());
  op.apply(s.amp, out);
  return s.amp.dot(out);
}

namespace detail {

inline void check_control(const RegisterLayout& L, const ControlFilter& c, int target) {
  if (!c.active()) return;
  require(c.subsystem != target, "control overlaps target");
  require(!L.is_mode(c.subsystem), "control must be a qudit");
  require(c.value >= 0 && c.value < L.radix(c.subsystem), "control value out of range");
}

// Calls f(base, step) for every group of amplitudes that differ only in qudit q.
template <class F>
void for_qudit_groups(const RegisterLayout& L, int q, const ControlFilter& ctl, F&& f) {
  const index_t B = L.block_dim();
  const index_t s = L.qudit_stride(q) * B;
  const index_t d = L.radix(q);
  const index_t span = s * d;
  for (index_t hi = 0; hi < L.dim(); hi += span)
    for (index_t lo = 0; lo < s; ++lo) {
      const index_t base = hi + lo;
      if (ctl.active() && L.qudit_digit(base / B, ctl.subsystem) != ctl.value) continue;
      f(base, s);
    }
}

// Many-body operator exp(sum M_ab psi^dag_a psi_b) on the listed modes in local Jordan-Wigner order.
inline CMat fock_exponential(const CMat& M) {
  const int r = static_cast<int>(M.rows());
  const int D = 1 << r;
  auto bit = [r](int i) { return 1u << (r - 1 - i); };
  CMat G = CMat::Zero(D, D);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) {
      if (M(a, b) == cplx(0.0)) continue;
      for (std::uint32_t x = 0; x < static_cast<std::uint32_t>(D); ++x) {
        if (!(x & bit(b))) continue;
        std::uint32_t y = x & ~bit(b);
        int sgn = (std::popcount(y & ~((bit(b) << 1) - 1u)) & 1) ? -1 : 1;
        if (y & bit(a)) continue;
        sgn *= (std::popcount(y & ~((bit(a) << 1) - 1u)) & 1) ? -1 : 1;
        y |= bit(a);
        G(y, x) += static_cast<real>(sgn) * M(a, b);
      }
    }
  // G is anti-Hermitian: exp(G) = V exp(-i L) V^dagger with iG = V L V^dagger
  Eigen::SelfAdjointEigenSolver<CMat> es(I * G);
  CVec ph(D);
  for (int k = 0; k < D; ++k) ph(k) = expi(-es.eigenvalues()(k));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

struct FermionGroup {
  std::vector<std::int32_t> rank;  // block rank per local configuration, -1 if outside the sector
  std::vector<real> gamma;         // environment Jordan-Wigner sign per local configuration
};

// Partition the fermion block into groups sharing the configuration of all unlisted modes.
inline std::vector<FermionGroup> fermion_groups(const RegisterLayout& L, const std::vector<int>& modes) {
  const int r = static_cast<int>(modes.size());
  std::uint32_t listed = 0;
  for (int k : modes) listed |= L.mode_bit(k);
  std::map<std::uint32_t, std::size_t> by_env;
  std::vector<FermionGroup> groups;
  for (std::size_t i = 0; i < L.configs().size(); ++i) {
    const std::uint32_t c = L.configs()[i];
    const std::uint32_t env = c & ~listed;
    auto [it, fresh] = by_env.emplace(env, groups.size());
    if (fresh) {
      FermionGroup g;
      g.rank.assign(1u << r, -1);
      g.gamma.assign(1u << r, 1.0);
      for (std::uint32_t x = 0; x < (1u << r); ++x) {
        int sgn = 1;
        for (int i2 = 0; i2 < r; ++i2)
          if (x & (1u << (r - 1 - i2)))
            sgn *= (std::popcount(env & L.mask_before(modes[i2])) & 1) ? -1 : 1;
        g.gamma[x] = sgn;
      }
      groups.push_back(std::move(g));
    }
    std::uint32_t x = 0;
    for (int i2 = 0; i2 < r; ++i2)
      if (c & L.mode_bit(modes[i2])) x |= 1u << (r - 1 - i2);
    groups[it->second].rank[x] = static_cast<std::int32_t>(i);
  }
  return groups;
}

inline std::vector<int> sorted_modes(const RegisterLayout& L, const std::vector<int>& mode_subsystems,
                                     std::vector<int>* perm = nullptr) {
  std::vector<int> modes;
  for (int s : mode_subsystems) modes.push_back(L.mode_number(s));
  std::vector<int> order(modes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return modes[a] < modes[b]; });
  for (std::size_t i = 1; i < order.size(); ++i)
    require(modes[order[i]] != modes[order[i - 1]], "fermion modes must be distinct");
  std::vector<int> out;
  for (int i : order) out.push_back(modes[i]);
  if (perm) *perm = order;
  return out;
}

// Applies U[c] (local Fock matrix, sandwiched by each group's Jordan-Wigner signs) on the outer indices of class c.
inline void apply_fock_blocks(StateVector& st, const std::vector<FermionGroup>& groups,
                              const std::vector<std::vector<index_t>>& outers, const std::vector<const CMat*>& U) {
  const index_t B = st.layout->block_dim();
  std::vector<int> present;
  for (const auto& g : groups) {
    present.clear();
    for (int x = 0; x < static_cast<int>(g.rank.size()); ++x)
      if (g.rank[x] >= 0) present.push_back(x);
    const int p = static_cast<int>(present.size());
    for (std::size_t c = 0; c < U.size(); ++c) {
      const auto& os = outers[c];
      if (os.empty()) continue;
      CMat m(p, p);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
          m(i, j) = g.gamma[present[i]] * (*U[c])(present[i], present[j]) * g.gamma[present[j]];
      CMat buf(p, static_cast<index_t>(os.size()));
      for (std::size_t k = 0; k < os.size(); ++k)
        for (int i = 0; i < p; ++i) buf(i, static_cast<index_t>(k)) = st.amp(os[k] * B + g.rank[present[i]]);
      buf = (m * buf).eval();
      for (std::size_t k = 0; k < os.size(); ++k)
        for (int i = 0; i < p; ++i) st.amp(os[k] * B + g.rank[present[i]]) = buf(i, static_cast<index_t>(k));
    }
  }
}

// Outer indices grouped by the value of a control qudit (one class holding everything if control < 0).
inline std::vector<std::vector<index_t>> outer_classes(const RegisterLayout& L, int control) {
  std::vector<std::vector<index_t>> out(control < 0 ? 1 : L.radix(control));
  for (index_t o = 0; o < L.outer_dim(); ++o) out[control < 0 ? 0 : L.qudit_digit(o, control)].push_back(o);
  return out;
}

}  // namespace detail

inline void apply_single(StateVector& st, int q, const CMat& U, ControlFilter ctl = {}) {
  const RegisterLayout& L = *st.layout;
  require(q >= 0 && q < L.num_qudits(), "apply_single targets a qudit");
  require(U.rows() == L.radix(q) && U.cols() == L.radix(q), "gate dimension mismatch");
  detail::check_control(L, ctl, q);
  const int d = L.radix(q);
  if (!ctl.active()) {
    // each block of d*s amplitudes is an s x d column-major matrix acted on from the right
    const index_t s = L.qudit_stride(q) * L.block_dim();
    const CMat Ut = U.transpose();
    for (index_t hi = 0; hi < L.dim(); hi += s * d) {
      Eigen::Map<CMat> blk(st.amp.data() + hi, s, d);
      blk = (blk * Ut).eval();
    }
    return;
  }
  std::vector<cplx> buf(d);
  detail::for_qudit_groups(L, q, ctl, [&](index_t base, index_t s) {
    for (int k = 0; k < d; ++k) buf[k] = st.amp(base + k * s);
    for (int j = 0; j < d; ++j) {
      cplx acc = 0.0;
      for (int k = 0; k < d; ++k) acc += U(j, k) * buf[k];
      st.amp(base + j * s) = acc;
    }
  });
}

inline void apply_single_diagonal(StateVector& st, int q, const CVec& phases, ControlFilter ctl = {}) {
  const RegisterLayout& L = *st.layout;
  require(q >= 0 && q < L.num_qudits(), "diagonal gate targets a qudit");
  require(phases.size() == L.radix(q), "gate dimension mismatch");
  detail::check_control(L, ctl, q);
  detail::for_qudit_groups(L, q, ctl, [&](index_t base, index_t s) {
    for (int k = 0; k < L.radix(q); ++k) st.amp(base + k * s) *= phases(k);
  });
}

// Target qudit t takes the value perm[a*d_c + b] for target value a and control value b.
inline void apply_qudit_permutation(StateVector& st, int t, int c, const std::vector<int>& perm, ControlFilter ctl = {}) {
  const RegisterLayout& L = *st.layout;
  require(t >= 0 && t < L.num_qudits() && c >= 0 && c < L.num_qudits(), "permutation acts on qudits");
  require(t != c, "target and control must differ");
  detail::check_control(L, ctl, t);
  const int dt = L.radix(t), dc = L.radix(c);
  require(static_cast<int>(perm.size()) == dt * dc, "permutation table size mismatch");
  std::vector<cplx> buf(dt);
  detail::for_qudit_groups(L, t, ctl, [&](index_t base, index_t s) {
    const int b = L.qudit_digit(base / L.block_dim(), c);
    for (int a = 0; a < dt; ++a) buf[a] = st.amp(base + a * s);
    for (int a = 0; a < dt; ++a) st.amp(base + perm[a * dc + b] * s) = buf[a];
  });
}

// Multiplies every amplitude by table[joint index of the listed subsystems] (row-major).
inline void apply_diagonal(StateVector& st, const std::vector<int>& subsystems, const CVec& table) {
  const RegisterLayout& L = *st.layout;
  index_t total = 1;
  for (int s : subsystems) total *= L.radix(s);
  require(table.size() == total, "phase table size mismatch");
  const index_t B = L.block_dim();
  for (index_t o = 0; o < L.outer_dim(); ++o)
    for (index_t r = 0; r < B; ++r) {
      const std::uint32_t c = L.configs()[r];
      index_t j = 0;
      for (int s : subsystems) {
        const int v = L.is_mode(s) ? ((c & L.mode_bit(L.mode_number(s))) ? 1 : 0) : L.qudit_digit(o, s);
        j = j * L.radix(s) + v;
      }
      st.amp(o * B + r) *= table(j);
    }
}

inline void apply_diagonal(StateVector& st, const std::vector<int>& subsystems,
                           const std::function<cplx(const std::vector<int>&)>& phase_fn) {
  const RegisterLayout& L = *st.layout;
  index_t total = 1;
  for (int s : subsystems) total *= L.radix(s);
  CVec table(total);
  std::vector<int> digits(subsystems.size());
  for (index_t j = 0; j < total; ++j) {
    index_t rem = j;
    for (int i = static_cast<int>(subsystems.size()) - 1; i >= 0; --i) {
      digits[i] = static_cast<int>(rem % L.radix(subsystems[i]));
      rem /= L.radix(subsystems[i]);
    }
    table(j) = phase_fn(digits);
  }
  apply_diagonal(st, subsystems, table);
}

// exp(sum_ab M_ab psi^dag_a psi_b) on the listed mode subsystems (M indexed in list order).
inline void apply_fermion_rotation(StateVector& st, const std::vector<int>& mode_subsystems, const CMat& M,
                                   ControlFilter ctl = {}) {
  const RegisterLayout& L = *st.layout;
  const int r = static_cast<int>(mode_subsystems.size());
  require(M.rows() == r && M.cols() == r, "generator size mismatch");
  require(max_abs(M + M.adjoint()) < 1e-10, "fermion generator must be anti-Hermitian");
  if (ctl.active()) detail::check_control(L, ctl, -1);
  std::vector<int> perm;
  const auto modes = detail::sorted_modes(L, mode_subsystems, &perm);
  CMat Ms(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) Ms(i, j) = M(perm[i], perm[j]);
  const CMat U = detail::fock_exponential(Ms);
  const auto groups = detail::fermion_groups(L, modes);
  auto classes = detail::outer_classes(L, ctl.active() ? ctl.subsystem : -1);
  if (ctl.active()) classes = {classes[ctl.value]};
  detail::apply_fock_blocks(st, groups, classes, {&U});
}

// Fermion rotation whose generator depends on the value of a control qudit.
inline void apply_fermion_rotation_controlled(StateVector& st, int control, const std::vector<int>& mode_subsystems,
                                              const std::vector<CMat>& generators) {
  const RegisterLayout& L = *st.layout;
  require(control >= 0 && control < L.num_qudits(), "control must be a qudit");
  require(static_cast<int>(generators.size()) == L.radix(control), "one generator per control value");
  const int r = static_cast<int>(mode_subsystems.size());
  std::vector<int> perm;
  const auto modes = detail::sorted_modes(L, mode_subsystems, &perm);
  std::vector<CMat> us;
  for (const CMat& M : generators) {
    require(M.rows() == r && M.cols() == r, "generator size mismatch");
    require(max_abs(M + M.adjoint()) < 1e-10, "fermion generator must be anti-Hermitian");
    CMat Ms(r, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) Ms(i, j) = M(perm[i], perm[j]);
    us.push_back(detail::fock_exponential(Ms));
  }
  const auto groups = detail::fermion_groups(L, modes);
  std::vector<const CMat*> ptrs;
  for (const auto& u : us) ptrs.push_back(&u);
  detail::apply_fock_blocks(st, groups, detail::outer_classes(L, control), ptrs);
}

// Phase per mode when occupied; unoccupied modes are untouched.
inline void apply_mode_phases(StateVector& st, const std::vector<int>& mode_subsystems, const std::vector<cplx>& phase) {
  const RegisterLayout& L = *st.layout;
  require(mode_subsystems.size() == phase.size(), "one phase per mode");
  const index_t B = L.block_dim();
  CVec f = CVec::Ones(B);
  for (index_t r = 0; r < B; ++r)
    for (std::size_t i = 0; i < mode_subsystems.size(); ++i)
      if (L.configs()[r] & L.mode_bit(L.mode_number(mode_subsystems[i]))) f(r) *= phase[i];
  for (index_t o = 0; o < L.outer_dim(); ++o) st.amp.segment(o * B, B).array() *= f.array();
}

// out += coef * psi^dag_a psi_b in (number conserving, stays inside a fixed-number sector).
inline void add_fermion_hop(const RegisterLayout& L, int mode_a, int mode_b, cplx coef, const CVec& in, CVec& out,
                            const std::function<cplx(index_t)>& outer_weight = nullptr) {
  const index_t B = L.block_dim();
  const std::uint32_t ba = L.mode_bit(mode_a), bb = L.mode_bit(mode_b);
  for (index_t r = 0; r < B; ++r) {
    const std::uint32_t c = L.configs()[r];
    if (!(c & bb)) continue;
    std::uint32_t y = c & ~bb;
    int sgn = (std::popcount(y & L.mask_before(mode_b)) & 1) ? -1 : 1;
    if (y & ba) continue;
    sgn *= (std::popcount(y & L.mask_before(mode_a)) & 1) ? -1 : 1;
    y |= ba;
    const index_t r2 = L.rank(y);
    if (r2 < 0) continue;
    for (index_t o = 0; o < L.outer_dim(); ++o) {
      const cplx w = outer_weight ? outer_weight(o) : cplx(1.0);
      out(o * B + r2) += coef * static_cast<real>(sgn) * w * in(o * B + r);
    }
  }
}

// Creation operator psi^dag_k on an unrestricted layout (not unitary; used for state construction).
inline void raise_mode(StateVector& st, int mode_subsystem) {
  const RegisterLayout& L = *st.layout;
  require(L.fermion_number() < 0, "creation operators need an unrestricted layout");
  const int k = L.mode_number(mode_subsystem);
  const index_t B = L.block_dim();
  CVec out = CVec::Zero(st.dim());
  for (index_t r = 0; r < B; ++r) {
    const std::uint32_t c = L.configs()[r];
    if (c & L.mode_bit(k)) continue;
    const real sgn = (std::popcount(c & L.mask_before(k)) & 1) ? -1.0 : 1.0;
    const index_t r2 = L.rank(c | L.mode_bit(k));
    for (index_t o = 0; o < L.outer_dim(); ++o) out(o * B + r2) = sgn * st.amp(o * B + r);
  }
  st.amp = std::move(out);
}

// Basis state psi^dag_{m1} psi^dag_{m2} ... |qudits, vacuum> with the creation order as written.
inline StateVector fock_state(LayoutPtr layout, const std::vector<int>& qudit_values, const std::vector<int>& create_modes) {
  const RegisterLayout& L = *layout;
  require(static_cast<int>(qudit_values.size()) == L.num_qudits(), "one value per qudit");
  std::vector<int> a(qudit_values);
  a.resize(L.num_subsystems(), 0);
  int inversions = 0;
  for (std::size_t i = 0; i < create_modes.size(); ++i) {
    a[L.num_qudits() + create_modes[i]] = 1;
    for (std::size_t j = i + 1; j < create_modes.size(); ++j) {
      require(create_modes[i] != create_modes[j], "mode created twice");
      if (create_modes[i] > create_modes[j]) ++inversions;
    }
  }
  StateVector s(layout);
  s.amp(L.index_of(a)) = (inversions & 1) ? -1.0 : 1.0;
  return s;
}

// Per-qudit basis change with rectangular matrices (nullptr entries keep the qudit); the block is untouched.
inline StateVector transform_qudits(const StateVector& st, LayoutPtr target, const std::vector<const CMat*>& maps) {
  const RegisterLayout& S = *st.layout;
  const RegisterLayout& T = *target;
  require(S.num_qudits() == T.num_qudits() && S.num_modes() == T.num_modes() &&
              S.fermion_number() == T.fermion_number(),
          "layouts differ beyond qudit radices");
  require(static_cast<int>(maps.size()) == S.num_qudits(), "one map per qudit");
  const index_t B = S.block_dim();
  std::vector<int> radix(S.num_qudits());
  for (int q = 0; q < S.num_qudits(); ++q) radix[q] = S.radix(q);
  CVec cur = st.amp;
  for (int q = 0; q < S.num_qudits(); ++q) {
    const int dout = T.radix(q);
    if (!maps[q]) {
      require(dout == radix[q], "identity map needs equal radix");
      continue;
    }
    const CMat& m = *maps[q];
    require(m.cols() == radix[q] && m.rows() == dout, "map shape mismatch");
    index_t inner = B;
    for (int p = q + 1; p < S.num_qudits(); ++p) inner *= radix[p];
    index_t outer = 1;
    for (int p = 0; p < q; ++p) outer *= radix[p];
    CVec next = CVec::Zero(outer * dout * inner);
    for (index_t a = 0; a < outer; ++a)
      for (int j = 0; j < dout; ++j)
        for (int k = 0; k < radix[q]; ++k) {
          const cplx w = m(j, k);
          if (w == cplx(0.0)) continue;
          next.segment((a * dout + j) * inner, inner) += w * cur.segment((a * radix[q] + k) * inner, inner);
        }
    cur = std::move(next);
    radix[q] = dout;
  }
  return StateVector(std::move(target), std::move(cur));
}

// Text snapshot: header, subsystem list, then one "index re im" row per nonzero amplitude.
inline void write_state(std::ostream& os, const StateVector& st) {
  const RegisterLayout& L = *st.layout;
  os << "lgtsim-state 1\n";
  os << "subsystems " << L.num_subsystems();
  for (const auto& s : L.subsystems()) os << ' ' << (s.kind == SubsystemKind::mode ? "m" : "q") << s.radix;
  os << "\nfermion_number " << L.fermion_number() << "\n";
  index_t nnz = 0;
  for (index_t i = 0; i < st.dim(); ++i) nnz += st.amp(i) != cplx(0.0);
  os << "nonzero " << nnz << "\n";
  char buf[96];
  for (index_t i = 0; i < st.dim(); ++i) {
    if (st.amp(i) == cplx(0.0)) continue;
    std::snprintf(buf, sizeof buf, "%lld %.17g %.17g\n", static_cast<long long>(i), st.amp(i).real(), st.amp(i).imag());
    os << buf;
  }
}

inline StateVector read_state(std::istream& is) {
  std::string tag;
  int version = 0;
  is >> tag >> version;
  require(is && tag == "lgtsim-state" && version == 1, "not a state snapshot");
  int n = 0;
  is >> tag >> n;
  require(is && tag == "subsystems" && n >= 0, "bad subsystem header");
  std::vector<Subsystem> subs;
  for (int i = 0; i < n; ++i) {
    std::string s;
    is >> s;
    require(is && s.size() >= 2 && (s[0] == 'q' || s[0] == 'm'), "bad subsystem entry");
    subs.push_back({s[0] == 'm' ? SubsystemKind::mode : SubsystemKind::qudit, std::stoi(s.substr(1))});
  }
  int fn = -1;
  is >> tag >> fn;
  require(is && tag == "fermion_number", "bad fermion header");
  long long nnz = 0;
  is >> tag >> nnz;
  require(is && tag == "nonzero", "bad amplitude header");
  StateVector st(make_layout(RegisterLayout(subs, fn)));
  for (long long k = 0; k < nnz; ++k) {
    std::string si, sr, sim;
    is >> si >> sr >> sim;
    require(static_cast<bool>(is), "truncated amplitude list");
    const long long i = std::stoll(si);
    require(i >= 0 && i < st.dim(), "amplitude index out of range");
    st.amp(i) = cplx(std::strtod(sr.c_str(), nullptr), std::strtod(sim.c_str(), nullptr));
  }
  return st;
}

}  // namespace lgtsim
