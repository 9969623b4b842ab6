#pragma once

#include <array>
#include <vector>

#include "core.hpp"

namespace lgtsim {

struct Link {
  int site;
  int dir;
};

// Four links with orientation flags; sign +1 enters as U, -1 as U^dagger.
struct Plaquette {
  std::array<int, 4> links;
  std::array<int, 4> sign{+1, +1, -1, -1};
};

// Links meeting at a vertex: (out_x, out_y, in_x, in_y), out-links carry P and in-links P^dagger.
struct Star {
  int site;
  std::array<int, 4> links;
  std::array<int, 4> sign{+1, +1, -1, -1};
};

struct LatticeSpec {
  int dim = 1;
  std::vector<int> extent;
  std::vector<bool> periodic;
  std::vector<std::array<int, 2>> sites;  // coordinates (second entry 0 in 1D)
  std::vector<Link> links;
  std::vector<Plaquette> plaquettes;
  std::vector<Star> stars;

  int num_sites() const { return static_cast<int>(sites.size()); }
  int num_links() const { return static_cast<int>(links.size()); }

  int site_index(int x, int y = 0) const {
    const int lx = extent[0];
    const int ly = dim == 2 ? extent[1] : 1;
    x = ((x % lx) + lx) % lx;
    y = ((y % ly) + ly) % ly;
    return y * lx + x;
  }
  int link_index(int site, int dir) const { return dim == 1 ? site : 2 * site + dir; }
  int link_target(int l) const {
    const auto& lk = links[l];
    const auto& c = sites[lk.site];
    return lk.dir == 0 ? site_index(c[0] + 1, c[1]) : site_index(c[0], c[1] + 1);
  }
};

inline LatticeSpec build_lattice(int D, const std::vector<int>& extents, const std::vector<bool>& periodic) {
  if (D != 1 && D != 2) throw unsupported_feature("only 1D chains and 2D square lattices are supported");
  require(static_cast<int>(extents.size()) == D && static_cast<int>(periodic.size()) == D,
          "extent/periodic size must match dimension");
  for (int a = 0; a < D; ++a) {
    require(periodic[a], "open boundaries are not supported");
    require(extents[a] >= 2, "periodic extent must be >= 2");
  }
  LatticeSpec L;
  L.dim = D;
  L.extent = extents;
  L.periodic = periodic;
  const int lx = extents[0];
  const int ly = D == 2 ? extents[1] : 1;
  for (int y = 0; y < ly; ++y)
    for (int x = 0; x < lx; ++x) L.sites.push_back({x, y});
  for (int s = 0; s < L.num_sites(); ++s)
    for (int dir = 0; dir < D; ++dir) L.links.push_back({s, dir});
  if (D == 2) {
    for (int s = 0; s < L.num_sites(); ++s) {
      const auto c = L.sites[s];
      Plaquette p;
      p.links = {L.link_index(s, 0), L.link_index(L.site_index(c[0] + 1, c[1]), 1),
                 L.link_index(L.site_index(c[0], c[1] + 1), 0), L.link_index(s, 1)};
      L.plaquettes.push_back(p);
      Star st;
      st.site = s;
      st.links = {L.link_index(s, 0), L.link_index(s, 1), L.link_index(L.site_index(c[0] - 1, c[1]), 0),
                  L.link_index(L.site_index(c[0], c[1] - 1), 1)};
      L.stars.push_back(st);
    }
  }
  return L;
}

}  // namespace lgtsim
