#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "potts/lattice.hpp"

namespace potts {

// Plain-text snapshot: first line "q K L", then K lines of L space-separated
// spins in 1..q. Files with K > L are transposed on read so they land on the
// normalized L >= K geometry.
inline void write_snapshot(std::ostream& os, const SpinConfig& sigma) {
  const auto& g = sigma.geom();
  os << sigma.q() << ' ' << g.K << ' ' << g.L << '\n';
  for (int r = 0; r < g.K; ++r) {
    for (int c = 0; c < g.L; ++c) {
      if (c) os << ' ';
      os << (int)sigma.at(r, c);
    }
    os << '\n';
  }
}

inline SpinConfig read_snapshot(std::istream& is) {
  int q = 0, K = 0, L = 0;
  if (!(is >> q >> K >> L)) throw std::invalid_argument("snapshot: bad header, expected 'q K L'");
  if (q < 3 || K < 3 || L < 3) throw std::invalid_argument("snapshot: need q > 2 and K,L >= 3");
  std::vector<std::vector<int>> grid(K, std::vector<int>(L));
  for (int r = 0; r < K; ++r)
    for (int c = 0; c < L; ++c) {
      if (!(is >> grid[r][c])) throw std::invalid_argument("snapshot: truncated grid");
      if (grid[r][c] < 1 || grid[r][c] > q) throw std::invalid_argument("snapshot: spin out of 1..q");
    }
  const bool transpose = K > L;
  LatticeGeom g(K, L);  // normalizes by swapping when K > L
  std::vector<Spin> spins(g.sites());
  for (int r = 0; r < g.K; ++r)
    for (int c = 0; c < g.L; ++c) spins[g.index(r, c)] = Spin(transpose ? grid[c][r] : grid[r][c]);
  return SpinConfig(g, q, std::move(spins));
}

inline std::string to_snapshot_string(const SpinConfig& sigma) {
  std::ostringstream os;
  write_snapshot(os, sigma);
  return os.str();
}

}  // namespace potts
