#pragma once

#include <stdexcept>
#include <vector>

#include "potts/energy.hpp"
#include "potts/geometry.hpp"
#include "potts/landscape.hpp"
#include "potts/lattice.hpp"

namespace potts {

struct PathProfile {
  SpinConfig start;
  std::vector<Move> moves;
  std::vector<Energy> energies;  // absolute H, energies[0] = H(start)
  Energy height{};               // max over energies
  std::vector<std::size_t> argmax;

  std::size_t length() const { return moves.size(); }
  SpinConfig state_at(std::size_t i) const {
    SpinConfig s = start;
    for (std::size_t k = 0; k < i; ++k) s = apply_move(s, moves[k]);
    return s;
  }
  SpinConfig end_state() const { return state_at(moves.size()); }
};

inline PathProfile make_profile(const ModelParams& p, SpinConfig start, std::vector<Move> moves) {
  PathProfile prof;
  prof.start = start;
  prof.moves = std::move(moves);
  prof.energies.reserve(prof.moves.size() + 1);
  Energy H = hamiltonian(p, start);
  prof.energies.push_back(H);
  std::vector<Spin> sp = start.spins();
  for (const auto& m : prof.moves) {
    int idx = p.geom.index(m.vertex);
    if (sp[idx] == m.new_spin) throw std::invalid_argument("make_profile: no-op move in path");
    H = H + energy_delta(p, sp, idx, m.new_spin);
    sp[idx] = m.new_spin;
    prof.energies.push_back(H);
  }
  prof.height = prof.energies[0];
  for (const auto& e : prof.energies)
    if (energy_less(prof.height, e, p.h)) prof.height = e;
  for (std::size_t i = 0; i < prof.energies.size(); ++i)
    if (energy_eq(prof.energies[i], prof.height, p.h)) prof.argmax.push_back(i);
  return prof;
}

// ---------------------------------------------------------------------------
// reference path bold m -> bold 1
// ---------------------------------------------------------------------------

// Cell order: clockwise spiral around the anchor (bars added east, south,
// west, north, each along a longest side of the current rectangle) up to the
// (K-1) x (K-1) square, then the row completing a vertical strip, then the
// remaining columns one by one. N_1 after i flips is exactly i.
inline std::vector<int> reference_cell_order(const LatticeGeom& g, Vertex anchor) {
  const int K = g.K, L = g.L;
  auto wrapR = [&](int r) { return ((r % K) + K) % K; };
  auto wrapC = [&](int c) { return ((c % L) + L) % L; };
  std::vector<int> cells;
  cells.reserve(g.sites());
  int top = anchor.row, left = anchor.col, h = 1, w = 1;
  cells.push_back(g.index(anchor));
  int dir = 0;  // 0 E, 1 S, 2 W, 3 N
  while (h < K - 1 || w < K - 1) {
    switch (dir) {
      case 0: {  // column east, top to bottom
        int c = wrapC(left + w);
        for (int r = 0; r < h; ++r) cells.push_back(g.index(wrapR(top + r), c));
        ++w;
        break;
      }
      case 1: {  // row south, left to right
        int r = wrapR(top + h);
        for (int c = 0; c < w; ++c) cells.push_back(g.index(r, wrapC(left + c)));
        ++h;
        break;
      }
      case 2: {  // column west
        int c = wrapC(left - 1);
        for (int r = 0; r < h; ++r) cells.push_back(g.index(wrapR(top + r), c));
        left = wrapC(left - 1);
        ++w;
        break;
      }
      case 3: {  // row north
        int r = wrapR(top - 1);
        for (int c = 0; c < w; ++c) cells.push_back(g.index(r, wrapC(left + c)));
        top = wrapR(top - 1);
        ++h;
        break;
      }
    }
    dir = (dir + 1) % 4;
  }
  // the row completing columns left..left+w-1 to full height
  int missing_row = wrapR(top + h);
  for (int c = 0; c < w; ++c) cells.push_back(g.index(missing_row, wrapC(left + c)));
  // remaining columns, west neighbor always filled
  for (int c = w; c < L; ++c) {
    int col = wrapC(left + c);
    for (int r = 0; r < K; ++r) cells.push_back(g.index(wrapR(top + r), col));
  }
  return cells;
}

inline PathProfile build_reference_path(const ModelParams& p, Spin m, Vertex anchor = {0, 0}) {
  if (m < 2 || (int)m > p.q) throw std::invalid_argument("build_reference_path: need 2 <= m <= q");
  if (!p.geom.in_range(anchor)) throw std::out_of_range("build_reference_path: anchor out of range");
  auto cells = reference_cell_order(p.geom, anchor);
  std::vector<Move> moves;
  moves.reserve(cells.size());
  for (int c : cells) moves.push_back(Move{p.geom.vertex(c), 1});
  return make_profile(p, monochrome(p.geom, p.q, m), std::move(moves));
}

// omega* : bold m -> bold 1 -> bold z, the second leg being the time
// reversal of the reference path of z
inline PathProfile build_meta_meta_path(const ModelParams& p, Spin m, Spin z,
                                        Vertex anchor_m = {0, 0}, Vertex anchor_z = {0, 0}) {
  if (m == z || m < 2 || z < 2 || (int)m > p.q || (int)z > p.q)
    throw std::invalid_argument("build_meta_meta_path: need distinct m,z in 2..q");
  auto cells_m = reference_cell_order(p.geom, anchor_m);
  auto cells_z = reference_cell_order(p.geom, anchor_z);
  std::vector<Move> moves;
  moves.reserve(2 * cells_m.size());
  for (int c : cells_m) moves.push_back(Move{p.geom.vertex(c), 1});
  for (auto it = cells_z.rbegin(); it != cells_z.rend(); ++it)
    moves.push_back(Move{p.geom.vertex(*it), z});
  return make_profile(p, monochrome(p.geom, p.q, m), std::move(moves));
}

// ---------------------------------------------------------------------------
// escape paths certifying V <= 2 for the local-minimum classes
// ---------------------------------------------------------------------------

namespace detail {

// erode a strip run into its neighbor, line by line starting next to the
// absorber (case 1)
inline std::vector<Move> strip_erosion_moves(const ModelParams& p, const SpinConfig& sigma,
                                             bool vertical, const StripRun& donor, Spin absorb) {
  const auto& g = p.geom;
  const int nlines = vertical ? g.L : g.K;
  const int span = vertical ? g.K : g.L;
  std::vector<Move> moves;
  for (int i = donor.thickness - 1; i >= 0; --i) {
    int line = (donor.start + i) % nlines;
    for (int s = 0; s < span; ++s) {
      Vertex v = vertical ? Vertex{s, line} : Vertex{line, s};
      (void)sigma;
      moves.push_back(Move{v, absorb});
    }
  }
  return moves;
}

}  // namespace detail

// Builds a path from a classified local minimum to a strictly lower state
// whose height above the minimum stays <= 2. Dispatch: strip erosion for M2,
// supercritical growth / subcritical shrinking of 1-rectangles for M3,
// absorption of a rectangle by a larger neighbor for M4; M1bar falls back to
// a ceiling-bounded search along its plateau.
inline PathProfile build_escape_path(const ModelParams& p, const SpinConfig& eta) {
  auto rep = local_min_class(p, eta);
  const Energy H0 = hamiltonian(p, eta);

  auto finish = [&](std::vector<Move> moves) {
    PathProfile prof = make_profile(p, eta, std::move(moves));
    if (!energy_less(prof.energies.back(), H0, p.h))
      throw std::logic_error("build_escape_path: constructed path does not descend");
    if (energy_less(H0 + Energy{2, 0}, prof.height, p.h))
      throw std::logic_error("build_escape_path: construction exceeded height 2");
    return prof;
  };

  switch (rep.cls) {
    case MinClass::M2: {
      for (bool vertical : {true, false}) {
        auto runs = strip_runs(eta, vertical);
        if (!runs || runs->size() < 2) continue;
        // erode a non-1 strip into the run after it
        for (size_t i = 0; i < runs->size(); ++i) {
          const auto& donor = (*runs)[i];
          if (donor.spin == 1) continue;
          const auto& next = (*runs)[(i + 1) % runs->size()];
          return finish(detail::strip_erosion_moves(p, eta, vertical, donor, next.spin));
        }
      }
      throw std::logic_error("build_escape_path: M2 without a non-1 strip");
    }
    case MinClass::M3: {
      auto ones = clusters(eta, 1);
      const int ls = p.ell_star();
      const auto& g = p.geom;
      auto host_of = [&](const Cluster& cl) {
        for (int v : cl.cells)
          for (int w : g.neighbor_indices(v))
            if (eta.at(w) != 1) return eta.at(w);
        return Spin(0);
      };
      // (i) a supercritical rectangle grows a full bar along a shortest side
      for (const auto& cl : ones.clusters) {
        int lo = std::min(cl.width, cl.height);
        if (lo < ls) continue;
        std::vector<Move> moves;
        if (cl.height <= cl.width) {  // shortest side vertical: new column east
          int c = (cl.col0 + cl.width) % g.L;
          for (int r = 0; r < cl.height; ++r)
            moves.push_back(Move{{(cl.row0 + r) % g.K, c}, 1});
        } else {  // new row south
          int r = (cl.row0 + cl.height) % g.K;
          for (int c = 0; c < cl.width; ++c)
            moves.push_back(Move{{r, (cl.col0 + c) % g.L}, 1});
        }
        return finish(std::move(moves));
      }
      // (ii) all subcritical: shrink one by a shortest side
      const auto& cl = ones.clusters.front();
      Spin host = host_of(cl);
      std::vector<Move> moves;
      if (cl.height <= cl.width) {  // erode the east column (length = height)
        int c = (cl.col0 + cl.width - 1) % g.L;
        for (int r = 0; r < cl.height; ++r)
          moves.push_back(Move{{(cl.row0 + r) % g.K, c}, host});
      } else {  // erode the south row
        int r = (cl.row0 + cl.height - 1) % g.K;
        for (int c = 0; c < cl.width; ++c)
          moves.push_back(Move{{r, (cl.col0 + c) % g.L}, host});
      }
      return finish(std::move(moves));
    }
    case MinClass::M4: {
      const auto& g = p.geom;
      // strip-covering variant: erode a non-1 strip like case 1
      for (bool vertical : {true, false}) {
        auto runs = strip_runs(eta, vertical);
        if (!runs || runs->size() < 2) continue;
        for (size_t i = 0; i < runs->size(); ++i) {
          const auto& donor = (*runs)[i];
          if (donor.spin == 1) continue;
          const auto& next = (*runs)[(i + 1) % runs->size()];
          return finish(detail::strip_erosion_moves(p, eta, vertical, donor, next.spin));
        }
      }
      // rectangle covering: absorb a donor rectangle into a neighbor whose
      // facing side is at least as long
      for (Spin m = 2; (int)m <= p.q; ++m) {
        auto cs = clusters(eta, m);
        for (const auto& cl : cs.clusters) {
          if (cl.wrap_rows || cl.wrap_cols || !cl.filled_box) continue;
          // try the four sides: absorber side must cover the whole contact
          struct Side {
            bool vertical;  // donor lines parallel to the contact side
            int dr, dc;     // outward direction
          };
          for (const Side side : {Side{false, -1, 0}, Side{false, 1, 0}, Side{true, 0, -1}, Side{true, 0, 1}}) {
            int a = side.vertical ? cl.height : cl.width;  // contact length
            Spin r = 0;
            bool ok = true;
            for (int t = 0; t < a && ok; ++t) {
              int rr, cc;
              if (side.vertical) {
                rr = (cl.row0 + t) % g.K;
                cc = side.dc < 0 ? (cl.col0 + g.L - 1) % g.L : (cl.col0 + cl.width) % g.L;
              } else {
                rr = side.dr < 0 ? (cl.row0 + g.K - 1) % g.K : (cl.row0 + cl.height) % g.K;
                cc = (cl.col0 + t) % g.L;
              }
              Spin s = eta.at(rr, cc);
              if (s == 1 || s == m) ok = false;
              else if (r == 0) r = s;
              else if (r != s) ok = false;
            }
            if (!ok || r == 0) continue;
            // flip the donor into r, lines marching away from the absorber
            std::vector<Move> moves;
            int depth = side.vertical ? cl.width : cl.height;
            for (int d = 0; d < depth; ++d) {
              for (int t = 0; t < a; ++t) {
                int rr, cc;
                if (side.vertical) {
                  int col = side.dc < 0 ? (cl.col0 + d) % g.L : (cl.col0 + cl.width - 1 - d + g.L) % g.L;
                  rr = (cl.row0 + t) % g.K;
                  cc = col;
                } else {
                  int row = side.dr < 0 ? (cl.row0 + d) % g.K : (cl.row0 + cl.height - 1 - d + g.K) % g.K;
                  rr = row;
                  cc = (cl.col0 + t) % g.L;
                }
                moves.push_back(Move{{rr, cc}, r});
              }
            }
            return finish(std::move(moves));
          }
        }
      }
      // no full-side absorber (possible when every neighbor along a full
      // side carries spin 1); fall back to the bounded search
      ExploreBudget budget;
      budget.max_states = 2'000'000;
      budget.energy_ceiling = H0 + Energy{2, 0};
      auto res = stability_level(p, eta, budget);
      if (!res.found) throw std::logic_error("build_escape_path: M4 escape not found under the ceiling");
      return finish(std::move(res.witness));
    }
    case MinClass::M1bar: {
      // plateau: bounded search below the +2 ceiling
      ExploreBudget budget;
      budget.max_states = 2'000'000;
      budget.energy_ceiling = H0 + Energy{2, 0};
      auto res = stability_level(p, eta, budget);
      if (!res.found) throw std::logic_error("build_escape_path: plateau escape not found under the ceiling");
      return finish(std::move(res.witness));
    }
    default:
      throw std::invalid_argument("build_escape_path: configuration not in a certified class");
  }
}

}  // namespace potts
