#pragma once

#include <optional>
#include <vector>

#include "potts/geometry.hpp"
#include "potts/lattice.hpp"
#include "potts/rng.hpp"

namespace potts {

// Randomized generators for the structured configuration families. Used by
// the verification suites; each sample is validated by the classifier, so a
// generator bug shows up as a test failure rather than a silent skip.

namespace samplers {

// random composition of n into parts >= minpart (at least `minparts` parts)
inline std::optional<std::vector<int>> random_composition(CounterRng& rng, int n, int minpart,
                                                          int minparts) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<int> parts;
    int left = n;
    while (left >= minpart) {
      int maxpart = left - minpart >= minpart ? left - minpart : left;
      int take = left == maxpart ? left : minpart + (int)rng.next_below(maxpart - minpart + 1);
      if (left - take != 0 && left - take < minpart) continue;
      parts.push_back(take);
      left -= take;
      if (left == 0) break;
    }
    if (left == 0 && (int)parts.size() >= minparts) return parts;
  }
  return std::nullopt;
}

// strips of thickness >= 2 with distinct adjacent spins (class M2)
inline std::optional<SpinConfig> sample_M2(CounterRng& rng, const LatticeGeom& g, int q) {
  bool vertical = rng.next_below(2) == 0;
  int nlines = vertical ? g.L : g.K;
  auto parts = random_composition(rng, nlines, 2, 2);
  if (!parts) return std::nullopt;
  int nruns = (int)parts->size();
  std::vector<Spin> color(nruns);
  for (int attempt = 0; attempt < 128; ++attempt) {
    bool ok = true;
    for (int i = 0; i < nruns; ++i) color[i] = Spin(1 + rng.next_below(q));
    for (int i = 0; i < nruns; ++i)
      if (color[i] == color[(i + 1) % nruns]) ok = false;
    if (ok) break;
    if (attempt == 127) return std::nullopt;
  }
  std::vector<Spin> sp(g.sites());
  int line = 0;
  for (int i = 0; i < nruns; ++i)
    for (int t = 0; t < (*parts)[i]; ++t, ++line)
      for (int s = 0; s < (vertical ? g.K : g.L); ++s) {
        if (vertical) sp[g.index(s, line)] = color[i];
        else sp[g.index(line, s)] = color[i];
      }
  return SpinConfig(g, q, sp);
}

// non-interacting 1-rectangles with sides >= 2 in a sea of m (class M3)
inline std::optional<SpinConfig> sample_M3(CounterRng& rng, const LatticeGeom& g, int q) {
  Spin host = Spin(2 + rng.next_below(q - 1));
  std::vector<Spin> sp(g.sites(), host);
  int want = 1 + (int)rng.next_below(3);
  std::vector<std::array<int, 4>> placed;  // r, c, h, w
  for (int attempt = 0; attempt < 200 && (int)placed.size() < want; ++attempt) {
    int h = 2 + (int)rng.next_below(std::min(4, g.K - 3));
    int w = 2 + (int)rng.next_below(std::min(4, g.L - 3));
    int r = (int)rng.next_below(g.K), c = (int)rng.next_below(g.L);
    // keep a 2-cell torus gap to every placed rectangle (non-interaction)
    bool ok = true;
    for (auto& [pr, pc, ph, pw] : placed) {
      auto gap = [](int a, int alen, int b, int blen, int n) {
        // cyclic gap between arcs [a,a+alen) and [b,b+blen); -1 when they
        // intersect
        if ((b - a + n) % n < alen || (a - b + n) % n < blen) return -1;
        int d1 = ((b - (a + alen)) % n + n) % n;
        int d2 = ((a - (b + blen)) % n + n) % n;
        return std::min(d1, d2);
      };
      bool row_sep = gap(r, h, pr, ph, g.K) >= 2;
      bool col_sep = gap(c, w, pc, pw, g.L) >= 2;
      if (!row_sep && !col_sep) ok = false;
    }
    if (!ok) continue;
    placed.push_back({r, c, h, w});
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) sp[g.index((r + i) % g.K, (c + j) % g.L)] = 1;
  }
  if (placed.empty()) return std::nullopt;
  return SpinConfig(g, q, sp);
}

// brick covering with T-junctions only, properly colored (class M4)
inline std::optional<SpinConfig> sample_M4(CounterRng& rng, const LatticeGeom& g, int q) {
  for (int layout = 0; layout < 40; ++layout) {
    auto bands = random_composition(rng, g.K, 2, 2);
    if (!bands) continue;
    int nb = (int)bands->size();
    std::vector<std::vector<int>> segs(nb);
    std::vector<std::vector<int>> cuts(nb);  // cut positions per band
    std::vector<int> offset(nb);
    bool ok = true;
    for (int b = 0; b < nb && ok; ++b) {
      auto sg = random_composition(rng, g.L, 2, 2);
      if (!sg) {
        ok = false;
        break;
      }
      segs[b] = *sg;
      offset[b] = (int)rng.next_below(g.L);
      int pos = offset[b];
      for (int widths : segs[b]) {
        cuts[b].push_back(pos % g.L);
        pos += widths;
      }
      std::sort(cuts[b].begin(), cuts[b].end());
    }
    if (!ok) continue;
    // a shared cut between neighbor bands makes a four-corner; resample
    for (int b = 0; b < nb && ok; ++b) {
      const auto& a = cuts[b];
      const auto& c = cuts[(b + 1) % nb];
      for (int x : a)
        if (std::find(c.begin(), c.end(), x) != c.end()) ok = false;
    }
    if (!ok) continue;

    // brick list and adjacency
    struct Brick {
      int band, r0, h, c0, w;
    };
    std::vector<Brick> bricks;
    std::vector<int> band_row(nb);
    {
      int r = 0;
      for (int b = 0; b < nb; ++b) {
        band_row[b] = r;
        int pos = offset[b];
        for (int widths : segs[b]) {
          bricks.push_back({b, r, (*bands)[b], pos % g.L, widths});
          pos += widths;
        }
        r += (*bands)[b];
      }
    }
    std::vector<int> cell_owner(g.sites(), -1);
    for (size_t i = 0; i < bricks.size(); ++i)
      for (int dr = 0; dr < bricks[i].h; ++dr)
        for (int dc = 0; dc < bricks[i].w; ++dc)
          cell_owner[g.index((bricks[i].r0 + dr) % g.K, (bricks[i].c0 + dc) % g.L)] = (int)i;
    std::vector<std::vector<int>> adj(bricks.size());
    for (int v = 0; v < g.sites(); ++v)
      for (int w2 : g.neighbor_indices(v)) {
        int a = cell_owner[v], b = cell_owner[w2];
        if (a != b) adj[a].push_back(b);
      }
    for (auto& v : adj) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    // greedy coloring with restarts; spin 1 participates like any other
    for (int attempt = 0; attempt < 60; ++attempt) {
      std::vector<Spin> color(bricks.size(), 0);
      std::vector<int> order(bricks.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = (int)i;
      for (size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.next_below(i)]);
      bool colored = true;
      for (int i : order) {
        std::vector<char> used(q + 1, 0);
        for (int j : adj[i])
          if (color[j]) used[color[j]] = 1;
        std::vector<Spin> avail;
        for (Spin s = 1; (int)s <= q; ++s)
          if (!used[s]) avail.push_back(s);
        if (avail.empty()) {
          colored = false;
          break;
        }
        color[i] = avail[rng.next_below(avail.size())];
      }
      if (!colored) continue;
      std::vector<Spin> sp(g.sites());
      for (int v = 0; v < g.sites(); ++v) sp[v] = color[cell_owner[v]];
      return SpinConfig(g, q, sp);
    }
  }
  return std::nullopt;
}

// convex polyominoes of area l*(l*-1)+1 and perimeter 4l* (the F(D^m)
// droplet shapes), enumerated once per l*
inline std::vector<std::vector<std::pair<int, int>>> fd_droplet_shapes(int ell_star) {
  const int area = ell_star * (ell_star - 1) + 1;
  std::vector<std::vector<std::pair<int, int>>> shapes;
  for (int w = 1; w < 2 * ell_star; ++w) {
    int h = 2 * ell_star - w;
    if (h < 1 || w * h < area) continue;
    int remove = w * h - area;
    // enumerate removal subsets (tiny: remove <= a few cells)
    std::vector<int> cells(w * h);
    for (int i = 0; i < w * h; ++i) cells[i] = i;
    std::vector<int> subset;
    std::function<void(int, int)> rec = [&](int start, int left) {
      if (left == 0) {
        std::vector<char> present(w * h, 1);
        for (int s : subset) present[s] = 0;
        // connected?
        int first = -1, count = 0;
        for (int i = 0; i < w * h; ++i)
          if (present[i]) {
            if (first < 0) first = i;
            ++count;
          }
        std::vector<char> seen(w * h, 0);
        std::vector<int> stack{first};
        seen[first] = 1;
        int reached = 0;
        while (!stack.empty()) {
          int x = stack.back();
          stack.pop_back();
          ++reached;
          int r = x / w, c = x % w;
          const int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
          for (int d = 0; d < 4; ++d) {
            int rr = r + dr[d], cc = c + dc[d];
            if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
            int y = rr * w + cc;
            if (present[y] && !seen[y]) {
              seen[y] = 1;
              stack.push_back(y);
            }
          }
        }
        if (reached != count) return;
        // rows and columns contiguous, bounding box unchanged
        for (int r = 0; r < h; ++r) {
          int lo = -1, hi = -1, cnt = 0;
          for (int c = 0; c < w; ++c)
            if (present[r * w + c]) {
              if (lo < 0) lo = c;
              hi = c;
              ++cnt;
            }
          if (cnt == 0 || hi - lo + 1 != cnt) return;
        }
        for (int c = 0; c < w; ++c) {
          int lo = -1, hi = -1, cnt = 0;
          for (int r = 0; r < h; ++r)
            if (present[r * w + c]) {
              if (lo < 0) lo = r;
              hi = r;
              ++cnt;
            }
          if (cnt == 0 || hi - lo + 1 != cnt) return;
        }
        // perimeter within the box
        int per = 0;
        for (int r = 0; r < h; ++r)
          for (int c = 0; c < w; ++c) {
            if (!present[r * w + c]) continue;
            const int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
            for (int d = 0; d < 4; ++d) {
              int rr = r + dr[d], cc = c + dc[d];
              if (rr < 0 || rr >= h || cc < 0 || cc >= w || !present[rr * w + cc]) ++per;
            }
          }
        if (per != 4 * ell_star) return;
        std::vector<std::pair<int, int>> shape;
        for (int i = 0; i < w * h; ++i)
          if (present[i]) shape.emplace_back(i / w, i % w);
        shapes.push_back(std::move(shape));
        return;
      }
      for (int s = start; s < w * h; ++s) {
        subset.push_back(s);
        rec(s + 1, left - 1);
        subset.pop_back();
      }
    };
    rec(0, remove);
  }
  return shapes;
}

// one F(D^m) configuration: a droplet shape of 1s at a random position in a
// sea of m
inline SpinConfig sample_FD(CounterRng& rng, const ModelParams& p, Spin m,
                            const std::vector<std::vector<std::pair<int, int>>>& shapes) {
  const auto& shape = shapes[rng.next_below(shapes.size())];
  int r0 = (int)rng.next_below(p.geom.K), c0 = (int)rng.next_below(p.geom.L);
  std::vector<Spin> sp(p.sites(), m);
  for (auto [r, c] : shape) sp[p.geom.index((r0 + r) % p.geom.K, (c0 + c) % p.geom.L)] = 1;
  return SpinConfig(p.geom, p.q, sp);
}

}  // namespace samplers
}  // namespace potts
