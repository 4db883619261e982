#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "potts/energy.hpp"
#include "potts/lattice.hpp"

namespace potts {

// ---------------------------------------------------------------------------
// disagreeing edges, bridges, crosses
// ---------------------------------------------------------------------------

struct BridgeReport {
  std::vector<int> row_disagree;  // d_{r_i}, horizontal edges within row i
  std::vector<int> col_disagree;  // d_{c_j}, vertical edges within column j
  int dh = 0;                     // total horizontal disagreeing edges
  int dv = 0;                     // total vertical disagreeing edges
  // per spin s (1-based; index 0 unused)
  std::vector<std::vector<int>> h_bridge_rows;
  std::vector<std::vector<int>> v_bridge_cols;
  std::vector<int> bridge_count;  // B_s
  std::vector<bool> cross;        // s has both a horizontal and a vertical bridge
};

inline BridgeReport bridge_report(const SpinConfig& sigma) {
  const auto& g = sigma.geom();
  BridgeReport r;
  r.row_disagree.assign(g.K, 0);
  r.col_disagree.assign(g.L, 0);
  r.h_bridge_rows.assign(sigma.q() + 1, {});
  r.v_bridge_cols.assign(sigma.q() + 1, {});
  r.bridge_count.assign(sigma.q() + 1, 0);
  r.cross.assign(sigma.q() + 1, false);
  for (int i = 0; i < g.K; ++i) {
    bool constant = true;
    for (int j = 0; j < g.L; ++j) {
      if (sigma.at(i, j) != sigma.at(i, (j + 1) % g.L)) {
        ++r.row_disagree[i];
        constant = false;
      }
    }
    if (constant) {
      Spin s = sigma.at(i, 0);
      r.h_bridge_rows[s].push_back(i);
      ++r.bridge_count[s];
    }
  }
  for (int j = 0; j < g.L; ++j) {
    bool constant = true;
    for (int i = 0; i < g.K; ++i) {
      if (sigma.at(i, j) != sigma.at((i + 1) % g.K, j)) {
        ++r.col_disagree[j];
        constant = false;
      }
    }
    if (constant) {
      Spin s = sigma.at(0, j);
      r.v_bridge_cols[s].push_back(j);
      ++r.bridge_count[s];
    }
  }
  for (int i = 0; i < g.K; ++i) r.dh += r.row_disagree[i];
  for (int j = 0; j < g.L; ++j) r.dv += r.col_disagree[j];
  for (int s = 1; s <= sigma.q(); ++s)
    r.cross[s] = !r.h_bridge_rows[s].empty() && !r.v_bridge_cols[s].empty();
  return r;
}

// ---------------------------------------------------------------------------
// clusters (maximal 4-connected components on the torus)
// ---------------------------------------------------------------------------

struct Cluster {
  std::vector<int> cells;  // site indices, sorted
  // smallest surrounding rectangle as arcs; wrap flags say a dimension spans
  // the whole torus (strips)
  int row0 = 0, height = 0, col0 = 0, width = 0;
  bool wrap_rows = false, wrap_cols = false;
  int perimeter = 0;  // boundary edges of the unit-square union
  bool filled_box = false;
};

struct ClusterSet {
  Spin spin = 0;
  std::vector<Cluster> clusters;
};

namespace detail {
// smallest covering arc of `present` positions on Z_n; returns {start, len};
// len == n means the whole cycle is hit
inline std::pair<int, int> covering_arc(const std::vector<char>& present, int n) {
  int count = 0;
  for (char c : present) count += c;
  if (count == n) return {0, n};
  // longest run of absent positions; the arc is its complement. Scanning
  // from a present slot keeps absent runs from wrapping across the origin.
  int best_len = -1, best_start = 0;
  int i = 0;
  while (i < n && !present[i]) ++i;
  int scan0 = i == n ? 0 : i;
  int run = 0, run_start = scan0;
  for (int k = 0; k < n; ++k) {
    int pos = (scan0 + k) % n;
    if (!present[pos]) {
      if (run == 0) run_start = pos;
      ++run;
      if (run > best_len) {
        best_len = run;
        best_start = run_start;
      }
    } else {
      run = 0;
    }
  }
  int arc_start = (best_start + best_len) % n;
  return {arc_start, n - best_len};
}
}  // namespace detail

inline ClusterSet clusters(const SpinConfig& sigma, Spin s) {
  const auto& g = sigma.geom();
  ClusterSet cs;
  cs.spin = s;
  std::vector<char> seen(g.sites(), 0);
  for (int start = 0; start < g.sites(); ++start) {
    if (seen[start] || sigma.at(start) != s) continue;
    Cluster cl;
    std::vector<int> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      cl.cells.push_back(v);
      for (int w : g.neighbor_indices(v)) {
        if (sigma.at(w) == s) {
          if (!seen[w]) {
            seen[w] = 1;
            stack.push_back(w);
          }
        } else {
          ++cl.perimeter;
        }
      }
    }
    std::sort(cl.cells.begin(), cl.cells.end());
    std::vector<char> rows(g.K, 0), cols(g.L, 0);
    for (int v : cl.cells) {
      rows[v / g.L] = 1;
      cols[v % g.L] = 1;
    }
    auto [r0, rh] = detail::covering_arc(rows, g.K);
    auto [c0, cw] = detail::covering_arc(cols, g.L);
    cl.row0 = r0;
    cl.height = rh;
    cl.col0 = c0;
    cl.width = cw;
    cl.wrap_rows = rh == g.K;
    cl.wrap_cols = cw == g.L;
    cl.filled_box = (int)cl.cells.size() == rh * cw;
    cs.clusters.push_back(std::move(cl));
  }
  return cs;
}

// ---------------------------------------------------------------------------
// stable tiles
// ---------------------------------------------------------------------------

struct TileVerdict {
  Vertex vertex;
  Spin center = 0;
  std::array<Spin, 4> nbr_spins{};
  bool stable = false;
  // energy gap for flipping the center to each target spin (index = spin)
  std::vector<Energy> gap;
};

inline TileVerdict classify_tile(const ModelParams& p, const SpinConfig& sigma, Vertex v) {
  TileVerdict t;
  t.vertex = v;
  t.center = sigma.at(v);
  auto nb = neighbors(p.geom, v);
  std::vector<int> n(p.q + 1, 0);
  for (int k = 0; k < 4; ++k) {
    t.nbr_spins[k] = sigma.at(nb[k]);
    ++n[t.nbr_spins[k]];
  }
  t.gap.assign(p.q + 1, Energy{});
  t.stable = true;
  for (Spin r = 1; (int)r <= p.q; ++r) {
    if (r == t.center) continue;
    // n_m(v) - n_r(v) + h*1{m=1} - h*1{r=1}
    t.gap[r] = Energy{n[t.center] - n[r], (t.center == 1) - (r == 1)};
    if (energy_cmp(t.gap[r], Energy{0, 0}, p.h) < 0) t.stable = false;
  }
  return t;
}

// ---------------------------------------------------------------------------
// single-region shapes: rectangles, rectangles with a bar, strips
// ---------------------------------------------------------------------------

struct ShapeInfo {
  enum Kind {
    Empty,
    All,       // whole lattice
    Rect,      // filled w x h box, no wrap
    RectBar,   // filled rect plus a partial line on one side
    VStrip,    // full columns
    HStrip,    // full rows
    VStripBar, // vertical strip plus partial column on one vertical edge
    HStripBar,
    Other
  } kind = Other;
  int w = 0, h = 0;       // Rect / RectBar: the rectangle *excluding* the bar
  int bar_len = 0;        // RectBar / *StripBar
  int bar_side = 0;       // length of the rectangle side the bar is attached to
  int thickness = 0;      // strips: number of full lines
};

namespace detail {

inline bool contiguous_run(std::vector<int> xs) {
  std::sort(xs.begin(), xs.end());
  for (size_t i = 1; i < xs.size(); ++i)
    if (xs[i] != xs[i - 1] + 1) return false;
  return true;
}

// contiguity on Z_n (an arc)
inline bool contiguous_arc(std::vector<int> xs, int n) {
  if ((int)xs.size() >= n) return true;
  std::vector<char> present(n, 0);
  for (int x : xs) present[x] = 1;
  auto [st, len] = covering_arc(present, n);
  (void)st;
  return len == (int)xs.size();
}

}  // namespace detail

// All ways to read a non-wrapping, non-filled cluster as a filled rectangle
// plus a partial line on one of its four box sides. A quasi-square with one
// short side missing a cell, say, reads both as a thin rectangle with a long
// bar and as the square with a unit protuberance.
inline std::vector<ShapeInfo> rect_bar_readings(const LatticeGeom& g, const Cluster& cl) {
  std::vector<ShapeInfo> out;
  if (cl.cells.empty() || cl.filled_box) return out;
  if (cl.wrap_rows != cl.wrap_cols) {
    // a rectangle one line short of wrapping, plus a partial line: the bar
    // touches the rectangle on both sides of the seam but the cell pattern
    // is still rectangle-plus-bar
    const bool rows_wrap = cl.wrap_rows;
    const int span = rows_wrap ? g.K : g.L;      // wrapped dimension
    const int lines = rows_wrap ? cl.width : cl.height;
    const int line0 = rows_wrap ? cl.col0 : cl.row0;
    const int nlines = rows_wrap ? g.L : g.K;
    std::vector<std::vector<int>> per_off(span);  // cells per wrapped position
    for (int v : cl.cells) {
      int off = rows_wrap ? v / g.L : v % g.L;
      int line = rows_wrap ? v % g.L : v / g.L;
      per_off[off].push_back((line - line0 + nlines) % nlines);
    }
    int partial = -1;
    bool ok = true;
    for (int o = 0; o < span && ok; ++o) {
      if ((int)per_off[o].size() == lines) continue;
      if (partial >= 0) ok = false;
      else partial = o;
    }
    if (ok && partial >= 0) {
      auto bar = per_off[partial];
      if ((int)bar.size() >= 1 && detail::contiguous_run(bar)) {
        ShapeInfo s;
        s.kind = ShapeInfo::RectBar;
        s.w = rows_wrap ? lines : span - 1;
        s.h = rows_wrap ? span - 1 : lines;
        s.bar_len = (int)bar.size();
        s.bar_side = lines;
        out.push_back(s);
      }
    }
    return out;
  }
  if (cl.wrap_rows || cl.wrap_cols) return out;
  const int w = cl.width, h = cl.height;
  std::vector<std::vector<int>> col_cells(w), row_cells(h);
  for (int v : cl.cells) {
    int r = (v / g.L - cl.row0 + g.K) % g.K;
    int c = (v % g.L - cl.col0 + g.L) % g.L;
    col_cells[c].push_back(r);
    row_cells[r].push_back(c);
  }
  auto try_bar = [&](bool column, int line) {
    const auto& bar = column ? col_cells[line] : row_cells[line];
    const int span = column ? h : w;
    const int lines = column ? w : h;
    if (lines < 2) return;
    if ((int)bar.size() < 1 || (int)bar.size() >= span) return;
    if (!detail::contiguous_run(bar)) return;
    for (int k = 0; k < lines; ++k) {
      if (k == line) continue;
      if ((int)(column ? col_cells[k] : row_cells[k]).size() != span) return;
    }
    ShapeInfo s;
    s.kind = ShapeInfo::RectBar;
    s.w = column ? w - 1 : w;
    s.h = column ? h : h - 1;
    s.bar_len = (int)bar.size();
    s.bar_side = span;  // = rect side length the bar leans on
    out.push_back(s);
  };
  try_bar(true, 0);
  try_bar(true, w - 1);
  try_bar(false, 0);
  try_bar(false, h - 1);
  return out;
}

inline ShapeInfo classify_cluster_shape(const LatticeGeom& g, const Cluster& cl) {
  ShapeInfo s;
  const int n = (int)cl.cells.size();
  if (n == 0) {
    s.kind = ShapeInfo::Empty;
    return s;
  }
  if (n == g.sites()) {
    s.kind = ShapeInfo::All;
    return s;
  }
  if (cl.wrap_rows && cl.wrap_cols) {
    s.kind = ShapeInfo::Other;
    return s;
  }

  if (cl.wrap_rows || cl.wrap_cols) {
    // candidate strip along the wrapped dimension
    const bool vertical = cl.wrap_rows;
    const int span = vertical ? g.K : g.L;      // length of a full line
    const int lines = vertical ? cl.width : cl.height;
    const int line0 = vertical ? cl.col0 : cl.row0;
    const int nlines = vertical ? g.L : g.K;
    std::vector<std::vector<int>> per_line(lines);
    for (int v : cl.cells) {
      int line = vertical ? v % g.L : v / g.L;
      int offs = vertical ? v / g.L : v % g.L;
      int k = (line - line0 + nlines) % nlines;
      if (k >= lines) return s;  // cannot happen for a covering arc
      per_line[k].push_back(offs);
    }
    int full = 0, partial = -1;
    for (int k = 0; k < lines; ++k) {
      if ((int)per_line[k].size() == span) ++full;
      else if (partial < 0) partial = k;
      else return s;  // two partial lines
    }
    if (partial < 0) {
      s.kind = vertical ? ShapeInfo::VStrip : ShapeInfo::HStrip;
      s.thickness = lines;
      return s;
    }
    // the partial line must sit on an edge of the strip and be contiguous
    bool strip_bar = lines >= 2 && (partial == 0 || partial == lines - 1) &&
                     detail::contiguous_arc(per_line[partial], span);
    if (strip_bar) {
      s.kind = vertical ? ShapeInfo::VStripBar : ShapeInfo::HStripBar;
      s.thickness = lines - 1;
      s.bar_len = (int)per_line[partial].size();
      s.bar_side = span;
      return s;
    }
    auto readings = rect_bar_readings(g, cl);
    if (!readings.empty()) return readings.front();
    return s;
  }

  // non-wrapping: box analysis
  const int w = cl.width, h = cl.height;
  if (cl.filled_box) {
    s.kind = ShapeInfo::Rect;
    s.w = w;
    s.h = h;
    return s;
  }
  // rect plus a bar on one of the four box sides (box arcs may straddle the
  // torus seam, so offsets are taken modulo the lattice). A shape can admit
  // several such readings; this returns the first, rect_bar_readings lists
  // them all.
  auto readings = rect_bar_readings(g, cl);
  if (!readings.empty()) return readings.front();
  s.kind = ShapeInfo::Other;
  return s;
}

// shape of the spin-s region when it is a single cluster
inline ShapeInfo shape_of_spin(const SpinConfig& sigma, Spin s) {
  auto cs = clusters(sigma, s);
  if (cs.clusters.empty()) return ShapeInfo{.kind = ShapeInfo::Empty};
  if (cs.clusters.size() > 1) return ShapeInfo{.kind = ShapeInfo::Other};
  return classify_cluster_shape(sigma.geom(), cs.clusters[0]);
}

// ---------------------------------------------------------------------------
// family predicates: R-bar, B-bar, gates, D sets, strips, tube
// ---------------------------------------------------------------------------

namespace detail {
inline bool only_two_labels(const SpinConfig& sigma, Spin r, Spin s) {
  for (Spin x : sigma.spins())
    if (x != r && x != s) return false;
  return true;
}
}  // namespace detail

// all spins r except an a x b rectangle of s (any position, either
// orientation); a strip when one side spans the torus
inline bool in_Rbar(const SpinConfig& sigma, int a, int b, Spin r, Spin s) {
  if (!detail::only_two_labels(sigma, r, s)) return false;
  auto sh = shape_of_spin(sigma, s);
  int lo = std::min(a, b), hi = std::max(a, b);
  const auto& g = sigma.geom();
  if (sh.kind == ShapeInfo::Rect)
    return std::min(sh.w, sh.h) == lo && std::max(sh.w, sh.h) == hi;
  if (sh.kind == ShapeInfo::VStrip) return hi == g.K && sh.thickness == lo;
  if (sh.kind == ShapeInfo::HStrip) return hi == g.L && sh.thickness == lo;
  return false;
}

// rectangle a x b of s plus a 1 x l bar adjacent to a side of length b;
// any of the cluster's rectangle-plus-bar readings may match
inline bool in_Bbar(const SpinConfig& sigma, int a, int b, int l, Spin r, Spin s) {
  if (!detail::only_two_labels(sigma, r, s)) return false;
  auto cs = clusters(sigma, s);
  if (cs.clusters.size() != 1) return false;
  for (const auto& sh : rect_bar_readings(sigma.geom(), cs.clusters[0])) {
    if (sh.bar_len != l) continue;
    int lo = std::min(sh.w, sh.h), hi = std::max(sh.w, sh.h);
    if (lo == std::min(a, b) && hi == std::max(a, b) && sh.bar_side == b) return true;
  }
  return false;
}

// W: quasi-square (l*-1) x l* of 1s with a unit protuberance on a longest side
inline bool in_W(const ModelParams& p, const SpinConfig& sigma, Spin m) {
  int ls = p.ell_star();
  return m != 1 && in_Bbar(sigma, ls - 1, ls, 1, m, 1);
}
// W': protuberance on a shortest side
inline bool in_Wprime(const ModelParams& p, const SpinConfig& sigma, Spin m) {
  int ls = p.ell_star();
  return m != 1 && in_Bbar(sigma, ls, ls - 1, 1, m, 1);
}

inline bool in_D(const ModelParams& p, const SpinConfig& sigma, Spin m) {
  return count_spins(sigma, m) == p.sites() - p.k_star();
}

// bottom of D^m: the k* non-m spins are all 1 and form one cluster of
// perimeter 4*l*
inline bool in_FD(const ModelParams& p, const SpinConfig& sigma, Spin m) {
  if (!in_D(p, sigma, m)) return false;
  if (!detail::only_two_labels(sigma, m, 1)) return false;
  auto cs = clusters(sigma, 1);
  return cs.clusters.size() == 1 && cs.clusters[0].perimeter == 4 * p.ell_star();
}

// the 1-cluster touches some side of its surrounding rectangle in exactly one
// unit segment (step 1 of the gate identification)
inline bool single_segment_touch(const SpinConfig& sigma) {
  auto cs = clusters(sigma, 1);
  if (cs.clusters.size() != 1) return false;
  const auto& cl = cs.clusters[0];
  if (cl.wrap_rows || cl.wrap_cols) return false;
  const auto& g = sigma.geom();
  int top = 0, bottom = 0, left = 0, right = 0;
  for (int v : cl.cells) {
    int r = (v / g.L - cl.row0 + g.K) % g.K;
    int c = (v % g.L - cl.col0 + g.L) % g.L;
    top += r == 0;
    bottom += r == cl.height - 1;
    left += c == 0;
    right += c == cl.width - 1;
  }
  return top == 1 || bottom == 1 || left == 1 || right == 1;
}

// vertical / horizontal strip sets: a 1-strip of thickness >= l* with
// possibly a bar on one of its two edges, everything else m
inline bool in_strip_v(const ModelParams& p, const SpinConfig& sigma, Spin m) {
  if (!detail::only_two_labels(sigma, m, 1)) return false;
  auto sh = shape_of_spin(sigma, 1);
  int ls = p.ell_star();
  return (sh.kind == ShapeInfo::VStrip && sh.thickness >= ls) ||
         (sh.kind == ShapeInfo::VStripBar && sh.thickness >= ls);
}
inline bool in_strip_h(const ModelParams& p, const SpinConfig& sigma, Spin m) {
  if (!detail::only_two_labels(sigma, m, 1)) return false;
  auto sh = shape_of_spin(sigma, 1);
  int ls = p.ell_star();
  return (sh.kind == ShapeInfo::HStrip && sh.thickness >= ls) ||
         (sh.kind == ShapeInfo::HStripBar && sh.thickness >= ls);
}

// Tube of typical paths for the transition m -> 1, as the union of the
// subcritical quasi-square/square families (with growing bars), the gate,
// the supercritical rectangle families, the strip sets, and the completion
// phase where the leftover m spins sit inside a single line.
inline bool in_tube(const ModelParams& p, const SpinConfig& sigma, Spin m) {
  if (m == 1) return false;
  if (!detail::only_two_labels(sigma, m, 1)) return false;
  const auto& g = sigma.geom();
  int n1 = count_spins(sigma, 1);
  if (n1 == 0 || n1 == g.sites()) return true;  // bold m / bold 1

  // completion phase: m confined to one column or one row
  {
    bool one_col = true, one_row = true;
    int col = -1, row = -1;
    for (int v = 0; v < g.sites(); ++v) {
      if (sigma.at(v) != m) continue;
      int r = v / g.L, c = v % g.L;
      if (col < 0) col = c, row = r;
      one_col = one_col && c == col;
      one_row = one_row && r == row;
    }
    if (one_col || one_row) return true;
  }

  auto cs = clusters(sigma, 1);
  if (cs.clusters.size() != 1) return false;
  const auto& cl = cs.clusters[0];
  const int ls = p.ell_star();
  for (const auto& rd : rect_bar_readings(g, cl)) {
    int lo = std::min(rd.w, rd.h), hi = std::max(rd.w, rd.h);
    if (hi == lo + 1 && hi <= ls && rd.bar_side == hi) return true;  // bar on a longest side
    if (lo == hi && lo <= ls - 1) return true;                       // squares: any side
    if (lo >= ls) return true;                                       // supercritical
  }
  auto sh = classify_cluster_shape(g, cl);
  switch (sh.kind) {
    case ShapeInfo::Rect: {
      int lo = std::min(sh.w, sh.h), hi = std::max(sh.w, sh.h);
      if (hi == lo + 1 && hi <= ls) return true;   // quasi-squares up to (l*-1) x l*
      if (lo == hi && lo <= ls - 1) return true;   // squares up to (l*-1)^2
      if (lo >= ls) return true;                   // supercritical rectangles
      return false;
    }
    case ShapeInfo::VStrip:
    case ShapeInfo::VStripBar:
    case ShapeInfo::HStrip:
    case ShapeInfo::HStripBar:
      return sh.thickness >= ls;
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// local minima / stable plateaux classes
// ---------------------------------------------------------------------------

enum class MinClass { None, M1, M2, M3, M4, M1bar };

struct MinClassReport {
  MinClass cls = MinClass::None;
  bool ambiguous = false;   // geometric family matched but the flip scan disagreed
  std::string note;
};

struct StripRun {
  Spin spin = 0;
  int start = 0;  // first line index
  int thickness = 0;
};

// decompose into monochrome full lines; vertical=true means full columns
inline std::optional<std::vector<StripRun>> strip_runs(const SpinConfig& sigma, bool vertical) {
  const auto& g = sigma.geom();
  const int nlines = vertical ? g.L : g.K;
  const int span = vertical ? g.K : g.L;
  std::vector<Spin> line_spin(nlines);
  for (int j = 0; j < nlines; ++j) {
    Spin s0 = vertical ? sigma.at(0, j) : sigma.at(j, 0);
    for (int i = 1; i < span; ++i) {
      Spin s = vertical ? sigma.at(i, j) : sigma.at(j, i);
      if (s != s0) return std::nullopt;
    }
    line_spin[j] = s0;
  }
  // merge equal neighbours with wrap
  std::vector<StripRun> runs;
  int start = 0;
  while (start < nlines && line_spin[(start - 1 + nlines) % nlines] == line_spin[start]) ++start;
  if (start == nlines) {  // monochrome
    runs.push_back({line_spin[0], 0, nlines});
    return runs;
  }
  int j = start, consumed = 0;
  while (consumed < nlines) {
    StripRun run{line_spin[j], j, 0};
    while (consumed < nlines && line_spin[j] == run.spin) {
      ++run.thickness;
      ++consumed;
      j = (j + 1) % nlines;
    }
    runs.push_back(run);
  }
  return runs;
}

namespace detail {

// strictly-downhill / flat single flips, decided exactly
inline void flip_scan(const ModelParams& p, const SpinConfig& sigma, bool& has_down, bool& has_flat) {
  has_down = has_flat = false;
  const auto& sp = sigma.spins();
  for (int v = 0; v < p.sites() && !has_down; ++v) {
    for (Spin s = 1; (int)s <= p.q; ++s) {
      if (s == sp[v]) continue;
      int c = energy_cmp(energy_delta(p, sp, v, s), Energy{0, 0}, p.h);
      if (c < 0) {
        has_down = true;
        break;
      }
      if (c == 0) has_flat = true;
    }
  }
}

// Walk the flat-move plateau of sigma. A plateau is only a stable one when
// no member admits a strictly downhill flip; configurations whose plateau
// drains have stability level zero no matter how stable the seed looks.
enum class PlateauStatus { Closed, Drains, Overflow };

inline PlateauStatus plateau_closure(const ModelParams& p, const SpinConfig& seed,
                                     std::size_t cap = 20000) {
  std::vector<std::vector<Spin>> queue{seed.spins()};
  std::vector<std::string> keys{state_key(seed.spins())};
  std::sort(keys.begin(), keys.end());
  std::size_t head = 0;
  while (head < queue.size()) {
    std::vector<Spin> cur = queue[head++];
    for (int v = 0; v < p.sites(); ++v) {
      for (Spin s = 1; (int)s <= p.q; ++s) {
        if (s == cur[v]) continue;
        int c = energy_cmp(energy_delta(p, cur, v, s), Energy{0, 0}, p.h);
        if (c < 0) return PlateauStatus::Drains;
        if (c != 0) continue;
        Spin old = cur[v];
        cur[v] = s;
        std::string key = state_key(cur);
        auto it = std::lower_bound(keys.begin(), keys.end(), key);
        if (it == keys.end() || *it != key) {
          if (queue.size() >= cap) {
            cur[v] = old;
            return PlateauStatus::Overflow;
          }
          keys.insert(it, key);
          queue.push_back(cur);
        }
        cur[v] = old;
      }
    }
  }
  return PlateauStatus::Closed;
}

// a vertex adjacent to cells of two different clusters of the listed family
inline bool interacting_pair(const SpinConfig& sigma, const std::vector<Cluster>& cls) {
  const auto& g = sigma.geom();
  std::vector<int> owner(g.sites(), -1);
  for (size_t i = 0; i < cls.size(); ++i)
    for (int v : cls[i].cells) owner[v] = (int)i;
  for (int v = 0; v < g.sites(); ++v) {
    if (owner[v] >= 0) continue;
    int first = -1;
    for (int w : g.neighbor_indices(v)) {
      if (owner[w] < 0) continue;
      if (first < 0) first = owner[w];
      else if (owner[w] != first) return true;
    }
  }
  return false;
}

}  // namespace detail

inline MinClassReport local_min_class(const ModelParams& p, const SpinConfig& sigma) {
  MinClassReport rep;
  bool has_down = false, has_flat = false;
  detail::flip_scan(p, sigma, has_down, has_flat);

  // M1: monochromes
  {
    bool mono = true;
    for (Spin s : sigma.spins())
      if (s != sigma.spins()[0]) mono = false;
    if (mono) {
      rep.cls = MinClass::M1;
      return rep;
    }
  }

  // strip coverings: M2 when every strip is thick, M4 (second clause) when a
  // thickness-one strip sits between two strips of two further distinct spins
  for (bool vertical : {true, false}) {
    auto runs = strip_runs(sigma, vertical);
    if (!runs || runs->size() < 2) continue;
    bool all_thick = true, thin_ok = true;
    for (size_t i = 0; i < runs->size(); ++i) {
      const auto& run = (*runs)[i];
      if (run.thickness >= 2) continue;
      all_thick = false;
      Spin prev = (*runs)[(i + runs->size() - 1) % runs->size()].spin;
      Spin next = (*runs)[(i + 1) % runs->size()].spin;
      if (prev == next) thin_ok = false;
    }
    if (all_thick) {
      if (!has_down && !has_flat) {
        rep.cls = MinClass::M2;
        return rep;
      }
      rep.ambiguous = true;
      rep.note = "strip covering failed the flip scan";
      return rep;
    }
    if (thin_ok && !has_down && !has_flat) {
      rep.cls = MinClass::M4;
      rep.note = "thickness-one strip between distinct-spin strips";
      return rep;
    }
  }

  // M3: non-interacting 1-rectangles with sides >= 2 in a sea or strip of m
  {
    auto ones = clusters(sigma, 1);
    if (!ones.clusters.empty()) {
      bool ok = true;
      for (const auto& cl : ones.clusters) {
        if (cl.wrap_rows || cl.wrap_cols || !cl.filled_box || std::min(cl.width, cl.height) < 2)
          ok = false;
      }
      if (ok && detail::interacting_pair(sigma, ones.clusters)) ok = false;
      if (ok) {
        // hosts: every neighbour of a 1-rectangle carries one spin != 1
        std::vector<Spin> host(ones.clusters.size(), 0);
        std::vector<Spin> repl = sigma.spins();
        const auto& g = sigma.geom();
        for (size_t i = 0; i < ones.clusters.size() && ok; ++i) {
          for (int v : ones.clusters[i].cells) {
            for (int w : g.neighbor_indices(v)) {
              Spin s = sigma.at(w);
              if (s == 1) continue;
              if (host[i] == 0) host[i] = s;
              else if (host[i] != s) ok = false;
            }
          }
          if (host[i] == 0) ok = false;
          if (ok)
            for (int v : ones.clusters[i].cells) repl[v] = host[i];
        }
        if (ok) {
          SpinConfig collapsed(g, p.q, repl);
          bool mono = true;
          for (Spin s : collapsed.spins())
            if (s != collapsed.spins()[0]) mono = false;
          bool strips = false;
          if (!mono)
            for (bool vert : {true, false}) {
              auto runs = strip_runs(collapsed, vert);
              if (runs && runs->size() >= 2) {
                bool thick = true;
                for (auto& r : *runs) thick = thick && r.thickness >= 2;
                strips = strips || thick;
              }
            }
          if (mono || strips) {
            if (!has_down && !has_flat) {
              rep.cls = MinClass::M3;
              return rep;
            }
            rep.ambiguous = true;
            rep.note = "1-rectangle family failed the flip scan";
            return rep;
          }
        }
      }
    }
  }

  // M4 first clause / M1bar: every cluster of every spin is a filled box
  {
    bool boxes = true, sides_ok = true;
    std::vector<std::pair<Spin, Cluster>> all;
    for (Spin s = 1; (int)s <= p.q && boxes; ++s) {
      auto cs = clusters(sigma, s);
      for (auto& cl : cs.clusters) {
        auto sh = classify_cluster_shape(sigma.geom(), cl);
        bool box = sh.kind == ShapeInfo::Rect || sh.kind == ShapeInfo::VStrip ||
                   sh.kind == ShapeInfo::HStrip;
        if (!box) {
          boxes = false;
          break;
        }
        int minside = sh.kind == ShapeInfo::Rect ? std::min(sh.w, sh.h) : sh.thickness;
        if (s != 1 && minside < 2) sides_ok = false;
        all.emplace_back(s, std::move(cl));
      }
    }
    if (boxes && sides_ok && all.size() >= 2) {
      if (!has_down && !has_flat) {
        rep.cls = MinClass::M4;
        return rep;
      }
      if (!has_down && has_flat) {
        // a stable plateau must be closed as a whole, not just at the seed
        switch (detail::plateau_closure(p, sigma)) {
          case detail::PlateauStatus::Closed:
            rep.cls = MinClass::M1bar;
            rep.note = "rectangle covering with zero-cost moves (stable plateau)";
            return rep;
          case detail::PlateauStatus::Drains:
            rep.cls = MinClass::None;
            rep.note = "plateau drains through flat moves (stability level zero)";
            return rep;
          case detail::PlateauStatus::Overflow:
            rep.cls = MinClass::M1bar;
            rep.ambiguous = true;
            rep.note = "plateau closure not certified within the search budget";
            return rep;
        }
      }
      rep.ambiguous = true;
      rep.note = "rectangle covering with a downhill flip";
      return rep;
    }
  }

  rep.cls = MinClass::None;
  return rep;
}

// ---------------------------------------------------------------------------
// aggregate report for the classify CLI
// ---------------------------------------------------------------------------

struct ShapeClassReport {
  MinClassReport min_class;
  ShapeInfo one_region;
  bool fd_single_touch = false;
  struct PerSpin {
    Spin m = 0;
    bool w = false, wprime = false, d = false, fd = false;
    bool tube = false, strip_v = false, strip_h = false;
  };
  std::vector<PerSpin> per_spin;
};

inline ShapeClassReport shape_class(const ModelParams& p, const SpinConfig& sigma) {
  ShapeClassReport r;
  r.min_class = local_min_class(p, sigma);
  r.one_region = shape_of_spin(sigma, 1);
  for (Spin m = 2; (int)m <= p.q; ++m) {
    ShapeClassReport::PerSpin ps;
    ps.m = m;
    ps.w = in_W(p, sigma, m);
    ps.wprime = in_Wprime(p, sigma, m);
    ps.d = in_D(p, sigma, m);
    ps.fd = in_FD(p, sigma, m);
    ps.tube = in_tube(p, sigma, m);
    ps.strip_v = in_strip_v(p, sigma, m);
    ps.strip_h = in_strip_h(p, sigma, m);
    if (ps.fd) r.fd_single_touch = r.fd_single_touch || single_segment_touch(sigma);
    r.per_spin.push_back(ps);
  }
  return r;
}

}  // namespace potts
