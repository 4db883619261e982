#include <catch2/catch_amalgamated.hpp>

#include "potts/geometry.hpp"
#include "potts/paths.hpp"
#include "potts/rng.hpp"
#include "potts/samplers.hpp"

using namespace potts;

namespace {
ModelParams p99() { return ModelParams(3, LatticeGeom(9, 9), 0.9); }

SpinConfig with_ones(const ModelParams& p, Spin sea, const std::vector<std::pair<int, int>>& cells) {
  std::vector<Spin> sp(p.sites(), sea);
  for (auto [r, c] : cells) sp[p.geom.index((r + p.geom.K) % p.geom.K, (c + p.geom.L) % p.geom.L)] = 1;
  return SpinConfig(p.geom, p.q, sp);
}

SpinConfig rect_ones(const ModelParams& p, Spin sea, int r0, int c0, int h, int w) {
  std::vector<std::pair<int, int>> cells;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) cells.emplace_back(r0 + r, c0 + c);
  return with_ones(p, sea, cells);
}
}  // namespace

TEST_CASE("bridge report on monochromes and strips") {
  auto p = p99();
  auto m2 = monochrome(p.geom, p.q, 2);
  auto br = bridge_report(m2);
  CHECK(br.dh == 0);
  CHECK(br.dv == 0);
  CHECK(br.bridge_count[2] == p.geom.K + p.geom.L);
  CHECK(br.cross[2]);

  // vertical 1-strip of width 2 in a sea of 2
  std::vector<Spin> sp(p.sites(), 2);
  for (int r = 0; r < p.geom.K; ++r)
    for (int c = 3; c <= 4; ++c) sp[p.geom.index(r, c)] = 1;
  auto strip = SpinConfig(p.geom, p.q, sp);
  auto sb = bridge_report(strip);
  CHECK(sb.v_bridge_cols[1].size() == 2);
  CHECK(sb.v_bridge_cols[2].size() == (size_t)p.geom.L - 2);
  CHECK(sb.h_bridge_rows[1].empty());
  CHECK(sb.h_bridge_rows[2].empty());
  CHECK_FALSE(sb.cross[1]);
  CHECK_FALSE(sb.cross[2]);
  // rows without a bridge have >= 2 disagreeing edges
  for (int i = 0; i < p.geom.K; ++i) CHECK(sb.row_disagree[i] >= 2);
}

TEST_CASE("no configuration has horizontal and vertical bridges of different spins") {
  ModelParams p(3, LatticeGeom(3, 3), 0.9);
  for (std::uint64_t code = 0; code < 19683; ++code) {
    auto sigma = decode(code, p.geom, p.q);
    auto br = bridge_report(sigma);
    for (int r = 1; r <= 3; ++r)
      for (int s = 1; s <= 3; ++s) {
        if (r == s) continue;
        bool both = !br.h_bridge_rows[r].empty() && !br.v_bridge_cols[s].empty();
        REQUIRE_FALSE(both);
      }
  }
}

TEST_CASE("bridge count changes by at most two under a single flip") {
  ModelParams p(3, LatticeGeom(5, 5), 0.9);
  CounterRng rng(31, 0);
  for (int t = 0; t < 20000; ++t) {
    std::vector<Spin> sp(p.sites());
    for (auto& s : sp) s = Spin(1 + rng.next_below(3));
    // bias toward bridge-rich configurations
    if (rng.next_below(2) == 0) {
      Spin fill = Spin(1 + rng.next_below(3));
      for (int i = 0; i < p.sites(); ++i)
        if (rng.next_below(4) != 0) sp[i] = fill;
    }
    SpinConfig sigma(p.geom, p.q, sp);
    int v = (int)rng.next_below(p.sites());
    Spin s = Spin(1 + rng.next_below(3));
    if (s == sigma.at(v)) continue;
    auto tau = apply_move(sigma, Move{p.geom.vertex(v), s});
    auto ba = bridge_report(sigma), bb = bridge_report(tau);
    for (int spin = 1; spin <= 3; ++spin) {
      int d = bb.bridge_count[spin] - ba.bridge_count[spin];
      REQUIRE(d >= -2);
      REQUIRE(d <= 2);
      if (d == 2) {
        // +2 means this flip completed a row and a column at once: a cross
        // (new row, new col) that the old configuration lacked
        auto fresh = [](const std::vector<int>& now, const std::vector<int>& before) {
          for (int x : now)
            if (std::find(before.begin(), before.end(), x) == before.end()) return true;
          return false;
        };
        REQUIRE(bb.cross[spin]);
        REQUIRE(fresh(bb.h_bridge_rows[spin], ba.h_bridge_rows[spin]));
        REQUIRE(fresh(bb.v_bridge_cols[spin], ba.v_bridge_cols[spin]));
      }
    }
  }
}

TEST_CASE("clusters: rectangles, diagonal separation, strips") {
  auto p = p99();
  auto block = rect_ones(p, 2, 2, 3, 2, 3);  // 3 wide, 2 tall
  auto cs = clusters(block, 1);
  REQUIRE(cs.clusters.size() == 1);
  CHECK(cs.clusters[0].width == 3);
  CHECK(cs.clusters[0].height == 2);
  CHECK(cs.clusters[0].perimeter == 10);
  CHECK(cs.clusters[0].filled_box);

  auto diag = with_ones(p, 2, {{1, 1}, {2, 2}});
  CHECK(clusters(diag, 1).clusters.size() == 2);

  std::vector<Spin> sp(p.sites(), 2);
  for (int r = 0; r < p.geom.K; ++r) sp[p.geom.index(r, 4)] = 1;
  auto col = SpinConfig(p.geom, p.q, sp);
  auto cc = clusters(col, 1);
  REQUIRE(cc.clusters.size() == 1);
  CHECK(cc.clusters[0].wrap_rows);
  CHECK_FALSE(cc.clusters[0].wrap_cols);

  // cluster straddling the seam keeps a tight box
  auto seam = with_ones(p, 2, {{8, 8}, {8, 0}, {0, 8}, {0, 0}});
  auto sc = clusters(seam, 1);
  REQUIRE(sc.clusters.size() == 1);
  CHECK(sc.clusters[0].width == 2);
  CHECK(sc.clusters[0].height == 2);
  CHECK(sc.clusters[0].filled_box);
}

TEST_CASE("stable tiles match the case analysis and brute-force flips") {
  ModelParams p(5, LatticeGeom(5, 5), 0.9);
  // center m != 1 with neighbors {m,m,1,1}: unstable
  {
    std::vector<Spin> sp(p.sites(), 2);
    sp[p.geom.index(1, 2)] = 1;
    sp[p.geom.index(3, 2)] = 1;
    SpinConfig sigma(p.geom, p.q, sp);
    CHECK_FALSE(classify_tile(p, sigma, {2, 2}).stable);
  }
  // center 1 with at least two 1-neighbors: stable
  {
    std::vector<Spin> sp(p.sites(), 3);
    sp[p.geom.index(2, 2)] = 1;
    sp[p.geom.index(1, 2)] = 1;
    sp[p.geom.index(3, 2)] = 1;
    SpinConfig sigma(p.geom, p.q, sp);
    CHECK(classify_tile(p, sigma, {2, 2}).stable);
  }
  // center m with one m-neighbor and three distinct non-1 spins: stable
  {
    std::vector<Spin> sp(p.sites(), 2);
    sp[p.geom.index(1, 2)] = 3;
    sp[p.geom.index(3, 2)] = 4;
    sp[p.geom.index(2, 1)] = 5;
    SpinConfig sigma(p.geom, p.q, sp);
    CHECK(classify_tile(p, sigma, {2, 2}).stable);
  }
  // agreement with brute-force single flips
  CounterRng rng(41, 0);
  for (int t = 0; t < 10000; ++t) {
    int q = 3 + (int)rng.next_below(3);
    ModelParams pr(q, LatticeGeom(4, 4), 0.9);
    std::vector<Spin> sp(pr.sites());
    for (auto& s : sp) s = Spin(1 + rng.next_below(q));
    SpinConfig sigma(pr.geom, q, sp);
    Vertex v = pr.geom.vertex((int)rng.next_below(pr.sites()));
    auto verdict = classify_tile(pr, sigma, v);
    bool brute_stable = true;
    for (Spin s = 1; (int)s <= q; ++s) {
      if (s == sigma.at(v)) continue;
      Energy d = energy_delta(pr, sigma, Move{v, s});
      CHECK(d == verdict.gap[s]);
      if (energy_cmp(d, Energy{0, 0}, pr.h) < 0) brute_stable = false;
    }
    CHECK(verdict.stable == brute_stable);
  }
}

TEST_CASE("local minimum classes") {
  auto p = p99();
  CHECK(local_min_class(p, monochrome(p.geom, p.q, 3)).cls == MinClass::M1);

  // two vertical strips of widths 3 and 6
  std::vector<Spin> sp(p.sites(), 2);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 3; ++c) sp[p.geom.index(r, c)] = 3;
  CHECK(local_min_class(p, SpinConfig(p.geom, p.q, sp)).cls == MinClass::M2);

  // 3x3 1-square in a sea of 2
  CHECK(local_min_class(p, rect_ones(p, 2, 2, 2, 3, 3)).cls == MinClass::M3);

  // a pair of interacting 1-rectangles is not M3
  std::vector<Spin> sp2(p.sites(), 2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      sp2[p.geom.index(1 + r, 1 + c)] = 1;
      sp2[p.geom.index(1 + r, 4 + c)] = 1;  // gap of one column: interacting
    }
  CHECK(local_min_class(p, SpinConfig(p.geom, p.q, sp2)).cls != MinClass::M3);

  // thickness-one strip between two distinct-spin strips (second M4 clause)
  std::vector<Spin> sp3(p.sites(), 2);
  for (int r = 0; r < 9; ++r) {
    for (int c = 3; c < 6; ++c) sp3[p.geom.index(r, c)] = 3;
    sp3[p.geom.index(r, 6)] = 1;
    for (int c = 7; c < 9; ++c) sp3[p.geom.index(r, c)] = 2;
  }
  // runs: 2(0-2,w3) 3(w3) 1(w1) 2(w2): the thin 1-run sits between 3 and 2
  auto rep3 = local_min_class(p, SpinConfig(p.geom, p.q, sp3));
  CHECK(rep3.cls == MinClass::M4);

  // sampled families classify as intended and pass the flip scan implicitly
  CounterRng rng(51, 0);
  int got_m2 = 0, got_m3 = 0, got_m4 = 0;
  for (int t = 0; t < 60; ++t) {
    ModelParams pq(4, LatticeGeom(12, 12), 0.9);
    if (auto s = samplers::sample_M2(rng, pq.geom, 4))
      got_m2 += local_min_class(pq, *s).cls == MinClass::M2;
    if (auto s = samplers::sample_M3(rng, pq.geom, 4))
      got_m3 += local_min_class(pq, *s).cls == MinClass::M3;
    if (auto s = samplers::sample_M4(rng, pq.geom, 4))
      got_m4 += local_min_class(pq, *s).cls == MinClass::M4;
  }
  CHECK(got_m2 >= 50);
  CHECK(got_m3 >= 50);
  CHECK(got_m4 >= 40);

  // classified minima have no unstable tile anywhere
  for (int t = 0; t < 6; ++t) {
    ModelParams pq(4, LatticeGeom(12, 12), 0.9);
    auto s2 = samplers::sample_M3(rng, pq.geom, 4);
    if (!s2 || local_min_class(pq, *s2).cls == MinClass::None) continue;
    for (int v = 0; v < pq.sites(); ++v)
      REQUIRE(classify_tile(pq, *s2, pq.geom.vertex(v)).stable);
  }
}

TEST_CASE("plateaus that drain through flat moves are not stable plateaux") {
  // an 8x8 covering whose corner cells admit zero-cost flips: two rectangles
  // of one spin meet an m-rectangle on consecutive sides with different
  // interface lengths. The seed has no downhill flip, but sliding the corner
  // along the interface eventually opens one, so the plateau is transient
  // (stability level zero) rather than a stable plateau.
  ModelParams p(4, LatticeGeom(8, 8), 0.9);
  std::vector<Spin> sp(p.sites());
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) {
      Spin s;
      if (r < 4) s = c < 5 ? 2 : 3;
      else s = c < 5 ? 3 : 4;
      sp[p.geom.index(r, c)] = s;
    }
  SpinConfig sigma(p.geom, p.q, sp);
  bool down = false, flat = false;
  for (int v = 0; v < p.sites() && !down; ++v)
    for (Spin s2 = 1; (int)s2 <= p.q; ++s2) {
      if (s2 == sigma.at(v)) continue;
      int c = energy_cmp(energy_delta(p, sigma.spins(), v, s2), Energy{0, 0}, p.h);
      down = down || c < 0;
      flat = flat || c == 0;
    }
  CHECK_FALSE(down);
  CHECK(flat);
  auto rep = local_min_class(p, sigma);
  CHECK(rep.cls == MinClass::None);
  CHECK(rep.note.find("drains") != std::string::npos);
}

TEST_CASE("shape family predicates") {
  auto p = p99();
  // gate: quasi-square 2x3 plus a unit protuberance on a long side
  auto gate = with_ones(p, 2, {{3, 3}, {3, 4}, {4, 3}, {4, 4}, {5, 3}, {5, 4}, {4, 5}});
  CHECK(in_W(p, gate, 2));
  CHECK_FALSE(in_Wprime(p, gate, 2));
  CHECK(in_D(p, gate, 2));
  CHECK(in_FD(p, gate, 2));
  CHECK(in_tube(p, gate, 2));
  CHECK(count_spins(gate, 1) == 7);

  // protuberance on a short side instead
  auto wp = with_ones(p, 2, {{3, 3}, {3, 4}, {4, 3}, {4, 4}, {5, 3}, {5, 4}, {6, 4}});
  CHECK_FALSE(in_W(p, wp, 2));
  CHECK(in_Wprime(p, wp, 2));
  CHECK(in_FD(p, wp, 2));
  CHECK_FALSE(in_tube(p, wp, 2));  // W' is off the typical tube

  // R-bar families, both orientations
  CHECK(in_Rbar(rect_ones(p, 2, 1, 1, 3, 2), 2, 3, 2, 1));
  CHECK(in_Rbar(rect_ones(p, 2, 1, 1, 2, 3), 2, 3, 2, 1));
  CHECK_FALSE(in_Rbar(rect_ones(p, 2, 1, 1, 2, 2), 2, 3, 2, 1));

  // monochromes and completion states are in the tube
  CHECK(in_tube(p, monochrome(p.geom, p.q, 2), 2));
  CHECK(in_tube(p, monochrome(p.geom, p.q, 1), 2));
  CHECK(in_tube(p, rect_ones(p, 2, 0, 0, 5, 4), 2));      // supercritical rectangle
  CHECK_FALSE(in_tube(p, rect_ones(p, 2, 0, 0, 2, 4), 2));  // 2x4 is off the tube
  // strips of thickness >= 3, with and without a bar
  std::vector<Spin> sp(p.sites(), 2);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 3; ++c) sp[p.geom.index(r, c)] = 1;
  auto strip3 = SpinConfig(p.geom, p.q, sp);
  CHECK(in_strip_v(p, strip3, 2));
  CHECK(in_tube(p, strip3, 2));
  sp[p.geom.index(4, 3)] = 1;
  auto strip3bar = SpinConfig(p.geom, p.q, sp);
  CHECK(in_strip_v(p, strip3bar, 2));
  CHECK(in_tube(p, strip3bar, 2));
  // thickness 2 is not enough
  std::vector<Spin> sp2(p.sites(), 2);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 2; ++c) sp2[p.geom.index(r, c)] = 1;
  CHECK_FALSE(in_tube(p, SpinConfig(p.geom, p.q, sp2), 2));
  // two separate droplets leave the tube
  auto twins = with_ones(p, 2, {{1, 1}, {6, 6}});
  CHECK_FALSE(in_tube(p, twins, 2));
  // completion phase: m-cells inside a single column
  std::vector<Spin> sp3(p.sites(), 1);
  sp3[p.geom.index(2, 5)] = 2;
  sp3[p.geom.index(6, 5)] = 2;
  CHECK(in_tube(p, SpinConfig(p.geom, p.q, sp3), 2));
}

TEST_CASE("the whole reference path stays inside the tube") {
  auto p = p99();
  auto prof = build_reference_path(p, 2);
  SpinConfig cur = prof.start;
  REQUIRE(in_tube(p, cur, 2));
  for (std::size_t i = 0; i < prof.length(); ++i) {
    cur = apply_move(cur, prof.moves[i]);
    INFO("step " << i + 1);
    REQUIRE(in_tube(p, cur, 2));
  }
}

TEST_CASE("F(D) droplets with a single-segment touch are gates") {
  auto p = p99();
  auto shapes = samplers::fd_droplet_shapes(p.ell_star());
  REQUIRE_FALSE(shapes.empty());
  CounterRng rng(61, 0);
  int singles = 0;
  for (int t = 0; t < 500; ++t) {
    auto sigma = samplers::sample_FD(rng, p, 2, shapes);
    REQUIRE(in_FD(p, sigma, 2));
    Energy gap = energy_gap_vs_monochrome(p, sigma, 2);
    CHECK(gap == p.gamma_m());  // H(F(D)) sits exactly at the barrier
    if (single_segment_touch(sigma)) {
      ++singles;
      CHECK((in_W(p, sigma, 2) || in_Wprime(p, sigma, 2)));
    }
  }
  CHECK(singles > 0);
}

TEST_CASE("shape_class aggregates the predicates") {
  auto p = p99();
  auto gate = with_ones(p, 2, {{3, 3}, {3, 4}, {4, 3}, {4, 4}, {5, 3}, {5, 4}, {4, 5}});
  auto rep = shape_class(p, gate);
  REQUIRE(rep.per_spin.size() == 2);
  CHECK(rep.per_spin[0].m == 2);
  CHECK(rep.per_spin[0].w);
  CHECK(rep.per_spin[0].fd);
  CHECK(rep.fd_single_touch);
  CHECK_FALSE(rep.per_spin[1].w);
}
