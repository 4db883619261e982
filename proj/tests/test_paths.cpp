#include <catch2/catch_amalgamated.hpp>

#include "potts/geometry.hpp"
#include "potts/paths.hpp"
#include "potts/samplers.hpp"

using namespace potts;

namespace {
ModelParams p99() { return ModelParams(3, LatticeGeom(9, 9), 0.9); }
}

TEST_CASE("reference path grows one spin-1 site per step and ends at bold 1") {
  auto p = p99();
  auto prof = build_reference_path(p, 2, {3, 5});
  REQUIRE(prof.length() == (std::size_t)p.sites());
  SpinConfig cur = prof.start;
  Energy H = hamiltonian(p, cur);
  CHECK(H == prof.energies[0]);
  for (std::size_t i = 0; i < prof.length(); ++i) {
    cur = apply_move(cur, prof.moves[i]);  // throws on a non-admissible move
    CHECK(count_spins(cur, 1) == (int)i + 1);
    CHECK(hamiltonian(p, cur) == prof.energies[i + 1]);
  }
  CHECK(cur == monochrome(p.geom, p.q, 1));
}

TEST_CASE("reference path peak sits at k* and nowhere else") {
  auto p = p99();
  for (Vertex anchor : {Vertex{0, 0}, Vertex{4, 7}, Vertex{8, 8}}) {
    auto prof = build_reference_path(p, 3, anchor);
    REQUIRE(prof.argmax.size() == 1);
    CHECK(prof.argmax[0] == (std::size_t)p.k_star());
    CHECK((prof.height - prof.energies[0]) == p.gamma_m());
    // the peak state is a gate configuration
    CHECK(in_W(p, prof.state_at(p.k_star()), 3));
  }
  CHECK_THROWS(build_reference_path(p, 1));
  CHECK_THROWS(build_reference_path(p, 4));
}

TEST_CASE("quasi-square and square peaks follow the closed forms") {
  auto p = p99();
  auto prof = build_reference_path(p, 2);
  double H0 = prof.energies[0].value(p.h);
  for (int l = 1; l <= p.geom.K - 1; ++l) {
    double got = prof.energies[(std::size_t)l * (l - 1) + 1].value(p.h) - H0;
    CHECK(got == Catch::Approx(4.0 * l - p.h * l * l + p.h * l - p.h).margin(1e-9));
  }
  for (int l = 1; l <= p.geom.K - 2; ++l) {
    double got = prof.energies[(std::size_t)l * l + 1].value(p.h) - H0;
    CHECK(got == Catch::Approx(4.0 * l - p.h * l * l + 2 - p.h).margin(1e-9));
  }
}

TEST_CASE("reference path generalizes to other fields") {
  // h = 0.55: critical length 4, peak at step 13 with height 16 - 13h
  ModelParams p(3, LatticeGeom(12, 14), 0.55);
  REQUIRE(p.ell_star() == 4);
  REQUIRE(p.k_star() == 13);
  auto prof = build_reference_path(p, 2);
  REQUIRE(prof.argmax.size() == 1);
  CHECK(prof.argmax[0] == 13);
  CHECK((prof.height - prof.energies[0]).value(p.h) == Catch::Approx(16 - 13 * 0.55));
  CHECK(in_W(p, prof.state_at(13), 2));
  CHECK(prof.end_state() == monochrome(p.geom, p.q, 1));
}

TEST_CASE("escape heights generalize to other fields") {
  // subcritical 3x5 rectangle of 1s at l* = 4: height h*(l-1) with l = 3
  ModelParams p(3, LatticeGeom(12, 12), 0.55);
  std::vector<Spin> sp(p.sites(), 2);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 5; ++c) sp[p.geom.index(2 + r, 2 + c)] = 1;
  SpinConfig eta(p.geom, p.q, sp);
  REQUIRE(local_min_class(p, eta).cls == MinClass::M3);
  auto prof = build_escape_path(p, eta);
  CHECK((prof.height - prof.energies[0]).value(p.h) == Catch::Approx(2 * 0.55));
  CHECK(energy_less(prof.energies.back(), prof.energies[0], p.h));
}

TEST_CASE("meta-to-meta path goes through bold 1 with exactly two peaks") {
  auto p = p99();
  auto prof = build_meta_meta_path(p, 2, 3, {0, 0}, {4, 4});
  REQUIRE(prof.length() == 2 * (std::size_t)p.sites());
  CHECK(prof.state_at(p.sites()) == monochrome(p.geom, p.q, 1));
  CHECK(prof.end_state() == monochrome(p.geom, p.q, 3));
  CHECK((prof.height - prof.energies[0]) == p.gamma_m());
  REQUIRE(prof.argmax.size() == 2);
  CHECK(in_W(p, prof.state_at(prof.argmax[0]), 2));
  CHECK(in_W(p, prof.state_at(prof.argmax[1]), 3));
  CHECK_THROWS(build_meta_meta_path(p, 2, 2));
  CHECK_THROWS(build_meta_meta_path(p, 1, 2));
}

namespace {
void check_escape(const ModelParams& p, const SpinConfig& eta) {
  auto prof = build_escape_path(p, eta);
  Energy H0 = prof.energies[0];
  CHECK(energy_less(prof.energies.back(), H0, p.h));
  CHECK(energy_cmp(prof.height - H0, Energy{2, 0}, p.h) <= 0);
}
}  // namespace

TEST_CASE("escape from strips: first step costs 2 - h*1{r=1}") {
  auto p = p99();
  // strips 3 (spin 3) | 6 (spin 2): donor 3-strip erodes into spin 2
  std::vector<Spin> sp(p.sites(), 2);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 3; ++c) sp[p.geom.index(r, c)] = 3;
  SpinConfig eta(p.geom, p.q, sp);
  auto prof = build_escape_path(p, eta);
  CHECK((prof.energies[1] - prof.energies[0]).value(p.h) == Catch::Approx(2.0));
  check_escape(p, eta);

  // strips of 1 and 2: the non-1 donor erodes into the 1-strip
  std::vector<Spin> sp2(p.sites(), 2);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 4; ++c) sp2[p.geom.index(r, c)] = 1;
  SpinConfig eta2(p.geom, p.q, sp2);
  auto prof2 = build_escape_path(p, eta2);
  CHECK((prof2.energies[1] - prof2.energies[0]).value(p.h) == Catch::Approx(2.0 - p.h));
  check_escape(p, eta2);
}

TEST_CASE("escape from 1-rectangles: growth and shrinking costs") {
  auto p = ModelParams(3, LatticeGeom(12, 12), 0.9);
  auto rect = [&](int h, int w) {
    std::vector<Spin> sp(p.sites(), 2);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) sp[p.geom.index(2 + r, 2 + c)] = 1;
    return SpinConfig(p.geom, p.q, sp);
  };
  // supercritical: height 2 - h
  {
    auto eta = rect(3, 4);
    auto prof = build_escape_path(p, eta);
    CHECK((prof.height - prof.energies[0]).value(p.h) == Catch::Approx(2.0 - p.h));
    check_escape(p, eta);
  }
  // subcritical with min side l: height h*(l-1)
  {
    auto eta = rect(2, 2);
    auto prof = build_escape_path(p, eta);
    CHECK((prof.height - prof.energies[0]).value(p.h) == Catch::Approx(p.h));
    check_escape(p, eta);
  }
  {
    auto eta = rect(2, 6);
    auto prof = build_escape_path(p, eta);
    CHECK((prof.height - prof.energies[0]).value(p.h) == Catch::Approx(p.h));
    check_escape(p, eta);
  }
}

TEST_CASE("escape from rectangle coverings and plateaux") {
  // brick covering sampled at q = 4
  ModelParams p(4, LatticeGeom(12, 12), 0.9);
  CounterRng rng(81, 0);
  int done = 0;
  for (int t = 0; t < 40 && done < 10; ++t) {
    auto s = samplers::sample_M4(rng, p.geom, 4);
    if (!s || local_min_class(p, *s).cls != MinClass::M4) continue;
    check_escape(p, *s);
    ++done;
  }
  CHECK(done == 10);

  // a draining plateau is outside the certified classes
  ModelParams p8(4, LatticeGeom(8, 8), 0.9);
  std::vector<Spin> sp(p8.sites());
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) sp[p8.geom.index(r, c)] = r < 4 ? (c < 5 ? 2 : 3) : (c < 5 ? 3 : 4);
  SpinConfig plateau(p8.geom, p8.q, sp);
  REQUIRE(local_min_class(p8, plateau).cls == MinClass::None);
  CHECK_THROWS(build_escape_path(p8, plateau));
}

TEST_CASE("states outside the certified classes are rejected") {
  auto p = p99();
  CHECK_THROWS(build_escape_path(p, monochrome(p.geom, p.q, 2)));  // M1
  auto above = apply_move(monochrome(p.geom, p.q, 1), Move{{0, 0}, 2});
  CHECK_THROWS(build_escape_path(p, above));  // not a local minimum at all
}

TEST_CASE("randomized escape suite stays within the bound") {
  CounterRng rng(91, 0);
  int built = 0;
  while (built < 60) {
    int q = 3 + (int)rng.next_below(3);
    ModelParams p(q, LatticeGeom(12, 12), 0.9);
    std::optional<SpinConfig> s;
    int which = (int)rng.next_below(3);
    if (which == 0) s = samplers::sample_M2(rng, p.geom, q);
    else if (which == 1) s = samplers::sample_M3(rng, p.geom, q);
    else if (q >= 4) s = samplers::sample_M4(rng, p.geom, q);
    if (!s) continue;
    auto cls = local_min_class(p, *s).cls;
    if (cls != MinClass::M2 && cls != MinClass::M3 && cls != MinClass::M4) continue;
    check_escape(p, *s);
    ++built;
  }
}
