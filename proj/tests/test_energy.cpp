#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "potts/energy.hpp"
#include "potts/rng.hpp"

using namespace potts;

namespace {
ModelParams p33() { return ModelParams(3, LatticeGeom(3, 3), 0.9); }

SpinConfig random_config(CounterRng& rng, const ModelParams& p) {
  std::vector<Spin> sp(p.sites());
  for (auto& s : sp) s = Spin(1 + rng.next_below(p.q));
  return SpinConfig(p.geom, p.q, sp);
}
}  // namespace

TEST_CASE("model parameter validation") {
  CHECK_THROWS(ModelParams(2, LatticeGeom(3, 3), 0.9));
  CHECK_THROWS(ModelParams(3, LatticeGeom(3, 3), 0.5));   // 2/h integer
  CHECK_THROWS(ModelParams(3, LatticeGeom(3, 3), 1.5));   // h >= 1
  CHECK_THROWS(ModelParams(3, LatticeGeom(3, 3), -0.1));
  ModelParams unsafe(3, LatticeGeom(3, 3), 0.5, true);
  CHECK_FALSE(unsafe.assumption_ok);
  ModelParams ok = p33();
  CHECK(ok.assumption_ok);
  CHECK_FALSE(ok.size_assumption_ok);  // 3 < 3*ell_star
  CHECK(ModelParams(3, LatticeGeom(9, 9), 0.9).size_assumption_ok);
}

TEST_CASE("critical length") {
  CHECK(critical_length(0.9) == 3);
  CHECK(critical_length(0.55) == 4);
  CHECK_THROWS(critical_length(0.5));
  CHECK(p33().ell_star() == 3);
  CHECK(p33().k_star() == 7);
  CHECK(p33().gamma_m().value(0.9) == Catch::Approx(5.7));
}

TEST_CASE("hamiltonian on monochromes and a single flip") {
  auto p = p33();
  auto m2 = monochrome(p.geom, p.q, 2);
  auto m1 = monochrome(p.geom, p.q, 1);
  CHECK(hamiltonian(p, m2).value(p.h) == Catch::Approx(-18.0));
  CHECK(hamiltonian(p, m1).value(p.h) == Catch::Approx(-26.1));
  auto flipped = apply_move(m2, Move{{0, 0}, 1});
  CHECK(hamiltonian(p, flipped).value(p.h) == Catch::Approx(-14.9));
  // shape mismatch
  ModelParams other(3, LatticeGeom(3, 4), 0.9);
  CHECK_THROWS(hamiltonian(other, m2));
}

TEST_CASE("gap against a monochrome, two routes") {
  auto p = ModelParams(3, LatticeGeom(9, 9), 0.9);
  auto m2 = monochrome(p.geom, p.q, 2);
  CHECK(energy_gap_vs_monochrome(p, m2, 2).value(p.h) == Catch::Approx(0.0));

  // 2x2 all-1 square in a sea of 2: 8 - 3.6
  std::vector<Spin> sp(p.sites(), 2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) sp[p.geom.index(3 + r, 3 + c)] = 1;
  SpinConfig square(p.geom, p.q, sp);
  CHECK(energy_gap_vs_monochrome(p, square, 2).value(p.h) == Catch::Approx(4.4));

  // quasi-square 2x3 with a protuberance on a long side: 12 - 6.3
  std::vector<Spin> sp2(p.sites(), 2);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 2; ++c) sp2[p.geom.index(3 + r, 3 + c)] = 1;
  sp2[p.geom.index(4, 5)] = 1;
  SpinConfig gate(p.geom, p.q, sp2);
  CHECK(energy_gap_vs_monochrome(p, gate, 2).value(p.h) == Catch::Approx(5.7));

  // both routes agree exactly on random configurations
  CounterRng rng(5, 0);
  auto pm = ModelParams(4, LatticeGeom(4, 5), 0.7);
  auto m3 = monochrome(pm.geom, pm.q, 3);
  for (int t = 0; t < 300; ++t) {
    auto sigma = random_config(rng, pm);
    Energy gap = energy_gap_vs_monochrome(pm, sigma, 3);
    Energy diff = hamiltonian(pm, sigma) - hamiltonian(pm, m3);
    CHECK(gap == diff);
  }
  CHECK_THROWS(energy_gap_vs_monochrome(p, m2, 1));
}

TEST_CASE("local energy differences match the three-case rule") {
  auto p = ModelParams(3, LatticeGeom(9, 9), 0.9);
  auto m2 = monochrome(p.geom, p.q, 2);
  // interior flip 2 -> 1 in a sea of 2: 4 - h
  CHECK(energy_delta(p, m2, Move{{4, 4}, 1}).value(p.h) == Catch::Approx(3.1));

  // v with neighbors {1,2,2,2}, flip 2 -> 1: 3 - 1 - h
  auto sigma = apply_move(m2, Move{{3, 4}, 1});
  CHECK(energy_delta(p, sigma, Move{{4, 4}, 1}).value(p.h) == Catch::Approx(1.1));

  // v with neighbors {1,1,2,2}, flip 1 -> 2: (2-2) + h
  auto sigma2 = apply_move(sigma, Move{{5, 4}, 1});
  auto sigma3 = apply_move(sigma2, Move{{4, 4}, 1});
  CHECK(energy_delta(p, sigma3, Move{{4, 4}, 2}).value(p.h) == Catch::Approx(0.9));

  CHECK_THROWS(energy_delta(p, m2, Move{{0, 0}, 2}));  // no-op
}

TEST_CASE("local delta equals the global difference") {
  CounterRng rng(17, 0);
  for (int t = 0; t < 10000; ++t) {
    int q = 3 + (int)rng.next_below(3);
    ModelParams p(q, LatticeGeom(3 + (int)rng.next_below(3), 4 + (int)rng.next_below(4)), 0.9);
    auto sigma = random_config(rng, p);
    int v = (int)rng.next_below(p.sites());
    Spin s = Spin(1 + rng.next_below(q));
    if (s == sigma.at(v)) s = Spin(s % q + 1);
    Move m{p.geom.vertex(v), s};
    CHECK(energy_delta(p, sigma, m) == hamiltonian(p, apply_move(sigma, m)) - hamiltonian(p, sigma));
  }
}

TEST_CASE("acceptance probabilities") {
  CHECK(acceptance_prob(2.0, -1.0) == 1.0);
  CHECK(acceptance_prob(2.0, 0.0) == 1.0);
  CHECK(acceptance_prob(2.0, 0.9) == Catch::Approx(std::exp(-1.8)));
  CHECK(acceptance_prob(0.0, 3.1) == 1.0);
  CHECK_THROWS(acceptance_prob(-1.0, 1.0));
}

TEST_CASE("detailed balance with respect to the Gibbs weights") {
  auto p = p33();
  const double beta = 1.7;
  CounterRng rng(23, 0);
  for (int t = 0; t < 3000; ++t) {
    std::vector<Spin> sp(p.sites());
    for (auto& s : sp) s = Spin(1 + rng.next_below(p.q));
    SpinConfig sigma(p.geom, p.q, sp);
    int v = (int)rng.next_below(p.sites());
    Spin s = Spin(1 + rng.next_below(p.q));
    if (s == sigma.at(v)) continue;
    auto tau = apply_move(sigma, Move{p.geom.vertex(v), s});
    double d = energy_delta(p, sigma, Move{p.geom.vertex(v), s}).value(p.h);
    // mu(sigma) P(sigma,tau) vs mu(tau) P(tau,sigma), common factors dropped
    double lhs = acceptance_prob(beta, d);
    double rhs = std::exp(-beta * d) * acceptance_prob(beta, -d);
    CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(lhs)));
  }
}

TEST_CASE("exact energy comparisons decide ties correctly") {
  // h = 0.75 is exactly representable: 3 - 4h == 0 is a genuine tie
  Energy a{3, -4}, zero{0, 0};
  CHECK(energy_cmp(a, zero, 0.75) == 0);
  CHECK(energy_cmp(a, zero, 0.76) < 0);
  CHECK(energy_cmp(a, zero, 0.74) > 0);
  // the double nearest 0.9 is not 9/10, so 9 - 10h is not a tie
  Energy b{9, -10};
  CHECK(energy_cmp(b, zero, 0.9) != 0);
  // large-coefficient sanity
  Energy c{288, 0}, d{0, 320};
  CHECK(energy_cmp(c, d, 0.9) == energy_cmp(Energy{288 - 0, -320}, zero, 0.9));
}
