#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "potts/dynamics.hpp"
#include "potts/estimators.hpp"

using namespace potts;

namespace {
ModelParams p33() { return ModelParams(3, LatticeGeom(3, 3), 0.9); }
}

TEST_CASE("at beta = 0 every non-lazy proposal is accepted") {
  auto p = p33();
  CounterRng rng(1, 0);
  auto sigma = monochrome(p.geom, p.q, 1);
  int flips = 0;
  for (int t = 0; t < 2000; ++t) {
    auto [next, accepted] = step(p, sigma, 0.0, rng);
    if (accepted) ++flips;
    sigma = next;
  }
  // lazy fraction is 1/q; everything else must flip
  CHECK(flips > 2000 * (1.0 - 1.0 / p.q) * 0.9);
}

TEST_CASE("single-step law matches the transition matrix row") {
  auto p = p33();
  const double beta = 1.3;
  // a fixed, non-trivial state
  auto sigma = decode(7777, p.geom, p.q);
  std::uint64_t from = encode(sigma);
  auto tm = build_transition_matrix(p, beta);
  std::map<std::uint64_t, double> row;
  for (auto& [to, pr] : tm.off[from]) row[to] += pr;

  const int N = 1'000'000;
  CounterRng rng(2024, 5);
  std::map<std::uint64_t, int> counts;
  int lazy = 0;
  for (int t = 0; t < N; ++t) {
    auto [next, accepted] = step(p, sigma, beta, rng);
    if (accepted) ++counts[encode(next)];
    else ++lazy;
  }
  for (auto& [to, pr] : row) {
    double freq = (double)counts[to] / N;
    double se = std::sqrt(pr * (1 - pr) / N);
    CHECK(std::fabs(freq - pr) <= 3.0 * se + 1e-9);
  }
  double self = tm.diag[from];
  CHECK(std::fabs((double)lazy / N - self) <= 3.0 * std::sqrt(self * (1 - self) / N));
}

TEST_CASE("assembled chain is reversible and irreducible") {
  auto p = p33();
  const double beta = 1.5;
  auto tm = build_transition_matrix(p, beta);
  std::vector<double> w(tm.n);  // unnormalized Gibbs weights
  double hmin = 1e300;
  std::vector<double> H(tm.n);
  for (std::uint64_t c = 0; c < tm.n; ++c) {
    H[c] = hamiltonian(p, decode(c, p.geom, p.q)).value(p.h);
    hmin = std::min(hmin, H[c]);
  }
  for (std::uint64_t c = 0; c < tm.n; ++c) w[c] = std::exp(-beta * (H[c] - hmin));
  // detailed balance entry by entry
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> flux;
  for (std::uint64_t x = 0; x < tm.n; ++x)
    for (auto& [y, pr] : tm.off[x]) flux[{x, y}] += w[x] * pr;
  for (auto& [xy, f] : flux) {
    double g = flux[{xy.second, xy.first}];
    REQUIRE(std::fabs(f - g) <= 1e-12 * std::max(1.0, std::fabs(f)));
  }
  // irreducibility: the Q-graph is connected
  std::vector<char> seen(tm.n, 0);
  std::vector<std::uint64_t> stack{0};
  seen[0] = 1;
  std::uint64_t reached = 0;
  while (!stack.empty()) {
    auto x = stack.back();
    stack.pop_back();
    ++reached;
    for (auto& [y, pr] : tm.off[x])
      if (!seen[y]) {
        seen[y] = 1;
        stack.push_back(y);
      }
  }
  CHECK(reached == tm.n);
  // rows sum to one
  for (std::uint64_t x = 0; x < tm.n; ++x) {
    double s = tm.diag[x];
    for (auto& [y, pr] : tm.off[x]) s += pr;
    REQUIRE(std::fabs(s - 1.0) < 1e-12);
  }
}

TEST_CASE("acceptance mass matches a brute proposal scan") {
  auto p = p33();
  const double beta = 2.2;
  KmcSimulator sim(p, beta);
  auto m1 = monochrome(p.geom, p.q, 1);
  double brute = 0;
  for (int v = 0; v < p.sites(); ++v)
    for (Spin s = 1; (int)s <= p.q; ++s) {
      if (s == m1.at(v)) continue;
      brute += acceptance_prob(beta, energy_delta(p, m1, Move{p.geom.vertex(v), s}).value(p.h));
    }
  CHECK(sim.total_mass(m1) == Catch::Approx(brute).epsilon(1e-12));
}

TEST_CASE("rejection-free and naive chains agree in law") {
  auto p = p33();
  auto m2 = monochrome(p.geom, p.q, 2);
  auto m1 = monochrome(p.geom, p.q, 1);
  auto target = target_state(m1);
  const std::size_t N = 10000;
  std::vector<std::uint64_t> kmc(N), naive(N);
  run_parallel(N, [&](std::size_t i) {
    SimConfig cfg;
    cfg.beta = 2.0;
    cfg.seed = 42;
    cfg.stream_id = i;
    cfg.step_cap = 50'000'000;
    kmc[i] = kmc_simulate_until(p, m2, target, cfg).steps;
    cfg.seed = 43;
    naive[i] = simulate_until(p, m2, target, cfg).steps;
  });
  std::sort(kmc.begin(), kmc.end());
  std::sort(naive.begin(), naive.end());
  double ks = 0;
  std::size_t i = 0, j = 0;
  while (i < N && j < N) {
    if (kmc[i] <= naive[j]) ++i;
    else ++j;
    ks = std::max(ks, std::fabs((double)i / N - (double)j / N));
  }
  CHECK(ks < 0.02);
}

TEST_CASE("records are deterministic in the seed and capped runs are flagged") {
  auto p = p33();
  auto m2 = monochrome(p.geom, p.q, 2);
  auto target = target_monochrome(p, 1);
  SimConfig cfg;
  cfg.beta = 2.0;
  cfg.seed = 11;
  cfg.stream_id = 3;
  cfg.step_cap = 10'000'000;
  cfg.observers = {observer_other_metastable(p, 2)};
  auto a = kmc_simulate_until(p, m2, target, cfg);
  auto b = kmc_simulate_until(p, m2, target, cfg);
  CHECK(a.steps == b.steps);
  CHECK(a.events == b.events);
  CHECK(a.first_hit == b.first_hit);
  CHECK(a.final_state == b.final_state);
  cfg.stream_id = 4;
  auto c = kmc_simulate_until(p, m2, target, cfg);
  CHECK(a.steps != c.steps);

  cfg.step_cap = 100;
  auto capped = kmc_simulate_until(p, m2, target, cfg);
  CHECK(capped.capped);
  CHECK(capped.steps == 100);

  // starting inside the target absorbs at step zero
  auto instant = kmc_simulate_until(p, monochrome(p.geom, p.q, 1), target, cfg);
  CHECK(instant.steps == 0);
  CHECK_FALSE(instant.capped);
}

TEST_CASE("observer first hits are monotone flags") {
  auto p = p33();
  auto m2 = monochrome(p.geom, p.q, 2);
  SimConfig cfg;
  cfg.beta = 2.5;
  cfg.seed = 5;
  cfg.stream_id = 0;
  cfg.step_cap = 40'000'000;
  cfg.observers = {Observer{"left_start", [&](const SpinConfig& s) {
    return !(s == monochrome(p.geom, p.q, 2));
  }}};
  auto rec = kmc_simulate_until(p, m2, target_monochrome(p, 1), cfg);
  REQUIRE(rec.first_hit.size() == 1);
  CHECK(rec.first_hit[0] >= 1);
  CHECK((std::uint64_t)rec.first_hit[0] <= rec.steps);
}
