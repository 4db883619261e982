#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "potts/energy.hpp"
#include "potts/lattice.hpp"
#include "potts/rng.hpp"

namespace potts {

// observers are pure predicates over the current spins
struct Observer {
  std::string name;
  std::function<bool(const SpinConfig&)> pred;
};

using TargetPred = std::function<bool(const SpinConfig&)>;

struct SimConfig {
  double beta = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::uint64_t step_cap = 1'000'000;
  std::vector<Observer> observers;
};

struct RunRecord {
  bool capped = false;          // step cap exhausted before the target
  std::uint64_t steps = 0;      // discrete chain steps, lazy self-loops included
  std::uint64_t events = 0;     // accepted flips
  std::uint64_t stream_id = 0;
  std::vector<std::string> observer_names;
  std::vector<std::int64_t> first_hit;  // step of first hit per observer, -1 if never
  SpinConfig final_state;
};

// One Metropolis step: propose (v,s) uniformly over q|V| pairs, accept with
// exp(-beta [dH]^+). Proposing the current spin is the lazy self-loop.
inline std::pair<SpinConfig, bool> step(const ModelParams& p, const SpinConfig& sigma, double beta,
                                        CounterRng& rng) {
  int v = (int)rng.next_below(p.sites());
  Spin s = Spin(1 + rng.next_below(p.q));
  if (s == sigma.at(v)) return {sigma, false};
  Energy d = energy_delta(p, sigma.spins(), v, s);
  double acc = acceptance_prob(beta, d.value(p.h));
  if (acc >= 1.0 || rng.next_half_open() < acc) return {apply_move(sigma, Move{p.geom.vertex(v), s}), true};
  return {sigma, false};
}

namespace detail {

struct ObsState {
  std::vector<std::int64_t> first_hit;
  void init(size_t n) { first_hit.assign(n, -1); }
  void check(const std::vector<Observer>& obs, const SpinConfig& sigma, std::uint64_t step) {
    for (size_t i = 0; i < obs.size(); ++i)
      if (first_hit[i] < 0 && obs[i].pred(sigma)) first_hit[i] = (std::int64_t)step;
  }
};

}  // namespace detail

// Naive chain. Fine for moderate cap; the estimators use the KMC version.
inline RunRecord simulate_until(const ModelParams& p, const SpinConfig& sigma0,
                                const TargetPred& target, const SimConfig& cfg) {
  CounterRng rng(cfg.seed, cfg.stream_id);
  SpinConfig sigma = sigma0;
  detail::ObsState obs;
  obs.init(cfg.observers.size());
  RunRecord rec;
  rec.stream_id = cfg.stream_id;
  for (const auto& o : cfg.observers) rec.observer_names.push_back(o.name);

  obs.check(cfg.observers, sigma, 0);
  std::uint64_t t = 0;
  bool absorbed = target(sigma);
  while (!absorbed && t < cfg.step_cap) {
    auto [next, accepted] = step(p, sigma, cfg.beta, rng);
    ++t;
    if (accepted) {
      sigma = std::move(next);
      ++rec.events;
      obs.check(cfg.observers, sigma, t);
      absorbed = target(sigma);
    }
  }
  rec.steps = t;
  rec.capped = !absorbed;
  rec.first_hit = std::move(obs.first_hit);
  rec.final_state = std::move(sigma);
  return rec;
}

// Rejection-free simulation of the same chain. Keeps the per-vertex
// acceptance masses, draws the number of lazy steps as a geometric variable
// with success probability A(sigma) = sum exp(-beta [dH]^+) / (q|V|), then
// picks the accepted move proportionally. The law of (state sequence, step
// counts) matches the naive chain.
class KmcSimulator {
 public:
  KmcSimulator(const ModelParams& p, double beta) : p_(p), beta_(beta) {
    nbr_.resize(p.sites());
    for (int v = 0; v < p.sites(); ++v) nbr_[v] = p.geom.neighbor_indices(v);
  }

  RunRecord run(const SpinConfig& sigma0, const TargetPred& target, const SimConfig& cfg) {
    CounterRng rng(cfg.seed, cfg.stream_id);
    spins_ = sigma0.spins();
    recompute_all();

    detail::ObsState obs;
    obs.init(cfg.observers.size());
    RunRecord rec;
    rec.stream_id = cfg.stream_id;
    for (const auto& o : cfg.observers) rec.observer_names.push_back(o.name);

    SpinConfig cur(p_.geom, p_.q, spins_);
    obs.check(cfg.observers, cur, 0);
    std::uint64_t t = 0;
    bool absorbed = target(cur);
    std::uint64_t since_resync = 0;
    while (!absorbed && t < cfg.step_cap) {
      double A = total_ / (double(p_.q) * p_.sites());
      std::uint64_t wait;
      if (A >= 1.0) {
        wait = 1;
      } else {
        double u = rng.next_unit();
        double g = std::ceil(std::log(u) / std::log1p(-A));
        wait = g < 1.0 ? 1 : (g > 9.0e18 ? UINT64_MAX : (std::uint64_t)g);
      }
      if (wait > cfg.step_cap - t) {  // accepted move would land past the cap
        t = cfg.step_cap;
        break;
      }
      t += wait;
      auto [v, s] = pick_move(rng);
      apply_flip(v, s);
      ++rec.events;
      cur = SpinConfig(p_.geom, p_.q, spins_);
      obs.check(cfg.observers, cur, t);
      absorbed = target(cur);
      if (++since_resync == 4096) {  // kill float drift in total_
        recompute_all();
        since_resync = 0;
      }
    }
    rec.steps = t;
    rec.capped = !absorbed;
    rec.first_hit = std::move(obs.first_hit);
    rec.final_state = std::move(cur);
    return rec;
  }

  // acceptance mass of a configuration, for tests
  double total_mass(const SpinConfig& sigma) {
    spins_ = sigma.spins();
    recompute_all();
    return total_;
  }

 private:
  double vertex_mass(int v) const {
    const Spin c = spins_[v];
    int n[8] = {0};
    for (int w : nbr_[v]) ++n[spins_[w]];
    double m = 0;
    for (int s = 1; s <= p_.q; ++s) {
      if (s == c) continue;
      double d = double(n[c] - n[s]) + p_.h * ((c == 1) - (s == 1));
      m += d <= 0 ? 1.0 : std::exp(-beta_ * d);
    }
    return m;
  }

  void recompute_all() {
    mass_.assign(p_.sites(), 0.0);
    total_ = 0;
    for (int v = 0; v < p_.sites(); ++v) {
      mass_[v] = vertex_mass(v);
      total_ += mass_[v];
    }
  }

  std::pair<int, Spin> pick_move(CounterRng& rng) {
    double x = rng.next_half_open() * total_;
    int v = 0;
    double acc = 0;
    for (; v < p_.sites(); ++v) {
      acc += mass_[v];
      if (x < acc || v == p_.sites() - 1) break;
    }
    // within the vertex, re-enumerate the per-spin masses
    double y = mass_[v] - (acc - x);
    if (y < 0) y = 0;
    const Spin c = spins_[v];
    int n[8] = {0};
    for (int w : nbr_[v]) ++n[spins_[w]];
    double run = 0;
    Spin last = 0;
    for (int s = 1; s <= p_.q; ++s) {
      if (s == c) continue;
      double d = double(n[c] - n[s]) + p_.h * ((c == 1) - (s == 1));
      run += d <= 0 ? 1.0 : std::exp(-beta_ * d);
      last = Spin(s);
      if (y < run) return {v, Spin(s)};
    }
    return {v, last};
  }

  void apply_flip(int v, Spin s) {
    total_ -= mass_[v];
    for (int w : nbr_[v]) total_ -= mass_[w];
    spins_[v] = s;
    mass_[v] = vertex_mass(v);
    total_ += mass_[v];
    for (int w : nbr_[v]) {
      mass_[w] = vertex_mass(w);
      total_ += mass_[w];
    }
  }

  ModelParams p_;
  double beta_;
  std::vector<std::array<int, 4>> nbr_;
  std::vector<Spin> spins_;
  std::vector<double> mass_;
  double total_ = 0;
};

inline RunRecord kmc_simulate_until(const ModelParams& p, const SpinConfig& sigma0,
                                    const TargetPred& target, const SimConfig& cfg) {
  KmcSimulator sim(p, cfg.beta);
  return sim.run(sigma0, target, cfg);
}

// Dense-enumeration transition matrix for tiny state spaces (tests, spectral
// estimates). Row-stochastic; stored sparse by rows of (index, probability).
struct TransitionMatrix {
  std::uint64_t n = 0;
  LatticeGeom geom;
  int q = 0;
  std::vector<std::vector<std::pair<std::uint64_t, double>>> off;  // off-diagonal
  std::vector<double> diag;
};

inline TransitionMatrix build_transition_matrix(const ModelParams& p, double beta,
                                                std::uint64_t cap = 2'000'000) {
  double logn = p.sites() * std::log((double)p.q);
  if (logn > std::log((double)cap)) throw std::invalid_argument("build_transition_matrix: state space too large");
  std::uint64_t n = 1;
  for (int i = 0; i < p.sites(); ++i) n *= p.q;
  TransitionMatrix tm;
  tm.n = n;
  tm.geom = p.geom;
  tm.q = p.q;
  tm.off.resize(n);
  tm.diag.assign(n, 0.0);
  std::vector<std::uint64_t> pow(p.sites() + 1, 1);
  for (int i = 0; i < p.sites(); ++i) pow[i + 1] = pow[i] * p.q;
  const double qv = double(p.q) * p.sites();
  for (std::uint64_t code = 0; code < n; ++code) {
    SpinConfig sigma = decode(code, p.geom, p.q);
    double out = 0;
    for (int v = 0; v < p.sites(); ++v) {
      Spin c = sigma.at(v);
      for (Spin s = 1; (int)s <= p.q; ++s) {
        if (s == c) continue;
        Energy d = energy_delta(p, sigma.spins(), v, s);
        double pr = acceptance_prob(beta, d.value(p.h)) / qv;
        std::uint64_t to = code + (std::uint64_t)(s - c) * pow[v];
        if (s < c) to = code - (std::uint64_t)(c - s) * pow[v];
        tm.off[code].emplace_back(to, pr);
        out += pr;
      }
    }
    tm.diag[code] = 1.0 - out;
  }
  return tm;
}

}  // namespace potts
