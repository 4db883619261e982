#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "potts/energy.hpp"
#include "potts/lattice.hpp"

namespace potts {

struct ExploreBudget {
  std::size_t max_states = 4'000'000;
  std::optional<Energy> energy_ceiling;  // absolute H bound, inclusive
  std::vector<Spin> subspace;            // allowed labels; empty = all of 1..q

  bool allows(Spin s) const {
    if (subspace.empty()) return true;
    for (Spin x : subspace)
      if (x == s) return true;
    return false;
  }
};

struct SearchResult {
  bool reached = false;
  bool exhausted = false;       // budget ran out first
  Energy phi{};                 // communication height (absolute) when reached,
                                // otherwise a lower bound from the open frontier
  Energy start_energy{};
  std::vector<Move> witness;    // moves from the start to the hit state
  SpinConfig hit_state;
  std::size_t visited = 0;
  std::size_t popped = 0;
};

namespace detail {

// arena of explored states; ids are stable
struct StateArena {
  std::deque<std::vector<Spin>> states;
  std::unordered_map<std::string, int> ids;

  int intern(const std::vector<Spin>& sp) {
    auto it = ids.find(state_key(sp));
    if (it != ids.end()) return it->second;
    int id = (int)states.size();
    states.push_back(sp);
    ids.emplace(state_key(sp), id);
    return id;
  }
  int find(const std::vector<Spin>& sp) const {
    auto it = ids.find(state_key(sp));
    return it == ids.end() ? -1 : it->second;
  }
};

struct SearchNode {
  Energy ceil{};   // best known bottleneck height to reach this state
  Energy H{};
  int parent = -1;
  Move via{};
  bool popped = false;
};

}  // namespace detail

// Best-first search minimizing the max-energy-along-path key, exact energies
// throughout. Ties are broken by state energy, then canonical encoding order,
// so witnesses are deterministic.
class BottleneckSearch {
 public:
  using TargetPredFn = std::function<bool(const SpinConfig&)>;

  BottleneckSearch(const ModelParams& p, const SpinConfig& start, ExploreBudget budget)
      : p_(p), budget_(std::move(budget)) {
    start_id_ = arena_.intern(start.spins());
    nodes_.resize(1);
    nodes_[0].H = hamiltonian(p, start);
    nodes_[0].ceil = nodes_[0].H;
    push(start_id_);
  }

  // runs until target, exhaustion, or empty frontier
  SearchResult run(const TargetPredFn& target) {
    SearchResult res;
    res.start_energy = nodes_[start_id_].H;
    while (!pq_.empty()) {
      int id = pq_.top().id;
      Energy key = pq_.top().key;
      pq_.pop();
      if (nodes_[id].popped) continue;
      if (!energy_eq(key, nodes_[id].ceil, p_.h)) continue;  // stale entry
      nodes_[id].popped = true;
      ++res.popped;
      SpinConfig sigma(p_.geom, p_.q, arena_.states[id]);
      if (target(sigma)) {
        res.reached = true;
        res.phi = nodes_[id].ceil;
        res.hit_state = sigma;
        res.witness = unwind(id);
        res.visited = arena_.states.size();
        return res;
      }
      expand(id);
      if (arena_.states.size() > budget_.max_states) {
        res.exhausted = true;
        break;
      }
    }
    res.visited = arena_.states.size();
    res.phi = pq_.empty() ? max_popped_ : pq_.top().key;  // lower bound on phi
    return res;
  }

  // states with bottleneck height strictly below `ceiling` that were popped;
  // after a successful run with ceiling = phi this is the initial cycle
  std::vector<SpinConfig> popped_below(const Energy& ceiling) const {
    std::vector<SpinConfig> out;
    for (size_t id = 0; id < nodes_.size(); ++id)
      if (nodes_[id].popped && energy_less(nodes_[id].ceil, ceiling, p_.h))
        out.emplace_back(p_.geom, p_.q, arena_.states[id]);
    return out;
  }

  std::size_t size() const { return arena_.states.size(); }

 private:
  struct Entry {
    Energy key;
    int id;
  };
  struct EntryCmp {
    BottleneckSearch* s;
    bool operator()(const Entry& a, const Entry& b) const {  // min-heap
      int c = energy_cmp(a.key, b.key, s->p_.h);
      if (c != 0) return c > 0;
      c = energy_cmp(s->nodes_[a.id].H, s->nodes_[b.id].H, s->p_.h);
      if (c != 0) return c > 0;
      return encoding_less(s->arena_.states[b.id], s->arena_.states[a.id]);
    }
  };

  void push(int id) { pq_.push(Entry{nodes_[id].ceil, id}); }

  void expand(int id) {
    max_popped_ = nodes_[id].ceil;
    std::vector<Spin> sp = arena_.states[id];  // copy; arena may reallocate
    const Energy baseH = nodes_[id].H;
    const Energy baseCeil = nodes_[id].ceil;
    for (int v = 0; v < p_.sites(); ++v) {
      for (Spin s = 1; (int)s <= p_.q; ++s) {
        if (s == sp[v] || !budget_.allows(s)) continue;
        Energy childH = baseH + energy_delta(p_, sp, v, s);
        Energy childCeil = energy_less(baseCeil, childH, p_.h) ? childH : baseCeil;
        if (budget_.energy_ceiling && energy_less(*budget_.energy_ceiling, childCeil, p_.h))
          continue;
        Spin old = sp[v];
        sp[v] = s;
        int cid = arena_.intern(sp);
        sp[v] = old;
        if (cid >= (int)nodes_.size()) nodes_.resize(cid + 1);
        auto& node = nodes_[cid];
        bool fresh = node.parent == -1 && cid != start_id_;
        if (fresh || (!node.popped && energy_less(childCeil, node.ceil, p_.h))) {
          node.H = childH;
          node.ceil = childCeil;
          node.parent = id;
          node.via = Move{p_.geom.vertex(v), s};
          push(cid);
        }
      }
    }
  }

  std::vector<Move> unwind(int id) const {
    std::vector<Move> moves;
    for (int cur = id; cur != start_id_; cur = nodes_[cur].parent) moves.push_back(nodes_[cur].via);
    std::reverse(moves.begin(), moves.end());
    return moves;
  }

  ModelParams p_;
  ExploreBudget budget_;
  detail::StateArena arena_;
  std::vector<detail::SearchNode> nodes_;
  int start_id_ = -1;
  Energy max_popped_{};
  std::priority_queue<Entry, std::vector<Entry>, EntryCmp> pq_{EntryCmp{this}};
};

inline SearchResult bottleneck_phi(const ModelParams& p, const SpinConfig& start,
                                   const BottleneckSearch::TargetPredFn& target,
                                   const ExploreBudget& budget) {
  BottleneckSearch search(p, start, budget);
  return search.run(target);
}

// stability level V_sigma = Phi(sigma, {H < H(sigma)}) - H(sigma)
struct StabilityResult {
  bool found = false;      // a strictly lower state was reached
  bool exhausted = false;
  Energy V{};              // valid when found
  SpinConfig lower_state;
  std::vector<Move> witness;
};

inline StabilityResult stability_level(const ModelParams& p, const SpinConfig& sigma,
                                       const ExploreBudget& budget) {
  Energy H0 = hamiltonian(p, sigma);
  auto target = [&](const SpinConfig& x) { return energy_less(hamiltonian(p, x), H0, p.h); };
  auto res = bottleneck_phi(p, sigma, target, budget);
  StabilityResult out;
  out.exhausted = res.exhausted;
  out.found = res.reached;
  if (res.reached) {
    out.V = res.phi - H0;
    out.lower_state = res.hit_state;
    out.witness = std::move(res.witness);
  }
  return out;
}

// initial cycle for the transition sigma -> target set:
// {sigma} + {eta : Phi(sigma,eta) - H(sigma) < Gamma(sigma, target)}
struct InitialCycleResult {
  bool reached = false;
  bool exhausted = false;
  Energy gamma{};           // Phi - H(sigma)
  Energy ceiling{};         // absolute Phi
  std::vector<SpinConfig> members;  // materialized when small enough
  std::size_t member_count = 0;
};

inline InitialCycleResult initial_cycle(const ModelParams& p, const SpinConfig& sigma,
                                        const BottleneckSearch::TargetPredFn& target,
                                        const ExploreBudget& budget,
                                        std::size_t materialize_cap = 1'000'000) {
  InitialCycleResult out;
  if (target(sigma)) {  // trivial: the cycle is {sigma}
    out.reached = true;
    out.gamma = Energy{0, 0};
    out.ceiling = hamiltonian(p, sigma);
    out.members = {sigma};
    out.member_count = 1;
    return out;
  }
  BottleneckSearch search(p, sigma, budget);
  auto res = search.run(target);
  out.reached = res.reached;
  out.exhausted = res.exhausted;
  if (!res.reached) return out;
  out.ceiling = res.phi;
  out.gamma = res.phi - res.start_energy;
  out.members = search.popped_below(res.phi);
  out.member_count = out.members.size();
  if (out.members.size() > materialize_cap) out.members.clear();
  return out;
}

// ---------------------------------------------------------------------------
// cycle flooding
// ---------------------------------------------------------------------------

struct CycleReport {
  SpinConfig seed;
  bool trivial = false;        // {seed} with a strictly lower neighbor
  bool plateau = false;        // bottom is a multi-state plateau
  bool exhausted = false;
  std::size_t member_count = 0;
  Energy bottom_energy{};
  Energy exit_height{};        // H(F(boundary))
  Energy depth{};              // exit - bottom
  std::vector<SpinConfig> bottom;              // F(C), capped
  std::vector<SpinConfig> principal_boundary;  // B(C)
  std::vector<SpinConfig> np_boundary_sample;  // a few higher boundary states
  std::vector<SpinConfig> members;             // capped
};

// Floods the connected sublevel set around `seed`, raising the threshold one
// exact energy level at a time, until the boundary admits a strictly lower
// exit. Equal-energy plateaus are absorbed atomically.
inline CycleReport flood_cycle(const ModelParams& p, const SpinConfig& seed,
                               const ExploreBudget& budget,
                               std::size_t member_cap = 100'000) {
  CycleReport rep;
  rep.seed = seed;
  const Energy H0 = hamiltonian(p, seed);
  rep.bottom_energy = H0;

  detail::StateArena arena;
  enum Status : char { Unknown = 0, InC = 1, InFrontier = 2 };
  std::vector<char> status;
  std::vector<Energy> energy;
  auto get = [&](const std::vector<Spin>& sp, const Energy& H) {
    int id = arena.intern(sp);
    if (id >= (int)status.size()) {
      status.resize(id + 1, Unknown);
      energy.resize(id + 1, Energy{});
      energy[id] = H;
    }
    return id;
  };

  struct Entry {
    Energy H;
    int id;
  };
  auto cmp = [&](const Entry& a, const Entry& b) {
    int c = energy_cmp(a.H, b.H, p.h);
    if (c != 0) return c > 0;
    return encoding_less(arena.states[b.id], arena.states[a.id]);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> frontier(cmp);

  std::vector<int> members;
  auto expand_neighbors = [&](int id, auto&& on_nbr) {
    std::vector<Spin> sp = arena.states[id];
    Energy H = energy[id];
    for (int v = 0; v < p.sites(); ++v) {
      for (Spin s = 1; (int)s <= p.q; ++s) {
        if (s == sp[v] || !budget.allows(s)) continue;
        Energy childH = H + energy_delta(p, sp, v, s);
        Spin old = sp[v];
        sp[v] = s;
        int cid = get(sp, childH);
        sp[v] = old;
        on_nbr(cid, childH);
      }
    }
  };

  // absorb the seed plateau; a strictly lower neighbor makes {seed} trivial
  int seed_id = get(seed.spins(), H0);
  status[seed_id] = InC;
  members.push_back(seed_id);
  bool lower_found = false;
  std::vector<int> plateau_queue{seed_id};
  while (!plateau_queue.empty() && !lower_found) {
    int id = plateau_queue.back();
    plateau_queue.pop_back();
    expand_neighbors(id, [&](int cid, const Energy& Hc) {
      if (lower_found) return;
      if (energy_less(Hc, H0, p.h)) {
        lower_found = true;
        return;
      }
      if (energy_eq(Hc, H0, p.h)) {
        if (status[cid] != InC) {
          status[cid] = InC;
          members.push_back(cid);
          plateau_queue.push_back(cid);
        }
      } else if (status[cid] == Unknown) {
        status[cid] = InFrontier;
        frontier.push(Entry{Hc, cid});
      }
    });
  }
  if (lower_found) {
    rep.trivial = true;
    rep.member_count = 1;
    rep.depth = Energy{0, 0};
    rep.members = {seed};
    rep.bottom = {seed};
    // B({seed}) = strictly lower single-flip neighbors of the seed itself
    std::vector<Spin> sp = seed.spins();
    for (int v = 0; v < p.sites(); ++v)
      for (Spin s = 1; (int)s <= p.q; ++s) {
        if (s == sp[v] || !budget.allows(s)) continue;
        Energy Hc = H0 + energy_delta(p, sp, v, s);
        if (energy_less(Hc, H0, p.h)) {
          Spin old = sp[v];
          sp[v] = s;
          rep.principal_boundary.emplace_back(p.geom, p.q, sp);
          sp[v] = old;
        }
      }
    return rep;
  }
  rep.plateau = members.size() > 1;

  while (true) {
    if (frontier.empty()) break;  // whole (sub)space flooded; no exit
    if (arena.states.size() > budget.max_states) {
      rep.exhausted = true;
      break;
    }
    Energy level = frontier.top().H;
    // gather the full boundary level set
    std::vector<int> level_states;
    while (!frontier.empty() && energy_eq(frontier.top().H, level, p.h)) {
      level_states.push_back(frontier.top().id);
      frontier.pop();
    }
    // tentative flood through {H <= level} starting from the level set;
    // frontier pushes are buffered so an aborted expansion leaves no junk
    std::vector<int> gained = level_states;
    std::vector<int> queue = level_states;
    std::vector<std::pair<int, Energy>> pending;
    bool exit_below = false;
    std::vector<char> gained_mark(arena.states.size(), 0);
    for (int id : level_states) gained_mark[id] = 1;
    while (!queue.empty() && !exit_below) {
      int id = queue.back();
      queue.pop_back();
      expand_neighbors(id, [&](int cid, const Energy& Hc) {
        if (exit_below) return;
        if (energy_less(Hc, H0, p.h)) {
          exit_below = true;
          return;
        }
        if ((int)gained_mark.size() <= cid) gained_mark.resize(cid + 1, 0);
        if (status[cid] == InC || gained_mark[cid]) return;
        if (energy_cmp(Hc, level, p.h) <= 0) {
          gained_mark[cid] = 1;
          gained.push_back(cid);
          queue.push_back(cid);
        } else if (status[cid] == Unknown) {
          gained_mark[cid] = 1;  // dedupe pending pushes
          pending.emplace_back(cid, Hc);
        }
      });
      if (arena.states.size() > budget.max_states) {
        rep.exhausted = true;
        break;
      }
    }
    if (exit_below) {
      rep.exit_height = level;
      rep.depth = level - H0;
      for (int id : level_states)
        rep.principal_boundary.emplace_back(p.geom, p.q, arena.states[id]);
      // a few strictly higher boundary states
      while (!frontier.empty() && rep.np_boundary_sample.size() < 64) {
        rep.np_boundary_sample.emplace_back(p.geom, p.q, arena.states[frontier.top().id]);
        frontier.pop();
      }
      break;
    }
    for (int id : gained) {
      status[id] = InC;
      members.push_back(id);
    }
    for (auto& [id, Hc] : pending) {
      status[id] = InFrontier;
      frontier.push(Entry{Hc, id});
    }
    if (rep.exhausted) break;
  }

  rep.member_count = members.size();
  for (int id : members) {
    if (rep.members.size() < member_cap) rep.members.emplace_back(p.geom, p.q, arena.states[id]);
    if (energy_eq(energy[id], H0, p.h)) rep.bottom.emplace_back(p.geom, p.q, arena.states[id]);
  }
  return rep;
}

}  // namespace potts
