#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "potts/energy.hpp"
#include "potts/lattice.hpp"

namespace potts {

// Full-enumeration energy landscape for tiny instances. States are handled
// by their canonical base-q codes. Everything below is exact: energies are
// (int, int*h) pairs and comparisons never see float ties.
class ExactOracle {
 public:
  using Code = std::uint64_t;

  explicit ExactOracle(const ModelParams& p, Code cap = 2'000'000) : p_(p) {
    double logn = p.sites() * std::log((double)p.q);
    if (logn > std::log((double)cap) + 1e-9)
      throw std::invalid_argument("ExactOracle: q^(K*L) exceeds the enumeration cap");
    n_ = 1;
    for (int i = 0; i < p.sites(); ++i) n_ *= p.q;
    pow_.assign(p.sites() + 1, 1);
    for (int i = 0; i < p.sites(); ++i) pow_[i + 1] = pow_[i] * p.q;
    H_.resize(n_);
    for (Code c = 0; c < n_; ++c) {
      SpinConfig sigma = decode(c, p.geom, p.q);
      Energy e = hamiltonian(p, sigma);
      H_[c] = {(std::int32_t)e.a, (std::int32_t)e.b};
    }
    run_watershed();
  }

  Code size() const { return n_; }
  const ModelParams& params() const { return p_; }

  Energy H(Code c) const { return Energy{H_[c].a, H_[c].b}; }

  template <typename F>
  void for_each_neighbor(Code c, F&& f) const {
    for (int v = 0; v < p_.sites(); ++v) {
      Code digit = (c / pow_[v]) % p_.q;
      Code base = c - digit * pow_[v];
      for (Code s = 0; s < (Code)p_.q; ++s)
        if (s != digit) f(base + s * pow_[v]);
    }
  }

  std::vector<Code> stable_states() const { return xs_; }

  // metastable set: maximal finite stability level
  std::vector<Code> metastable_states() const { return xm_; }
  Energy gamma_m() const { return gamma_m_; }

  // stability level; nullopt for the global minima (V = infinity)
  std::optional<Energy> V(Code c) const {
    if (!v_resolved_[c]) return std::nullopt;
    return Energy{v_level_[c].a, v_level_[c].b} - H(c);
  }

  // Gamma(c, X^s) = Phi(c, X^s) - H(c)
  Energy gamma_to_stable(Code c) const { return Energy{phi_level_[c].a, phi_level_[c].b} - H(c); }
  Energy phi_to_stable(Code c) const { return Energy{phi_level_[c].a, phi_level_[c].b}; }

  // maximum depth of a cycle avoiding the stable set, from the merge events
  Energy gamma_tilde_cycles() const { return gamma_tilde_; }
  // the same quantity through the max-initial-barrier identity
  Energy gamma_tilde_identity() const {
    Energy best{0, 0};
    bool first = true;
    for (Code c = 0; c < n_; ++c) {
      if (is_stable_[c]) continue;
      Energy g = gamma_to_stable(c);
      if (first || energy_less(best, g, p_.h)) best = g, first = false;
    }
    return best;
  }

  // communication height between two states (bottleneck Dijkstra)
  Energy phi(Code a, Code b) const {
    std::vector<char> popped(n_, 0);
    std::vector<char> seen(n_, 0);
    std::vector<E32> key(n_);
    auto cmp = [&](Code x, Code y) {
      int c = energy_cmp(Energy{key[x].a, key[x].b}, Energy{key[y].a, key[y].b}, p_.h);
      if (c != 0) return c > 0;
      return x > y;
    };
    std::priority_queue<Code, std::vector<Code>, decltype(cmp)> pq(cmp);
    key[a] = H_[a];
    seen[a] = 1;
    pq.push(a);
    while (!pq.empty()) {
      Code x = pq.top();
      pq.pop();
      if (popped[x]) continue;
      popped[x] = 1;
      if (x == b) return Energy{key[x].a, key[x].b};
      for_each_neighbor(x, [&](Code y) {
        auto yH = Energy{H_[y].a, H_[y].b};
        Energy k = Energy{key[x].a, key[x].b};
        if (energy_less(k, yH, p_.h)) k = yH;
        if (!seen[y] || energy_less(k, Energy{key[y].a, key[y].b}, p_.h)) {
          if (!popped[y]) {
            key[y] = {(std::int32_t)k.a, (std::int32_t)k.b};
            seen[y] = 1;
            pq.push(y);
          }
        }
      });
    }
    throw std::logic_error("phi: target unreachable");
  }

  // minimal saddles: states at level Phi(a,b) inside the {H <= Phi} component
  std::vector<Code> saddles(Code a, Code b) const {
    Energy F = phi(a, b);
    std::vector<Code> out;
    auto comp = component(a, F, /*strict=*/false);
    for (Code c : comp)
      if (energy_eq(H(c), F, p_.h)) out.push_back(c);
    return out;
  }

  // initial cycle {a} + {x : Phi(a,x) < ceiling}; the component of a
  // below the ceiling
  std::vector<Code> initial_cycle_members(Code a, const Energy& ceiling) const {
    auto comp = component(a, ceiling, /*strict=*/true);
    comp.push_back(a);
    std::sort(comp.begin(), comp.end());
    comp.erase(std::unique(comp.begin(), comp.end()), comp.end());
    return comp;
  }

  // maximal cycle whose bottom is eta's level set: component of eta in
  // {H < H(eta) + V(eta)}; for global minima the whole space qualifies
  std::vector<Code> maximal_cycle(Code eta) const {
    auto v = V(eta);
    if (!v) throw std::invalid_argument("maximal_cycle: eta is a global minimum");
    Energy ceiling = H(eta) + *v;
    return component(eta, ceiling, /*strict=*/true);
  }

  // connected component of `from` within {H <= bound} (or strict)
  std::vector<Code> component(Code from, const Energy& bound, bool strict) const {
    auto ok = [&](Code c) {
      int cmp = energy_cmp(H(c), bound, p_.h);
      return strict ? cmp < 0 : cmp <= 0;
    };
    std::vector<Code> out;
    if (!ok(from)) return out;
    std::vector<char> seen(n_, 0);
    std::vector<Code> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
      Code x = stack.back();
      stack.pop_back();
      out.push_back(x);
      for_each_neighbor(x, [&](Code y) {
        if (!seen[y] && ok(y)) {
          seen[y] = 1;
          stack.push_back(y);
        }
      });
    }
    return out;
  }

  // is W a gate for a -> b: does removing W disconnect a from b in {H <= Phi}?
  bool is_gate(Code a, Code b, const std::vector<Code>& W) const {
    Energy F = phi(a, b);
    std::vector<char> blocked(n_, 0);
    for (Code w : W) blocked[w] = 1;
    if (blocked[a] || blocked[b]) return true;
    std::vector<char> seen(n_, 0);
    std::vector<Code> stack{a};
    seen[a] = 1;
    while (!stack.empty()) {
      Code x = stack.back();
      stack.pop_back();
      if (x == b) return false;
      for_each_neighbor(x, [&](Code y) {
        if (!seen[y] && !blocked[y] && energy_cmp(H(y), F, p_.h) <= 0) {
          seen[y] = 1;
          stack.push_back(y);
        }
      });
    }
    return true;
  }

  struct EssentialResult {
    std::vector<Code> saddles;            // all minimal saddles
    std::vector<char> essential;          // parallel to saddles
    std::vector<char> known;              // false where the cap was hit
    bool complete = true;
  };

  // Essential saddles = union of inclusion-minimal saddle sets that connect
  // a to b through strictly-lower components. Minimal sets are the chordless
  // terminal-to-terminal paths in the saddle adjacency graph; the DFS is
  // capped because the enumeration can blow up.
  EssentialResult essential_saddles(Code a, Code b, std::size_t expansion_cap = (1u << 20)) const {
    Energy F = phi(a, b);
    EssentialResult res;
    res.saddles = saddles(a, b);
    const int ns = (int)res.saddles.size();
    res.essential.assign(ns, 0);
    res.known.assign(ns, 1);

    // label strictly-below components
    std::vector<std::int32_t> below(n_, -1);
    std::int32_t nlabels = 0;
    for (Code c = 0; c < n_; ++c) {
      if (below[c] >= 0 || energy_cmp(H(c), F, p_.h) >= 0) continue;
      std::vector<Code> stack{c};
      below[c] = nlabels;
      while (!stack.empty()) {
        Code x = stack.back();
        stack.pop_back();
        for_each_neighbor(x, [&](Code y) {
          if (below[y] < 0 && energy_cmp(H(y), F, p_.h) < 0) {
            below[y] = nlabels;
            stack.push_back(y);
          }
        });
      }
      ++nlabels;
    }
    if (energy_cmp(H(a), F, p_.h) >= 0 || energy_cmp(H(b), F, p_.h) >= 0)
      throw std::invalid_argument("essential_saddles: endpoints must lie below the saddle level");
    const std::int32_t A = below[a], B = below[b];

    std::vector<std::int32_t> sidx(n_, -1);
    for (int i = 0; i < ns; ++i) sidx[res.saddles[i]] = i;

    // adjacency: saddle-saddle (direct or via a shared below-component),
    // saddle-terminal via the component labels
    std::vector<std::vector<std::int32_t>> comps_of(ns);
    std::vector<std::vector<std::int32_t>> adj(ns);
    std::vector<char> touchesA(ns, 0), touchesB(ns, 0);
    for (int i = 0; i < ns; ++i) {
      for_each_neighbor(res.saddles[i], [&](Code y) {
        if (sidx[y] >= 0) adj[i].push_back(sidx[y]);
        else if (below[y] >= 0) comps_of[i].push_back(below[y]);
      });
      auto& v = comps_of[i];
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      for (auto l : v) {
        touchesA[i] |= l == A;
        touchesB[i] |= l == B;
      }
    }
    std::vector<std::vector<std::int32_t>> by_comp(nlabels);
    for (int i = 0; i < ns; ++i)
      for (auto l : comps_of[i]) by_comp[l].push_back(i);
    auto linked = [&](int i, int j) {
      for (int k : adj[i])
        if (k == j) return true;
      // shared below-component
      size_t pi = 0, pj = 0;
      while (pi < comps_of[i].size() && pj < comps_of[j].size()) {
        if (comps_of[i][pi] == comps_of[j][pj]) return true;
        comps_of[i][pi] < comps_of[j][pj] ? ++pi : ++pj;
      }
      return false;
    };

    // DFS over chordless A-B paths
    std::size_t expansions = 0;
    bool capped = false;
    std::vector<std::int32_t> path;
    std::vector<char> on_path(ns, 0);
    std::function<void(int)> dfs = [&](int tail) {
      if (capped) return;
      if (++expansions > expansion_cap) {
        capped = true;
        return;
      }
      if (touchesB[tail]) {
        for (auto i : path) res.essential[i] = 1;
        return;  // extending past B would put a chord on the path
      }
      // candidate successors: linked to tail, chordless w.r.t. the rest
      for (int cand = 0; cand < ns; ++cand) {
        if (on_path[cand] || cand == tail || !linked(tail, cand)) continue;
        if (touchesA[cand]) continue;  // chord back to terminal A
        bool chord = false;
        for (auto i : path)
          if (i != tail && linked(cand, i)) {
            chord = true;
            break;
          }
        if (chord) continue;
        path.push_back(cand);
        on_path[cand] = 1;
        dfs(cand);
        on_path[cand] = 0;
        path.pop_back();
        if (capped) return;
      }
    };
    for (int s0 = 0; s0 < ns && !capped; ++s0) {
      if (!touchesA[s0]) continue;
      path = {s0};
      on_path[s0] = 1;
      dfs(s0);
      on_path[s0] = 0;
    }
    if (capped) {
      res.complete = false;
      for (int i = 0; i < ns; ++i)
        if (!res.essential[i]) res.known[i] = 0;  // may still be essential
    }
    return res;
  }

 private:
  struct E32 {
    std::int32_t a = 0, b = 0;
  };

  void run_watershed() {
    std::vector<Code> order(n_);
    for (Code c = 0; c < n_; ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](Code x, Code y) {
      int c = energy_cmp(Energy{H_[x].a, H_[x].b}, Energy{H_[y].a, H_[y].b}, p_.h);
      if (c != 0) return c < 0;
      return x < y;
    });

    parent_.assign(n_, -1);
    bottom_.assign(n_, E32{});
    has_min_.assign(n_, 0);
    head_.assign(n_, UINT64_MAX);     // unresolved-list head per root
    utail_.assign(n_, UINT64_MAX);
    unext_.assign(n_, UINT64_MAX);    // unresolved-list links
    mhead_.assign(n_, UINT64_MAX);    // member-list head per root (for phi)
    mtail_.assign(n_, UINT64_MAX);
    mnext_.assign(n_, UINT64_MAX);
    v_resolved_.assign(n_, 0);
    v_level_.assign(n_, E32{});
    phi_level_.assign(n_, E32{});
    phi_assigned_.assign(n_, 0);
    is_stable_.assign(n_, 0);
    std::vector<char> processed(n_, 0);

    Energy hmin = Energy{H_[order[0]].a, H_[order[0]].b};
    for (Code c : order) {
      if (!energy_eq(Energy{H_[c].a, H_[c].b}, hmin, p_.h)) break;
      is_stable_[c] = 1;
      xs_.push_back(c);
    }

    gamma_tilde_ = Energy{0, 0};
    bool gt_set = false;

    for (Code x : order) {
      Energy e{H_[x].a, H_[x].b};
      parent_[x] = (std::int64_t)x;
      bottom_[x] = H_[x];
      has_min_[x] = is_stable_[x];
      head_[x] = x;  // x starts unresolved
      utail_[x] = x;
      unext_[x] = UINT64_MAX;
      mhead_[x] = x;
      mtail_[x] = x;
      mnext_[x] = UINT64_MAX;
      processed[x] = 1;
      if (is_stable_[x]) {
        phi_level_[x] = H_[x];
        phi_assigned_[x] = 1;
      }
      for_each_neighbor(x, [&](Code y) {
        if (!processed[y]) return;
        merge(find(x), find(y), e, gt_set);
      });
      // x resolved on the spot if its component already dips lower
      Code r = find(x);
      if (energy_less(Energy{bottom_[r].a, bottom_[r].b}, e, p_.h)) resolve_list_of(x, r, e);
      if (has_min_[r] && !phi_assigned_[x]) {
        phi_level_[x] = {(std::int32_t)e.a, (std::int32_t)e.b};
        phi_assigned_[x] = 1;
      }
    }

    // stability-level table and the metastable set
    Energy best{0, 0};
    bool first = true;
    for (Code c = 0; c < n_; ++c) {
      if (!v_resolved_[c]) continue;  // global minima keep V = infinity
      Energy v = Energy{v_level_[c].a, v_level_[c].b} - Energy{H_[c].a, H_[c].b};
      if (first || energy_less(best, v, p_.h)) {
        best = v;
        first = false;
        xm_.assign(1, c);
      } else if (energy_eq(best, v, p_.h)) {
        xm_.push_back(c);
      }
    }
    gamma_m_ = best;
  }

  Code find(Code x) const {
    while ((Code)parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = (Code)parent_[x];
    }
    return x;
  }

  void resolve_list_of(Code state, Code root, const Energy& e) {
    // resolve just this state (it was appended to the root list on creation)
    if (!v_resolved_[state]) {
      v_resolved_[state] = 1;
      v_level_[state] = {(std::int32_t)e.a, (std::int32_t)e.b};
      // unlink lazily: leave the list alone, resolution flag suffices
    }
    (void)root;
  }

  void merge(Code rx, Code ry, const Energy& e, bool& gt_set) {
    rx = find(rx);
    ry = find(ry);
    if (rx == ry) return;
    Energy bx{bottom_[rx].a, bottom_[rx].b}, by{bottom_[ry].a, bottom_[ry].b};

    // resolve the unresolved states of the component whose bottom loses
    auto resolve_all = [&](Code r) {
      for (Code u = head_[r]; u != UINT64_MAX; u = unext_[u]) {
        if (!v_resolved_[u]) {
          v_resolved_[u] = 1;
          v_level_[u] = {(std::int32_t)e.a, (std::int32_t)e.b};
        }
      }
      head_[r] = UINT64_MAX;
    };
    int bc = energy_cmp(bx, by, p_.h);
    if (bc < 0) resolve_all(ry);
    else if (bc > 0) resolve_all(rx);

    // phi to the stable set: the non-main side gets assigned at this level
    auto assign_phi = [&](Code r) {
      for (Code u = mhead_[r]; u != UINT64_MAX; u = mnext_[u]) {
        if (!phi_assigned_[u]) {
          phi_level_[u] = {(std::int32_t)e.a, (std::int32_t)e.b};
          phi_assigned_[u] = 1;
        }
      }
    };
    if (has_min_[rx] && !has_min_[ry]) {
      assign_phi(ry);
      Energy depth = e - by;
      if (!gt_set || energy_less(gamma_tilde_, depth, p_.h)) gamma_tilde_ = depth, gt_set = true;
    } else if (has_min_[ry] && !has_min_[rx]) {
      assign_phi(rx);
      Energy depth = e - bx;
      if (!gt_set || energy_less(gamma_tilde_, depth, p_.h)) gamma_tilde_ = depth, gt_set = true;
    }

    // union (splice lists in O(1), keep the lower bottom)
    parent_[ry] = (std::int64_t)rx;
    if (bc > 0) bottom_[rx] = bottom_[ry];
    has_min_[rx] = has_min_[rx] || has_min_[ry];
    if (head_[rx] == UINT64_MAX) {
      head_[rx] = head_[ry];
      utail_[rx] = utail_[ry];
    } else if (head_[ry] != UINT64_MAX) {
      unext_[utail_[rx]] = head_[ry];
      utail_[rx] = utail_[ry];
    }
    if (mhead_[rx] == UINT64_MAX) {
      mhead_[rx] = mhead_[ry];
      mtail_[rx] = mtail_[ry];
    } else if (mhead_[ry] != UINT64_MAX) {
      mnext_[mtail_[rx]] = mhead_[ry];
      mtail_[rx] = mtail_[ry];
    }
  }

  ModelParams p_;
  Code n_ = 0;
  std::vector<Code> pow_;
  std::vector<E32> H_;

  mutable std::vector<std::int64_t> parent_;
  std::vector<E32> bottom_;
  std::vector<char> has_min_;
  std::vector<Code> head_, utail_, unext_, mhead_, mtail_, mnext_;
  std::vector<char> v_resolved_;
  std::vector<E32> v_level_;
  std::vector<E32> phi_level_;
  std::vector<char> phi_assigned_;
  std::vector<char> is_stable_;
  std::vector<Code> xs_, xm_;
  Energy gamma_m_{};
  Energy gamma_tilde_{};
};

}  // namespace potts
