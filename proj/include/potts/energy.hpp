#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "potts/lattice.hpp"

namespace potts {

// Energies are affine in the field: value = a + b*h with integer a, b
// (a counts edges, b counts spin-1 sites). Comparisons are exact for the
// double h actually in use, so level sets and ties are decided without
// float noise: sign(da + db*h) = sign(da * 2^(53-e) + db * mant(h)).
struct Energy {
  std::int64_t a = 0;
  std::int64_t b = 0;

  Energy operator+(const Energy& o) const { return {a + o.a, b + o.b}; }
  Energy operator-(const Energy& o) const { return {a - o.a, b - o.b}; }
  Energy operator-() const { return {-a, -b}; }
  friend bool operator==(const Energy&, const Energy&) = default;

  double value(double h) const { return double(a) + double(b) * h; }
};

namespace detail {
struct FieldRep {
  std::int64_t mant = 0;  // 53-bit significand of h
  int shift = 0;          // h = mant * 2^-shift
};
inline FieldRep field_rep(double h) {
  int e = 0;
  double f = std::frexp(h, &e);  // h = f * 2^e, f in [0.5, 1)
  FieldRep r;
  r.mant = (std::int64_t)std::ldexp(f, 53);
  r.shift = 53 - e;
  return r;
}
}  // namespace detail

// sign of (x.a - y.a) + (x.b - y.b) * h, computed exactly
inline int energy_cmp(const Energy& x, const Energy& y, double h) {
  auto r = detail::field_rep(h);
  __int128 da = x.a - y.a;
  __int128 db = x.b - y.b;
  if (r.shift > 100) {  // absurdly small h; fall back to long double
    long double v = (long double)(x.a - y.a) + (long double)(x.b - y.b) * (long double)h;
    return v < 0 ? -1 : (v > 0 ? 1 : 0);
  }
  __int128 s = da * (((__int128)1) << r.shift) + db * (__int128)r.mant;
  return s < 0 ? -1 : (s > 0 ? 1 : 0);
}
inline bool energy_less(const Energy& x, const Energy& y, double h) { return energy_cmp(x, y, h) < 0; }
inline bool energy_eq(const Energy& x, const Energy& y, double h) { return energy_cmp(x, y, h) == 0; }

struct ModelParams {
  int q = 3;
  LatticeGeom geom;
  double h = 0.9;
  // J = 1 throughout

  bool unsafe = false;             // constructed with --unsafe-params
  bool assumption_ok = true;       // 0<h<1 and 2/h not an integer
  bool size_assumption_ok = true;  // L >= K >= 3*ell_star (flag only, never an error)

  ModelParams() = default;
  ModelParams(int q_, LatticeGeom g, double h_, bool allow_unsafe = false)
      : q(q_), geom(g), h(h_), unsafe(allow_unsafe) {
    if (q <= 2) throw std::invalid_argument("ModelParams: need q > 2");
    assumption_ok = (h > 0.0 && h < 1.0);
    if (assumption_ok) {
      double ratio = 2.0 / h;
      assumption_ok = std::fabs(ratio - std::llround(ratio)) > 1e-9;
    }
    if (!assumption_ok && !allow_unsafe)
      throw std::invalid_argument("ModelParams: field must satisfy 0<h<1 with 2/h not integer "
                                  "(use unsafe mode to override)");
    if (assumption_ok) size_assumption_ok = geom.K >= 3 * ell_star();
  }

  int sites() const { return geom.sites(); }

  // critical droplet side, ceil(2/h)
  int ell_star() const { return (int)std::ceil(2.0 / h); }
  // critical droplet area, l*(l*-1)+1
  int k_star() const { int l = ell_star(); return l * (l - 1) + 1; }
  // Gamma = 4*l* - h*k* as an exact energy difference
  Energy gamma_m() const { return Energy{4 * (std::int64_t)ell_star(), -(std::int64_t)k_star()}; }
};

// standalone form used by the CLI; same formula as ModelParams::ell_star
inline int critical_length(double h) {
  if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("critical_length: need 0 < h < 1");
  double ratio = 2.0 / h;
  if (std::fabs(ratio - std::llround(ratio)) <= 1e-9)
    throw std::invalid_argument("critical_length: 2/h must not be an integer");
  return (int)std::ceil(ratio);
}

inline int count_spins(const SpinConfig& sigma, Spin s) {
  int n = 0;
  for (Spin x : sigma.spins()) n += (x == s);
  return n;
}

// H = -(# agreeing edges) - h*N_1
inline Energy hamiltonian(const ModelParams& p, const SpinConfig& sigma) {
  if (!(sigma.geom() == p.geom) || sigma.q() != p.q)
    throw std::invalid_argument("hamiltonian: config does not match params");
  const auto& g = p.geom;
  const auto& sp = sigma.spins();
  std::int64_t agree = 0;
  for (int i = 0; i < g.sites(); ++i) {
    agree += sp[i] == sp[g.right(i)];
    agree += sp[i] == sp[g.down(i)];
  }
  return Energy{-agree, -(std::int64_t)count_spins(sigma, 1)};
}

// Local energy difference for flipping vertex v to s (three-case rule):
// (n_c - n_s) + h*(1{c=1} - 1{s=1}) with c the current spin.
inline Energy energy_delta(const ModelParams& p, const std::vector<Spin>& spins, int idx, Spin s) {
  const Spin c = spins[idx];
  auto nb = p.geom.neighbor_indices(idx);
  int nc = 0, ns = 0;
  for (int j : nb) {
    nc += spins[j] == c;
    ns += spins[j] == s;
  }
  return Energy{nc - ns, (c == 1) - (s == 1)};
}

inline Energy energy_delta(const ModelParams& p, const SpinConfig& sigma, const Move& m) {
  if (sigma.at(m.vertex) == m.new_spin) throw std::invalid_argument("energy_delta: no-op move");
  return energy_delta(p, sigma.spins(), p.geom.index(m.vertex), m.new_spin);
}

// H(sigma) - H(bold m) written as d_v + d_h - h*N_1; evaluated via the
// disagreeing-edge count, deliberately a different route than hamiltonian().
inline Energy energy_gap_vs_monochrome(const ModelParams& p, const SpinConfig& sigma, Spin m) {
  if (m < 2 || (int)m > p.q) throw std::invalid_argument("energy_gap_vs_monochrome: need 2 <= m <= q");
  const auto& g = p.geom;
  const auto& sp = sigma.spins();
  std::int64_t disagree = 0;
  for (int i = 0; i < g.sites(); ++i) {
    disagree += sp[i] != sp[g.right(i)];
    disagree += sp[i] != sp[g.down(i)];
  }
  return Energy{disagree, -(std::int64_t)count_spins(sigma, 1)};
}

inline double acceptance_prob(double beta, double delta) {
  if (beta < 0) throw std::invalid_argument("acceptance_prob: beta < 0");
  return delta <= 0 ? 1.0 : std::exp(-beta * delta);
}
inline double acceptance_prob(const ModelParams& p, double beta, const Energy& delta) {
  return acceptance_prob(beta, delta.value(p.h));
}

}  // namespace potts
