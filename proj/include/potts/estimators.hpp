#pragma once

#include <atomic>
#include <cmath>
#include <optional>
#include <cstdlib>
#include <thread>
#include <vector>

#include "potts/dynamics.hpp"
#include "potts/energy.hpp"
#include "potts/geometry.hpp"
#include "potts/rng.hpp"

namespace potts {

inline int worker_count() {
  if (const char* env = std::getenv("POTTS_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : (int)hc;
}

// run fn(i) for i in [0,n) on a small pool; fn must only touch slot i
template <typename F>
inline void run_parallel(std::size_t n, F&& fn) {
  int workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// target and observer factories
// ---------------------------------------------------------------------------

inline TargetPred target_state(const SpinConfig& goal) {
  return [goal](const SpinConfig& s) { return s == goal; };
}

inline TargetPred target_monochrome(const ModelParams& p, Spin s) {
  return target_state(monochrome(p.geom, p.q, s));
}

// any monochrome z with z != 1, z != m
inline TargetPred target_other_metastables(const ModelParams& p, Spin m) {
  return [p, m](const SpinConfig& sigma) {
    Spin first = sigma.at(0);
    if (first == 1 || first == m) return false;
    for (Spin x : sigma.spins())
      if (x != first) return false;
    return true;
  };
}

// G = complement of the initial cycle of bold m: exactly the states with
// H >= H(bold m) + Gamma. A state lies outside the cycle iff its own energy
// reaches the ceiling, so the predicate is exact and online. The default
// Gamma is the droplet formula; tiny instances should pass their exact
// stability level instead.
inline TargetPred target_G(const ModelParams& p, Spin m, std::optional<Energy> gamma = {}) {
  Energy ceiling = hamiltonian(p, monochrome(p.geom, p.q, m)) + gamma.value_or(p.gamma_m());
  double h = p.h;
  ModelParams params = p;
  return [params, ceiling, h](const SpinConfig& sigma) {
    return energy_cmp(hamiltonian(params, sigma), ceiling, h) >= 0;
  };
}

inline Observer observer_gate(const ModelParams& p, Spin m) {
  return Observer{"gate_W", [p, m](const SpinConfig& s) { return in_W(p, s, m); }};
}
inline Observer observer_gate_union_others(const ModelParams& p, Spin m) {
  return Observer{"gate_W_union", [p, m](const SpinConfig& s) {
    for (Spin z = 2; (int)z <= p.q; ++z)
      if (z != m && in_W(p, s, z)) return true;
    return false;
  }};
}
inline Observer observer_other_metastable(const ModelParams& p, Spin m) {
  return Observer{"other_metastable", target_other_metastables(p, m)};
}
inline Observer observer_tube_exit(const ModelParams& p, Spin m) {
  return Observer{"tube_exit", [p, m](const SpinConfig& s) { return !in_tube(p, s, m); }};
}
inline Observer observer_habitat_exit(const ModelParams& p, Spin m) {
  Energy ceiling = hamiltonian(p, monochrome(p.geom, p.q, m)) + p.gamma_m();
  return Observer{"habitat_exit", [p, ceiling](const SpinConfig& s) {
    return energy_cmp(hamiltonian(p, s), ceiling, p.h) > 0;
  }};
}

// ---------------------------------------------------------------------------
// hitting-time estimation
// ---------------------------------------------------------------------------

struct HittingEstimate {
  std::vector<std::uint64_t> samples;  // steps of completed runs
  std::size_t n_requested = 0;
  std::size_t n_capped = 0;
  double mean = 0, ci_lo = 0, ci_hi = 0;
  std::vector<RunRecord> records;
};

inline double mean_of(const std::vector<std::uint64_t>& xs) {
  if (xs.empty()) return 0;
  double s = 0;
  for (auto x : xs) s += (double)x;
  return s / xs.size();
}

// percentile bootstrap, 1000 resamples
inline std::pair<double, double> bootstrap_ci(const std::vector<std::uint64_t>& xs,
                                              std::uint64_t seed, int resamples = 1000) {
  if (xs.size() < 2) return {mean_of(xs), mean_of(xs)};
  CounterRng rng(seed, 0xb007);
  std::vector<double> means(resamples);
  for (int r = 0; r < resamples; ++r) {
    double s = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (double)xs[rng.next_below(xs.size())];
    means[r] = s / xs.size();
  }
  std::sort(means.begin(), means.end());
  return {means[(std::size_t)(0.025 * resamples)], means[(std::size_t)(0.975 * resamples)]};
}

inline HittingEstimate estimate_hitting(const ModelParams& p, const SpinConfig& start,
                                        const TargetPred& target, double beta, std::size_t N,
                                        std::uint64_t cap, std::uint64_t seed,
                                        const std::vector<Observer>& observers = {},
                                        bool keep_records = false) {
  HittingEstimate est;
  est.n_requested = N;
  std::vector<RunRecord> recs(N);
  run_parallel(N, [&](std::size_t i) {
    SimConfig cfg;
    cfg.beta = beta;
    cfg.seed = seed;
    cfg.stream_id = i;
    cfg.step_cap = cap;
    cfg.observers = observers;
    recs[i] = kmc_simulate_until(p, start, target, cfg);
  });
  for (auto& r : recs) {
    if (r.capped) ++est.n_capped;
    else est.samples.push_back(r.steps);
  }
  est.mean = mean_of(est.samples);
  auto ci = bootstrap_ci(est.samples, seed);
  est.ci_lo = ci.first;
  est.ci_hi = ci.second;
  if (keep_records) est.records = std::move(recs);
  return est;
}

// ---------------------------------------------------------------------------
// Arrhenius fit
// ---------------------------------------------------------------------------

struct ArrheniusReport {
  std::vector<double> betas;
  std::vector<double> means;
  std::vector<double> ci_lo, ci_hi;
  double slope = 0, intercept = 0, r2 = 0;
};

inline ArrheniusReport arrhenius_fit(const std::vector<double>& betas,
                                     const std::vector<double>& means) {
  if (betas.size() != means.size() || betas.size() < 3)
    throw std::invalid_argument("arrhenius_fit: need >= 3 points");
  for (size_t i = 1; i < betas.size(); ++i)
    if (betas[i] <= betas[i - 1]) throw std::invalid_argument("arrhenius_fit: betas must increase");
  ArrheniusReport rep;
  rep.betas = betas;
  rep.means = means;
  const size_t n = betas.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    double y = std::log(means[i]);
    sx += betas[i];
    sy += y;
    sxx += betas[i] * betas[i];
    sxy += betas[i] * y;
    syy += y * y;
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0) throw std::invalid_argument("arrhenius_fit: degenerate grid");
  rep.slope = (n * sxy - sx * sy) / denom;
  rep.intercept = (sy - rep.slope * sx) / n;
  double sstot = syy - sy * sy / n;
  double ssres = 0;
  for (size_t i = 0; i < n; ++i) {
    double y = std::log(means[i]);
    double f = rep.slope * betas[i] + rep.intercept;
    ssres += (y - f) * (y - f);
  }
  rep.r2 = sstot > 0 ? 1.0 - ssres / sstot : 1.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Exp(1) law
// ---------------------------------------------------------------------------

// KS distance of tau/mean against the unit exponential
inline double exp_law_ks(const std::vector<std::uint64_t>& samples) {
  if (samples.size() < 100) throw std::invalid_argument("exp_law_ks: need >= 100 samples");
  double m = mean_of(samples);
  std::vector<double> xs(samples.begin(), samples.end());
  for (auto& x : xs) x /= m;
  std::sort(xs.begin(), xs.end());
  double d = 0;
  const double n = (double)xs.size();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double F = 1.0 - std::exp(-xs[i]);
    d = std::max(d, std::fabs((i + 1) / n - F));
    d = std::max(d, std::fabs(i / n - F));
  }
  return d;
}

// ---------------------------------------------------------------------------
// crossing statistics
// ---------------------------------------------------------------------------

struct WilsonInterval {
  double p_hat = 0, lo = 0, hi = 0;
};

inline WilsonInterval wilson(std::size_t hits, std::size_t n, double z = 1.959963985) {
  WilsonInterval w;
  if (n == 0) return w;
  double ph = (double)hits / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = ph + z2 / (2.0 * n);
  double rad = z * std::sqrt(ph * (1 - ph) / n + z2 / (4.0 * n * n));
  w.p_hat = ph;
  w.lo = std::max(0.0, (center - rad) / denom);
  w.hi = std::min(1.0, (center + rad) / denom);
  return w;
}

struct CrossingStats {
  std::size_t n_total = 0, n_completed = 0, n_capped = 0;
  std::vector<std::string> names;
  std::vector<std::size_t> hits;  // observer fired before absorption, completed runs
  std::vector<WilsonInterval> intervals;
  std::vector<std::uint64_t> absorption_steps;  // completed runs, for reuse
};

inline CrossingStats crossing_stats(const ModelParams& p, const SpinConfig& start,
                                    const TargetPred& target, double beta, std::size_t N,
                                    std::uint64_t cap, std::uint64_t seed,
                                    const std::vector<Observer>& observers) {
  CrossingStats cs;
  cs.n_total = N;
  for (const auto& o : observers) cs.names.push_back(o.name);
  cs.hits.assign(observers.size(), 0);
  std::vector<RunRecord> recs(N);
  run_parallel(N, [&](std::size_t i) {
    SimConfig cfg;
    cfg.beta = beta;
    cfg.seed = seed;
    cfg.stream_id = i;
    cfg.step_cap = cap;
    cfg.observers = observers;
    recs[i] = kmc_simulate_until(p, start, target, cfg);
  });
  for (auto& r : recs) {
    if (r.capped) {
      ++cs.n_capped;
      continue;
    }
    ++cs.n_completed;
    cs.absorption_steps.push_back(r.steps);
    for (std::size_t k = 0; k < observers.size(); ++k)
      if (r.first_hit[k] >= 0) ++cs.hits[k];
  }
  for (std::size_t k = 0; k < observers.size(); ++k)
    cs.intervals.push_back(wilson(cs.hits[k], cs.n_completed));
  return cs;
}

// ---------------------------------------------------------------------------
// spectral gap and mixing time on tiny instances
// ---------------------------------------------------------------------------

struct SpectralReport {
  double beta = 0;
  double rho = 0;            // 1 - lambda_2
  double gamma_tilde = 0;    // exponent used for the product
  double product = 0;        // rho * exp(beta * gamma_tilde)
  std::uint64_t tmix = 0;    // TV mixing time at eps
  double eps = 0.25;
  double rayleigh_residual = 0;
  double tail_bound_at_tmix = 0;  // rigor guard for the truncated expansion
  int eigenpairs = 0;
  bool converged = false;
};

namespace detail {

struct SymmetrizedChain {
  std::uint64_t n = 0;
  std::vector<double> mu;        // stationary weights, normalized
  std::vector<double> sqrt_mu;   // = phi_1 (unit norm)
  const TransitionMatrix* tm = nullptr;
  std::vector<double> sym_off;   // S_xy aligned with tm->off entries

  void build(const ModelParams& p, double beta, const TransitionMatrix& t) {
    tm = &t;
    n = t.n;
    std::vector<double> Hval(n);
    double hmin = 0;
    bool first = true;
    for (std::uint64_t c = 0; c < n; ++c) {
      Energy e = hamiltonian(p, decode(c, p.geom, p.q));
      Hval[c] = e.value(p.h);
      if (first || Hval[c] < hmin) hmin = Hval[c], first = false;
    }
    mu.assign(n, 0);
    double Z = 0;
    for (std::uint64_t c = 0; c < n; ++c) {
      mu[c] = std::exp(-beta * (Hval[c] - hmin));
      Z += mu[c];
    }
    sqrt_mu.assign(n, 0);
    double norm = 0;
    for (std::uint64_t c = 0; c < n; ++c) {
      mu[c] /= Z;
      sqrt_mu[c] = std::sqrt(mu[c]);
      norm += mu[c];
    }
    (void)norm;
    sym_off.clear();
    sym_off.reserve(n * (t.off.empty() ? 0 : t.off[0].size()));
    for (std::uint64_t x = 0; x < n; ++x)
      for (auto& [y, pxy] : t.off[x]) sym_off.push_back(pxy * sqrt_mu[x] / sqrt_mu[y]);
  }

  void apply(const std::vector<double>& v, std::vector<double>& out) const {
    out.assign(n, 0);
    std::size_t k = 0;
    for (std::uint64_t x = 0; x < n; ++x) {
      double acc = tm->diag[x] * v[x];
      for (auto& [y, pxy] : tm->off[x]) {
        (void)pxy;
        acc += sym_off[k++] * v[y];
      }
      out[x] = acc;
    }
  }
};

}  // namespace detail

// Top eigenpairs of the reversible symmetrization. Block orthogonal
// iteration with Rayleigh-Ritz extraction; phi_1 = sqrt(mu) is known exactly
// and kept out of the block. The convergence rate is set by the first
// discarded mode, which is fast on metastable landscapes.
struct EigenPairs {
  std::vector<double> values;                // lambda_2, lambda_3, ...
  std::vector<std::vector<double>> vectors;  // orthonormal
  double residual = 0;                       // Rayleigh residual of lambda_2
  bool converged = false;
};

namespace detail {
// Jacobi eigensolver for a small symmetric matrix; returns eigenvalues
// descending with the rotation accumulated in V (column-major k x k).
inline void jacobi_eigen(std::vector<double>& A, std::vector<double>& V, int k) {
  V.assign(k * k, 0.0);
  for (int i = 0; i < k; ++i) V[i * k + i] = 1.0;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) off += A[i * k + j] * A[i * k + j];
    if (off < 1e-30) break;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        double apq = A[i * k + j];
        if (std::fabs(apq) < 1e-300) continue;
        double theta = (A[j * k + j] - A[i * k + i]) / (2 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
        double c = 1.0 / std::sqrt(t * t + 1), s = t * c;
        for (int r = 0; r < k; ++r) {
          double ari = A[r * k + i], arj = A[r * k + j];
          A[r * k + i] = c * ari - s * arj;
          A[r * k + j] = s * ari + c * arj;
        }
        for (int r = 0; r < k; ++r) {
          double air = A[i * k + r], ajr = A[j * k + r];
          A[i * k + r] = c * air - s * ajr;
          A[j * k + r] = s * air + c * ajr;
        }
        for (int r = 0; r < k; ++r) {
          double vri = V[r * k + i], vrj = V[r * k + j];
          V[r * k + i] = c * vri - s * vrj;
          V[r * k + j] = s * vri + c * vrj;
        }
      }
  }
}
}  // namespace detail

inline EigenPairs top_eigenpairs(const detail::SymmetrizedChain& chain, int count,
                                 std::uint64_t seed, int max_rounds = 4000, double tol = 1e-12) {
  EigenPairs ep;
  const std::uint64_t n = chain.n;
  const int k = count;
  CounterRng rng(seed, 0x51e0);
  std::vector<std::vector<double>> X(k, std::vector<double>(n));
  for (auto& col : X)
    for (auto& x : col) x = rng.next_half_open() - 0.5;
  std::vector<std::vector<double>> Y(k, std::vector<double>(n));
  auto orthonormalize = [&](std::vector<std::vector<double>>& B) {
    for (int i = 0; i < k; ++i) {
      double d0 = 0;
      for (std::uint64_t t = 0; t < n; ++t) d0 += chain.sqrt_mu[t] * B[i][t];
      for (std::uint64_t t = 0; t < n; ++t) B[i][t] -= d0 * chain.sqrt_mu[t];
      for (int j = 0; j < i; ++j) {
        double d = 0;
        for (std::uint64_t t = 0; t < n; ++t) d += B[j][t] * B[i][t];
        for (std::uint64_t t = 0; t < n; ++t) B[i][t] -= d * B[j][t];
      }
      double norm = 0;
      for (auto x : B[i]) norm += x * x;
      norm = std::sqrt(norm);
      if (norm < 1e-300) norm = 1;
      for (auto& x : B[i]) x /= norm;
    }
  };
  double prev = 2;
  double best_resid = 1e300;
  int stagnant = 0;
  for (int round = 0; round < max_rounds; ++round) {
    orthonormalize(X);
    for (int i = 0; i < k; ++i) chain.apply(X[i], Y[i]);
    // Rayleigh-Ritz on the block
    std::vector<double> T(k * k, 0.0), V;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        double d = 0;
        for (std::uint64_t t = 0; t < n; ++t) d += X[i][t] * Y[j][t];
        T[i * k + j] = d;
      }
    for (int i = 0; i < k; ++i)  // symmetrize against roundoff
      for (int j = i + 1; j < k; ++j) T[i * k + j] = T[j * k + i] = 0.5 * (T[i * k + j] + T[j * k + i]);
    detail::jacobi_eigen(T, V, k);
    std::vector<std::pair<double, int>> order(k);
    for (int i = 0; i < k; ++i) order[i] = {T[i * k + i], i};
    std::sort(order.begin(), order.end(), [](auto& a, auto& b) { return a.first > b.first; });
    // rotate Y into the Ritz basis and continue from it
    std::vector<std::vector<double>> Z(k, std::vector<double>(n, 0.0));
    for (int i = 0; i < k; ++i) {
      int src = order[i].second;
      for (int j = 0; j < k; ++j) {
        double w = V[j * k + src];
        if (w == 0) continue;
        for (std::uint64_t t = 0; t < n; ++t) Z[i][t] += w * Y[j][t];
      }
    }
    X.swap(Z);
    double top = order[0].first;
    bool settled = round % 4 == 3 && std::fabs(top - prev) < tol;
    if (round % 4 == 3) prev = top;
    if (!settled && round + 1 < max_rounds) continue;

    // candidate convergence: measure the top-mode residual directly
    orthonormalize(X);
    ep.vectors = X;
    ep.values.assign(k, 0.0);
    for (int i = 0; i < k; ++i) {
      chain.apply(X[i], Y[i]);
      double lam = 0;
      for (std::uint64_t t = 0; t < n; ++t) lam += X[i][t] * Y[i][t];
      ep.values[i] = lam;
    }
    double resid = 0;
    for (std::uint64_t t = 0; t < n; ++t) {
      double r = Y[0][t] - ep.values[0] * X[0][t];
      resid += r * r;
    }
    ep.residual = std::sqrt(resid);
    ep.converged = ep.residual < 1e-10;
    if (ep.converged) return ep;
    // keep iterating until the residual stops improving
    stagnant = ep.residual > 0.9 * best_resid ? stagnant + 1 : 0;
    if (stagnant >= 12) return ep;
    best_resid = std::min(best_resid, ep.residual);
  }
  return ep;
}

// TV distance of P^n(x0, .) from mu through the truncated spectral expansion
inline double tv_distance_via_modes(const detail::SymmetrizedChain& chain, const EigenPairs& ep,
                                    std::uint64_t x0, double nsteps) {
  const std::uint64_t n = chain.n;
  double d = 0;
  for (std::uint64_t y = 0; y < n; ++y) {
    double term = 0;
    for (std::size_t k = 0; k < ep.values.size(); ++k) {
      double lam = ep.values[k];
      double mag = std::exp(nsteps * std::log(std::fabs(lam)));
      if (mag < 1e-18) continue;
      double sgn = (lam < 0 && ((std::uint64_t)nsteps) % 2 == 1) ? -1.0 : 1.0;
      term += sgn * mag * ep.vectors[k][x0] * ep.vectors[k][y];
    }
    d += std::fabs(term) * chain.sqrt_mu[y];
  }
  return 0.5 * d / chain.sqrt_mu[x0];
}

inline SpectralReport spectral_and_mixing(const ModelParams& p, double beta, double eps,
                                          double gamma_tilde, int eigenpairs = 6,
                                          std::uint64_t cap = 2'000'000) {
  TransitionMatrix tm = build_transition_matrix(p, beta, cap);
  detail::SymmetrizedChain chain;
  chain.build(p, beta, tm);
  EigenPairs ep = top_eigenpairs(chain, eigenpairs, 12345);
  SpectralReport rep;
  rep.beta = beta;
  rep.eps = eps;
  rep.eigenpairs = (int)ep.values.size();
  rep.converged = ep.converged;
  rep.rayleigh_residual = ep.residual;
  rep.gamma_tilde = gamma_tilde;
  if (ep.values.empty()) return rep;
  rep.rho = 1.0 - ep.values[0];
  rep.product = rep.rho * std::exp(beta * gamma_tilde);

  // worst-start candidates: largest mode amplitude relative to mu
  std::vector<std::uint64_t> candidates;
  {
    std::vector<std::pair<double, std::uint64_t>> amp(chain.n);
    for (std::uint64_t x = 0; x < chain.n; ++x) {
      double a = 0;
      for (std::size_t k = 0; k < ep.values.size(); ++k)
        a += ep.vectors[k][x] * ep.vectors[k][x];
      amp[x] = {a / (chain.sqrt_mu[x] * chain.sqrt_mu[x]), x};
    }
    std::partial_sort(amp.begin(), amp.begin() + std::min<std::uint64_t>(16, chain.n), amp.end(),
                      [](auto& a, auto& b) { return a.first > b.first; });
    for (std::uint64_t i = 0; i < std::min<std::uint64_t>(16, chain.n); ++i)
      candidates.push_back(amp[i].second);
  }
  auto worst_tv = [&](double nsteps) {
    double d = 0;
    for (auto x : candidates) d = std::max(d, tv_distance_via_modes(chain, ep, x, nsteps));
    return d;
  };
  // bracket then bisect the smallest n with d(n) <= eps
  double lo = 1, hi = 1;
  while (worst_tv(hi) > eps && hi < 1e17) hi *= 2;
  while (hi - lo > 1 && hi / lo > 1.0 + 1e-9) {
    double mid = 0.5 * (lo + hi);
    (worst_tv(mid) > eps ? lo : hi) = mid;
  }
  rep.tmix = (std::uint64_t)std::ceil(hi);
  // rigor guard: contribution that the truncation could be missing
  double lam_next = std::fabs(ep.values.back());
  double x0mu = 1;
  for (auto x : candidates) x0mu = std::min(x0mu, chain.sqrt_mu[x] * chain.sqrt_mu[x]);
  rep.tail_bound_at_tmix =
      0.5 * std::exp((double)rep.tmix * std::log(std::max(1e-300, lam_next))) / std::sqrt(x0mu);
  return rep;
}

}  // namespace potts
