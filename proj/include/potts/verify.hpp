#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "potts/estimators.hpp"
#include "potts/geometry.hpp"
#include "potts/io.hpp"
#include "potts/landscape.hpp"
#include "potts/oracle.hpp"
#include "potts/paths.hpp"
#include "potts/samplers.hpp"

#ifndef POTTS_VERSION
#define POTTS_VERSION "0.0.0-dev"
#endif

namespace potts::verify {

using nlohmann::json;

// Every tolerance and threshold of the verification suites, pinned here and
// echoed into each report.
struct Manifest {
  // 1. reference path on q=3, 9x9, h=0.9
  double c1_peak = 5.7;
  int c1_peak_step = 7;
  double c1_tol = 1e-9;
  // 2. local energy difference
  std::size_t c2_pairs = 100000;
  double c2_tol = 1e-12;
  // 3. oracle equivalence on 3x3
  int c3_random_states = 100;
  // 4. recurrence
  double c4_vmax = 2.0;
  std::size_t c4_escape_samples = 500;
  // 6. gate structure
  std::size_t c6_samples = 10000;
  // 7. Arrhenius
  std::vector<double> c7_betas{1.6, 2.0, 2.4, 2.8};
  std::size_t c7_runs = 200;
  double c7_slope = 5.7;
  double c7_rel_tol = 0.15;
  double cap_factor = 50.0;  // step cap = cap_factor * exp(beta * Gamma)
  // 8. crossing probabilities at beta = 3
  double c8_beta = 3.0;
  std::size_t c8_runs = 400;
  double c8_gate_min = 0.95;
  double c8_cross_max = 0.05;
  double c8_tube_max = 0.10;
  // 9. Exp(1) law
  std::size_t c9_runs = 500;
  double c9_ks_max = 0.10;
  // 10. spectral / mixing on 3x3
  std::vector<double> c10_betas{2.0, 3.0, 4.0};
  double c10_product_factor = 3.0;
  double c10_mix_rel_tol = 0.20;
  double c10_mix_beta = 4.0;
  double c10_eps = 0.25;

  json to_json() const {
    return json{{"c1", {{"peak", c1_peak}, {"peak_step", c1_peak_step}, {"tol", c1_tol}}},
                {"c2", {{"pairs", c2_pairs}, {"tol", c2_tol}}},
                {"c3", {{"random_states", c3_random_states}}},
                {"c4", {{"vmax", c4_vmax}, {"escape_samples", c4_escape_samples}}},
                {"c6", {{"samples", c6_samples}}},
                {"c7",
                 {{"betas", c7_betas},
                  {"runs", c7_runs},
                  {"slope", c7_slope},
                  {"rel_tol", c7_rel_tol},
                  {"cap_factor", cap_factor}}},
                {"c8",
                 {{"beta", c8_beta},
                  {"runs", c8_runs},
                  {"gate_min", c8_gate_min},
                  {"cross_max", c8_cross_max},
                  {"tube_max", c8_tube_max}}},
                {"c9", {{"runs", c9_runs}, {"ks_max", c9_ks_max}}},
                {"c10",
                 {{"betas", c10_betas},
                  {"product_factor", c10_product_factor},
                  {"mix_rel_tol", c10_mix_rel_tol},
                  {"mix_beta", c10_mix_beta},
                  {"eps", c10_eps}}}};
  }
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0;
  json details;
};

struct Options {
  std::uint64_t seed = 7;
  std::string out_dir;  // when set, raw CSVs land here
  Manifest manifest;
};

namespace detail {

inline ModelParams params99() { return ModelParams(3, LatticeGeom(9, 9), 0.9); }
inline ModelParams params33() { return ModelParams(3, LatticeGeom(3, 3), 0.9); }

template <typename F>
CriterionResult timed(int id, std::string name, F&& body) {
  CriterionResult res;
  res.id = id;
  res.name = std::move(name);
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(res);
  } catch (const std::exception& e) {
    res.pass = false;
    res.details["error"] = e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

inline void write_csv(const Options& opt, const std::string& name, const std::string& content) {
  if (opt.out_dir.empty()) return;
  std::filesystem::create_directories(opt.out_dir);
  std::ofstream out(std::filesystem::path(opt.out_dir) / name);
  out << content;
}

inline SpinConfig rect_of_ones(const ModelParams& p, Spin sea, int r0, int c0, int h, int w) {
  std::vector<Spin> sp(p.sites(), sea);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) sp[p.geom.index((r0 + r) % p.geom.K, (c0 + c) % p.geom.L)] = 1;
  return SpinConfig(p.geom, p.q, sp);
}

}  // namespace detail

// --- criterion 1: reference-path peak and local peak formulas -------------
inline CriterionResult c1_reference_path(const Options& opt) {
  return detail::timed(1, "reference-path peak", [&](CriterionResult& res) {
    auto p = detail::params99();
    const auto& M = opt.manifest;
    auto prof = build_reference_path(p, 2);
    double H0 = prof.energies[0].value(p.h);
    bool ok = prof.argmax.size() == 1 && (int)prof.argmax[0] == M.c1_peak_step;
    double peak = prof.height.value(p.h) - H0;
    ok = ok && std::fabs(peak - M.c1_peak) < M.c1_tol;
    json peaks = json::array();
    for (int l = 1; l <= p.geom.K - 1; ++l) {  // quasi-square peaks
      std::size_t step = (std::size_t)l * (l - 1) + 1;
      double got = prof.energies[step].value(p.h) - H0;
      double want = 4.0 * l - p.h * l * l + p.h * l - p.h;
      ok = ok && std::fabs(got - want) < M.c1_tol;
      peaks.push_back({{"l", l}, {"kind", "quasi"}, {"step", step}, {"H", got}, {"formula", want}});
    }
    for (int l = 1; l <= p.geom.K - 2; ++l) {  // square peaks
      std::size_t step = (std::size_t)l * l + 1;
      double got = prof.energies[step].value(p.h) - H0;
      double want = 4.0 * l - p.h * l * l + 2 - p.h;
      ok = ok && std::fabs(got - want) < M.c1_tol;
      peaks.push_back({{"l", l}, {"kind", "square"}, {"step", step}, {"H", got}, {"formula", want}});
    }
    res.pass = ok;
    res.details = {{"peak", peak},
                   {"argmax", prof.argmax},
                   {"expected_step", M.c1_peak_step},
                   {"local_peaks", peaks}};
  });
}

// --- criterion 2: local energy differences ---------------------------------
inline CriterionResult c2_local_delta(const Options& opt) {
  return detail::timed(2, "local delta vs global difference", [&](CriterionResult& res) {
    const auto& M = opt.manifest;
    CounterRng rng(opt.seed, 0xC2);
    std::size_t bad = 0;
    double worst = 0;
    const std::vector<std::pair<int, int>> geos{{3, 3}, {4, 5}, {9, 9}, {6, 12}};
    for (std::size_t i = 0; i < M.c2_pairs; ++i) {
      auto [K, L] = geos[rng.next_below(geos.size())];
      int q = 3 + (int)rng.next_below(3);
      ModelParams p(q, LatticeGeom(K, L), 0.9);
      std::vector<Spin> sp(p.sites());
      for (auto& s : sp) s = Spin(1 + rng.next_below(q));
      SpinConfig sigma(p.geom, q, sp);
      int v = (int)rng.next_below(p.sites());
      Spin s = Spin(1 + rng.next_below(q));
      if (s == sigma.at(v)) s = Spin(s % q + 1);
      Move m{p.geom.vertex(v), s};
      Energy local = energy_delta(p, sigma, m);
      Energy global = hamiltonian(p, apply_move(sigma, m)) - hamiltonian(p, sigma);
      if (!(local == global)) ++bad;
      worst = std::max(worst, std::fabs(local.value(p.h) - global.value(p.h)));
    }
    res.pass = bad == 0 && worst <= M.c2_tol;
    res.details = {{"pairs", M.c2_pairs}, {"mismatches", bad}, {"worst_abs_diff", worst}};
  });
}

// --- criterion 3: oracle equivalence on 3x3 --------------------------------
inline CriterionResult c3_oracle_equivalence(const Options& opt) {
  return detail::timed(3, "oracle equivalence (3x3)", [&](CriterionResult& res) {
    auto p = detail::params33();
    ExactOracle oracle(p);
    auto m2 = monochrome(p.geom, p.q, 2);
    auto m1 = monochrome(p.geom, p.q, 1);
    Energy oracle_phi = oracle.phi(encode(m2), encode(m1));
    auto lazy = bottleneck_phi(p, m2, target_state(m1), ExploreBudget{});
    bool ok = lazy.reached && lazy.phi == oracle_phi;

    CounterRng rng(opt.seed, 0xC3);
    int mismatches = 0;
    for (int i = 0; i < opt.manifest.c3_random_states; ++i) {
      std::uint64_t code = rng.next_below(oracle.size());
      SpinConfig sigma = decode(code, p.geom, p.q);
      auto sr = stability_level(p, sigma, ExploreBudget{});
      auto ov = oracle.V(code);
      if (ov.has_value() != sr.found) ++mismatches;
      else if (ov && !(sr.V == *ov)) ++mismatches;
    }
    ok = ok && mismatches == 0;

    Energy gt_cycles = oracle.gamma_tilde_cycles();
    Energy gt_identity = oracle.gamma_tilde_identity();
    ok = ok && energy_eq(gt_cycles, gt_identity, p.h);
    res.pass = ok;
    res.details = {{"phi_oracle", oracle_phi.value(p.h)},
                   {"phi_lazy", lazy.phi.value(p.h)},
                   {"stability_mismatches", mismatches},
                   {"gamma_tilde_cycles", gt_cycles.value(p.h)},
                   {"gamma_tilde_identity", gt_identity.value(p.h)}};
  });
}

// --- criterion 4: recurrence at desk scale ---------------------------------
inline CriterionResult c4_recurrence(const Options& opt) {
  return detail::timed(4, "recurrence V <= 2", [&](CriterionResult& res) {
    const auto& M = opt.manifest;
    // (a) every non-monochrome 3x3 state has V <= 2; violations are reported
    // with witnesses, not auto-failed
    auto p3 = detail::params33();
    ExactOracle oracle(p3);
    Energy two{2, 0};
    json witnesses = json::array();
    for (std::uint64_t c = 0; c < oracle.size(); ++c) {
      auto v = oracle.V(c);
      if (!v) continue;
      SpinConfig s = decode(c, p3.geom, p3.q);
      bool mono = true;
      for (Spin x : s.spins()) mono = mono && x == s.spins()[0];
      if (mono) continue;
      if (energy_cmp(*v, two, p3.h) > 0)
        witnesses.push_back({{"code", c}, {"V", v->value(p3.h)}});
    }

    // (b) randomized escape-path suite on 12x12, q up to 5: zero failures
    CounterRng rng(opt.seed, 0xC4);
    std::size_t built = 0, failures = 0;
    json fail_list = json::array();
    std::size_t target = M.c4_escape_samples;
    std::size_t attempts = 0;
    while (built < target && attempts < 50 * target) {
      ++attempts;
      int q = 3 + (int)rng.next_below(3);
      ModelParams p(q, LatticeGeom(12, 12), 0.9);
      int which = (int)rng.next_below(3);
      std::optional<SpinConfig> sigma;
      MinClass expect;
      if (which == 0) {
        sigma = samplers::sample_M2(rng, p.geom, q);
        expect = MinClass::M2;
      } else if (which == 1) {
        sigma = samplers::sample_M3(rng, p.geom, q);
        expect = MinClass::M3;
      } else {
        if (q == 3) continue;  // brick covers color reliably with q >= 4
        sigma = samplers::sample_M4(rng, p.geom, q);
        expect = MinClass::M4;
      }
      if (!sigma) continue;
      auto rep = local_min_class(p, *sigma);
      if (rep.cls != expect) continue;  // sampler produced a degenerate layout
      ++built;
      try {
        auto prof = build_escape_path(p, *sigma);
        Energy H0 = prof.energies[0];
        bool ok = energy_less(prof.energies.back(), H0, p.h) &&
                  !energy_less(H0 + Energy{2, 0}, prof.height, p.h);
        if (!ok) throw std::logic_error("bound violated");
      } catch (const std::exception& e) {
        ++failures;
        if (fail_list.size() < 8)
          fail_list.push_back({{"class", (int)expect}, {"error", e.what()}});
      }
    }
    res.pass = failures == 0 && built == target;
    res.details = {{"oracle_violations", witnesses},
                   {"escape_samples", built},
                   {"escape_failures", failures},
                   {"failures", fail_list}};
  });
}

// --- criterion 5: principal boundaries on 9x9 ------------------------------
inline CriterionResult c5_principal_boundaries(const Options&) {
  return detail::timed(5, "flooded principal boundaries", [&](CriterionResult& res) {
    auto p = detail::params99();
    bool ok = true;
    json cases = json::array();

    struct Case {
      int w, h;           // seed rectangle of 1s in a sea of 2
      int ba, bb;         // expected boundary family B^1_{ba,bb}
      double depth;       // expected cycle depth
      bool growth;        // boundary grows the seed (vs erodes it)
    };
    const double hh = p.h;
    for (const Case tc : {Case{2, 2, 1, 2, hh, false}, Case{3, 2, 2, 2, hh, false},
                          Case{3, 3, 3, 3, 2 - hh, true}}) {
      auto seed = detail::rect_of_ones(p, 2, 2, 2, tc.h, tc.w);
      auto rep = flood_cycle(p, seed, ExploreBudget{});
      // expected set: single-cell erosions of the corners, or protuberance
      // growths along every side
      std::set<std::string> expected;
      auto add_if = [&](SpinConfig s) {
        if (in_Bbar(s, tc.ba, tc.bb, 1, 2, 1)) expected.insert(state_key(s));
      };
      if (tc.growth) {
        for (int r = 0; r < tc.h; ++r) {
          add_if(apply_move(seed, Move{{(2 + r) % p.geom.K, (2 + p.geom.L - 1) % p.geom.L}, 1}));
          add_if(apply_move(seed, Move{{(2 + r) % p.geom.K, (2 + tc.w) % p.geom.L}, 1}));
        }
        for (int c = 0; c < tc.w; ++c) {
          add_if(apply_move(seed, Move{{(2 + p.geom.K - 1) % p.geom.K, (2 + c) % p.geom.L}, 1}));
          add_if(apply_move(seed, Move{{(2 + tc.h) % p.geom.K, (2 + c) % p.geom.L}, 1}));
        }
      } else {
        for (int corner = 0; corner < 4; ++corner) {
          int r = corner < 2 ? 0 : tc.h - 1;
          int c = corner % 2 == 0 ? 0 : tc.w - 1;
          add_if(apply_move(seed, Move{{(2 + r) % p.geom.K, (2 + c) % p.geom.L}, 2}));
        }
      }
      std::set<std::string> got;
      bool members_ok = true;
      for (const auto& b : rep.principal_boundary) {
        got.insert(state_key(b));
        members_ok = members_ok && in_Bbar(b, tc.ba, tc.bb, 1, 2, 1);
      }
      bool case_ok = members_ok && got == expected &&
                     std::fabs(rep.depth.value(p.h) - tc.depth) < 1e-12;
      ok = ok && case_ok;
      cases.push_back({{"seed", {tc.w, tc.h}},
                       {"B_size", got.size()},
                       {"expected_size", expected.size()},
                       {"depth", rep.depth.value(p.h)},
                       {"expected_depth", tc.depth},
                       {"pass", case_ok}});
    }
    res.pass = ok;
    res.details = {{"cases", cases}};
  });
}

// --- criterion 6: gate membership structure ---------------------------------
inline CriterionResult c6_gate_structure(const Options& opt) {
  return detail::timed(6, "F(D) single-touch implies W or W'", [&](CriterionResult& res) {
    auto p = detail::params99();
    auto shapes = samplers::fd_droplet_shapes(p.ell_star());
    CounterRng rng(opt.seed, 0xC6);
    std::size_t singles = 0, implied = 0, bad_fd = 0;
    for (std::size_t i = 0; i < opt.manifest.c6_samples; ++i) {
      SpinConfig sigma = samplers::sample_FD(rng, p, 2, shapes);
      if (!in_FD(p, sigma, 2)) {
        ++bad_fd;
        continue;
      }
      if (!single_segment_touch(sigma)) continue;
      ++singles;
      if (in_W(p, sigma, 2) || in_Wprime(p, sigma, 2)) ++implied;
    }
    res.pass = bad_fd == 0 && singles > 0 && implied == singles;
    res.details = {{"samples", opt.manifest.c6_samples},
                   {"droplet_shapes", shapes.size()},
                   {"non_fd_samples", bad_fd},
                   {"single_touch", singles},
                   {"implied_gate", implied}};
  });
}

// --- criterion 7: Arrhenius slope -------------------------------------------
inline CriterionResult c7_arrhenius(const Options& opt) {
  return detail::timed(7, "Arrhenius slope", [&](CriterionResult& res) {
    auto p = detail::params99();
    const auto& M = opt.manifest;
    auto m2 = monochrome(p.geom, p.q, 2);
    auto target = target_monochrome(p, 1);
    std::vector<double> means;
    json rows = json::array();
    std::string csv = "beta,mean_steps,ci_lo,ci_hi,capped\n";
    for (double beta : M.c7_betas) {
      std::uint64_t cap = (std::uint64_t)(M.cap_factor * std::exp(beta * M.c7_slope));
      auto est = estimate_hitting(p, m2, target, beta, M.c7_runs, cap, opt.seed);
      means.push_back(est.mean);
      rows.push_back({{"beta", beta},
                      {"mean", est.mean},
                      {"ci", {est.ci_lo, est.ci_hi}},
                      {"capped", est.n_capped}});
      csv += std::to_string(beta) + "," + std::to_string(est.mean) + "," +
             std::to_string(est.ci_lo) + "," + std::to_string(est.ci_hi) + "," +
             std::to_string(est.n_capped) + "\n";
    }
    auto fit = arrhenius_fit(M.c7_betas, means);
    double rel = std::fabs(fit.slope - M.c7_slope) / M.c7_slope;
    res.pass = rel <= M.c7_rel_tol;
    res.details = {{"slope", fit.slope},
                   {"target", M.c7_slope},
                   {"rel_error", rel},
                   {"r2", fit.r2},
                   {"points", rows}};
    detail::write_csv(opt, "c7_arrhenius.csv", csv);
  });
}

// --- criteria 8 and 9: crossing probabilities and the Exp(1) law -----------
inline std::pair<CriterionResult, CriterionResult> c8_c9_crossings(const Options& opt) {
  auto p = detail::params99();
  const auto& M = opt.manifest;
  auto m2 = monochrome(p.geom, p.q, 2);
  std::uint64_t cap = (std::uint64_t)(M.cap_factor * std::exp(M.c8_beta * M.c7_slope));

  CriterionResult c8 = detail::timed(8, "gate / no-cross / tube probabilities", [&](CriterionResult& res) {
    std::vector<Observer> obs{observer_gate(p, 2), observer_other_metastable(p, 2),
                              observer_tube_exit(p, 2)};
    auto cs = crossing_stats(p, m2, target_monochrome(p, 1), M.c8_beta, M.c8_runs, cap, opt.seed,
                             obs);
    double gate = cs.intervals[0].p_hat;
    double cross = cs.intervals[1].p_hat;
    double tube = cs.intervals[2].p_hat;
    bool gate_ok = gate >= M.c8_gate_min;
    bool cross_ok = cross <= M.c8_cross_max;
    bool tube_ok = tube <= M.c8_tube_max;
    res.pass = gate_ok && cross_ok && tube_ok;
    res.details = {{"completed", cs.n_completed},
                   {"capped", cs.n_capped},
                   {"gate", {{"p", gate}, {"ci", {cs.intervals[0].lo, cs.intervals[0].hi}}, {"min", M.c8_gate_min}, {"pass", gate_ok}}},
                   {"cross", {{"p", cross}, {"ci", {cs.intervals[1].lo, cs.intervals[1].hi}}, {"max", M.c8_cross_max}, {"pass", cross_ok}}},
                   {"tube", {{"p", tube}, {"ci", {cs.intervals[2].lo, cs.intervals[2].hi}}, {"max", M.c8_tube_max}, {"pass", tube_ok}}}};
    std::string csv = "observer,hits,completed,p_hat,lo,hi\n";
    for (std::size_t k = 0; k < cs.names.size(); ++k)
      csv += cs.names[k] + "," + std::to_string(cs.hits[k]) + "," +
             std::to_string(cs.n_completed) + "," + std::to_string(cs.intervals[k].p_hat) + "," +
             std::to_string(cs.intervals[k].lo) + "," + std::to_string(cs.intervals[k].hi) + "\n";
    detail::write_csv(opt, "c8_crossings.csv", csv);
  });

  CriterionResult c9 = detail::timed(9, "Exp(1) law for tau_G", [&](CriterionResult& res) {
    auto est = estimate_hitting(p, m2, target_G(p, 2), M.c8_beta, M.c9_runs, cap, opt.seed + 1);
    double ks = exp_law_ks(est.samples);
    res.pass = ks <= M.c9_ks_max && est.n_capped == 0;
    res.details = {{"samples", est.samples.size()},
                   {"mean", est.mean},
                   {"ks", ks},
                   {"max", M.c9_ks_max}};
    std::string csv = "steps\n";
    for (auto s : est.samples) csv += std::to_string(s) + "\n";
    detail::write_csv(opt, "c9_tauG.csv", csv);
  });
  return {c8, c9};
}

// --- criterion 10: spectral gap and mixing on 3x3 --------------------------
inline CriterionResult c10_spectral(const Options& opt) {
  return detail::timed(10, "spectral gap and mixing time", [&](CriterionResult& res) {
    auto p = detail::params33();
    const auto& M = opt.manifest;
    ExactOracle oracle(p);
    double gt = oracle.gamma_tilde_cycles().value(p.h);
    std::vector<double> products;
    json rows = json::array();
    double mix_exponent = 0;
    for (double beta : M.c10_betas) {
      auto rep = spectral_and_mixing(p, beta, M.c10_eps, gt);
      products.push_back(rep.product);
      double exponent = std::log((double)rep.tmix) / beta;
      if (beta == M.c10_mix_beta) mix_exponent = exponent;
      rows.push_back({{"beta", beta},
                      {"rho", rep.rho},
                      {"product", rep.product},
                      {"tmix", rep.tmix},
                      {"mix_exponent", exponent},
                      {"residual", rep.rayleigh_residual},
                      {"tail_bound", rep.tail_bound_at_tmix}});
    }
    double ratio = *std::max_element(products.begin(), products.end()) /
                   *std::min_element(products.begin(), products.end());
    bool product_ok = ratio < M.c10_product_factor;
    bool mix_ok = std::fabs(mix_exponent - gt) <= M.c10_mix_rel_tol * gt;
    res.pass = product_ok && mix_ok;
    res.details = {{"gamma_tilde", gt},
                   {"product_ratio", ratio},
                   {"product_ok", product_ok},
                   {"mix_exponent_at_beta4", mix_exponent},
                   {"mix_ok", mix_ok},
                   {"rows", rows}};
  });
}

inline std::vector<CriterionResult> run_all(const Options& opt) {
  std::vector<CriterionResult> out;
  out.push_back(c1_reference_path(opt));
  out.push_back(c2_local_delta(opt));
  out.push_back(c3_oracle_equivalence(opt));
  out.push_back(c4_recurrence(opt));
  out.push_back(c5_principal_boundaries(opt));
  out.push_back(c6_gate_structure(opt));
  out.push_back(c7_arrhenius(opt));
  auto [c8, c9] = c8_c9_crossings(opt);
  out.push_back(c8);
  out.push_back(c9);
  out.push_back(c10_spectral(opt));
  return out;
}

inline CriterionResult run_one(const Options& opt, int id) {
  switch (id) {
    case 1: return c1_reference_path(opt);
    case 2: return c2_local_delta(opt);
    case 3: return c3_oracle_equivalence(opt);
    case 4: return c4_recurrence(opt);
    case 5: return c5_principal_boundaries(opt);
    case 6: return c6_gate_structure(opt);
    case 7: return c7_arrhenius(opt);
    case 8: return c8_c9_crossings(opt).first;
    case 9: return c8_c9_crossings(opt).second;
    case 10: return c10_spectral(opt);
    default: throw std::invalid_argument("unknown criterion id");
  }
}

inline json report_json(const Options& opt, const std::vector<CriterionResult>& results) {
  // timings stay out of the report so identical seeds give identical bytes
  json criteria = json::array();
  for (const auto& r : results)
    criteria.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"details", r.details}});
  return json{{"version", POTTS_VERSION},
              {"seed", opt.seed},
              {"manifest", opt.manifest.to_json()},
              {"criteria", criteria}};
}

}  // namespace potts::verify
