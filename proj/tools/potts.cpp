// Command-line front end: simulation, landscape queries, classification,
// reference paths, and the verification suites.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "potts/estimators.hpp"
#include "potts/geometry.hpp"
#include "potts/io.hpp"
#include "potts/landscape.hpp"
#include "potts/oracle.hpp"
#include "potts/paths.hpp"
#include "potts/verify.hpp"

using nlohmann::json;
using namespace potts;

namespace {

struct ModelOpts {
  int q = 3;
  int K = 9;
  int L = 9;
  double h = 0.9;
  bool unsafe = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--q", q, "number of spin states (q > 2)");
    cmd->add_option("--K", K, "rows (>= 3)");
    cmd->add_option("--L", L, "columns (>= 3)");
    cmd->add_option("--h", h, "external field, 0 < h < 1 with 2/h not integer");
    cmd->add_flag("--unsafe-params", unsafe, "allow fields outside the assumptions (flagged in output)");
  }
  ModelParams params() const { return ModelParams(q, LatticeGeom(K, L), h, unsafe); }
};

json params_json(const ModelParams& p, std::uint64_t seed) {
  return json{{"q", p.q},
              {"K", p.geom.K},
              {"L", p.geom.L},
              {"h", p.h},
              {"normalized_KL", p.geom.normalized},
              {"assumption_field_ok", p.assumption_ok},
              {"assumption_size_ok", p.size_assumption_ok},
              {"unsafe", p.unsafe},
              {"ell_star", p.assumption_ok ? p.ell_star() : -1},
              {"seed", seed},
              {"version", POTTS_VERSION}};
}

SpinConfig load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open snapshot: " + path);
  return read_snapshot(in);
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    std::ofstream out(out_path);
    out << content;
  }
}

// start configuration: a monochrome --m or a --snapshot file
struct StartOpts {
  int m = 2;
  std::string snapshot;
  void attach(CLI::App* cmd) {
    cmd->add_option("--m", m, "start from the monochrome configuration of this spin");
    cmd->add_option("--snapshot", snapshot, "start from a snapshot file instead");
  }
  SpinConfig resolve(const ModelParams& p) const {
    if (!snapshot.empty()) return load_snapshot(snapshot);
    return monochrome(p.geom, p.q, Spin(m));
  }
};

TargetPred make_target(const ModelParams& p, const std::string& kind, Spin start_m) {
  if (kind == "one") return target_monochrome(p, 1);
  if (kind == "meta") return target_other_metastables(p, start_m);
  if (kind == "G") {
    // tiny instances get the exact barrier instead of the droplet formula
    double states = p.sites() * std::log((double)p.q);
    if (states <= std::log(2.0e6)) {
      ExactOracle oracle(p);
      auto v = oracle.V(encode(monochrome(p.geom, p.q, start_m)));
      if (v) return target_G(p, start_m, *v);
    }
    return target_G(p, start_m);
  }
  if (kind.rfind("mono:", 0) == 0) return target_monochrome(p, Spin(std::stoi(kind.substr(5))));
  if (kind.rfind("file:", 0) == 0) return target_state(load_snapshot(kind.substr(5)));
  throw CLI::ValidationError("--target", "expected one|meta|G|mono:<s>|file:<path>");
}

std::vector<Observer> make_observers(const ModelParams& p, Spin m, const std::string& list) {
  std::vector<Observer> obs;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    if (name == "gate") obs.push_back(observer_gate(p, m));
    else if (name == "gate-union") obs.push_back(observer_gate_union_others(p, m));
    else if (name == "nocross") obs.push_back(observer_other_metastable(p, m));
    else if (name == "tube") obs.push_back(observer_tube_exit(p, m));
    else if (name == "habitat") obs.push_back(observer_habitat_exit(p, m));
    else throw CLI::ValidationError("--observers", "unknown observer: " + name);
  }
  return obs;
}

json moves_json(const std::vector<Move>& moves) {
  json arr = json::array();
  for (const auto& mv : moves)
    arr.push_back({{"row", mv.vertex.row}, {"col", mv.vertex.col}, {"spin", (int)mv.new_spin}});
  return arr;
}

// Config files hold key=value lines or a flat JSON object. Keys become
// --key=value tokens for options the command line left unset, so explicit
// flags always win.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config: " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    json j = json::parse(in);
    for (auto& [key, value] : j.items())
      kv.emplace_back(key, value.is_string() ? value.get<std::string>() : value.dump());
    return kv;
  }
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
    auto trim = [](std::string x) {
      auto a = x.find_first_not_of(" \t");
      auto b = x.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : x.substr(a, b - a + 1);
    };
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

// pull --config out of argv and splice the file's keys in as defaults
std::vector<std::string> merge_config_args(int argc, char** argv) {
  std::vector<std::string> args;
  std::string config_path;
  for (int i = 0; i < argc; ++i) {
    std::string a = argv[i];
    if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
    } else if (a == "--config" && i + 1 < argc) {
      config_path = argv[++i];
    } else {
      args.push_back(std::move(a));
    }
  }
  if (!config_path.empty()) {
    for (auto& [key, value] : read_config(config_path)) {
      std::string flag = "--" + key;
      bool given = false;
      for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
      if (!given) args.push_back(flag + "=" + value);
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args;
  try {
    args = merge_config_args(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::vector<char*> argv2;
  for (auto& a : args) argv2.push_back(a.data());
  argc = (int)argv2.size();
  argv = argv2.data();

  CLI::App app{"q-state Potts model with positive external field: dynamics and landscape toolkit.\nAny subcommand accepts --config FILE (key=value lines or flat JSON); explicit flags win."};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");  // frees -h / --h for the field

  // ---- simulate -----------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "run trajectories until a target set");
  sim->set_help_flag("--help", "print help");
  ModelOpts sim_model;
  sim_model.attach(sim);
  double sim_beta = 3.0;
  std::size_t sim_n = 100;
  std::uint64_t sim_cap = 0, sim_seed = 7;
  int sim_m = 2;
  std::string sim_target = "one", sim_observers = "gate,nocross,tube", sim_out;
  bool sim_naive = false;
  sim->add_option("--beta", sim_beta, "inverse temperature");
  sim->add_option("--n", sim_n, "number of trajectories");
  sim->add_option("--cap", sim_cap, "step cap (default 50*exp(beta*Gamma))");
  sim->add_option("--seed", sim_seed, "seed; trajectory i uses stream (seed, i)");
  sim->add_option("--start-m", sim_m, "start from this monochrome spin");
  sim->add_option("--target", sim_target, "one|meta|G|mono:<s>|file:<path>");
  sim->add_option("--observers", sim_observers, "comma list: gate,gate-union,nocross,tube,habitat");
  sim->add_option("--out", sim_out, "CSV output path (default stdout)");
  sim->add_flag("--naive", sim_naive, "use the step-by-step chain instead of the rejection-free one");

  // ---- landscape ----------------------------------------------------------
  auto* land = app.add_subcommand("landscape", "energy-landscape queries");
  land->set_help_flag("--help", "print help");
  land->require_subcommand(1);
  ModelOpts land_model;
  StartOpts land_start;
  std::string land_target = "one", land_subspace, land_out;
  std::size_t land_max_states = 4'000'000;
  auto attach_land = [&](CLI::App* cmd) {
    land_model.attach(cmd);
    land_start.attach(cmd);
    cmd->add_option("--subspace", land_subspace, "restrict spins, e.g. \"2,1\"");
    cmd->add_option("--max-states", land_max_states, "search budget");
    cmd->add_option("--out", land_out, "JSON output path (default stdout)");
  };
  auto* land_phi = land->add_subcommand("phi", "communication height to a target set");
  land_phi->set_help_flag("--help", "print help");
  attach_land(land_phi);
  land_phi->add_option("--target", land_target, "one|meta|G|mono:<s>|file:<path>");
  auto* land_v = land->add_subcommand("vlevel", "stability level of a configuration");
  land_v->set_help_flag("--help", "print help");
  attach_land(land_v);
  auto* land_flood = land->add_subcommand("flood", "cycle flooding from a local minimum");
  land_flood->set_help_flag("--help", "print help");
  attach_land(land_flood);
  auto* land_oracle = land->add_subcommand("oracle", "full enumeration on a tiny instance");
  land_oracle->set_help_flag("--help", "print help");
  attach_land(land_oracle);
  auto* land_icyc = land->add_subcommand("initial-cycle", "initial cycle toward a target set");
  land_icyc->set_help_flag("--help", "print help");
  attach_land(land_icyc);
  land_icyc->add_option("--target", land_target, "one|meta|G|mono:<s>|file:<path>");

  // ---- classify -----------------------------------------------------------
  auto* cls = app.add_subcommand("classify", "classify a snapshot against the shape families");
  cls->set_help_flag("--help", "print help");
  ModelOpts cls_model;
  cls_model.attach(cls);
  std::string cls_snapshot, cls_out;
  cls->add_option("--snapshot", cls_snapshot, "snapshot file")->required();
  cls->add_option("--out", cls_out, "JSON output path (default stdout)");

  // ---- refpath ------------------------------------------------------------
  auto* ref = app.add_subcommand("refpath", "reference path energy profile as CSV");
  ref->set_help_flag("--help", "print help");
  ModelOpts ref_model;
  ref_model.attach(ref);
  int ref_m = 2, ref_anchor_r = 0, ref_anchor_c = 0;
  std::string ref_out;
  ref->add_option("--m", ref_m, "initial monochrome spin (2..q)");
  ref->add_option("--anchor-row", ref_anchor_r, "anchor vertex row");
  ref->add_option("--anchor-col", ref_anchor_c, "anchor vertex column");
  ref->add_option("--out", ref_out, "CSV output path (default stdout)");

  // ---- verify ---------------------------------------------------------------
  auto* ver = app.add_subcommand("verify", "run the verification suites");
  ver->set_help_flag("--help", "print help");
  std::string ver_suite = "all", ver_out_dir;
  std::uint64_t ver_seed = 7;
  ver->add_option("suite", ver_suite, "all or a criterion number 1..10");
  ver->add_option("--seed", ver_seed, "seed for all randomized suites");
  ver->add_option("--out", ver_out_dir, "directory for the JSON verdict and raw CSVs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      ModelParams p = sim_model.params();
      auto start = monochrome(p.geom, p.q, Spin(sim_m));
      auto target = make_target(p, sim_target, Spin(sim_m));
      auto observers = make_observers(p, Spin(sim_m), sim_observers);
      std::uint64_t cap = sim_cap;
      if (cap == 0)
        cap = (std::uint64_t)std::min(4.0e18, 50.0 * std::exp(sim_beta * p.gamma_m().value(p.h)));
      std::vector<RunRecord> recs(sim_n);
      run_parallel(sim_n, [&](std::size_t i) {
        SimConfig cfg;
        cfg.beta = sim_beta;
        cfg.seed = sim_seed;
        cfg.stream_id = i;
        cfg.step_cap = cap;
        cfg.observers = observers;
        recs[i] = sim_naive ? simulate_until(p, start, target, cfg)
                            : kmc_simulate_until(p, start, target, cfg);
      });
      std::ostringstream csv;
      csv << "# " << params_json(p, sim_seed).dump() << "\n";
      csv << "traj,steps,events,capped";
      for (const auto& o : observers) csv << ",hit_" << o.name;
      csv << "\n";
      for (std::size_t i = 0; i < recs.size(); ++i) {
        csv << i << ',' << recs[i].steps << ',' << recs[i].events << ',' << (recs[i].capped ? 1 : 0);
        for (auto hit : recs[i].first_hit) csv << ',' << hit;
        csv << "\n";
      }
      emit(sim_out, csv.str());
      return 0;
    }

    if (land->parsed()) {
      ModelParams p = land_model.params();
      ExploreBudget budget;
      budget.max_states = land_max_states;
      if (!land_subspace.empty()) {
        std::stringstream ss(land_subspace);
        std::string tok;
        while (std::getline(ss, tok, ',')) budget.subspace.push_back(Spin(std::stoi(tok)));
      }
      json out;
      out["params"] = params_json(p, 0);
      if (land_phi->parsed()) {
        auto start = land_start.resolve(p);
        auto res = bottleneck_phi(p, start, make_target(p, land_target, Spin(land_start.m)), budget);
        out["reached"] = res.reached;
        out["exhausted"] = res.exhausted;
        out["phi"] = res.phi.value(p.h);
        out["gamma"] = (res.phi - res.start_energy).value(p.h);
        out["visited"] = res.visited;
        if (res.reached) out["witness"] = moves_json(res.witness);
      } else if (land_v->parsed()) {
        auto start = land_start.resolve(p);
        auto res = stability_level(p, start, budget);
        out["found"] = res.found;
        out["exhausted"] = res.exhausted;
        if (res.found) {
          out["V"] = res.V.value(p.h);
          out["witness"] = moves_json(res.witness);
          out["lower_state"] = to_snapshot_string(res.lower_state);
        }
      } else if (land_flood->parsed()) {
        auto seed = land_start.resolve(p);
        auto rep = flood_cycle(p, seed, budget);
        out["trivial"] = rep.trivial;
        out["plateau"] = rep.plateau;
        out["exhausted"] = rep.exhausted;
        out["member_count"] = rep.member_count;
        out["depth"] = rep.depth.value(p.h);
        out["exit_height"] = rep.exit_height.value(p.h);
        json pb = json::array();
        for (const auto& b : rep.principal_boundary) pb.push_back(to_snapshot_string(b));
        out["principal_boundary"] = pb;
        out["np_boundary_samples"] = rep.np_boundary_sample.size();
      } else if (land_oracle->parsed()) {
        ExactOracle oracle(p, land_max_states);
        out["states"] = oracle.size();
        json xs = json::array(), xm = json::array();
        for (auto c : oracle.stable_states()) xs.push_back(c);
        for (auto c : oracle.metastable_states()) xm.push_back(c);
        out["stable_codes"] = xs;
        out["metastable_codes"] = xm;
        out["stable_snapshots"] = json::array();
        for (auto c : oracle.stable_states())
          out["stable_snapshots"].push_back(to_snapshot_string(decode(c, p.geom, p.q)));
        out["gamma_m"] = oracle.gamma_m().value(p.h);
        out["gamma_tilde"] = oracle.gamma_tilde_cycles().value(p.h);
        out["gamma_tilde_identity"] = oracle.gamma_tilde_identity().value(p.h);
      } else if (land_icyc->parsed()) {
        auto start = land_start.resolve(p);
        auto res = initial_cycle(p, start, make_target(p, land_target, Spin(land_start.m)), budget);
        out["reached"] = res.reached;
        out["exhausted"] = res.exhausted;
        if (res.reached) {
          out["gamma"] = res.gamma.value(p.h);
          out["member_count"] = res.member_count;
        }
      }
      emit(land_out, out.dump(2) + "\n");
      return 0;
    }

    if (cls->parsed()) {
      SpinConfig sigma = load_snapshot(cls_snapshot);
      ModelParams p(sigma.q(), sigma.geom(), cls_model.h, cls_model.unsafe);
      auto rep = shape_class(p, sigma);
      auto br = bridge_report(sigma);
      json out;
      out["params"] = params_json(p, 0);
      const char* names[] = {"none", "M1", "M2", "M3", "M4", "M1bar"};
      out["min_class"] = names[(int)rep.min_class.cls];
      out["min_class_ambiguous"] = rep.min_class.ambiguous;
      if (!rep.min_class.note.empty()) out["min_class_note"] = rep.min_class.note;
      out["fd_single_touch"] = rep.fd_single_touch;
      json per = json::array();
      for (const auto& ps : rep.per_spin)
        per.push_back({{"m", (int)ps.m},
                       {"in_W", ps.w},
                       {"in_Wprime", ps.wprime},
                       {"in_D", ps.d},
                       {"in_FD", ps.fd},
                       {"in_tube", ps.tube},
                       {"in_strip_v", ps.strip_v},
                       {"in_strip_h", ps.strip_h}});
      out["per_spin"] = per;
      out["dh"] = br.dh;
      out["dv"] = br.dv;
      json bridges = json::array();
      for (int s = 1; s <= sigma.q(); ++s)
        bridges.push_back({{"spin", s},
                           {"B_s", br.bridge_count[s]},
                           {"cross", (bool)br.cross[s]},
                           {"h_rows", br.h_bridge_rows[s]},
                           {"v_cols", br.v_bridge_cols[s]}});
      out["bridges"] = bridges;
      emit(cls_out, out.dump(2) + "\n");
      return 0;
    }

    if (ref->parsed()) {
      ModelParams p = ref_model.params();
      auto prof = build_reference_path(p, Spin(ref_m), Vertex{ref_anchor_r, ref_anchor_c});
      std::ostringstream csv;
      csv << "# " << params_json(p, 0).dump() << "\n";
      csv << "step,N1,H_minus_Hm\n";
      double H0 = prof.energies[0].value(p.h);
      for (std::size_t i = 0; i < prof.energies.size(); ++i)
        csv << i << ',' << i << ',' << (prof.energies[i].value(p.h) - H0) << "\n";
      emit(ref_out, csv.str());
      return 0;
    }

    if (ver->parsed()) {
      verify::Options opt;
      opt.seed = ver_seed;
      opt.out_dir = ver_out_dir;
      std::vector<verify::CriterionResult> results;
      if (ver_suite == "all") {
        results = verify::run_all(opt);
      } else {
        int id = std::stoi(ver_suite.rfind('c', 0) == 0 ? ver_suite.substr(1) : ver_suite);
        results.push_back(verify::run_one(opt, id));
      }
      bool all_pass = true;
      for (const auto& r : results) {
        std::printf("[%s] criterion %2d: %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str());
        std::fprintf(stderr, "criterion %d took %.2fs\n", r.id, r.seconds);
        all_pass = all_pass && r.pass;
      }
      json report = verify::report_json(opt, results);
      if (!ver_out_dir.empty()) {
        std::filesystem::create_directories(ver_out_dir);
        std::ofstream out(std::filesystem::path(ver_out_dir) / "verdict.json");
        out << report.dump(2) << "\n";
      } else {
        std::cout << report.dump(2) << "\n";
      }
      return all_pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
