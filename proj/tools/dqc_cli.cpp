#include "dqc/config.hpp"
#include "dqc/ghz.hpp"
#include "dqc/grape.hpp"
#include "dqc/harness.hpp"
#include "dqc/tomography.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using json = nlohmann::json;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
};

dqc::ExperimentConfig load(const Globals& g) {
  dqc::ExperimentConfig c = g.config.empty() ? dqc::ExperimentConfig{} : dqc::load_config(g.config);
  if (g.seed) c.seed = *g.seed;
  if (g.threads) c.threads = *g.threads;
  c.flux.alpha = c.alpha_flux;
  return c;
}

// Writes to `path`, or stdout when empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw dqc::Error("cannot write " + path);
  f << text;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s == "SNOT" ? "H" : s;
}

json matrix_json(const dqc::Mat& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      r.push_back(m(i, j).real());
      c.push_back(m(i, j).imag());
    }
    re.push_back(r);
    im.push_back(c);
  }
  return {{"re", re}, {"im", im}};
}

struct GateRun {
  dqc::GrapeResult result;
  dqc::Mat ideal;
};

GateRun optimise_gate(const dqc::ExperimentConfig& c, const std::string& gate, const std::string& system, int nts,
                      int iters) {
  const bool pair = gate == "CNOT";
  auto spec = dqc::grape_problem(system == "ryd" ? dqc::PhysicalSystem::rydberg : dqc::PhysicalSystem::flux,
                                 pair ? 2 : 1, c.rydberg, c.flux);
  dqc::GrapeOptions o = c.grape;
  o.n_ts = nts;
  o.max_iter = iters;
  o.seed = c.seed;
  GateRun run;
  run.ideal = dqc::ideal_gate_unitary(gate);
  run.result = dqc::optimize_pulse(dqc::GrapeProblem::from_spec(spec, run.ideal), o);
  return run;
}

void check_gate(const std::string& gate, const std::string& system) {
  if (gate != "X" && gate != "Z" && gate != "H" && gate != "CNOT") throw dqc::Error("gate must be x, z, h or cnot");
  if (system != "ryd" && system != "flux") throw dqc::Error("system must be ryd or flux");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed phase estimation on simulated Rydberg and flux-qubit hardware"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "parameter file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out, "output path");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.fallthrough();

  auto* validate = app.add_subcommand("validate", "noiseless phase-estimation checks");

  auto* ghz = app.add_subcommand("ghz", "flux-resonator-atom GHZ preparation");
  std::string noise;
  std::optional<int> grid;
  std::string steps_out;
  ghz->add_option("--noise", noise, "on|off")->check(CLI::IsMember({"on", "off"}));
  ghz->add_option("--grid", grid, "points per step window")->check(CLI::Range(2, 10000000));
  ghz->add_option("--steps", steps_out, "per-step CSV path");

  auto* grape = app.add_subcommand("grape-gate", "optimise one gate with GRAPE");
  std::string gate = "cnot", system = "ryd";
  std::optional<double> zeta;
  std::optional<int> nts, iters;
  grape->add_option("--gate", gate, "x|z|h|cnot");
  grape->add_option("--system", system, "ryd|flux");
  grape->add_option("--zeta", zeta, "C-shunt factor");
  grape->add_option("--nts", nts, "time slices");
  grape->add_option("--iters", iters, "iteration budget");

  auto* tomo = app.add_subcommand("tomography", "chi matrix of an ideal or optimised gate");
  std::string tgate, tideal, tsystem = "ryd";
  std::optional<int> tnts, titers;
  tomo->add_option("--gate", tgate, "gate.json from grape-gate, or x|z|h|cnot to optimise now");
  tomo->add_option("--ideal", tideal, "reference gate (x|z|h|hadamard|cnot)");
  tomo->add_option("--system", tsystem, "ryd|flux");
  tomo->add_option("--nts", tnts, "time slices");
  tomo->add_option("--iters", titers, "iteration budget");

  auto* sweep = app.add_subcommand("sweep", "zeta / time-step / iteration sweep");
  bool full = false;
  std::string plot_prefix;
  sweep->add_flag("--full", full, "paper-size grid");
  sweep->add_option("--plot", plot_prefix, "prefix for per-zeta TSV grids");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_pattern("[%l] %v");
  spdlog::flush_on(spdlog::level::info);

  try {
    dqc::ExperimentConfig cfg = load(g);

    if (validate->parsed()) {
      auto rep = dqc::validate_noiseless(cfg);
      std::ostringstream os;
      dqc::write_validation(os, rep);
      emit(g.out, os.str());
      if (!g.out.empty()) std::cout << os.str();
      return rep.ok() ? 0 : 1;
    }

    if (ghz->parsed()) {
      dqc::GhzOptions o;
      o.with_noise = noise.empty() ? cfg.ghz_noise : noise == "on";
      o.grid = grid.value_or(cfg.ghz_grid);
      o.hold_window = cfg.ghz_hold_window;
      auto r = dqc::run_ghz_sequence(cfg.hybrid, o);
      std::ostringstream os, st;
      dqc::ghz_density_report(os, r.final_state.density_matrix());
      dqc::write_ghz_steps(st, r);
      emit(g.out, os.str());
      if (!steps_out.empty()) emit(steps_out, st.str());
      std::printf("fidelity %.6f total_time %.4f ns noise %s\n", r.fidelity, r.total_time, o.with_noise ? "on" : "off");
      return 0;
    }

    if (grape->parsed()) {
      const std::string G = upper(gate);
      check_gate(G, system);
      if (zeta) cfg.flux.zeta = *zeta;
      const int n = nts.value_or(cfg.grape.n_ts), it = iters.value_or(cfg.grape.max_iter);
      GateRun run = optimise_gate(cfg, G, system, n, it);
      const auto& r = run.result;
      const double pf = dqc::process_fidelity(dqc::chi_from_unitary(run.ideal),
                                              dqc::chi_from_map(r.final_map, dqc::OperatorBasis::pauli(G == "CNOT" ? 2 : 1)));
      json j;
      j["gate"] = G;
      j["system"] = system;
      j["key"] = dqc::dictionary_key(G, system);
      j["options"] = {{"nts", n},
                      {"iters", it},
                      {"evo_time_ns", cfg.grape.evo_time},
                      {"fid_err_targ", cfg.grape.fid_err_targ},
                      {"init_pulse", dqc::to_string(cfg.grape.init_pulse)},
                      {"seed", cfg.seed},
                      {"zeta", cfg.flux.zeta},
                      {"alpha", cfg.flux.alpha}};
      j["fidelity_error"] = r.fidelity_error;
      j["process_fidelity"] = pf;
      j["iterations_used"] = r.iterations_used;
      j["terminated_by"] = r.terminated_by;
      j["map"] = matrix_json(r.final_map);
      emit(g.out.empty() ? "gate.json" : g.out, j.dump(2) + "\n");
      spdlog::info("{} {}: error {:.3e}, process fidelity {:.6f}, {} iterations, {:.1f} s, {}", G, system,
                   r.fidelity_error, pf, r.iterations_used, r.wall_time_used, r.terminated_by);
      return 0;
    }

    if (tomo->parsed()) {
      std::string ref = upper(tideal == "hadamard" ? "h" : tideal);
      std::optional<dqc::Mat> map;
      if (!tgate.empty() && std::filesystem::is_regular_file(tgate)) {
        std::ifstream f(tgate);
        json j = json::parse(f);
        const auto& re = j.at("map").at("re");
        const auto& im = j.at("map").at("im");
        dqc::Mat m(re.size(), re.size());
        for (size_t r = 0; r < re.size(); ++r)
          for (size_t c = 0; c < re.size(); ++c) m(r, c) = {re[r][c].get<double>(), im[r][c].get<double>()};
        map = m;
        if (ref.empty()) ref = j.at("gate").get<std::string>();
      } else if (!tgate.empty()) {
        const std::string G = upper(tgate);
        check_gate(G, tsystem);
        if (ref.empty()) ref = G;
        map = optimise_gate(cfg, G, tsystem, tnts.value_or(cfg.grape.n_ts), titers.value_or(cfg.grape.max_iter))
                  .result.final_map;
      }
      if (ref.empty()) throw dqc::Error("tomography needs --gate or --ideal");
      check_gate(ref, tsystem);
      const dqc::ChiMatrix theory = dqc::chi_from_unitary(dqc::ideal_gate_unitary(ref));
      const dqc::ChiMatrix chi = map ? dqc::chi_from_map(*map, theory.basis) : theory;
      std::ostringstream os;
      dqc::write_chi_report(os, chi);
      emit(g.out.empty() ? "chi.csv" : g.out, os.str());
      std::printf("process_fidelity %.9f completeness_defect %.3e\n", dqc::process_fidelity(theory, chi),
                  dqc::completeness_defect(chi));
      return 0;
    }

    if (sweep->parsed()) {
      if (full) {
        cfg.nts_list.clear();
        cfg.iters_list.clear();
        for (int n = 50; n <= 200; n += 25) cfg.nts_list.push_back(n);
        for (int n = 100; n <= 800; n += 100) cfg.iters_list.push_back(n);
      }
      auto rows = dqc::run_sweep(cfg, [](const std::string& s) { spdlog::info("{}", s); });
      std::ostringstream os;
      dqc::write_sweep_csv(os, rows);
      emit(g.out.empty() ? cfg.output : g.out, os.str());
      std::ostringstream tm;
      dqc::write_sweep_timing(tm, rows);
      spdlog::info("timing\n{}", tm.str());
      if (!plot_prefix.empty())
        for (double z : cfg.zeta_list) {
          std::ostringstream p;
          dqc::emit_plot_data(p, rows, z);
          char name[64];
          std::snprintf(name, sizeof name, "_zeta%g.tsv", z);
          emit(plot_prefix + name, p.str());
        }
      return 0;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
