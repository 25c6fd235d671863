#include "dqc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <thread>

namespace dqc {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i; (i = next.fetch_add(1)) < n;) fn(i);
  };
  const int nt = std::max(1, std::min(threads, n));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

namespace {

DictionaryBuildOptions dictionary_options(const ExperimentConfig& cfg, int nts, int iters, std::uint64_t seed,
                                          double zeta) {
  DictionaryBuildOptions o;
  o.single = cfg.grape;
  o.single.n_ts = nts;
  o.single.max_iter = iters;
  o.single.seed = seed;
  o.pair = o.single;
  o.rydberg = cfg.rydberg;
  o.flux = cfg.flux;
  o.flux.alpha = cfg.alpha_flux;
  o.flux.zeta = zeta;
  return o;
}

double cnot_error(const GateDictionaryBuild& b, const std::string& key) {
  for (const auto& g : b.builds)
    if (g.key == key) return g.error.empty() ? g.result.fidelity_error : std::nan("");
  return std::nan("");
}

std::string build_errors(const GateDictionaryBuild& b) {
  std::string s;
  for (const auto& g : b.builds)
    if (!g.error.empty()) s += (s.empty() ? "" : "; ") + g.key + ": " + g.error;
  return s;
}

}  // namespace

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const int n_cells = static_cast<int>(cfg.nts_list.size() * cfg.iters_list.size());
  auto cell_of = [&](int c) { return std::pair{cfg.nts_list[c / cfg.iters_list.size()], cfg.iters_list[c % cfg.iters_list.size()]}; };
  auto cell_seed = [&](int c) { return cfg.seed + static_cast<std::uint64_t>(c) * 10007u; };

  // Rydberg entries do not depend on zeta; build them once per cell.
  std::vector<GateDictionaryBuild> ryd(n_cells);
  if (!cfg.ideal_gates) {
    parallel_for(n_cells, cfg.threads, [&](int c) {
      auto [nts, iters] = cell_of(c);
      auto o = dictionary_options(cfg, nts, iters, cell_seed(c), cfg.flux.zeta);
      o.systems = {"ryd"};
      ryd[c] = build_gate_dictionary(o);
      if (progress) progress("ryd cell nts=" + std::to_string(nts) + " iters=" + std::to_string(iters) + " done");
    });
  }

  const int n_rows = static_cast<int>(cfg.zeta_list.size()) * n_cells;
  std::vector<ResultRow> rows(n_rows);
  const std::string target = nearest_outcome(cfg.phase, cfg.counting_qubits);
  parallel_for(n_rows, cfg.threads, [&](int r) {
    const auto start = std::chrono::steady_clock::now();
    const int c = r % n_cells;
    auto [nts, iters] = cell_of(c);
    ResultRow& row = rows[r];
    row.zeta = cfg.zeta_list[r / n_cells];
    row.nts = nts;
    row.iters = iters;
    row.seed = cfg.seed + static_cast<std::uint64_t>(r) * 10007u;
    try {
      GateDictionary dict;
      if (!cfg.ideal_gates) {
        auto o = dictionary_options(cfg, nts, iters, cell_seed(c), row.zeta);
        o.systems = {"flux"};
        GateDictionaryBuild flux = build_gate_dictionary(o);
        dict = ryd[c].dict;
        dict.insert(flux.dict.begin(), flux.dict.end());
        row.ryd_cnot_error = cnot_error(ryd[c], "CNOT_ryd");
        row.flux_cnot_error = cnot_error(flux, "CNOT_flux");
        std::string errs = build_errors(ryd[c]) + build_errors(flux);
        if (!errs.empty()) row.error = errs;
      }
      PhaseEstimationResult pe =
          run_phase_estimation(cfg.phase, cfg.counting_qubits, cfg.ideal_gates ? nullptr : &dict, cfg.shots, row.seed);
      row.mean_probability = pe.histogram.at(target);
      for (const auto& run : pe.runs) row.outcomes.push_back(run.outcome);
    } catch (const std::exception& e) {
      row.error = e.what();
      row.mean_probability = std::nan("");
    }
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (progress) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "row zeta=%g nts=%d iters=%d p=%.4f", row.zeta, nts, iters, row.mean_probability);
      progress(buf);
    }
  });
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "zeta,nts,iters,seed,mean_probability,outcomes,ryd_cnot_error,flux_cnot_error,error\n";
  char buf[256];
  for (const auto& r : rows) {
    std::string outs;
    for (const auto& o : r.outcomes) outs += (outs.empty() ? "" : ";") + o;
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ' ');
    std::replace(err.begin(), err.end(), '\n', ' ');
    std::snprintf(buf, sizeof buf, "%.10g,%d,%d,%llu,%.12g,", r.zeta, r.nts, r.iters,
                  static_cast<unsigned long long>(r.seed), r.mean_probability);
    os << buf << outs;
    std::snprintf(buf, sizeof buf, ",%.6e,%.6e,", r.ryd_cnot_error, r.flux_cnot_error);
    os << buf << err << '\n';
  }
}

void write_sweep_timing(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "zeta,nts,iters,wall_time\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%d,%d,%.3f\n", r.zeta, r.nts, r.iters, r.wall_time);
    os << buf;
  }
}

void emit_plot_data(std::ostream& os, const std::vector<ResultRow>& rows, double zeta) {
  std::set<int> nts, iters;
  std::map<std::pair<int, int>, double> cell;
  for (const auto& r : rows) {
    if (r.zeta != zeta) continue;
    if (!cell.emplace(std::pair{r.nts, r.iters}, r.mean_probability).second)
      throw Error("duplicate sweep cell nts=" + std::to_string(r.nts) + " iters=" + std::to_string(r.iters));
    nts.insert(r.nts);
    iters.insert(r.iters);
  }
  os << "nts\\iters";
  for (int i : iters) os << '\t' << i;
  os << '\n';
  char buf[32];
  for (int n : nts) {
    os << n;
    for (int i : iters) {
      auto it = cell.find({n, i});
      if (it == cell.end() || std::isnan(it->second))
        os << "\tNaN";
      else {
        std::snprintf(buf, sizeof buf, "\t%.6f", it->second);
        os << buf;
      }
    }
    os << '\n';
  }
}

bool ValidationReport::ok() const {
  return std::all_of(cases.begin(), cases.end(), [](const ValidationCase& c) { return c.passed; });
}

ValidationReport validate_noiseless(const ExperimentConfig& cfg) {
  ValidationReport rep;
  char buf[160];
  auto exact = [&](const std::string& name, double phi, int t, const std::string& expect) {
    auto res = run_phase_estimation(phi, t, nullptr, 1, cfg.seed);
    const double p = res.histogram.at(expect);
    std::snprintf(buf, sizeof buf, "P(%s) = %.12f", expect.c_str(), p);
    rep.cases.push_back({name, std::abs(p - 1.0) <= 1e-9, buf});
  };
  exact("t=2 phi=1/4", 0.25, 2, "01");
  {
    auto res = run_phase_estimation(0.125, 2, nullptr, 1, cfg.seed);
    const double bound = 4.0 / (kPi * kPi) - 1e-6;
    const double p0 = res.histogram.at("00"), p1 = res.histogram.at("01");
    std::snprintf(buf, sizeof buf, "P(00) = %.6f, P(01) = %.6f, bound %.6f", p0, p1, bound);
    rep.cases.push_back({"t=2 phi=1/8", p0 >= bound && p1 >= bound, buf});
  }
  exact("t=3 phi=5/8", 0.625, 3, "101");
  const double scaled = cfg.phase * std::ldexp(1.0, cfg.counting_qubits);
  if (std::abs(scaled - std::round(scaled)) < 1e-12) {
    std::snprintf(buf, sizeof buf, "t=%d phi=%g", cfg.counting_qubits, cfg.phase);
    exact(buf, cfg.phase, cfg.counting_qubits, nearest_outcome(cfg.phase, cfg.counting_qubits));
  }
  return rep;
}

void write_validation(std::ostream& os, const ValidationReport& r) {
  for (const auto& c : r.cases) os << (c.passed ? "ok   " : "FAIL ") << c.name << ": " << c.detail << '\n';
}

}  // namespace dqc
