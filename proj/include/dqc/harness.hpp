#pragma once

#include "dqc/config.hpp"
#include "dqc/distributed.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace dqc {

struct ResultRow {
  double zeta = 0.0;
  int nts = 0;
  int iters = 0;
  std::uint64_t seed = 0;
  double mean_probability = 0.0;
  std::vector<std::string> outcomes;  // one sampled outcome per shot
  double ryd_cnot_error = 0.0;
  double flux_cnot_error = 0.0;
  double wall_time = 0.0;  // s, not part of the deterministic CSV
  std::string error;
};

using ProgressFn = std::function<void(const std::string&)>;

// Rows ordered zeta-major, then nts, then iters.
std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const ProgressFn& progress = {});

void write_sweep_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_sweep_timing(std::ostream& os, const std::vector<ResultRow>& rows);

// nts down the rows, iters across the columns; missing cells are NaN.
void emit_plot_data(std::ostream& os, const std::vector<ResultRow>& rows, double zeta);

struct ValidationCase {
  std::string name;
  bool passed = false;
  std::string detail;
};
struct ValidationReport {
  std::vector<ValidationCase> cases;
  bool ok() const;
};
ValidationReport validate_noiseless(const ExperimentConfig& cfg);
void write_validation(std::ostream& os, const ValidationReport& r);

// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace dqc
