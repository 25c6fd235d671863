#pragma once

#include "dqc/grape.hpp"
#include "dqc/hamiltonians.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dqc {

inline constexpr int kConfigSchema = 1;

struct ExperimentConfig {
  double phase = 3.0 / 16.0;
  int counting_qubits = 4;
  int shots = 10;
  std::vector<double> zeta_list{10.0, 1000.0};
  double alpha_flux = 0.8;
  std::vector<int> nts_list{50, 100, 200};
  std::vector<int> iters_list{100, 400, 800};
  std::uint64_t seed = 1;
  std::string output = "sweep.csv";
  int threads = 1;
  bool ideal_gates = false;

  GrapeOptions grape;
  RydbergParams rydberg;
  FluxParams flux;
  HybridParams hybrid;
  int ghz_grid = 10000;
  double ghz_hold_window = 10.0;  // ns
  bool ghz_noise = true;

  void validate() const;
};

// INI-style text:
//   schema = 1
//   [experiment]
//   phase = 0.1875
//   nts = 50, 200
//   [grape]
//   evo_time = 50 ns
// Values may carry a unit suffix; unknown sections, keys or units are errors.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

// Scalar with optional unit, converted to the internal unit of `kind`.
enum class UnitKind { none, time, seconds, angular, cyclic, rate, length, field };
double parse_quantity(const std::string& text, UnitKind kind);

}  // namespace dqc
