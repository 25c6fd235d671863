#pragma once

#include "dqc/core.hpp"
#include "dqc/hamiltonians.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dqc {

enum class StepScore { fixed, populations, overlap };

struct ProtocolStep {
  int label = 0;
  double field = 0.0;    // V/cm
  double gamma_q = 0.0;
  double window = 0.0;   // ns scanned (or applied, for fixed steps)
  double duration = 0.0; // ns actually used
  double score = 0.0;
  StepScore mode = StepScore::populations;
  std::string target;    // e.g. "R1u+R0g"
};

struct ProtocolResult {
  QuantumState final_state = QuantumState::basis({12}, {0});
  double fidelity = 0.0;  // vs (|L1e> + |R0g>)/sqrt2
  double total_time = 0.0;
  std::vector<ProtocolStep> steps;
};

struct GhzOptions {
  bool with_noise = false;
  int grid = 10000;            // points per step window
  double hold_window = 10.0;   // ns, phase-locking holds at E1
  int max_steps = 8;           // truncate the sequence (diagnostics)
  double fidelity_floor = 0.0; // throw below this
};

// Basis labels L0e ... R1u in hybrid_index order.
std::vector<std::string> hybrid_labels();
Vec hybrid_ket(int flux, int photon, int atom);
Vec ghz_target();

ProtocolResult run_ghz_sequence(const HybridParams& hp, const GhzOptions& opt = {});

// |rho_ij| as a labelled 12x12 CSV.
void ghz_density_report(std::ostream& os, const Mat& rho);
void write_ghz_steps(std::ostream& os, const ProtocolResult& r);

}  // namespace dqc
