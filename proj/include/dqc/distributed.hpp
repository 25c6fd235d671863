#pragma once

#include "dqc/circuits.hpp"
#include "dqc/core.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace dqc {

enum class Machine { A, B };

// Machine B (Rydberg) holds the remote counting qubits and channel_b;
// machine A (flux) holds channel_a, its resident counting qubits and the
// phase-holding qubit. counting[j] receives the controlled phase 2*pi*phi*2^j.
struct DistributedRegister {
  std::vector<int> machine_a;
  std::vector<int> machine_b;
  int channel_a = 0;
  int channel_b = 0;
  int phase_qubit = 0;
  std::vector<int> counting;
  int n_qubits = 0;

  // remote counting qubits on B, local ones on A. (3, 1) gives the 7-qubit
  // layout [b0 b1 b2 ch_b | ch_a a0 phase].
  static DistributedRegister standard(int remote_counting, int local_counting);
  static DistributedRegister for_counting(int t);

  Machine machine(int q) const;
  std::string system(int q) const;  // "ryd" on B, "flux" on A
  int channel(Machine m) const { return m == Machine::A ? channel_a : channel_b; }
};

struct ClassicalMessage {
  Machine from;
  int bit;
  std::string purpose;  // "x-correction" or "z-correction"
};

struct DpeContext {
  Mat rho;
  DistributedRegister reg;
  const GateDictionary* dict = nullptr;
  Rng rng;
  std::vector<ClassicalMessage> messages;
  int e2_count = 0;

  DpeContext(DistributedRegister r, const GateDictionary* d, std::uint64_t seed);
  void apply(const Gate& g);  // dictionary-aware; CPHASE goes through its decomposition
  void apply_ideal(const Gate& g);
  int measure(int q);
};

void initialize_e2(DpeContext& ctx);

struct PhaseTarget {
  int qubit;
  double phi;
};
// Teleported control: `control` on one machine drives CPHASE(phi) on every
// target held by the other machine through a single ebit.
void non_local_controlled_phases(DpeContext& ctx, int control, const std::vector<PhaseTarget>& targets);
void non_local_cphase(DpeContext& ctx, double phi, int control, int target);

void pulse_phase_sequence(DpeContext& ctx, double phi);
void distributed_inverse_qft(DpeContext& ctx);

// Reference: the same inverse QFT applied with ideal local gates on the
// counting list (the input is read in reversed list order).
Mat counting_inverse_qft_unitary(int t);

struct RunRecord {
  double phase_true = 0.0;
  std::string outcome;
  std::vector<ClassicalMessage> messages;
  int shot = 0;
};

struct PhaseEstimationResult {
  std::map<std::string, double> histogram;  // mean exact marginal over shots
  std::vector<RunRecord> runs;
  int e2_per_run = 0;
};

PhaseEstimationResult run_phase_estimation(double phi, int counting_total, const GateDictionary* dict, int shots,
                                           std::uint64_t seed);

std::string outcome_label(int value, int t);
std::string nearest_outcome(double phi, int t);
// Marginal over the counting list, keys are bit strings in list order.
std::map<std::string, double> counting_distribution(const Mat& rho, const DistributedRegister& reg);

void write_phase_csv(std::ostream& os, const PhaseEstimationResult& r, double phi, int shots, std::uint64_t seed);

}  // namespace dqc
