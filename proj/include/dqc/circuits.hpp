#pragma once

#include "dqc/core.hpp"

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dqc {

struct Gate {
  std::string name;
  std::vector<int> targets;
  std::vector<int> controls;
  std::vector<double> params;
  Mat matrix;  // local operator on sites() = controls then targets

  std::vector<int> sites() const;
};

// Known names: H, X, Y, Z, RZ(l), CNOT, CZ, CPHASE(phi), R(n), RINV(n),
// U(theta, phi, gamma), SWAP. Two-qubit gates take one control and one target,
// except SWAP which takes two targets.
Gate make_gate(const std::string& name, std::vector<int> targets, std::vector<int> controls = {},
               std::vector<double> params = {});

// RZ(phi/2) t, RZ(phi/2) c, CNOT(c,t), RZ(-phi/2) t, CNOT(c,t).
std::vector<Gate> cphase_decomposition(int control, int target, double phi);

struct Measurement {
  int qubit;
};
struct Conditional {
  Gate gate;
  int bit;
};
struct Reset {
  std::vector<int> qubits;
};
using CircuitItem = std::variant<Gate, Measurement, Conditional, Reset>;

class QubitCircuit {
 public:
  explicit QubitCircuit(int n_qubits, std::vector<std::string> systems = {});

  int n_qubits() const { return n_; }
  const std::vector<CircuitItem>& items() const { return items_; }
  const std::string& system(int q) const { return systems_.at(q); }
  const std::vector<std::string>& systems() const { return systems_; }
  int measurement_count() const { return n_bits_; }

  void add(Gate g);
  void add(const std::vector<Gate>& gates);
  int measure(int qubit);  // returns the classical bit id
  void add_conditional(Gate g, int bit);
  void reset(std::vector<int> qubits);
  void append(const QubitCircuit& other);

  std::string to_text() const;
  static QubitCircuit from_text(const std::string& text);

 private:
  void check_sites(const Gate& g) const;
  int n_;
  std::vector<std::string> systems_;
  std::vector<CircuitItem> items_;
  int n_bits_ = 0;
};

// Keys are "NAME_system", e.g. "CNOT_flux". Entries of size 2^k are operators
// (applied as A rho A^dagger, then renormalised); entries of size 4^k are
// column-stacked superoperators.
using GateDictionary = std::map<std::string, Mat>;

std::string dictionary_key(const std::string& gate, const std::string& system);

struct MeasurementRecord {
  int qubit = 0;
  int outcome = 0;
  double p0 = 0.0;
  double p1 = 0.0;
};

struct CircuitRun {
  QuantumState state;
  std::vector<MeasurementRecord> records;
};

struct DictionaryMode {
  const GateDictionary* dict = nullptr;
  bool strict = false;
};

CircuitRun apply_circuit(const QubitCircuit& circuit, const QuantumState& state, DictionaryMode mode,
                         std::uint64_t rng_seed);

std::pair<MeasurementRecord, QuantumState> measure_qubit_povm(const QuantumState& state, int qubit, Rng& rng);

// Lower-level in-place kernels on qubit registers.
void apply_gate(Mat& rho, const Gate& g, int n_qubits, const Mat* replacement = nullptr);
void apply_gate(Vec& psi, const Gate& g, int n_qubits);
MeasurementRecord measure_in_place(Mat& rho, int n_qubits, int qubit, Rng& rng);
MeasurementRecord measure_in_place(Vec& psi, int n_qubits, int qubit, Rng& rng);
double probability_one(const Mat& rho, int n_qubits, int qubit);

QubitCircuit qft_circuit(int n);
QubitCircuit inverse_qft_circuit(int n);
Mat circuit_unitary(const QubitCircuit& circuit);
Mat dft_matrix(int n_qubits, bool inverse = false);

}  // namespace dqc
