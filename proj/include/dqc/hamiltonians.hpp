#pragma once

#include "dqc/core.hpp"

#include <optional>
#include <vector>

namespace dqc {

// Units: angular frequencies in rad/ns, times in ns, energies quoted in GHz
// are cyclic and multiplied by 2*pi where they enter a Hamiltonian.

struct RydbergParams {
  double rabi = kTwoPi * 6.8;        // rad/ns
  double detuning = 0.0;             // rad/ns
  double laser_phase = 0.0;          // rad
  double c3 = 0.0;                   // GHz um^3
  double c6 = 801.98;                // GHz um^6
  double distance = 3.5;             // um
  double dephasing = kTwoPi * 470e-9;  // rad/ns
  double decay = 1.0 / 375e3;        // 1/ns, 70S lifetime 375 us
  std::optional<double> langevin_inv_corr;  // gamma, 1/ns
  std::optional<double> langevin_diffusion; // D, rad^2/ns

  double effective_dephasing() const;
  double blockade_shift() const;  // rad/ns, 2*pi*C6/R^6
};

Mat rydberg_hamiltonian(const RydbergParams& p, int n_atoms);
std::pair<double, double> rydberg_pair_eigenenergies(double forster_defect, double v);
double vdw_crossover_radius(double c6, double forster_defect);
LindbladSet rydberg_lindblads(const RydbergParams& p, int n_atoms);

// Three-level atoms {0, 1, r}, laser on 0 <-> r. Pulse areas pi, 2pi, pi on
// control, target, control. Input dims must be {3, 3}.
QuantumState simulate_blockade_cz(const QuantumState& state, double rabi, double blockade);
Mat blockade_cz_map(double rabi, double blockade);  // 4x4 on {00,01,10,11}

struct FluxParams {
  double e_j = 65.0;          // GHz
  double e_c = 1.0;           // GHz
  double alpha = 0.8;
  double f_eps = 0.53;
  double zeta = 10.0;
  double tunnel = 0.82;       // Delta, GHz
  double bias = 6.7;          // epsilon, GHz
  double g_res = 2.0;         // GHz
  double omega_res = 20.0;    // GHz
  double yy_coupling = 20.0;  // GHz, two-qubit sigma_y sigma_y drift
  double photon_rate = 9.19e-3;  // 1/ns, resonator photon decay 1/tau
  double delta_f = 1e-8;
  double delta_n = 1e-3;
  double delta_omega = 1e-6;
  int resonator_dim = 2;
};

double flux_potential(double phi1, double phi2, double alpha, double f_eps);
double critical_frustration(double alpha);

struct FluxWell {
  double phi;     // phi1 = -phi2 = phi
  double energy;  // U/E_J
};
// Local minima of U(phi, -phi) over (-pi, pi], ordered by phi.
std::vector<FluxWell> flux_wells(double alpha, double f_eps);

struct FluxDerived {
  double phi_star;
  double e_c_minus;   // GHz
  double e_j_minus;   // GHz
  double n_z;
  double im_phi0;     // I_m * Phi0 / h, GHz
  double omega_q;     // rad/ns
};
FluxDerived flux_derived(const FluxParams& p);

Mat flux_qubit_hamiltonian(double bias, double tunnel);  // pi*(eps sz + Delta sx), rad/ns
Mat flux_system_hamiltonian(const FluxParams& p);
LindbladSet flux_lindblads(const FluxParams& p, int n_qubits = 1);

struct FluxRates {
  double z, x, y, purcell;
};
FluxRates flux_rates(const FluxParams& p);

enum class LevelMap { calibrated, prose, code };
enum class DephasingScale { mhz, ghz };

struct HybridParams {
  double omega0 = kTwoPi * 20.0;
  double rabi = kTwoPi * 4.6;        // Omega_A1
  double rabi_u = kTwoPi * 3.2;      // Omega'_A2
  double g_a = kTwoPi * 1.0;
  double g_a_u = kTwoPi * 0.5;
  double tunnel = kTwoPi * 5.0;      // Delta
  double gamma_q_far = -5e-3;
  double gamma_q_res = -3.06e-3;
  std::vector<double> fields{520.0, 537.5, 550.8, 571.7, 585.4};  // V/cm
  double mutual = 27e-12;            // H
  double inductance = 247e-9;        // H
  double capacitance = 256e-18;      // F
  double persistent_current = 0.0;   // A; 0 selects the resonance value
  LevelMap level_map = LevelMap::calibrated;
  double kappa_q = 1e5;              // resonator Q
  double gamma_ryd = kTwoPi * 1.5e-4;
  double gamma_relax = kTwoPi * 3e-5;
  double gamma_phi = kTwoPi * 1e-4;
  DephasingScale dephasing_scale = DephasingScale::mhz;
};

struct HybridDerived {
  double persistent_current;  // A
  double g_f;                 // rad/ns
  double delta;               // rad/ns
};
HybridDerived hybrid_derived(const HybridParams& hp);

double flux_bias_energy(const HybridParams& hp, double gamma_q);  // epsilon, rad/ns

// omega_e - omega_g and omega_e - omega_u at field E, rad/ns.
struct AtomSplittings {
  double eg;
  double eu;
};
struct LevelCalibration {
  double eu_e2, eu_e3, eg_e5;
  double eg_slope;  // rad/ns per V/cm
};
LevelCalibration calibrate_levels(const HybridParams& hp);
AtomSplittings atom_splittings(const HybridParams& hp, double field, const LevelCalibration* cal = nullptr);

// Basis index f*6 + n*3 + a with f in {L, R}, n in {0, 1}, a in {e, g, u}.
int hybrid_index(int flux, int photon, int atom);
Mat hybrid_hamiltonian(const HybridParams& hp, double field, double gamma_q, const LevelCalibration* cal = nullptr);
LindbladSet hybrid_lindblads(const HybridParams& hp);

enum class PhysicalSystem { rydberg, flux };

struct GrapeProblemSpec {
  Mat drift;
  std::vector<Mat> controls;
  LindbladSet lindblads;
  Mat initial;  // identity superoperator
};
GrapeProblemSpec grape_problem(PhysicalSystem system, int n_qubits, const RydbergParams& ryd, const FluxParams& flux);

}  // namespace dqc
