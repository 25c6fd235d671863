#pragma once

#include "dqc/circuits.hpp"
#include "dqc/core.hpp"
#include "dqc/hamiltonians.hpp"
#include "dqc/lbfgs.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dqc {

using RMat = Eigen::MatrixXd;

struct ControlPulse {
  RMat amplitudes;  // n_ts x n_controls, rad/ns
  double dt = 0.0;  // ns
};

struct GrapeProblem {
  Mat drift;
  std::vector<Mat> controls;
  LindbladSet lindblads;
  Mat initial;  // superoperator the slice products act on
  Mat target;   // superoperator C

  static GrapeProblem from_spec(const GrapeProblemSpec& spec, const Mat& target_unitary);
  int dim() const { return static_cast<int>(drift.rows()); }
};

enum class PulseInit { RND, ZERO, LIN, SINE, SQUARE, SAW, TRIANGLE };
enum class GradientMode { exact, first_order };

PulseInit parse_pulse_init(const std::string& s);
std::string to_string(PulseInit p);

struct GrapeOptions {
  int n_ts = 50;
  double evo_time = 50.0;  // ns
  double fid_err_targ = 1e-10;
  int max_iter = 500;
  double max_wall_time = 200.0;  // s
  PulseInit init_pulse = PulseInit::RND;
  double init_scale = kTwoPi * 0.1;
  std::optional<double> amp_bound;
  GradientMode gradient = GradientMode::exact;
  int lbfgs_memory = 10;
  std::uint64_t seed = 0;
};

ControlPulse initial_pulse(int n_ts, int n_controls, double evo_time, PulseInit kind, double scale, std::uint64_t seed);

// exp(dt * L(drift + sum_k u_k H_k))
Mat step_propagator(const GrapeProblem& p, const RVec& u, double dt);

struct Performance {
  double fidelity = 0.0;       // Re Tr(C^dagger M) / Tr(C^dagger C)
  double fidelity_error = 0.0; // 1 - fidelity
  RMat gradient;               // d(error)/du, n_ts x n_controls
  Mat final_map;
};

Performance performance_and_gradient(const GrapeProblem& p, const ControlPulse& pulse,
                                     GradientMode mode = GradientMode::exact, bool with_gradient = true);

struct GrapeResult {
  Mat final_map;
  ControlPulse pulse;
  double fidelity_error = 1.0;
  int iterations_used = 0;
  double wall_time_used = 0.0;
  std::string terminated_by;
  std::vector<double> history;  // best-ever error after each iteration
};

GrapeResult optimize_pulse(const GrapeProblem& p, const GrapeOptions& opt);

struct GateBuild {
  std::string key;
  GrapeResult result;
  Mat entry;
  std::string error;
};

struct DictionaryBuildOptions {
  GrapeOptions single;
  GrapeOptions pair;
  RydbergParams rydberg;
  FluxParams flux;
  std::vector<std::string> systems{"ryd", "flux"};
  int threads = 1;
};

// Entries {X, Z, H} x {ryd, flux} and CNOT x {ryd, flux}; every entry is the
// optimised superoperator, two-qubit ones normalised by their (0,0) element.
struct GateDictionaryBuild {
  GateDictionary dict;
  std::vector<GateBuild> builds;
};
GateDictionaryBuild build_gate_dictionary(const DictionaryBuildOptions& opt);

Mat ideal_gate_unitary(const std::string& name);

}  // namespace dqc
