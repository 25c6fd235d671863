#pragma once

#include "dqc/core.hpp"

#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

namespace dqc {

// Column-stacked generator of drho/dt = -i[H, rho] + sum_k g_k D[A_k] rho.
Mat liouvillian(const Mat& h, const LindbladSet& lindblads);
Mat hamiltonian_superop(const Mat& h);  // -i(I x H - H^T x I)
Mat dissipator(const LindbladSet& lindblads, int dim);

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  int n_points = 2;

  TimeGrid(double start, double end, int n);
  double dt() const { return (t_end - t_start) / (n_points - 1); }
  double at(int i) const { return t_start + i * dt(); }
};

// Hamiltonian constant on [breaks[i], breaks[i+1]). The last segment extends
// to infinity.
class PiecewiseHamiltonian {
 public:
  explicit PiecewiseHamiltonian(Mat constant);
  PiecewiseHamiltonian(std::vector<double> starts, std::vector<Mat> pieces);
  const Mat& at(double t) const;
  int segment(double t) const;
  int dim() const { return static_cast<int>(pieces_.front().rows()); }

 private:
  std::vector<double> starts_;
  std::vector<Mat> pieces_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Mat> states;

  QuantumState state(size_t i, const std::vector<int>& dims) const;
};

enum class Integrator { automatic, exponential, rk4 };

struct EvolveOptions {
  Integrator integrator = Integrator::automatic;
  int rk4_substeps = 20;
  int exponential_max_dim = 16;
};

// Visits (index, time, rho) at every grid point including the start.
void evolve_visit(const PiecewiseHamiltonian& h, const Mat& rho0, const LindbladSet& lindblads, const TimeGrid& grid,
                  const std::function<void(int, double, const Mat&)>& visit, const EvolveOptions& opt = {});

Trajectory evolve(const PiecewiseHamiltonian& h, const QuantumState& rho0, const LindbladSet& lindblads,
                  const TimeGrid& grid, const EvolveOptions& opt = {});

struct OptimalTime {
  size_t index = 0;
  double time = 0.0;
  double fidelity = 0.0;
};

// Earliest argmax of state_fidelity against the target.
OptimalTime find_optimal_time(const Trajectory& traj, const QuantumState& target);
OptimalTime find_optimal_time(const Trajectory& traj, const std::function<double(const Mat&)>& score);

void write_fidelity_csv(std::ostream& os, const Trajectory& traj, const QuantumState& target);

}  // namespace dqc
