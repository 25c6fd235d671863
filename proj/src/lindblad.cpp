#include "dqc/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

namespace dqc {

Mat hamiltonian_superop(const Mat& h) {
  const int d = static_cast<int>(h.rows());
  Mat id = Mat::Identity(d, d);
  return -kI * (tensor_product(id, h) - tensor_product(Mat(h.transpose()), id));
}

Mat dissipator(const LindbladSet& lindblads, int dim) {
  Mat id = Mat::Identity(dim, dim);
  Mat out = Mat::Zero(dim * dim, dim * dim);
  for (const auto& t : lindblads.terms) {
    if (t.op.rows() != dim || t.op.cols() != dim) throw Error("lindblad operator '" + t.label + "' has wrong dimension");
    if (t.rate < 0.0) throw Error("lindblad rate '" + t.label + "' is negative");
    if (t.rate == 0.0) continue;
    Mat ada = t.op.adjoint() * t.op;
    out += t.rate * (tensor_product(Mat(t.op.conjugate()), t.op) - 0.5 * tensor_product(id, ada) -
                     0.5 * tensor_product(Mat(ada.transpose()), id));
  }
  return out;
}

Mat liouvillian(const Mat& h, const LindbladSet& lindblads) {
  if (h.rows() != h.cols()) throw Error("liouvillian: Hamiltonian must be square");
  return hamiltonian_superop(h) + dissipator(lindblads, static_cast<int>(h.rows()));
}

TimeGrid::TimeGrid(double start, double end, int n) : t_start(start), t_end(end), n_points(n) {
  if (n < 2) throw Error("time grid needs at least two points");
  if (!(end > start)) throw Error("time grid must be increasing");
}

PiecewiseHamiltonian::PiecewiseHamiltonian(Mat constant) : starts_{-INFINITY}, pieces_{std::move(constant)} {}

PiecewiseHamiltonian::PiecewiseHamiltonian(std::vector<double> starts, std::vector<Mat> pieces)
    : starts_(std::move(starts)), pieces_(std::move(pieces)) {
  if (starts_.empty() || starts_.size() != pieces_.size()) throw Error("piecewise Hamiltonian: bad segment lists");
  if (!std::is_sorted(starts_.begin(), starts_.end())) throw Error("piecewise Hamiltonian: unsorted breaks");
  for (const auto& p : pieces_)
    if (p.rows() != pieces_.front().rows() || p.rows() != p.cols()) throw Error("piecewise Hamiltonian: size mismatch");
}

int PiecewiseHamiltonian::segment(double t) const {
  auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  if (it == starts_.begin()) return 0;
  return static_cast<int>(it - starts_.begin()) - 1;
}

const Mat& PiecewiseHamiltonian::at(double t) const { return pieces_[segment(t)]; }

QuantumState Trajectory::state(size_t i, const std::vector<int>& dims) const {
  const Mat& r = states.at(i);
  return QuantumState::density(0.5 * (r + r.adjoint()), dims);
}

namespace {

Vec rk4_step(const Mat& l, const Vec& x, double h) {
  Vec k1 = l * x;
  Vec k2 = l * (x + 0.5 * h * k1);
  Vec k3 = l * (x + 0.5 * h * k2);
  Vec k4 = l * (x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

void evolve_visit(const PiecewiseHamiltonian& h, const Mat& rho0, const LindbladSet& lindblads, const TimeGrid& grid,
                  const std::function<void(int, double, const Mat&)>& visit, const EvolveOptions& opt) {
  const int d = h.dim();
  if (rho0.rows() != d || rho0.cols() != d) throw Error("evolve: initial state dimension mismatch");
  const double dt = grid.dt();
  bool use_exp = opt.integrator == Integrator::exponential ||
                 (opt.integrator == Integrator::automatic && d <= opt.exponential_max_dim);
  const Mat diss = dissipator(lindblads, d);
  std::map<int, Mat> cache;  // segment -> step propagator or generator

  Vec x = vec(rho0);
  visit(0, grid.t_start, rho0);
  for (int i = 1; i < grid.n_points; ++i) {
    const double mid = grid.at(i - 1) + 0.5 * dt;
    const int seg = h.segment(mid);
    auto it = cache.find(seg);
    if (it == cache.end()) {
      Mat l = hamiltonian_superop(h.at(mid)) + diss;
      it = cache.emplace(seg, use_exp ? matrix_exponential(Mat(l * dt)) : l).first;
    }
    if (use_exp) {
      x = it->second * x;
    } else {
      const double sub = dt / opt.rk4_substeps;
      for (int s = 0; s < opt.rk4_substeps; ++s) x = rk4_step(it->second, x, sub);
    }
    if (!x.allFinite()) throw Error("evolve: non-finite state encountered");
    visit(i, grid.at(i), unvec(x, d));
  }
}

Trajectory evolve(const PiecewiseHamiltonian& h, const QuantumState& rho0, const LindbladSet& lindblads,
                  const TimeGrid& grid, const EvolveOptions& opt) {
  Trajectory tr;
  tr.times.reserve(grid.n_points);
  tr.states.reserve(grid.n_points);
  evolve_visit(
      h, rho0.density_matrix(), lindblads, grid,
      [&](int, double t, const Mat& r) {
        tr.times.push_back(t);
        tr.states.push_back(r);
      },
      opt);
  return tr;
}

OptimalTime find_optimal_time(const Trajectory& traj, const std::function<double(const Mat&)>& score) {
  if (traj.states.empty()) throw Error("find_optimal_time: empty trajectory");
  OptimalTime best{0, traj.times[0], score(traj.states[0])};
  for (size_t i = 1; i < traj.states.size(); ++i) {
    double s = score(traj.states[i]);
    if (s > best.fidelity) best = {i, traj.times[i], s};
  }
  return best;
}

OptimalTime find_optimal_time(const Trajectory& traj, const QuantumState& target) {
  if (target.is_ket()) {
    Vec psi = target.ket_vector();
    return find_optimal_time(traj, [&](const Mat& r) { return std::sqrt(std::max(0.0, psi.dot(r * psi).real())); });
  }
  return find_optimal_time(traj, [&](const Mat& r) {
    return state_fidelity(target, QuantumState::density(0.5 * (r + r.adjoint()), target.dims()));
  });
}

void write_fidelity_csv(std::ostream& os, const Trajectory& traj, const QuantumState& target) {
  os << "t,fidelity_vs_target\n";
  char buf[64];
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const Mat& r = traj.states[i];
    double f = state_fidelity(target, QuantumState::density(0.5 * (r + r.adjoint()), target.dims()));
    std::snprintf(buf, sizeof buf, "%.10g,%.12g\n", traj.times[i], f);
    os << buf;
  }
}

}  // namespace dqc
