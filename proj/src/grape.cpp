#include "dqc/grape.hpp"

#include "dqc/lindblad.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace dqc {

namespace {

double trace_product(const Mat& a, const Mat& b) { return (a.transpose().cwiseProduct(b)).sum().real(); }

}  // namespace

GrapeProblem GrapeProblem::from_spec(const GrapeProblemSpec& spec, const Mat& target_unitary) {
  if (target_unitary.rows() != spec.drift.rows()) throw Error("GRAPE target does not match the system dimension");
  return {spec.drift, spec.controls, spec.lindblads, spec.initial, unitary_superop(target_unitary)};
}

PulseInit parse_pulse_init(const std::string& s) {
  static const std::map<std::string, PulseInit> names{{"RND", PulseInit::RND},       {"ZERO", PulseInit::ZERO},
                                                      {"LIN", PulseInit::LIN},       {"SINE", PulseInit::SINE},
                                                      {"SQUARE", PulseInit::SQUARE}, {"SAW", PulseInit::SAW},
                                                      {"TRIANGLE", PulseInit::TRIANGLE}};
  auto it = names.find(s);
  if (it == names.end()) throw Error("unknown pulse type '" + s + "'");
  return it->second;
}

std::string to_string(PulseInit p) {
  switch (p) {
    case PulseInit::RND: return "RND";
    case PulseInit::ZERO: return "ZERO";
    case PulseInit::LIN: return "LIN";
    case PulseInit::SINE: return "SINE";
    case PulseInit::SQUARE: return "SQUARE";
    case PulseInit::SAW: return "SAW";
    case PulseInit::TRIANGLE: return "TRIANGLE";
  }
  return "RND";
}

ControlPulse initial_pulse(int n_ts, int n_controls, double evo_time, PulseInit kind, double scale, std::uint64_t seed) {
  if (n_ts < 2) throw Error("GRAPE needs at least two time slices");
  if (!(evo_time > 0.0)) throw Error("GRAPE evolution time must be positive");
  ControlPulse p{RMat::Zero(n_ts, n_controls), evo_time / n_ts};
  Rng rng(seed);
  for (int l = 0; l < n_ts; ++l) {
    const double x = (l + 0.5) / n_ts;
    double v = 0.0;
    switch (kind) {
      case PulseInit::RND: break;
      case PulseInit::ZERO: v = 0.0; break;
      case PulseInit::LIN: v = 2.0 * x - 1.0; break;
      case PulseInit::SINE: v = std::sin(kTwoPi * x); break;
      case PulseInit::SQUARE: v = x < 0.5 ? 1.0 : -1.0; break;
      case PulseInit::SAW: v = 2.0 * (2.0 * x - std::floor(2.0 * x)) - 1.0; break;
      case PulseInit::TRIANGLE: v = 1.0 - 4.0 * std::abs(x - 0.5); break;
    }
    for (int k = 0; k < n_controls; ++k)
      p.amplitudes(l, k) = scale * (kind == PulseInit::RND ? rng.uniform(-1.0, 1.0) : v);
  }
  return p;
}

Mat step_propagator(const GrapeProblem& p, const RVec& u, double dt) {
  if (u.size() != static_cast<Eigen::Index>(p.controls.size())) throw Error("control vector size mismatch");
  Mat h = p.drift;
  for (size_t k = 0; k < p.controls.size(); ++k) h += u(k) * p.controls[k];
  return matrix_exponential(Mat(dt * liouvillian(h, p.lindblads)));
}

Performance performance_and_gradient(const GrapeProblem& p, const ControlPulse& pulse, GradientMode mode,
                                     bool with_gradient) {
  const int n = static_cast<int>(pulse.amplitudes.rows());
  const int m = static_cast<int>(pulse.amplitudes.cols());
  if (m != static_cast<int>(p.controls.size())) throw Error("pulse has the wrong number of controls");
  const int d2 = p.dim() * p.dim();
  if (p.target.rows() != d2 || p.initial.rows() != d2) throw Error("GRAPE target/initial must be superoperators");
  const double dt = pulse.dt;

  const Mat g0 = liouvillian(p.drift, p.lindblads);
  std::vector<Mat> gk;
  gk.reserve(m);
  for (const auto& c : p.controls) gk.push_back(hamiltonian_superop(c));

  std::vector<Mat> gen(n), prop(n);
  for (int l = 0; l < n; ++l) {
    gen[l] = g0;
    for (int k = 0; k < m; ++k) gen[l] += pulse.amplitudes(l, k) * gk[k];
    gen[l] *= dt;
    prop[l] = matrix_exponential(gen[l]);
  }
  std::vector<Mat> fwd(n + 1);
  fwd[0] = p.initial;
  for (int l = 0; l < n; ++l) fwd[l + 1] = prop[l] * fwd[l];

  const Mat cdag = p.target.adjoint();
  const double norm = (cdag * p.target).trace().real();
  Performance out;
  out.final_map = fwd[n];
  out.fidelity = trace_product(cdag, fwd[n]) / norm;
  out.fidelity_error = 1.0 - out.fidelity;
  if (!with_gradient) return out;

  out.gradient = RMat::Zero(n, m);
  Mat back = Mat::Identity(d2, d2);  // P_N ... P_{l+1}
  Mat aug = Mat::Zero(2 * d2, 2 * d2);
  for (int l = n - 1; l >= 0; --l) {
    Mat x = fwd[l] * cdag * back;
    Mat y;
    if (mode == GradientMode::exact) {
      aug.topLeftCorner(d2, d2) = gen[l];
      aug.bottomRightCorner(d2, d2) = gen[l];
      aug.topRightCorner(d2, d2) = x;
      y = matrix_exponential(aug).topRightCorner(d2, d2);
    } else {
      y = prop[l] * x;
    }
    for (int k = 0; k < m; ++k) out.gradient(l, k) = -dt * trace_product(y, gk[k]) / norm;
    back = back * prop[l];
  }
  return out;
}

GrapeResult optimize_pulse(const GrapeProblem& p, const GrapeOptions& opt) {
  if (opt.n_ts < 2) throw Error("GRAPE needs at least two time slices");
  if (!(opt.fid_err_targ > 0.0 && opt.fid_err_targ <= 1.0)) throw Error("fid_err_targ must lie in (0, 1]");
  if (opt.amp_bound && !(*opt.amp_bound > 0.0)) throw Error("amplitude bound must be positive");
  const auto start = std::chrono::steady_clock::now();
  const int m = static_cast<int>(p.controls.size());
  ControlPulse pulse = initial_pulse(opt.n_ts, m, opt.evo_time, opt.init_pulse, opt.init_scale, opt.seed);
  const int nv = opt.n_ts * m;

  auto to_amp = [&](double v) { return opt.amp_bound ? *opt.amp_bound * std::tanh(v / *opt.amp_bound) : v; };
  RVec x0(nv);
  for (int l = 0; l < opt.n_ts; ++l)
    for (int k = 0; k < m; ++k) {
      double u = pulse.amplitudes(l, k);
      if (opt.amp_bound) u = *opt.amp_bound * std::atanh(std::clamp(u / *opt.amp_bound, -0.999999, 0.999999));
      x0(l * m + k) = u;
    }

  GrapeResult best;
  best.fidelity_error = std::numeric_limits<double>::infinity();
  Objective obj = [&](const RVec& x, RVec& g) {
    ControlPulse cp{RMat(opt.n_ts, m), pulse.dt};
    for (int l = 0; l < opt.n_ts; ++l)
      for (int k = 0; k < m; ++k) cp.amplitudes(l, k) = to_amp(x(l * m + k));
    Performance perf = performance_and_gradient(p, cp, opt.gradient, true);
    g.resize(nv);
    for (int l = 0; l < opt.n_ts; ++l)
      for (int k = 0; k < m; ++k) {
        double chain = 1.0;
        if (opt.amp_bound) {
          double t = std::tanh(x(l * m + k) / *opt.amp_bound);
          chain = 1.0 - t * t;
        }
        g(l * m + k) = perf.gradient(l, k) * chain;
      }
    if (perf.fidelity_error < best.fidelity_error) {
      best.fidelity_error = perf.fidelity_error;
      best.final_map = perf.final_map;
      best.pulse = cp;
    }
    return perf.fidelity_error;
  };

  LbfgsOptions lo;
  lo.memory = opt.lbfgs_memory;
  lo.max_iter = opt.max_iter;
  lo.target_value = opt.fid_err_targ;
  lo.max_wall_time = opt.max_wall_time;
  lo.grad_tol = 1e-14;
  LbfgsResult r = lbfgs_minimize(obj, x0, lo);

  best.iterations_used = r.iterations;
  best.wall_time_used = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  best.terminated_by = r.stop == LbfgsStop::gradient ? "min-gradient" : to_string(r.stop);
  double running = std::numeric_limits<double>::infinity();
  for (double h : r.history) {
    running = std::min(running, h);
    best.history.push_back(running);
  }
  return best;
}

Mat ideal_gate_unitary(const std::string& name) {
  if (name == "CNOT") return make_gate("CNOT", {1}, {0}).matrix;
  return make_gate(name, {0}).matrix;
}

GateDictionaryBuild build_gate_dictionary(const DictionaryBuildOptions& opt) {
  struct Job {
    std::string gate, system;
  };
  const std::vector<Job> jobs{{"X", "ryd"}, {"X", "flux"}, {"Z", "ryd"},    {"Z", "flux"},
                              {"H", "ryd"}, {"H", "flux"}, {"CNOT", "ryd"}, {"CNOT", "flux"}};
  std::vector<size_t> selected;
  for (size_t i = 0; i < jobs.size(); ++i)
    if (std::find(opt.systems.begin(), opt.systems.end(), jobs[i].system) != opt.systems.end()) selected.push_back(i);
  GateDictionaryBuild out;
  out.builds.resize(selected.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t s; (s = next.fetch_add(1)) < selected.size();) {
      const size_t i = selected[s];
      const Job& j = jobs[i];
      GateBuild& b = out.builds[s];
      b.key = dictionary_key(j.gate, j.system);
      try {
        const bool pair = j.gate == "CNOT";
        auto spec = grape_problem(j.system == "ryd" ? PhysicalSystem::rydberg : PhysicalSystem::flux, pair ? 2 : 1,
                                  opt.rydberg, opt.flux);
        GrapeOptions go = pair ? opt.pair : opt.single;
        go.seed = (pair ? opt.pair.seed : opt.single.seed) + 7919 * i;
        b.result = optimize_pulse(GrapeProblem::from_spec(spec, ideal_gate_unitary(j.gate)), go);
        b.entry = b.result.final_map;
        if (pair) {
          if (std::abs(b.entry(0, 0)) < 1e-12) throw Error("optimised map has a vanishing (0,0) element");
          b.entry /= b.entry(0, 0);
        }
      } catch (const std::exception& e) {
        b.error = e.what();
      }
    }
  };
  const int nt = std::max(1, std::min<int>(opt.threads, static_cast<int>(selected.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& b : out.builds)
    if (b.error.empty()) out.dict[b.key] = b.entry;
  return out;
}

}  // namespace dqc
