#include "dqc/hamiltonians.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>

namespace dqc {

namespace {

constexpr double kPlanck = 6.62607015e-34;
constexpr double kHbar = kPlanck / kTwoPi;
constexpr double kFluxQuantum = 2.067833848e-15;

Mat number_op() { return ops::projector(2, 1, 1); }

Mat on_qubit(const Mat& op, int q, int n) {
  std::vector<int> dims(n, 2);
  return embed(op, dims, {q});
}

template <class F>
double brent_max(F f, double lo, double hi) {
  auto r = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, lo, hi, 40);
  return r.first;
}

}  // namespace

double RydbergParams::effective_dephasing() const {
  if (langevin_inv_corr && langevin_diffusion) {
    if (*langevin_inv_corr <= 0.0) throw Error("langevin correlation rate must be positive");
    return 2.0 * *langevin_diffusion / (*langevin_inv_corr * *langevin_inv_corr);
  }
  return dephasing;
}

double RydbergParams::blockade_shift() const {
  if (distance <= 0.0) throw Error("interatomic distance must be positive");
  return kTwoPi * c6 / std::pow(distance, 6);
}

Mat rydberg_hamiltonian(const RydbergParams& p, int n_atoms) {
  if (n_atoms != 1 && n_atoms != 2) throw Error("rydberg_hamiltonian supports 1 or 2 atoms");
  Mat drive = (p.rabi / 2.0) * (std::cos(p.laser_phase) * ops::sigma_x() - std::sin(p.laser_phase) * ops::sigma_y()) -
              p.detuning * number_op();
  Mat h = Mat::Zero(1 << n_atoms, 1 << n_atoms);
  for (int q = 0; q < n_atoms; ++q) h += on_qubit(drive, q, n_atoms);
  if (n_atoms == 2) h += p.blockade_shift() * tensor_product(number_op(), number_op());
  return h;
}

std::pair<double, double> rydberg_pair_eigenenergies(double forster_defect, double v) {
  double root = std::sqrt(forster_defect * forster_defect + 4.0 * v * v);
  return {forster_defect / 2.0 + root / 2.0, forster_defect / 2.0 - root / 2.0};
}

double vdw_crossover_radius(double c6, double forster_defect) {
  if (forster_defect == 0.0) throw Error("vdw_crossover_radius: zero Forster defect");
  return std::pow(std::abs(c6 / forster_defect), 1.0 / 6.0);
}

LindbladSet rydberg_lindblads(const RydbergParams& p, int n_atoms) {
  if (n_atoms != 1 && n_atoms != 2) throw Error("rydberg_lindblads supports 1 or 2 atoms");
  const double gamma = p.effective_dephasing();
  if (gamma < 0.0 || p.decay < 0.0) throw Error("rydberg rates must be nonnegative");
  LindbladSet set;
  for (int q = 0; q < n_atoms; ++q) {
    if (gamma > 0.0) set.add(on_qubit(number_op(), q, n_atoms), gamma, "dephasing_" + std::to_string(q));
    if (p.decay > 0.0) set.add(on_qubit(ops::projector(2, 0, 1), q, n_atoms), p.decay, "decay_" + std::to_string(q));
  }
  return set;
}

namespace {

Mat blockade_pulse(int atom, double rabi, double blockade, double area) {
  Mat drive = (rabi / 2.0) * (ops::projector(3, 0, 2) + ops::projector(3, 2, 0));
  Mat h = embed(drive, {3, 3}, {atom}) + blockade * tensor_product(ops::projector(3, 2, 2), ops::projector(3, 2, 2));
  return matrix_exponential(Mat(-kI * h * (area / rabi)));
}

Mat blockade_cz_full(double rabi, double blockade) {
  if (rabi <= 0.0) throw Error("blockade CZ needs a positive Rabi frequency");
  return blockade_pulse(0, rabi, blockade, kPi) * blockade_pulse(1, rabi, blockade, kTwoPi) *
         blockade_pulse(0, rabi, blockade, kPi);
}

}  // namespace

QuantumState simulate_blockade_cz(const QuantumState& state, double rabi, double blockade) {
  if (state.dims() != std::vector<int>{3, 3}) throw Error("simulate_blockade_cz expects two three-level atoms");
  Mat u = blockade_cz_full(rabi, blockade);
  if (state.is_ket()) return QuantumState::ket(u * state.ket_vector(), state.dims());
  return QuantumState::density(u * state.data() * u.adjoint(), state.dims());
}

Mat blockade_cz_map(double rabi, double blockade) {
  Mat u = blockade_cz_full(rabi, blockade);
  const int idx[4] = {0, 1, 3, 4};
  Mat m(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = u(idx[i], idx[j]);
  return m;
}

double flux_potential(double phi1, double phi2, double alpha, double f_eps) {
  return 2.0 + alpha - std::cos(phi1) - std::cos(phi2) - alpha * std::cos(kTwoPi * f_eps + phi1 - phi2);
}

double critical_frustration(double alpha) {
  if (alpha < 0.5) throw Error("critical_frustration: alpha below 0.5 has no two-well window");
  if (alpha >= 1.0) return std::asin(1.0 / alpha) / kTwoPi;
  const double a = 2.0 * std::sqrt((1.0 - alpha * alpha) / 3.0);
  const double b = std::sqrt((1.0 - alpha * alpha) / (3.0 * alpha * alpha));
  return (2.0 * std::acos(a) - std::acos(b)) / kTwoPi;
}

std::vector<FluxWell> flux_wells(double alpha, double f_eps) {
  if (alpha <= 0.0) throw Error("flux_wells: alpha must be positive");
  auto u = [&](double phi) { return flux_potential(phi, -phi, alpha, f_eps); };
  const int n = 4096;
  const double h = kTwoPi / n;
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) vals[i] = u(-kPi + (i + 1) * h);
  std::vector<FluxWell> wells;
  for (int i = 0; i < n; ++i) {
    double prev = vals[(i + n - 1) % n], next = vals[(i + 1) % n];
    if (vals[i] < prev && vals[i] <= next) {
      double c = -kPi + (i + 1) * h;
      auto r = boost::math::tools::brent_find_minima(u, c - h, c + h, 50);
      double phi = std::remainder(r.first, kTwoPi);
      wells.push_back({phi, r.second});
    }
  }
  std::sort(wells.begin(), wells.end(), [](const FluxWell& a, const FluxWell& b) { return a.phi < b.phi; });
  return wells;
}

FluxDerived flux_derived(const FluxParams& p) {
  if (p.zeta < 1.0) throw Error("flux parameters: zeta must be >= 1");
  if (p.f_eps < 0.0 || p.f_eps > 1.0) throw Error("flux parameters: f_eps must lie in [0, 1]");
  auto wells = flux_wells(p.alpha, p.f_eps);
  if (wells.empty()) throw Error("flux potential has no minimum");
  FluxDerived d{};
  d.phi_star = wells.front().phi;
  const double theta = kTwoPi * p.f_eps + 2.0 * d.phi_star;
  const double curvature = 2.0 * std::cos(d.phi_star) + 4.0 * p.alpha * std::cos(theta);
  d.e_c_minus = p.e_c / (p.zeta + p.alpha + 1.0);
  d.e_j_minus = p.e_j * curvature;
  if (d.e_j_minus <= 0.0) throw Error("flux well curvature is not positive");
  d.n_z = std::pow(d.e_j_minus / (4.0 * d.e_c_minus), 0.25);
  d.im_phi0 = 8.0 * kPi * p.alpha * std::abs(std::cos(theta)) * p.e_j;
  d.omega_q = kTwoPi * std::sqrt(p.bias * p.bias + p.tunnel * p.tunnel);
  return d;
}

Mat flux_qubit_hamiltonian(double bias, double tunnel) { return kPi * (bias * ops::sigma_z() + tunnel * ops::sigma_x()); }

Mat flux_system_hamiltonian(const FluxParams& p) {
  const int n = p.resonator_dim;
  if (n < 1) throw Error("resonator dimension must be positive");
  Mat a = ops::destroy(n), ad = ops::create(n);
  Mat osc = p.omega_res * (ad * a + 0.5 * Mat::Identity(n, n));
  Mat h = tensor_product(Mat(0.5 * (p.bias * ops::sigma_z() + p.tunnel * ops::sigma_x())), ops::identity(n)) +
          tensor_product(ops::identity(2), osc) + p.g_res * tensor_product(ops::sigma_y(), Mat(ad + a));
  return kTwoPi * h;
}

FluxRates flux_rates(const FluxParams& p) {
  if (p.delta_f < 0.0 || p.delta_n < 0.0 || p.delta_omega < 0.0 || p.photon_rate < 0.0)
    throw Error("flux noise amplitudes must be nonnegative");
  FluxDerived d = flux_derived(p);
  FluxRates r{};
  r.z = 0.5 * d.omega_q * p.delta_omega;
  r.x = 0.5 * kTwoPi * d.im_phi0 * p.delta_f;
  r.y = 0.5 * kTwoPi * d.n_z * d.e_c_minus * p.delta_n;
  const double detune = d.omega_q / kTwoPi - p.omega_res;
  r.purcell = detune == 0.0 ? p.photon_rate : p.photon_rate * std::pow(p.g_res / detune, 2);
  return r;
}

LindbladSet flux_lindblads(const FluxParams& p, int n_qubits) {
  if (n_qubits != 1 && n_qubits != 2) throw Error("flux_lindblads supports 1 or 2 qubits");
  FluxRates r = flux_rates(p);
  LindbladSet set;
  for (int q = 0; q < n_qubits; ++q) {
    const std::string s = std::to_string(q);
    if (r.z > 0.0) set.add(on_qubit(ops::sigma_z(), q, n_qubits), r.z, "flux_z_" + s);
    if (r.x > 0.0) set.add(on_qubit(ops::sigma_x(), q, n_qubits), r.x, "flux_x_" + s);
    if (r.y > 0.0) set.add(on_qubit(ops::sigma_y(), q, n_qubits), r.y, "charge_y_" + s);
    if (r.purcell > 0.0) set.add(on_qubit(ops::sigma_y(), q, n_qubits), r.purcell, "purcell_" + s);
  }
  return set;
}

HybridDerived hybrid_derived(const HybridParams& hp) {
  HybridDerived d{};
  if (hp.persistent_current > 0.0) {
    d.persistent_current = hp.persistent_current;
  } else {
    if (hp.omega0 <= hp.tunnel) throw Error("resonator frequency must exceed the tunnel splitting");
    const double eps_res = std::sqrt(hp.omega0 * hp.omega0 - hp.tunnel * hp.tunnel) * 1e9;  // rad/s
    d.persistent_current = eps_res * kHbar / (2.0 * kFluxQuantum * std::abs(hp.gamma_q_res));
  }
  d.g_f = (hp.mutual * d.persistent_current / kHbar) * std::sqrt(kHbar * hp.omega0 * 1e9 / (2.0 * hp.inductance)) * 1e-9;
  d.delta = 2.0 * d.g_f * hp.tunnel / hp.omega0;
  return d;
}

double flux_bias_energy(const HybridParams& hp, double gamma_q) {
  const double ip = hybrid_derived(hp).persistent_current;
  return 2.0 * ip * kFluxQuantum * gamma_q / kHbar * 1e-9;
}

int hybrid_index(int flux, int photon, int atom) { return flux * 6 + photon * 3 + atom; }

namespace {

Mat hybrid_from_splittings(const HybridParams& hp, double eg, double eu, double gamma_q, const HybridDerived& d) {
  const int E = 0, G = 1, U = 2;
  Mat i2 = ops::identity(2), i3 = ops::identity(3);
  Mat b = ops::destroy(2), bd = ops::create(2);
  Mat sz = ops::sigma_z(), sx = ops::sigma_x();
  Mat ha = -eg * ops::projector(3, G, G) - eu * ops::projector(3, U, U) +
           (hp.rabi / 2.0) * (ops::projector(3, E, G) + ops::projector(3, G, E)) +
           (hp.rabi_u / 2.0) * (ops::projector(3, E, U) + ops::projector(3, U, E));
  const double eps = 2.0 * d.persistent_current * kFluxQuantum * gamma_q / kHbar * 1e-9;
  Mat hf = -(eps / 2.0) * sz - (hp.tunnel / 2.0) * sx;
  Mat atom_up = (hp.g_a_u / 2.0) * ops::projector(3, U, E) + (hp.g_a / 2.0) * ops::projector(3, G, E);
  Mat va = tensor_product(bd, atom_up);
  va += Mat(va.adjoint());
  Mat h = tensor_product({i2, Mat(hp.omega0 * bd * b), i3}) + tensor_product({i2, i2, ha}) +
          tensor_product({hf, i2, i3}) + tensor_product(i2, va) - d.g_f * tensor_product({sz, Mat(b + bd), i3});
  return h;
}

// Largest population reached in `to` within [0, 2T] starting from `from`.
double max_transfer(const Mat& h, int from, int to, double t_nominal) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Vec c = es.eigenvectors().row(from).adjoint();
  Vec row = es.eigenvectors().row(to).transpose();
  double best = 0.0;
  const int n = 2000;
  for (int k = 0; k <= n; ++k) {
    double t = 2.0 * t_nominal * k / n;
    cplx amp = 0.0;
    for (Eigen::Index j = 0; j < c.size(); ++j) amp += row(j) * std::exp(-kI * es.eigenvalues()(j) * t) * c(j);
    best = std::max(best, std::norm(amp));
  }
  return best;
}

}  // namespace

// Resonances dressed by the static drives are located numerically: the
// e-u splitting at E2 (photon-assisted) and E3 (Omega'), then e-g at E5.
LevelCalibration calibrate_levels(const HybridParams& hp) {
  if (hp.fields.size() != 5) throw Error("hybrid parameters need five field setpoints");
  HybridDerived d = hybrid_derived(hp);
  const double e2 = hp.fields[1], e3 = hp.fields[2], e4 = hp.fields[3], e5 = hp.fields[4];
  LevelCalibration cal{};
  cal.eg_slope = -hp.omega0 / (e5 - e4);
  const double eg_e2 = cal.eg_slope * (e2 - e5), eg_e3 = cal.eg_slope * (e3 - e5);
  const int r0e = hybrid_index(1, 0, 0), r1u = hybrid_index(1, 1, 2), r0u = hybrid_index(1, 0, 2),
            r0g = hybrid_index(1, 0, 1);
  cal.eu_e2 = brent_max(
      [&](double x) { return max_transfer(hybrid_from_splittings(hp, eg_e2, x, hp.gamma_q_far, d), r0e, r1u, kPi / hp.g_a_u); },
      hp.omega0 - kTwoPi, hp.omega0 + kTwoPi);
  cal.eu_e3 = brent_max(
      [&](double x) { return max_transfer(hybrid_from_splittings(hp, eg_e3, x, hp.gamma_q_far, d), r0u, r0e, kPi / hp.rabi_u); },
      -kTwoPi, kTwoPi);
  const double eu_e5 = cal.eu_e3 + (cal.eu_e3 - cal.eu_e2) / (e3 - e2) * (e5 - e3);
  cal.eg_e5 = brent_max(
      [&](double x) { return max_transfer(hybrid_from_splittings(hp, x, eu_e5, hp.gamma_q_far, d), r0e, r0g, kPi / hp.rabi); },
      -2.0 * kTwoPi, 2.0 * kTwoPi);
  return cal;
}

AtomSplittings atom_splittings(const HybridParams& hp, double field, const LevelCalibration* cal) {
  const double x = field - 500.0;
  switch (hp.level_map) {
    case LevelMap::prose: {
      const double s = kTwoPi * 1e3;  // THz -> rad/ns
      double we = -7.81 - x * 7.3e-4, wg = -7.92 - x * 5.5e-4, wu = -7.88 - x * 6.3e-4;
      return {s * (we - wg), s * (we - wu)};
    }
    case LevelMap::code: {
      double we = -7.81 - x * 0.73, wg = -7.92 + x * 0.55, wu = -7.88 + x * 0.66;
      return {kTwoPi * (we - wg), kTwoPi * (we - wu)};
    }
    case LevelMap::calibrated:
      break;
  }
  LevelCalibration local;
  if (!cal) {
    local = calibrate_levels(hp);
    cal = &local;
  }
  const double e2 = hp.fields[1], e3 = hp.fields[2], e5 = hp.fields[4];
  const double eu = cal->eu_e3 + (cal->eu_e3 - cal->eu_e2) / (e3 - e2) * (field - e3);
  const double eg = cal->eg_e5 + cal->eg_slope * (field - e5);
  return {eg, eu};
}

Mat hybrid_hamiltonian(const HybridParams& hp, double field, double gamma_q, const LevelCalibration* cal) {
  HybridDerived d = hybrid_derived(hp);
  AtomSplittings s = atom_splittings(hp, field, cal);
  return hybrid_from_splittings(hp, s.eg, s.eu, gamma_q, d);
}

LindbladSet hybrid_lindblads(const HybridParams& hp) {
  const double gphi = hp.dephasing_scale == DephasingScale::mhz ? hp.gamma_phi : hp.gamma_phi * 1e3;
  const double kappa = hp.omega0 / hp.kappa_q;
  if (hp.gamma_relax < 0.0 || gphi < 0.0 || kappa < 0.0 || hp.gamma_ryd < 0.0)
    throw Error("hybrid noise rates must be nonnegative");
  Mat i2 = ops::identity(2), i3 = ops::identity(3);
  LindbladSet set;
  if (hp.gamma_relax > 0.0) set.add(tensor_product({ops::projector(2, 1, 0), i2, i3}), hp.gamma_relax, "flux_relax");
  if (gphi > 0.0) set.add(tensor_product({ops::sigma_z(), i2, i3}), gphi / 2.0, "flux_dephase");
  if (kappa > 0.0) set.add(tensor_product({i2, ops::destroy(2), i3}), kappa, "resonator_loss");
  if (hp.gamma_ryd > 0.0) {
    set.add(tensor_product({i2, i2, ops::projector(3, 1, 0)}), hp.gamma_ryd, "atom_decay_e");
    set.add(tensor_product({i2, i2, ops::projector(3, 1, 2)}), hp.gamma_ryd, "atom_decay_u");
  }
  return set;
}

GrapeProblemSpec grape_problem(PhysicalSystem system, int n_qubits, const RydbergParams& ryd, const FluxParams& flux) {
  if (n_qubits != 1 && n_qubits != 2) throw Error("grape_problem supports 1 or 2 qubits");
  GrapeProblemSpec spec;
  Mat sx = ops::sigma_x(), sy = ops::sigma_y(), sz = ops::sigma_z();
  if (system == PhysicalSystem::rydberg) {
    if (n_qubits == 1) {
      spec.drift = ryd.rabi * (sx + sy) + sz;
    } else {
      spec.drift = ryd.rabi * (tensor_product(sx, sx) + tensor_product(sy, sy)) + tensor_product(sz, sz) +
                   ryd.blockade_shift() * tensor_product(number_op(), number_op());
    }
    spec.lindblads = rydberg_lindblads(ryd, n_qubits);
  } else {
    if (n_qubits == 1) {
      spec.drift = -0.5 * kTwoPi * (flux.bias * sz + flux.tunnel * sx);
    } else {
      spec.drift = -0.5 * kTwoPi * (flux.bias * tensor_product(sz, sz) + flux.tunnel * tensor_product(sx, sx)) +
                   kTwoPi * flux.yy_coupling * tensor_product(sy, sy);
    }
    spec.lindblads = flux_lindblads(flux, n_qubits);
  }
  if (n_qubits == 1) {
    spec.controls = {sx, sy, sz};
  } else {
    Mat i2 = ops::identity(2);
    spec.controls = {tensor_product(sx, i2), tensor_product(sy, i2), tensor_product(sz, i2),
                     tensor_product(i2, sx), tensor_product(i2, sy), tensor_product(i2, sz),
                     Mat(tensor_product(sx, sx) + tensor_product(sy, sy) + tensor_product(sz, sz))};
  }
  const int d = 1 << n_qubits;
  spec.initial = Mat::Identity(d * d, d * d);
  return spec;
}

}  // namespace dqc
