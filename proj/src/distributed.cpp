#include "dqc/distributed.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace dqc {

DistributedRegister DistributedRegister::standard(int remote_counting, int local_counting) {
  if (remote_counting < 0 || local_counting < 1) throw Error("register needs at least one resident counting qubit");
  DistributedRegister r;
  const int nb = remote_counting;
  for (int q = 0; q < nb; ++q) {
    r.machine_b.push_back(q);
    r.counting.push_back(q);
  }
  r.channel_b = nb;
  r.machine_b.push_back(nb);
  r.channel_a = nb + 1;
  r.machine_a.push_back(nb + 1);
  for (int k = 0; k < local_counting; ++k) {
    r.machine_a.push_back(nb + 2 + k);
    r.counting.push_back(nb + 2 + k);
  }
  r.phase_qubit = nb + 2 + local_counting;
  r.machine_a.push_back(r.phase_qubit);
  r.n_qubits = r.phase_qubit + 1;
  return r;
}

DistributedRegister DistributedRegister::for_counting(int t) {
  if (t < 1) throw Error("phase estimation needs at least one counting qubit");
  return standard(t - 1, 1);
}

Machine DistributedRegister::machine(int q) const {
  if (std::find(machine_a.begin(), machine_a.end(), q) != machine_a.end()) return Machine::A;
  if (std::find(machine_b.begin(), machine_b.end(), q) != machine_b.end()) return Machine::B;
  throw Error("qubit " + std::to_string(q) + " is not on either machine");
}

std::string DistributedRegister::system(int q) const { return machine(q) == Machine::A ? "flux" : "ryd"; }

DpeContext::DpeContext(DistributedRegister r, const GateDictionary* d, std::uint64_t seed)
    : reg(std::move(r)), dict(d), rng(seed) {
  const int dim = 1 << reg.n_qubits;
  rho = Mat::Zero(dim, dim);
  rho(0, 0) = 1.0;
}

void DpeContext::apply_ideal(const Gate& g) { apply_gate(rho, g, reg.n_qubits); }

void DpeContext::apply(const Gate& g) {
  if (g.name == "CPHASE") {
    for (const auto& part : cphase_decomposition(g.controls.at(0), g.targets.at(0), g.params.at(0))) apply(part);
    return;
  }
  if (!dict || g.name == "RZ") {
    apply_ideal(g);
    return;
  }
  const auto sites = g.sites();
  const std::string sys = reg.system(sites.front());
  for (int q : sites)
    if (reg.system(q) != sys) throw Error("gate " + g.name + " spans both machines");
  auto it = dict->find(dictionary_key(g.name, sys));
  if (it == dict->end()) {
    apply_ideal(g);
    return;
  }
  apply_gate(rho, g, reg.n_qubits, &it->second);
}

int DpeContext::measure(int q) { return measure_in_place(rho, reg.n_qubits, q, rng).outcome; }

void initialize_e2(DpeContext& ctx) {
  const auto& r = ctx.reg;
  reset_sites(ctx.rho, std::vector<int>(r.n_qubits, 2), {r.channel_a, r.channel_b});
  ctx.apply_ideal(make_gate("H", {r.channel_b}));
  ctx.apply_ideal(make_gate("CNOT", {r.channel_a}, {r.channel_b}));
  ++ctx.e2_count;
}

void non_local_controlled_phases(DpeContext& ctx, int control, const std::vector<PhaseTarget>& targets) {
  const auto& r = ctx.reg;
  const Machine home = r.machine(control);
  const Machine away = home == Machine::A ? Machine::B : Machine::A;
  const int ch_home = r.channel(home), ch_away = r.channel(away);
  if (control == ch_home) throw Error("control cannot be a channel qubit");
  for (const auto& t : targets)
    if (r.machine(t.qubit) != away || t.qubit == ch_away) throw Error("non-local target must be a data qubit on the other machine");

  ctx.apply(make_gate("CNOT", {ch_home}, {control}));
  const int m1 = ctx.measure(ch_home);
  ctx.messages.push_back({home, m1, "x-correction"});
  if (m1 == 1) {
    ctx.apply(make_gate("X", {ch_home}));
    ctx.apply(make_gate("X", {ch_away}));
  }
  for (const auto& t : targets) ctx.apply(make_gate("CPHASE", {t.qubit}, {ch_away}, {t.phi}));
  ctx.apply(make_gate("H", {ch_away}));
  const int m2 = ctx.measure(ch_away);
  ctx.messages.push_back({away, m2, "z-correction"});
  if (m2 == 1) {
    ctx.apply(make_gate("Z", {control}));
    ctx.apply(make_gate("X", {ch_away}));
  }
}

void non_local_cphase(DpeContext& ctx, double phi, int control, int target) {
  non_local_controlled_phases(ctx, control, {{target, phi}});
}

void pulse_phase_sequence(DpeContext& ctx, double phi) {
  const auto& r = ctx.reg;
  const Machine home = r.machine(r.phase_qubit);
  for (size_t j = 0; j < r.counting.size(); ++j) {
    const int c = r.counting[j];
    const double angle = kTwoPi * phi * std::ldexp(1.0, static_cast<int>(j));
    if (r.machine(c) == home) {
      ctx.apply(make_gate("CPHASE", {c}, {r.phase_qubit}, {angle}));
    } else {
      initialize_e2(ctx);
      non_local_cphase(ctx, angle, r.phase_qubit, c);
    }
  }
}

void distributed_inverse_qft(DpeContext& ctx) {
  const auto& r = ctx.reg;
  const int t = static_cast<int>(r.counting.size());
  for (int n = t - 1; n >= 0; --n) {
    const int cn = r.counting[n];
    ctx.apply(make_gate("H", {cn}));
    std::vector<PhaseTarget> remote;
    for (int q = n - 1; q >= 0; --q) {
      const int cq = r.counting[q];
      const double angle = -kPi / std::ldexp(1.0, n - q);
      if (r.machine(cq) == r.machine(cn))
        ctx.apply(make_gate("CPHASE", {cq}, {cn}, {angle}));
      else
        remote.push_back({cq, angle});
    }
    if (!remote.empty()) {
      initialize_e2(ctx);
      non_local_controlled_phases(ctx, cn, remote);
    }
  }
}

Mat counting_inverse_qft_unitary(int t) {
  const int d = 1 << t;
  Mat rev = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    int j = 0;
    for (int b = 0; b < t; ++b)
      if (i & (1 << b)) j |= 1 << (t - 1 - b);
    rev(j, i) = 1.0;
  }
  return circuit_unitary(inverse_qft_circuit(t)) * rev;
}

std::string outcome_label(int value, int t) {
  std::string s(t, '0');
  for (int b = 0; b < t; ++b)
    if (value & (1 << (t - 1 - b))) s[b] = '1';
  return s;
}

std::string nearest_outcome(double phi, int t) {
  const long long n = 1LL << t;
  long long k = std::llround(phi * static_cast<double>(n)) % n;
  if (k < 0) k += n;
  return outcome_label(static_cast<int>(k), t);
}

std::map<std::string, double> counting_distribution(const Mat& rho, const DistributedRegister& reg) {
  const int t = static_cast<int>(reg.counting.size());
  std::vector<double> p(1 << t, 0.0);
  const int n = reg.n_qubits;
  const double tr = rho.trace().real();
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    int v = 0;
    for (int j = 0; j < t; ++j) v = (v << 1) | ((i >> (n - 1 - reg.counting[j])) & 1);
    p[v] += rho(i, i).real() / tr;
  }
  std::map<std::string, double> out;
  for (int v = 0; v < (1 << t); ++v) out[outcome_label(v, t)] = std::max(0.0, p[v]);
  return out;
}

PhaseEstimationResult run_phase_estimation(double phi, int counting_total, const GateDictionary* dict, int shots,
                                           std::uint64_t seed) {
  if (shots < 1) throw Error("phase estimation needs at least one shot");
  const DistributedRegister reg = DistributedRegister::for_counting(counting_total);
  PhaseEstimationResult res;
  for (int v = 0; v < (1 << counting_total); ++v) res.histogram[outcome_label(v, counting_total)] = 0.0;
  for (int s = 0; s < shots; ++s) {
    DpeContext ctx(reg, dict, seed + static_cast<std::uint64_t>(s));
    const int dim = 1 << reg.n_qubits;
    ctx.rho = Mat::Zero(dim, dim);
    const int one = 1 << (reg.n_qubits - 1 - reg.phase_qubit);
    ctx.rho(one, one) = 1.0;
    for (int c : reg.counting) ctx.apply(make_gate("H", {c}));
    pulse_phase_sequence(ctx, phi);
    distributed_inverse_qft(ctx);
    auto dist = counting_distribution(ctx.rho, reg);
    double u = ctx.rng.uniform(), acc = 0.0;
    std::string sampled = dist.rbegin()->first;
    for (const auto& [k, p] : dist) {
      res.histogram[k] += p / shots;
      acc += p;
      if (u < acc && sampled == dist.rbegin()->first && acc - p <= u) sampled = k;
    }
    res.runs.push_back({phi, sampled, ctx.messages, s});
    res.e2_per_run = ctx.e2_count;
  }
  return res;
}

void write_phase_csv(std::ostream& os, const PhaseEstimationResult& r, double phi, int shots, std::uint64_t seed) {
  os << "phase,outcome,probability,shots,seed\n";
  char buf[128];
  for (const auto& [k, p] : r.histogram) {
    std::snprintf(buf, sizeof buf, "%.12g,%s,%.12g,%d,%llu\n", phi, k.c_str(), p, shots,
                  static_cast<unsigned long long>(seed));
    os << buf;
  }
}

}  // namespace dqc
