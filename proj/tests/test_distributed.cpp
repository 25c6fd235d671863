#include "dqc/distributed.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace dqc;
using testutil::max_abs;

namespace {

std::vector<int> data_qubits(const DistributedRegister& r) {
  std::vector<int> q;
  for (int i = 0; i < r.n_qubits; ++i)
    if (i != r.channel_a && i != r.channel_b) q.push_back(i);
  return q;
}

// Random pure state on the data qubits, channels in |0>.
Mat random_register_state(const DistributedRegister& r, std::mt19937_64& rng) {
  const auto data = data_qubits(r);
  Vec small = testutil::random_ket(1 << data.size(), rng);
  Vec full = Vec::Zero(1 << r.n_qubits);
  for (int s = 0; s < small.size(); ++s) {
    int idx = 0;
    for (size_t k = 0; k < data.size(); ++k)
      if (s & (1 << (data.size() - 1 - k))) idx |= 1 << (r.n_qubits - 1 - data[k]);
    full(idx) = small(s);
  }
  return full * full.adjoint();
}

Mat data_marginal(const Mat& rho, const DistributedRegister& r) {
  return partial_trace(rho, std::vector<int>(r.n_qubits, 2), data_qubits(r));
}

Mat reversal(int t) {
  const int d = 1 << t;
  Mat m = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    int j = 0;
    for (int b = 0; b < t; ++b)
      if (i & (1 << b)) j |= 1 << (t - 1 - b);
    m(j, i) = 1.0;
  }
  return m;
}

}  // namespace

TEST_CASE("register layout") {
  auto r = DistributedRegister::standard(3, 1);
  CHECK(r.n_qubits == 7);
  CHECK(r.machine_b == std::vector<int>{0, 1, 2, 3});
  CHECK(r.machine_a == std::vector<int>{4, 5, 6});
  CHECK(r.channel_b == 3);
  CHECK(r.channel_a == 4);
  CHECK(r.phase_qubit == 6);
  CHECK(r.counting == std::vector<int>{0, 1, 2, 5});
  CHECK(r.system(0) == "ryd");
  CHECK(r.system(6) == "flux");
  CHECK_THROWS_AS(r.machine(9), Error);
  auto r1 = DistributedRegister::for_counting(1);
  CHECK(r1.counting.size() == 1);
  CHECK(r1.machine_b.size() == 1);
}

TEST_CASE("E2 creates a Bell pair on the channels") {
  DpeContext ctx(DistributedRegister::standard(3, 1), nullptr, 1);
  Vec bell = Vec::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  auto check = [&] {
    Mat m = partial_trace(ctx.rho, std::vector<int>(7, 2), {ctx.reg.channel_b, ctx.reg.channel_a});
    return state_fidelity(QuantumState::ket(bell, {2, 2}), QuantumState::density(m, {2, 2}));
  };
  initialize_e2(ctx);
  CHECK(check() == doctest::Approx(1.0).epsilon(1e-12));
  initialize_e2(ctx);
  CHECK(check() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ctx.e2_count == 2);
}

TEST_CASE("non-local CPHASE matches the local gate") {
  const auto reg = DistributedRegister::standard(3, 1);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int trial = 0; trial < 20; ++trial) {
    const double phi = ang(rng);
    const int control = reg.phase_qubit, target = trial % 3;
    Mat rho0 = random_register_state(reg, rng);
    DpeContext ctx(reg, nullptr, 100 + trial);
    ctx.rho = rho0;
    initialize_e2(ctx);
    non_local_cphase(ctx, phi, control, target);
    Mat local = rho0;
    apply_gate(local, make_gate("CPHASE", {target}, {control}, {phi}), reg.n_qubits);
    CHECK(trace_distance(data_marginal(ctx.rho, reg), data_marginal(local, reg)) <= 1e-8);
    CHECK(ctx.messages.size() == 2);
    CHECK(ctx.messages[0].purpose == "x-correction");
    CHECK(ctx.messages[1].purpose == "z-correction");
  }
  // Control on B, target on A.
  for (int trial = 0; trial < 5; ++trial) {
    const double phi = ang(rng);
    Mat rho0 = random_register_state(reg, rng);
    DpeContext ctx(reg, nullptr, 200 + trial);
    ctx.rho = rho0;
    initialize_e2(ctx);
    non_local_cphase(ctx, phi, 1, 5);
    Mat local = rho0;
    apply_gate(local, make_gate("CPHASE", {5}, {1}, {phi}), reg.n_qubits);
    CHECK(trace_distance(data_marginal(ctx.rho, reg), data_marginal(local, reg)) <= 1e-8);
  }
}

TEST_CASE("non-local CPHASE special cases") {
  const auto reg = DistributedRegister::standard(1, 1);  // [b0 ch_b | ch_a a0 phase]
  std::mt19937_64 rng(37);
  Mat rho0 = random_register_state(reg, rng);
  DpeContext ctx(reg, nullptr, 5);
  ctx.rho = rho0;
  initialize_e2(ctx);
  non_local_cphase(ctx, 0.0, reg.phase_qubit, 0);
  CHECK(trace_distance(data_marginal(ctx.rho, reg), data_marginal(rho0, reg)) <= 1e-10);

  // control |1>, target |+>, phi = pi -> target |->
  DpeContext c2(reg, nullptr, 6);
  c2.apply_ideal(make_gate("X", {reg.phase_qubit}));
  c2.apply_ideal(make_gate("H", {0}));
  initialize_e2(c2);
  non_local_cphase(c2, kPi, reg.phase_qubit, 0);
  Mat t = partial_trace(c2.rho, std::vector<int>(reg.n_qubits, 2), {0});
  Vec minus(2);
  minus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  CHECK(state_fidelity(QuantumState::ket(minus, {2}), QuantumState::density(t, {2})) == doctest::Approx(1.0).epsilon(1e-12));

  DpeContext c3(reg, nullptr, 7);
  CHECK_THROWS_AS(non_local_cphase(c3, 0.1, reg.phase_qubit, reg.phase_qubit - 1), Error);
}

TEST_CASE("distributed inverse QFT matches the local transform") {
  const auto reg = DistributedRegister::for_counting(4);
  const int t = 4;
  // Independent oracle: brute-force inverse DFT after reading the register in
  // reversed list order.
  Mat oracle_small = dft_matrix(t, true) * reversal(t);
  CHECK(max_abs(oracle_small - counting_inverse_qft_unitary(t)) < 1e-10);
  Mat oracle = embed(oracle_small, std::vector<int>(reg.n_qubits, 2), reg.counting);

  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    Mat rho0 = random_register_state(reg, rng);
    DpeContext ctx(reg, nullptr, 300 + trial);
    ctx.rho = rho0;
    distributed_inverse_qft(ctx);
    Mat local = oracle * rho0 * oracle.adjoint();
    CHECK(trace_distance(data_marginal(ctx.rho, reg), data_marginal(local, reg)) <= 1e-8);
    CHECK(ctx.e2_count == 1);
  }
}

TEST_CASE("distributed inverse QFT on structured inputs") {
  const auto reg = DistributedRegister::for_counting(4);
  const int t = 4;
  // Kicked-back ordering: counting[j] carries phase 2 pi k 2^j / 16 for |k>.
  const int k = 0b0110;
  DpeContext ctx(reg, nullptr, 1);
  for (size_t j = 0; j < reg.counting.size(); ++j) {
    ctx.apply_ideal(make_gate("H", {reg.counting[j]}));
    ctx.apply_ideal(make_gate("RZ", {reg.counting[j]}, {}, {kTwoPi * k * std::ldexp(1.0, static_cast<int>(j)) / 16.0}));
  }
  distributed_inverse_qft(ctx);
  CHECK(counting_distribution(ctx.rho, reg).at("0110") == doctest::Approx(1.0).epsilon(1e-9));

  const auto r2 = DistributedRegister::for_counting(2);
  DpeContext plus(r2, nullptr, 1);
  for (int c : r2.counting) plus.apply_ideal(make_gate("H", {c}));
  distributed_inverse_qft(plus);
  CHECK(counting_distribution(plus.rho, r2).at("00") == doctest::Approx(1.0).epsilon(1e-9));

  DpeContext zero(r2, nullptr, 1);
  distributed_inverse_qft(zero);
  for (const auto& [label, p] : counting_distribution(zero.rho, r2)) CHECK(p == doctest::Approx(0.25).epsilon(1e-9));
  (void)t;
}

TEST_CASE("pulse phase sequence") {
  const auto reg = DistributedRegister::for_counting(4);
  auto prepared = [&](double phi) {
    DpeContext ctx(reg, nullptr, 1);
    ctx.apply_ideal(make_gate("X", {reg.phase_qubit}));
    for (int c : reg.counting) ctx.apply_ideal(make_gate("H", {c}));
    pulse_phase_sequence(ctx, phi);
    return ctx;
  };
  auto ctx0 = prepared(0.0);
  Vec plus = (ops::basis(2, 0) + ops::basis(2, 1)) / std::sqrt(2.0);
  for (int c : reg.counting) {
    Mat m = partial_trace(ctx0.rho, std::vector<int>(7, 2), {c});
    CHECK(state_fidelity(QuantumState::ket(plus, {2}), QuantumState::density(m, {2})) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(ctx0.e2_count == 3);

  const double phi = 3.0 / 16.0;
  auto ctx = prepared(phi);
  Vec prod = Vec::Ones(1);
  for (size_t j = 0; j < reg.counting.size(); ++j) {
    Vec f(2);
    f << 1.0, std::exp(kI * (kTwoPi * phi * std::ldexp(1.0, static_cast<int>(j))));
    prod = tensor_product(prod, Vec(f / std::sqrt(2.0)));
  }
  Mat m = partial_trace(ctx.rho, std::vector<int>(7, 2), reg.counting);
  CHECK(state_fidelity(QuantumState::ket(prod, {2, 2, 2, 2}), QuantumState::density(m, {2, 2, 2, 2})) ==
        doctest::Approx(1.0).epsilon(1e-9));

  const auto r1 = DistributedRegister::for_counting(1);
  DpeContext one(r1, nullptr, 1);
  one.apply_ideal(make_gate("X", {r1.phase_qubit}));
  one.apply_ideal(make_gate("H", {r1.counting[0]}));
  pulse_phase_sequence(one, 0.5);
  Vec minus(2);
  minus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  Mat mm = partial_trace(one.rho, std::vector<int>(r1.n_qubits, 2), {r1.counting[0]});
  CHECK(state_fidelity(QuantumState::ket(minus, {2}), QuantumState::density(mm, {2})) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("phase estimation") {
  auto r = run_phase_estimation(3.0 / 16.0, 4, nullptr, 3, 9);
  CHECK(r.histogram.at("0011") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.e2_per_run == 4);
  CHECK(r.runs.size() == 3);
  for (const auto& run : r.runs) {
    CHECK(run.outcome == "0011");
    CHECK(run.messages.size() == 8);
  }

  auto d = run_phase_estimation(1.0 / 8.0, 2, nullptr, 1, 9);
  CHECK(d.histogram.at("00") >= 4.0 / (kPi * kPi) - 1e-6);
  CHECK(d.histogram.at("01") >= 4.0 / (kPi * kPi) - 1e-6);

  for (int t = 1; t <= 4; ++t) {
    auto z = run_phase_estimation(0.0, t, nullptr, 1, 1);
    CHECK(z.histogram.at(std::string(t, '0')) == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(run_phase_estimation(5.0 / 8.0, 3, nullptr, 1, 1).histogram.at("101") == doctest::Approx(1.0).epsilon(1e-9));

  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const double phi = u(rng);
    const int t = 2 + trial % 2;
    auto res = run_phase_estimation(phi, t, nullptr, 1, 1);
    auto best = std::max_element(res.histogram.begin(), res.histogram.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    const double a = std::stoi(best->first, nullptr, 2) / std::ldexp(1.0, t);
    double dist = std::abs(phi - a);
    dist = std::min(dist, 1.0 - dist);
    CHECK(dist <= std::ldexp(1.0, -(t + 1)) + 1e-12);
    CHECK(best->second >= 4.0 / (kPi * kPi) - 1e-6);
  }
}

TEST_CASE("phase estimation with a dictionary of ideal superoperators") {
  GateDictionary dict;
  for (const char* g : {"H", "X", "Z"})
    for (const char* s : {"ryd", "flux"}) dict[dictionary_key(g, s)] = unitary_superop(make_gate(g, {0}).matrix);
  for (const char* s : {"ryd", "flux"}) dict[dictionary_key("CNOT", s)] = unitary_superop(make_gate("CNOT", {1}, {0}).matrix);
  auto r = run_phase_estimation(3.0 / 16.0, 4, &dict, 2, 4);
  CHECK(r.histogram.at("0011") == doctest::Approx(1.0).epsilon(1e-9));

  // A depolarised flux CNOT spoils the estimate.
  Mat noisy = 0.7 * dict["CNOT_flux"] + 0.3 * unitary_superop(Mat::Identity(4, 4));
  dict["CNOT_flux"] = noisy;
  auto n = run_phase_estimation(3.0 / 16.0, 4, &dict, 2, 4);
  CHECK(n.histogram.at("0011") < 0.9);
  double total = 0.0;
  for (const auto& [k, p] : n.histogram) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("labels and csv") {
  CHECK(outcome_label(3, 4) == "0011");
  CHECK(nearest_outcome(3.0 / 16.0, 4) == "0011");
  CHECK(nearest_outcome(0.99, 2) == "00");
  auto r = run_phase_estimation(0.25, 2, nullptr, 2, 5);
  std::ostringstream os;
  write_phase_csv(os, r, 0.25, 2, 5);
  std::string first = os.str().substr(0, os.str().find('\n'));
  CHECK(first == "phase,outcome,probability,shots,seed");
  CHECK(os.str().find("0.25,01,1,2,5") != std::string::npos);
}
