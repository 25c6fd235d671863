#include "dqc/circuits.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace dqc;
using testutil::max_abs;

namespace {

Mat product(const std::vector<Gate>& gates, int n) {
  QubitCircuit c(n);
  c.add(gates);
  return circuit_unitary(c);
}

// Brute force: |j> -> sum_k e^{2 pi i jk / N} |k> / sqrt N.
Mat dft_oracle(int n) {
  const int d = 1 << n;
  Mat m(d, d);
  for (int k = 0; k < d; ++k)
    for (int j = 0; j < d; ++j) m(k, j) = std::exp(kI * (kTwoPi * j * k / d)) / std::sqrt(static_cast<double>(d));
  return m;
}

}  // namespace

TEST_CASE("gate constructors") {
  Vec plus = make_gate("H", {0}).matrix * ops::basis(2, 0);
  CHECK(std::abs(plus(0) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(plus(1) - 1.0 / std::sqrt(2.0)) < 1e-15);

  Mat rz = make_gate("RZ", {0}, {}, {kPi}).matrix;
  CHECK(std::abs(rz(0, 0) - cplx(0, -1)) < 1e-15);
  CHECK(std::abs(rz(1, 1) - cplx(0, 1)) < 1e-15);

  Mat r2 = make_gate("R", {1}, {0}, {2}).matrix;
  Vec d = r2.diagonal();
  CHECK(max_abs(r2 - Mat(d.asDiagonal())) == 0.0);
  CHECK(std::abs(d(0) - 1.0) < 1e-15);
  CHECK(std::abs(d(1) - std::exp(-kI * kTwoPi / 4.0)) < 1e-15);
  CHECK(std::abs(d(2) - 1.0) < 1e-15);
  CHECK(std::abs(d(3) - std::exp(kI * kTwoPi / 4.0)) < 1e-15);
  CHECK(max_abs(make_gate("RINV", {1}, {0}, {2}).matrix - r2.conjugate()) < 1e-15);

  Mat cp = make_gate("CPHASE", {1}, {0}, {0.7}).matrix;
  CHECK(std::abs(cp(3, 3) - std::exp(kI * 0.7)) < 1e-15);
  CHECK(std::abs(cp(2, 2) - 1.0) < 1e-15);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int i = 0; i < 20; ++i) {
    CHECK(unitarity_defect(make_gate("U", {0}, {}, {ang(rng), ang(rng), ang(rng)}).matrix) < 1e-10);
    CHECK(unitarity_defect(make_gate("CPHASE", {1}, {0}, {ang(rng)}).matrix) < 1e-10);
  }
  for (const char* name : {"H", "X", "Y", "Z"}) CHECK(unitarity_defect(make_gate(name, {0}).matrix) < 1e-10);
  for (const char* name : {"CNOT", "CZ"}) CHECK(unitarity_defect(make_gate(name, {1}, {0}).matrix) < 1e-10);
  CHECK(unitarity_defect(make_gate("SWAP", {0, 1}).matrix) < 1e-10);

  CHECK_THROWS_AS(make_gate("FOO", {0}), Error);
  CHECK_THROWS_AS(make_gate("CNOT", {0}, {0}), Error);
  CHECK_THROWS_AS(make_gate("RZ", {0}), Error);
}

TEST_CASE("cphase decomposition equals CPHASE up to a global phase") {
  auto check = [](double phi) {
    Mat c = product(cphase_decomposition(0, 1, phi), 2);
    Mat ideal = make_gate("CPHASE", {1}, {0}, {phi}).matrix;
    return max_abs(c - std::exp(-kI * phi / 4.0) * ideal);
  };
  CHECK(check(0.0) < 1e-12);
  CHECK(check(kPi) < 1e-12);
  Mat c = product(cphase_decomposition(0, 1, kPi / 2.0), 2) * std::exp(kI * kPi / 8.0);
  Mat expect = Mat::Identity(4, 4);
  expect(3, 3) = kI;
  CHECK(max_abs(c - expect) < 1e-12);

  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> ang(-2.0 * kPi, 2.0 * kPi);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) worst = std::max(worst, check(ang(rng)));
  CHECK(worst < 1e-12);
  CHECK(cphase_decomposition(0, 1, 0.3).size() == 5);
}

TEST_CASE("QFT matches the DFT definition") {
  for (int n = 1; n <= 5; ++n) {
    Mat q = circuit_unitary(qft_circuit(n));
    CHECK(max_abs(q - dft_oracle(n)) < 1e-10);
    CHECK(max_abs(dft_matrix(n) - dft_oracle(n)) < 1e-12);
    Mat iq = circuit_unitary(inverse_qft_circuit(n));
    CHECK(max_abs(iq * q - Mat::Identity(1 << n, 1 << n)) < 1e-10);
  }
  QubitCircuit one = qft_circuit(1);
  CHECK(one.items().size() == 1);

  // Product representation: qubit k (k = 1 leftmost) carries phase e^{2 pi i j / 2^k}.
  const int n = 4;
  Mat q = circuit_unitary(qft_circuit(n));
  for (int j = 0; j < (1 << n); ++j) {
    Vec prod = Vec::Ones(1);
    for (int k = 1; k <= n; ++k) {
      Vec f(2);
      f << 1.0, std::exp(kI * (kTwoPi * j / std::ldexp(1.0, k)));
      prod = tensor_product(prod, Vec(f / std::sqrt(2.0)));
    }
    CHECK((q.col(j) - prod).norm() < 1e-10);
  }
}

TEST_CASE("apply_circuit") {
  auto s0 = QuantumState::basis({2, 2}, {0, 0});
  QubitCircuit empty(2);
  auto r0 = apply_circuit(empty, s0, {}, 1);
  CHECK(state_fidelity(r0.state, s0) == doctest::Approx(1.0));

  QubitCircuit bell(2);
  bell.add(make_gate("H", {0}));
  bell.add(make_gate("CNOT", {1}, {0}));
  auto rb = apply_circuit(bell, s0, {}, 1);
  Vec expect = Vec::Zero(4);
  expect(0) = expect(3) = 1.0 / std::sqrt(2.0);
  CHECK(state_fidelity(rb.state, QuantumState::ket(expect, {2, 2})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(rb.state.ket_vector().norm() - 1.0) < 1e-9);

  QubitCircuit hm(1);
  hm.add(make_gate("H", {0}));
  hm.measure(0);
  int ones = 0;
  const int shots = 20000;
  for (int s = 0; s < shots; ++s) {
    auto r = apply_circuit(hm, QuantumState::basis({2}, {0}), {}, 1000 + s);
    CHECK(r.records.size() == 1);
    CHECK(r.records[0].p0 + r.records[0].p1 == doctest::Approx(1.0).epsilon(1e-9));
    ones += r.records[0].outcome;
  }
  const double sigma = std::sqrt(shots * 0.25);
  CHECK(std::abs(ones - shots / 2.0) < 3.0 * sigma);

  QubitCircuit cond(2);
  cond.add(make_gate("X", {0}));
  int bit = cond.measure(0);
  cond.add_conditional(make_gate("X", {1}), bit);
  auto rc = apply_circuit(cond, s0, {}, 3);
  CHECK(state_fidelity(rc.state, QuantumState::basis({2, 2}, {1, 1})) == doctest::Approx(1.0));

  CHECK_THROWS_AS(apply_circuit(bell, QuantumState::basis({2}, {0}), {}, 1), Error);
}

TEST_CASE("gate dictionary substitution") {
  QubitCircuit c(1, {"ryd"});
  c.add(make_gate("X", {0}));
  GateDictionary dict{{"X_ryd", unitary_superop(ops::sigma_z())}};
  auto plus = QuantumState::ket((ops::basis(2, 0) + ops::basis(2, 1)) / std::sqrt(2.0), {2});
  auto r = apply_circuit(c, plus, {&dict, false}, 1);
  auto minus = QuantumState::ket((ops::basis(2, 0) - ops::basis(2, 1)) / std::sqrt(2.0), {2});
  CHECK(state_fidelity(r.state, minus) == doctest::Approx(1.0).epsilon(1e-12));

  GateDictionary op_dict{{"X_ryd", ops::sigma_z()}};
  auto r2 = apply_circuit(c, plus, {&op_dict, false}, 1);
  CHECK(state_fidelity(r2.state, minus) == doctest::Approx(1.0).epsilon(1e-12));

  QubitCircuit h(1, {"ryd"});
  h.add(make_gate("H", {0}));
  CHECK_THROWS_AS(apply_circuit(h, plus, {&dict, true}, 1), Error);
  CHECK_NOTHROW(apply_circuit(h, plus, {&dict, false}, 1));
}

TEST_CASE("POVM measurement") {
  Rng rng(1);
  auto [rec, post] = measure_qubit_povm(QuantumState::basis({2, 2}, {1, 0}), 0, rng);
  CHECK(rec.outcome == 1);
  CHECK(rec.p1 == doctest::Approx(1.0));

  auto plus = QuantumState::ket((ops::basis(2, 0) + ops::basis(2, 1)) / std::sqrt(2.0), {2});
  auto [rp, pp] = measure_qubit_povm(plus, 0, rng);
  CHECK(rp.p0 == doctest::Approx(0.5));
  CHECK(rp.p1 == doctest::Approx(0.5));

  Vec bell = Vec::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng r(seed);
    auto [rb, pb] = measure_qubit_povm(QuantumState::ket(bell, {2, 2}), 0, r);
    auto expect = QuantumState::basis({2, 2}, {rb.outcome, rb.outcome});
    CHECK(state_fidelity(pb, expect) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("circuit text round trip") {
  QubitCircuit c(3, {"ryd", "ryd", "flux"});
  c.add(make_gate("H", {0}));
  c.add(make_gate("CPHASE", {2}, {0}, {0.123456789}));
  int b = c.measure(1);
  c.add_conditional(make_gate("Z", {2}), b);
  c.reset({1});
  QubitCircuit back = QubitCircuit::from_text(c.to_text());
  CHECK(back.to_text() == c.to_text());
  CHECK(back.n_qubits() == 3);
  CHECK(back.system(2) == "flux");
  CHECK_THROWS_AS(QubitCircuit::from_text("QUBITS 1\nGATE H targets=[3]\n"), Error);
  CHECK_THROWS_AS(QubitCircuit::from_text("QUBITS 1\nCOND 0 GATE X targets=[0]\n"), Error);
}
