#include "dqc/grape.hpp"
#include "dqc/lbfgs.hpp"
#include "dqc/lindblad.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace dqc;
using testutil::max_abs;

namespace {

double rosenbrock(const RVec& x, RVec& g) {
  const double a = 1.0 - x(0), b = x(1) - x(0) * x(0);
  g.resize(2);
  g(0) = -2.0 * a - 400.0 * x(0) * b;
  g(1) = 200.0 * b;
  return a * a + 100.0 * b * b;
}

GrapeProblem random_problem(std::mt19937_64& rng, int d, int n_controls, bool open) {
  GrapeProblem p;
  p.drift = testutil::random_hermitian(d, rng);
  for (int k = 0; k < n_controls; ++k) p.controls.push_back(testutil::random_hermitian(d, rng));
  if (open) p.lindblads.add(0.3 * testutil::random_matrix(d, d, rng), 0.1, "l");
  p.initial = Mat::Identity(d * d, d * d);
  p.target = unitary_superop(testutil::unitary_from_hermitian(testutil::random_hermitian(d, rng), 1.0));
  return p;
}

}  // namespace

TEST_CASE("lbfgs minimises the Rosenbrock function") {
  LbfgsOptions o;
  o.max_iter = 500;
  auto r = lbfgs_minimize(rosenbrock, RVec::Constant(2, -1.2), o);
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.stop == LbfgsStop::gradient);
  for (size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);

  o.target_value = 1e-3;
  auto t = lbfgs_minimize(rosenbrock, RVec::Constant(2, -1.2), o);
  CHECK(t.stop == LbfgsStop::target);
  CHECK(t.f <= 1e-3);

  LbfgsOptions few;
  few.max_iter = 3;
  auto m = lbfgs_minimize(rosenbrock, RVec::Constant(2, -1.2), few);
  CHECK(m.stop == LbfgsStop::max_iter);
  CHECK(m.iterations == 3);

  few.memory = 0;
  CHECK_THROWS_AS(lbfgs_minimize(rosenbrock, RVec::Zero(2), few), Error);
  CHECK_THROWS_AS(lbfgs_minimize(rosenbrock, RVec::Constant(2, NAN)), Error);
}

TEST_CASE("lbfgs on a quadratic") {
  std::mt19937_64 rng(61);
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(6, 6);
  Eigen::MatrixXd q = a * a.transpose() + Eigen::MatrixXd::Identity(6, 6);
  RVec b = RVec::Random(6);
  Objective f = [&](const RVec& x, RVec& g) {
    g = q * x - b;
    return 0.5 * x.dot(q * x) - b.dot(x);
  };
  auto r = lbfgs_minimize(f, RVec::Zero(6));
  CHECK((r.x - q.ldlt().solve(b)).norm() < 1e-8);
}

TEST_CASE("strong Wolfe line search") {
  RVec x = RVec::Constant(2, -1.2), g0;
  const double f0 = rosenbrock(x, g0);
  RVec d = -g0;
  LineSearchOptions o;
  auto ls = wolfe_line_search(rosenbrock, x, f0, g0, d, 1.0, o);
  REQUIRE(ls.ok);
  CHECK(ls.f <= f0 + o.c1 * ls.alpha * g0.dot(d));
  CHECK(std::abs(ls.g.dot(d)) <= o.c2 * std::abs(g0.dot(d)));
  CHECK((ls.x - (x + ls.alpha * d)).norm() < 1e-14);

  LineSearchOptions bad;
  bad.c2 = 1e-5;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = {};
  bad.c1 = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("initial pulses") {
  auto a = initial_pulse(8, 3, 16.0, PulseInit::RND, 2.0, 5), b = initial_pulse(8, 3, 16.0, PulseInit::RND, 2.0, 5);
  CHECK((a.amplitudes - b.amplitudes).norm() == 0.0);
  CHECK(a.dt == doctest::Approx(2.0));
  CHECK(a.amplitudes.cwiseAbs().maxCoeff() <= 2.0);
  CHECK(initial_pulse(8, 3, 16.0, PulseInit::RND, 2.0, 6).amplitudes != a.amplitudes);
  CHECK(initial_pulse(8, 1, 1.0, PulseInit::ZERO, 1.0, 0).amplitudes.norm() == 0.0);
  auto sq = initial_pulse(4, 1, 1.0, PulseInit::SQUARE, 1.0, 0);
  CHECK(sq.amplitudes(0, 0) == 1.0);
  CHECK(sq.amplitudes(3, 0) == -1.0);
  CHECK(parse_pulse_init("SINE") == PulseInit::SINE);
  CHECK(to_string(PulseInit::TRIANGLE) == "TRIANGLE");
  CHECK_THROWS_AS(parse_pulse_init("sine"), Error);
  CHECK_THROWS_AS(initial_pulse(1, 1, 1.0, PulseInit::ZERO, 1.0, 0), Error);
}

TEST_CASE("step propagator and fidelity") {
  std::mt19937_64 rng(67);
  auto p = random_problem(rng, 2, 2, false);
  RVec u(2);
  u << 0.3, -0.7;
  Mat h = p.drift + 0.3 * p.controls[0] - 0.7 * p.controls[1];
  CHECK(max_abs(step_propagator(p, u, 0.4) - unitary_superop(testutil::unitary_from_hermitian(h, 0.4))) < 1e-12);
  CHECK_THROWS_AS(step_propagator(p, RVec::Zero(3), 0.4), Error);

  // A pulse that lands exactly on the target.
  GrapeProblem id = p;
  id.drift = Mat::Zero(2, 2);
  id.target = unitary_superop(testutil::unitary_from_hermitian(p.controls[0], 1.0));
  ControlPulse cp{RMat::Zero(4, 2), 0.25};
  cp.amplitudes.col(0).setOnes();
  auto perf = performance_and_gradient(id, cp);
  CHECK(perf.fidelity_error == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(perf.gradient.norm() < 1e-10);
}

TEST_CASE("exact gradient matches finite differences") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const int d = trial % 2 ? 2 : 3;
    auto p = random_problem(rng, d, 2, trial % 3 != 0);
    ControlPulse cp{RMat(5, 2), 0.2};
    for (int i = 0; i < cp.amplitudes.size(); ++i) cp.amplitudes.data()[i] = amp(rng);
    auto perf = performance_and_gradient(p, cp);
    const double h = 1e-6;
    for (int l = 0; l < 5; ++l)
      for (int k = 0; k < 2; ++k) {
        ControlPulse a = cp, b = cp;
        a.amplitudes(l, k) += h;
        b.amplitudes(l, k) -= h;
        const double fd = (performance_and_gradient(p, a, GradientMode::exact, false).fidelity_error -
                           performance_and_gradient(p, b, GradientMode::exact, false).fidelity_error) /
                          (2.0 * h);
        worst = std::max(worst, std::abs(fd - perf.gradient(l, k)) / std::max(1.0, std::abs(fd)));
      }
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("first-order gradient approaches the exact one for small slices") {
  std::mt19937_64 rng(73);
  auto p = random_problem(rng, 2, 2, true);
  ControlPulse cp{RMat::Constant(50, 2, 0.3), 0.002};
  auto e = performance_and_gradient(p, cp, GradientMode::exact);
  auto f = performance_and_gradient(p, cp, GradientMode::first_order);
  CHECK((e.gradient - f.gradient).norm() / e.gradient.norm() < 1e-2);
}

TEST_CASE("optimize_pulse reaches a single-qubit gate") {
  GrapeProblem p;
  p.drift = 0.5 * ops::sigma_z();
  p.controls = {ops::sigma_x(), ops::sigma_y()};
  p.initial = Mat::Identity(4, 4);
  p.target = unitary_superop(ideal_gate_unitary("H"));
  GrapeOptions o;
  o.n_ts = 10;
  o.evo_time = 5.0;
  o.max_iter = 200;
  o.fid_err_targ = 1e-8;
  o.seed = 3;
  auto r = optimize_pulse(p, o);
  CHECK(r.fidelity_error <= 1e-8);
  CHECK(r.terminated_by == "target");
  for (size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
  auto again = optimize_pulse(p, o);
  CHECK(again.fidelity_error == r.fidelity_error);
  CHECK(max_abs(again.final_map - r.final_map) == 0.0);

  o.amp_bound = 0.5;
  auto bounded = optimize_pulse(p, o);
  CHECK(bounded.pulse.amplitudes.cwiseAbs().maxCoeff() <= 0.5);

  o.fid_err_targ = 0.0;
  CHECK_THROWS_AS(optimize_pulse(p, o), Error);
}

TEST_CASE("gate dictionary build") {
  DictionaryBuildOptions o;
  o.single.n_ts = 10;
  o.single.max_iter = 20;
  o.single.seed = 2;
  o.pair = o.single;
  o.systems = {"ryd"};
  auto b = build_gate_dictionary(o);
  CHECK(b.dict.size() == 4);
  for (const char* k : {"X_ryd", "Z_ryd", "H_ryd", "CNOT_ryd"}) CHECK(b.dict.count(k) == 1);
  CHECK(std::abs(b.dict.at("CNOT_ryd")(0, 0) - 1.0) < 1e-12);
  CHECK(b.dict.at("X_ryd").rows() == 4);
  CHECK(b.dict.at("CNOT_ryd").rows() == 16);
  for (const auto& g : b.builds) CHECK(g.error.empty());

  CHECK(max_abs(ideal_gate_unitary("CNOT") - make_gate("CNOT", {1}, {0}).matrix) == 0.0);
  CHECK_THROWS_AS(GrapeProblem::from_spec(grape_problem(PhysicalSystem::rydberg, 1, {}, {}), ideal_gate_unitary("CNOT")),
                  Error);
}
