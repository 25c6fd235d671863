#include "dqc/ghz.hpp"

#include "dqc/lindblad.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace dqc {

namespace {

struct Level {
  int f, n, a;
};

std::string label(const Level& l) { return hybrid_labels()[hybrid_index(l.f, l.n, l.a)]; }

struct Plan {
  int field_index;
  bool resonant;
  double window;
  Level first;
  StepScore mode;
};

}  // namespace

std::vector<std::string> hybrid_labels() {
  std::vector<std::string> out;
  for (char f : {'L', 'R'})
    for (char n : {'0', '1'})
      for (char a : {'e', 'g', 'u'}) out.push_back(std::string{f, n, a});
  return out;
}

Vec hybrid_ket(int flux, int photon, int atom) { return ops::basis(12, hybrid_index(flux, photon, atom)); }

Vec ghz_target() { return (hybrid_ket(0, 1, 0) + hybrid_ket(1, 0, 1)) / std::sqrt(2.0); }

ProtocolResult run_ghz_sequence(const HybridParams& hp, const GhzOptions& opt) {
  if (opt.grid < 2) throw Error("GHZ step grid needs at least two points");
  if (!(opt.hold_window > 0.0)) throw Error("GHZ hold window must be positive");
  const HybridDerived d = hybrid_derived(hp);
  LevelCalibration cal{};
  if (hp.level_map == LevelMap::calibrated) cal = calibrate_levels(hp);
  const LindbladSet noise = opt.with_noise ? hybrid_lindblads(hp) : LindbladSet{};

  const Level r0g{1, 0, 1};
  const std::vector<Plan> plan{
      {4, false, kPi / (2.0 * hp.rabi), {1, 0, 0}, StepScore::fixed},
      {1, false, 1.5 * kPi / hp.g_a_u, {1, 1, 2}, StepScore::populations},
      {0, false, opt.hold_window, {1, 1, 2}, StepScore::overlap},
      {0, true, 1.5 * kPi / d.delta, {0, 0, 2}, StepScore::populations},
      {2, false, 1.5 * kPi / hp.rabi_u, {0, 0, 0}, StepScore::populations},
      {1, false, 1.5 * kPi / hp.g_a_u, {0, 1, 2}, StepScore::populations},
      {2, false, 1.5 * kPi / hp.rabi_u, {0, 1, 0}, StepScore::populations},
      {0, false, opt.hold_window, {0, 1, 0}, StepScore::overlap},
  };

  Vec psi0 = hybrid_ket(1, 0, 0);
  Mat rho = psi0 * psi0.adjoint();
  ProtocolResult res;
  const int n_steps = std::min<int>(opt.max_steps, static_cast<int>(plan.size()));
  for (int k = 0; k < n_steps; ++k) {
    const Plan& p = plan[k];
    ProtocolStep step;
    step.label = k + 1;
    step.field = hp.fields.at(p.field_index);
    step.gamma_q = p.resonant ? hp.gamma_q_res : hp.gamma_q_far;
    step.window = p.window;
    step.mode = p.mode;
    step.target = label(p.first) + "+" + label(r0g);

    const int ia = hybrid_index(p.first.f, p.first.n, p.first.a), ib = hybrid_index(r0g.f, r0g.n, r0g.a);
    Vec tgt = (ops::basis(12, ia) + ops::basis(12, ib)) / std::sqrt(2.0);
    auto score = [&](const Mat& r) {
      if (p.mode != StepScore::overlap) {
        double s = std::sqrt(std::max(0.0, r(ia, ia).real())) + std::sqrt(std::max(0.0, r(ib, ib).real()));
        return 0.5 * s * s;
      }
      return std::max(0.0, tgt.dot(r * tgt).real());
    };

    PiecewiseHamiltonian h(hybrid_hamiltonian(hp, step.field, step.gamma_q, &cal));
    Mat best = rho;
    double best_score = -1.0, best_t = 0.0;
    evolve_visit(h, rho, noise, TimeGrid(0.0, p.window, opt.grid), [&](int i, double t, const Mat& r) {
      if (p.mode == StepScore::fixed) {
        if (i == opt.grid - 1) {
          best = r;
          best_t = t;
          best_score = score(r);
        }
        return;
      }
      double s = score(r);
      if (s > best_score) {
        best_score = s;
        best_t = t;
        best = r;
      }
    });
    if (p.mode == StepScore::fixed) best_score = score(best);
    rho = 0.5 * (best + best.adjoint());
    rho /= rho.trace().real();
    step.duration = best_t;
    step.score = best_score;
    res.total_time += best_t;
    res.steps.push_back(step);
  }
  res.final_state = QuantumState::density(rho, {2, 2, 3});
  res.fidelity = state_fidelity(QuantumState::ket(ghz_target(), {2, 2, 3}), res.final_state);
  if (res.fidelity < opt.fidelity_floor) {
    std::ostringstream os;
    os << "GHZ fidelity " << res.fidelity << " below floor " << opt.fidelity_floor << "\n";
    write_ghz_steps(os, res);
    throw Error(os.str());
  }
  return res;
}

void ghz_density_report(std::ostream& os, const Mat& rho) {
  if (rho.rows() != 12 || rho.cols() != 12) throw Error("GHZ density report needs a 12x12 matrix");
  const auto labels = hybrid_labels();
  os << "label";
  for (const auto& l : labels) os << ',' << l;
  os << '\n';
  char buf[32];
  for (int i = 0; i < 12; ++i) {
    os << labels[i];
    for (int j = 0; j < 12; ++j) {
      std::snprintf(buf, sizeof buf, ",%.10f", std::abs(rho(i, j)));
      os << buf;
    }
    os << '\n';
  }
}

void write_ghz_steps(std::ostream& os, const ProtocolResult& r) {
  os << "step,field,gamma_q,window,duration,score,target\n";
  char buf[160];
  for (const auto& s : r.steps) {
    std::snprintf(buf, sizeof buf, "%d,%.6g,%.6g,%.10g,%.10g,%.10f,", s.label, s.field, s.gamma_q, s.window,
                  s.duration, s.score);
    os << buf << s.target << '\n';
  }
}

}  // namespace dqc
