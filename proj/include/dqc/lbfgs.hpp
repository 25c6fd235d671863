#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace dqc {

using RVec = Eigen::VectorXd;

// Returns f(x) and writes the gradient into g.
using Objective = std::function<double(const RVec& x, RVec& g)>;

struct LineSearchOptions {
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_evals = 40;
  double alpha_max = 1e8;

  void validate() const;
};

struct LineSearchResult {
  bool ok = false;
  double alpha = 0.0;
  double f = 0.0;
  RVec x;
  RVec g;
  int evals = 0;
};

// Strong Wolfe search along a descent direction d (bracketing plus zoom with
// cubic interpolation).
LineSearchResult wolfe_line_search(const Objective& f, const RVec& x, double f0, const RVec& g0, const RVec& d,
                                   double alpha0, const LineSearchOptions& opt = {});

enum class LbfgsStop { gradient, target, max_iter, wall_time, line_search_failure };
std::string to_string(LbfgsStop s);

struct LbfgsOptions {
  int memory = 10;
  int max_iter = 1000;
  double grad_tol = 1e-10;
  std::optional<double> target_value;
  double max_wall_time = std::numeric_limits<double>::infinity();  // s
  LineSearchOptions line_search;
};

struct LbfgsResult {
  RVec x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  int skipped_pairs = 0;
  int restarts = 0;
  LbfgsStop stop = LbfgsStop::max_iter;
  double wall_time = 0.0;
  std::vector<double> history;  // objective after each accepted iterate, starting at x0
};

LbfgsResult lbfgs_minimize(const Objective& f, RVec x0, const LbfgsOptions& opt = {});

}  // namespace dqc
