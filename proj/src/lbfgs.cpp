#include "dqc/lbfgs.hpp"

#include "dqc/core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

namespace dqc {

void LineSearchOptions::validate() const {
  if (!(c1 > 0.0 && c1 < 1.0)) throw Error("line search: c1 must lie in (0, 1)");
  if (!(c2 > c1 && c2 < 1.0)) throw Error("line search: c2 must satisfy c1 < c2 < 1");
  if (max_evals < 1) throw Error("line search: max_evals must be positive");
}

namespace {

struct Point {
  double a, f, dphi;
};

// Minimiser of the cubic through (a, fa, da) and (b, fb, db).
double cubic_min(const Point& p, const Point& q) {
  const double d1 = p.dphi + q.dphi - 3.0 * (p.f - q.f) / (p.a - q.a);
  const double disc = d1 * d1 - p.dphi * q.dphi;
  if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double d2 = std::copysign(std::sqrt(disc), q.a - p.a);
  return q.a - (q.a - p.a) * (q.dphi + d2 - d1) / (q.dphi - p.dphi + 2.0 * d2);
}

}  // namespace

LineSearchResult wolfe_line_search(const Objective& f, const RVec& x, double f0, const RVec& g0, const RVec& d,
                                   double alpha0, const LineSearchOptions& opt) {
  opt.validate();
  const double dphi0 = g0.dot(d);
  LineSearchResult res;
  if (!(dphi0 < 0.0)) return res;

  RVec xa, ga(x.size());
  auto eval = [&](double a) {
    xa = x + a * d;
    double fa = f(xa, ga);
    ++res.evals;
    if (!std::isfinite(fa)) throw Error("objective returned a non-finite value");
    return Point{a, fa, ga.dot(d)};
  };
  auto accept = [&](const Point& p) {
    res.ok = true;
    res.alpha = p.a;
    res.f = p.f;
    res.x = xa;
    res.g = ga;
    return res;
  };
  auto armijo = [&](const Point& p) { return p.f <= f0 + opt.c1 * p.a * dphi0; };
  auto curvature = [&](const Point& p) { return std::abs(p.dphi) <= -opt.c2 * dphi0; };

  auto zoom = [&](Point lo, Point hi) -> LineSearchResult {
    while (res.evals < opt.max_evals) {
      double a = cubic_min(lo, hi);
      const double left = std::min(lo.a, hi.a), right = std::max(lo.a, hi.a), w = right - left;
      if (!std::isfinite(a) || a < left + 0.1 * w || a > right - 0.1 * w) a = 0.5 * (lo.a + hi.a);
      if (w <= 1e-16 * std::max(1.0, right)) break;
      Point p = eval(a);
      if (!armijo(p) || p.f >= lo.f) {
        hi = p;
      } else {
        if (curvature(p)) return accept(p);
        if (p.dphi * (hi.a - lo.a) >= 0.0) hi = lo;
        lo = p;
      }
    }
    return res;
  };

  Point prev{0.0, f0, dphi0};
  double a = std::min(alpha0, opt.alpha_max);
  for (int i = 0; res.evals < opt.max_evals; ++i) {
    Point p = eval(a);
    if (!armijo(p) || (i > 0 && p.f >= prev.f)) return zoom(prev, p);
    if (curvature(p)) return accept(p);
    if (p.dphi >= 0.0) return zoom(p, prev);
    prev = p;
    if (a >= opt.alpha_max) break;
    a = std::min(2.0 * a, opt.alpha_max);
  }
  return res;
}

std::string to_string(LbfgsStop s) {
  switch (s) {
    case LbfgsStop::gradient:
      return "gradient";
    case LbfgsStop::target:
      return "target";
    case LbfgsStop::max_iter:
      return "max_iter";
    case LbfgsStop::wall_time:
      return "wall_time";
    case LbfgsStop::line_search_failure:
      return "line-search-failure";
  }
  return "unknown";
}

LbfgsResult lbfgs_minimize(const Objective& f, RVec x0, const LbfgsOptions& opt) {
  opt.line_search.validate();
  if (opt.memory < 1) throw Error("lbfgs: memory must be positive");
  if (!x0.allFinite()) throw Error("lbfgs: initial point is not finite");
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  LbfgsResult r;
  RVec x = std::move(x0), g(x.size());
  double fx = f(x, g);
  ++r.evaluations;
  if (!std::isfinite(fx)) throw Error("objective returned a non-finite value");
  r.history.push_back(fx);

  std::deque<RVec> s_hist, y_hist;
  std::deque<double> rho_hist;
  bool fresh = true;

  auto finish = [&](LbfgsStop why) {
    r.x = x;
    r.f = fx;
    r.stop = why;
    r.wall_time = elapsed();
    return r;
  };

  while (true) {
    if (opt.target_value && fx <= *opt.target_value) return finish(LbfgsStop::target);
    if (g.lpNorm<Eigen::Infinity>() <= opt.grad_tol) return finish(LbfgsStop::gradient);
    if (r.iterations >= opt.max_iter) return finish(LbfgsStop::max_iter);
    if (elapsed() >= opt.max_wall_time) return finish(LbfgsStop::wall_time);

    RVec d;
    double alpha0 = 1.0;
    if (fresh || s_hist.empty()) {
      d = -g;
      alpha0 = 1.0 / std::max(1.0, g.norm());
    } else {
      RVec q = g;
      const size_t m = s_hist.size();
      std::vector<double> al(m);
      for (size_t i = m; i-- > 0;) {
        al[i] = rho_hist[i] * s_hist[i].dot(q);
        q -= al[i] * y_hist[i];
      }
      const double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
      for (size_t i = 0; i < m; ++i) {
        const double b = rho_hist[i] * y_hist[i].dot(q);
        q += s_hist[i] * (al[i] - b);
      }
      d = -q;
      if (!(g.dot(d) < 0.0)) {
        d = -g;
        alpha0 = 1.0 / std::max(1.0, g.norm());
      }
    }

    LineSearchResult ls = wolfe_line_search(f, x, fx, g, d, alpha0, opt.line_search);
    r.evaluations += ls.evals;
    if (!ls.ok) {
      if (fresh) return finish(LbfgsStop::line_search_failure);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      fresh = true;
      ++r.restarts;
      continue;
    }
    fresh = false;
    RVec s = ls.x - x, y = ls.g - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    } else {
      ++r.skipped_pairs;
    }
    x = std::move(ls.x);
    g = std::move(ls.g);
    fx = ls.f;
    ++r.iterations;
    r.history.push_back(fx);
  }
}

}  // namespace dqc
