#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "corrcoh/linalg.hpp"

namespace corrcoh {

struct SimplexOptions {
  double initial_step = 0.3;
  int max_evaluations = 4000;
  /// Stall tolerance: stop once the spread of simplex values falls below this.
  double f_tol = 1e-9;
  /// Also stop when the simplex has collapsed to this diameter.
  double x_tol = 1e-12;
  /// Fresh simplices built around the incumbent after a stall; stops early when a round
  /// improves by less than f_tol.
  int max_rounds = 8;
};

struct SimplexResult {
  RealVector x;
  double value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead with dimension-adaptive coefficients (Gao and Han), restarted from the
/// incumbent until a round stops improving.
template <class Objective>
SimplexResult minimize_simplex(Objective&& f, const RealVector& x0, const SimplexOptions& opt = {}) {
  const Eigen::Index n = x0.size();
  SimplexResult best{x0, f(x0), 1, true};
  if (n == 0) return best;

  const double nd = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / nd;
  const double gamma = 0.75 - 1.0 / (2.0 * nd);
  const double delta = 1.0 - 1.0 / nd;

  double step = opt.initial_step;
  for (int round = 0; round < opt.max_rounds; ++round) {
    std::vector<RealVector> pts(static_cast<std::size_t>(n + 1), best.x);
    std::vector<double> vals(static_cast<std::size_t>(n + 1), best.value);
    for (Eigen::Index i = 0; i < n; ++i) {
      pts[static_cast<std::size_t>(i + 1)](i) += step;
      vals[static_cast<std::size_t>(i + 1)] = f(pts[static_cast<std::size_t>(i + 1)]);
      ++best.evaluations;
    }
    std::vector<std::size_t> order(static_cast<std::size_t>(n + 1));
    bool stalled = false;
    while (best.evaluations < opt.max_evaluations) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
      const std::size_t lo = order.front();
      const std::size_t hi = order.back();
      const std::size_t second = order[order.size() - 2];

      double diameter = 0.0;
      for (const auto& p : pts) diameter = std::max(diameter, (p - pts[lo]).cwiseAbs().maxCoeff());
      if (vals[hi] - vals[lo] <= opt.f_tol || diameter <= opt.x_tol) {
        stalled = true;
        break;
      }

      RealVector centroid = RealVector::Zero(n);
      for (std::size_t i = 0; i < pts.size(); ++i)
        if (i != hi) centroid += pts[i];
      centroid /= nd;

      const RealVector xr = centroid + alpha * (centroid - pts[hi]);
      const double fr = f(xr);
      ++best.evaluations;
      if (fr < vals[lo]) {
        const RealVector xe = centroid + beta * (xr - centroid);
        const double fe = f(xe);
        ++best.evaluations;
        if (fe < fr) {
          pts[hi] = xe;
          vals[hi] = fe;
        } else {
          pts[hi] = xr;
          vals[hi] = fr;
        }
        continue;
      }
      if (fr < vals[second]) {
        pts[hi] = xr;
        vals[hi] = fr;
        continue;
      }
      const bool outside = fr < vals[hi];
      const RealVector xc = outside ? RealVector(centroid + gamma * (xr - centroid))
                                    : RealVector(centroid - gamma * (centroid - pts[hi]));
      const double fc = f(xc);
      ++best.evaluations;
      if (fc < (outside ? fr : vals[hi])) {
        pts[hi] = xc;
        vals[hi] = fc;
        continue;
      }
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i == lo) continue;
        pts[i] = pts[lo] + delta * (pts[i] - pts[lo]);
        vals[i] = f(pts[i]);
        ++best.evaluations;
      }
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    const double improvement = best.value - *it;
    if (*it < best.value) {
      best.value = *it;
      best.x = pts[static_cast<std::size_t>(it - vals.begin())];
    }
    best.converged = stalled;
    if (!stalled) break;
    if (round > 0 && improvement <= opt.f_tol) break;
    step = std::max(step * 0.5, 1e-3);
  }
  return best;
}

}  // namespace corrcoh
