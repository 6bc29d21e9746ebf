#pragma once

// Derivative-free local minimization, used to polish sampled suprema.

#include "hypoou/types.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace hypoou {

struct NelderMeadResult {
  Vec x;
  double value = 0.0;
  int iterations = 0;
};

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction ½, shrink ½).
/// f may return +inf outside its domain.
template <typename F>
NelderMeadResult nelder_mead(F&& f, const Vec& x0, double step, int maxIter = 200,
                             double ftol = 1e-10) {
  const Eigen::Index n = x0.size();
  std::vector<Vec> pts(n + 1, x0);
  std::vector<double> val(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) pts[i + 1](i) += step;
  for (Eigen::Index i = 0; i <= n; ++i) val[i] = f(pts[i]);
  std::vector<std::size_t> order(n + 1);
  int it = 0;
  for (; it < maxIter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    if (std::abs(val[worst] - val[best]) <= ftol * (std::abs(val[best]) + ftol)) break;
    Vec centroid = Vec::Zero(n);
    for (std::size_t k = 0; k < order.size() - 1; ++k) centroid += pts[order[k]];
    centroid /= static_cast<double>(n);
    const Vec xr = centroid + (centroid - pts[worst]);
    const double fr = f(xr);
    if (fr < val[best]) {
      const Vec xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = f(xe);
      if (fe < fr) pts[worst] = xe, val[worst] = fe;
      else pts[worst] = xr, val[worst] = fr;
    } else if (fr < val[second]) {
      pts[worst] = xr, val[worst] = fr;
    } else {
      const Vec xc = centroid + 0.5 * (pts[worst] - centroid);
      const double fc = f(xc);
      if (fc < val[worst]) {
        pts[worst] = xc, val[worst] = fc;
      } else {
        for (std::size_t k = 1; k < order.size(); ++k) {
          pts[order[k]] = pts[best] + 0.5 * (pts[order[k]] - pts[best]);
          val[order[k]] = f(pts[order[k]]);
        }
      }
    }
  }
  const auto bi = std::min_element(val.begin(), val.end()) - val.begin();
  return {pts[bi], val[bi], it};
}

}  // namespace hypoou
