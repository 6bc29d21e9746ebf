#pragma once

// Quadrature rules: Gauss-Legendre, Gauss-Hermite, composite and tensor rules,
// a bisection-adaptive Gauss-Legendre driver, and the Halton sequence.

#include "hypoou/types.hpp"

#include <cmath>
#include <functional>
#include <type_traits>
#include <vector>

namespace hypoou {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }
  void append(const Rule& other);
};

/// n-point Gauss-Legendre rule on [-1, 1]; cached per n.
const Rule& gauss_legendre(int n);

/// n-point Gauss-Legendre rule mapped to [a, b].
Rule gauss_legendre(int n, double a, double b);

/// Gauss-Hermite rule for weight exp(-u^2) on R; cached per n.
const Rule& gauss_hermite(int n);

/// Composite Gauss-Legendre with n nodes on each consecutive pair of breakpoints.
Rule composite_gauss_legendre(const std::vector<double>& breaks, int n);

/// Breakpoints [a, a+h, a+h*ratio, ...] growing geometrically until b.
std::vector<double> geometric_breaks(double a, double b, double first, double ratio);

/// Uniform breakpoints splitting [a, b] into `panels` pieces.
std::vector<double> uniform_breaks(double a, double b, int panels);

/// Visits every node of the tensor product of 1-D rules as (point, weight).
template <typename F>
void for_each_tensor(const std::vector<Rule>& rules, F&& visit) {
  const std::size_t d = rules.size();
  for (const auto& r : rules)
    if (r.size() == 0) return;
  std::vector<std::size_t> idx(d, 0);
  Vec p(static_cast<Eigen::Index>(d));
  while (true) {
    double w = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      p[static_cast<Eigen::Index>(k)] = rules[k].x[idx[k]];
      w *= rules[k].w[idx[k]];
    }
    visit(p, w);
    std::size_t k = 0;
    while (k < d && ++idx[k] == rules[k].size()) idx[k++] = 0;
    if (k == d) break;
  }
}

namespace detail {
template <typename T, typename = void>
struct plain {
  using type = T;
};
template <typename T>
struct plain<T, std::void_t<typename T::PlainObject>> {
  using type = typename T::PlainObject;
};
template <typename T>
using plain_t = typename plain<T>::type;
}  // namespace detail

/// Adaptive Gauss-Legendre on [a, b] for scalar or Eigen-valued integrands.
/// Bisects until the one-panel and two-panel estimates agree to tol (relative
/// to the magnitude of the running total).
template <typename F>
auto adaptive_gauss_legendre(F&& f, double a, double b, double tol, int max_depth = 40) {
  const Rule& g = gauss_legendre(15);
  using R = detail::plain_t<std::decay_t<decltype(f(a))>>;
  auto panel = [&](double lo, double hi) -> R {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    R acc = (h * g.w[0]) * f(c + h * g.x[0]);
    for (std::size_t k = 1; k < g.size(); ++k) acc += (h * g.w[k]) * f(c + h * g.x[k]);
    return acc;
  };
  auto magnitude = [](const R& v) {
    if constexpr (std::is_arithmetic_v<R>) {
      return std::abs(v);
    } else {
      return v.cwiseAbs().maxCoeff();
    }
  };
  std::function<R(double, double, R, int)> recurse = [&](double lo, double hi, R whole,
                                                          int depth) -> R {
    const double mid = 0.5 * (lo + hi);
    R left = panel(lo, mid);
    R right = panel(mid, hi);
    R both = left + right;
    R diff = both - whole;
    const double scale = std::max(magnitude(both), 1e-300);
    if (depth >= max_depth || magnitude(diff) <= tol * scale) return both;
    R out = recurse(lo, mid, left, depth + 1);
    out += recurse(mid, hi, right, depth + 1);
    return out;
  };
  return recurse(a, b, panel(a, b), 0);
}

/// Radical-inverse Halton sequence; dimension d uses the first d primes.
class Halton {
 public:
  explicit Halton(int dim, std::uint64_t skip = 1);
  /// Next point in [0,1)^d.
  Vec next();
  int dim() const { return static_cast<int>(primes_.size()); }

 private:
  std::vector<int> primes_;
  std::uint64_t index_;
};

/// Standard normals from an even-length uniform vector via Box-Muller pairs.
Vec box_muller(const Vec& u);

}  // namespace hypoou
