#include "hypoou/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace hypoou {

void Rule::append(const Rule& other) {
  x.insert(x.end(), other.x.begin(), other.x.end());
  w.insert(w.end(), other.w.begin(), other.w.end());
}

namespace {

Rule build_legendre(int n) {
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  return r;
}

// Golub-Welsch on the symmetric Jacobi matrix of the Hermite recurrence.
Rule build_hermite(int n) {
  Mat J = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    J(k, k - 1) = J(k - 1, k) = std::sqrt(0.5 * k);
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(J);
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  const double mu0 = std::sqrt(std::numbers::pi);
  for (int k = 0; k < n; ++k) {
    r.x[k] = es.eigenvalues()[k];
    const double v = es.eigenvectors()(0, k);
    r.w[k] = mu0 * v * v;
  }
  // Symmetrize against rounding in the eigensolver.
  for (int k = 0; k < n / 2; ++k) {
    const double xs = 0.5 * (r.x[n - 1 - k] - r.x[k]);
    const double ws = 0.5 * (r.w[n - 1 - k] + r.w[k]);
    r.x[k] = -xs;
    r.x[n - 1 - k] = xs;
    r.w[k] = r.w[n - 1 - k] = ws;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

template <typename Builder>
const Rule& cached(std::map<int, Rule>& cache, std::mutex& m, int n, Builder build) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build(n)).first;
  return it->second;
}

}  // namespace

const Rule& gauss_legendre(int n) {
  static std::map<int, Rule> cache;
  static std::mutex m;
  return cached(cache, m, n, build_legendre);
}

const Rule& gauss_hermite(int n) {
  static std::map<int, Rule> cache;
  static std::mutex m;
  return cached(cache, m, n, build_hermite);
}

Rule gauss_legendre(int n, double a, double b) {
  const Rule& g = gauss_legendre(n);
  Rule r;
  r.x.resize(g.size());
  r.w.resize(g.size());
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (std::size_t k = 0; k < g.size(); ++k) {
    r.x[k] = c + h * g.x[k];
    r.w[k] = h * g.w[k];
  }
  return r;
}

Rule composite_gauss_legendre(const std::vector<double>& breaks, int n) {
  Rule r;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    if (breaks[k + 1] > breaks[k]) r.append(gauss_legendre(n, breaks[k], breaks[k + 1]));
  }
  return r;
}

std::vector<double> geometric_breaks(double a, double b, double first, double ratio) {
  std::vector<double> out{a};
  double h = first;
  double x = a + h;
  while (x < b) {
    out.push_back(x);
    h *= ratio;
    x += h;
  }
  out.push_back(b);
  // Merge a sliver last panel into its neighbour.
  if (out.size() > 2 && (b - out[out.size() - 2]) < 0.25 * (out[out.size() - 2] - out[out.size() - 3]))
    out.erase(out.end() - 2);
  return out;
}

std::vector<double> uniform_breaks(double a, double b, int panels) {
  std::vector<double> out(panels + 1);
  for (int k = 0; k <= panels; ++k) out[k] = a + (b - a) * k / panels;
  out.back() = b;
  return out;
}

namespace {
constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
}

Halton::Halton(int dim, std::uint64_t skip) : index_(skip) {
  if (dim < 1 || dim > 16) throw std::invalid_argument("Halton dimension must be in [1,16]");
  primes_.assign(kPrimes, kPrimes + dim);
}

Vec Halton::next() {
  Vec u(dim());
  for (int d = 0; d < dim(); ++d) {
    const int b = primes_[d];
    double f = 1.0, r = 0.0;
    for (std::uint64_t i = index_; i > 0; i /= b) {
      f /= b;
      r += f * static_cast<double>(i % b);
    }
    u[d] = r;
  }
  ++index_;
  return u;
}

Vec box_muller(const Vec& u) {
  if (u.size() % 2 != 0) throw std::invalid_argument("box_muller needs an even number of uniforms");
  Vec g(u.size());
  for (Eigen::Index k = 0; k < u.size(); k += 2) {
    const double rad = std::sqrt(-2.0 * std::log(std::max(u[k], 1e-300)));
    g[k] = rad * std::cos(2.0 * std::numbers::pi * u[k + 1]);
    g[k + 1] = rad * std::sin(2.0 * std::numbers::pi * u[k + 1]);
  }
  return g;
}

}  // namespace hypoou
