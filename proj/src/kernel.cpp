#include "hypoou/kernel.hpp"

#include "hypoou/errors.hpp"
#include "hypoou/parallel.hpp"
#include "hypoou/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace hypoou {

FrozenKernel::FrozenKernel(DriftMatrix D, Mat A0, KernelVariant variant)
    : D_(std::move(D)), A0_(std::move(A0)), variant_(variant) {}

FrozenKernel::FrozenKernel(const Point& z0, const CoefficientField& field, const DriftMatrix& D,
                           KernelVariant variant)
    : FrozenKernel(D, field.evaluate(z0), variant) {}

Mat FrozenKernel::cov(double t) const {
  return covariance(A0_, t, D_, variant_ == KernelVariant::full ? CovKind::C : CovKind::C0);
}

FrozenKernel::Slice FrozenKernel::slice(double t) const {
  if (!(t > 0.0)) throw NonPositiveTime("kernel slice needs t > 0");
  const CholeskyFactor f(cov(t));
  Slice s;
  s.t = t;
  s.L = f.L();
  s.logNorm = -0.5 * N() * std::log(4.0 * std::numbers::pi) - 0.5 * f.logdet - t * trace();
  s.CinvTop = f.inverse().topLeftCorner(p0(), p0());
  return s;
}

double FrozenKernel::value(const Slice& s, const Vec& x) const {
  const Vec y = s.L.triangularView<Eigen::Lower>().solve(x);
  return std::exp(s.logNorm - 0.25 * y.squaredNorm());
}

KernelValue FrozenKernel::eval(const Slice& s, const Vec& x) const {
  const Vec y = s.L.triangularView<Eigen::Lower>().solve(x);
  KernelValue k;
  k.value = std::exp(s.logNorm - 0.25 * y.squaredNorm());
  const Vec cx = s.L.transpose().triangularView<Eigen::Upper>().solve(y);  // C⁻¹x
  const Vec g = cx.head(p0());
  k.grad = -0.5 * k.value * g;
  k.hess = k.value * (0.25 * g * g.transpose() - 0.5 * s.CinvTop);
  return k;
}

KernelValue FrozenKernel::eval(const Point& z) const {
  if (!(z.t > 0.0)) {
    KernelValue k;
    k.grad = Vec::Zero(p0());
    k.hess = Mat::Zero(p0(), p0());
    return k;
  }
  return eval(slice(z.t), z.x);
}

KernelValue gamma_eval(const Point& z0, const Point& z, const CoefficientField& field,
                       const DriftMatrix& D, KernelVariant variant) {
  return FrozenKernel(z0, field, D, variant).eval(z);
}

double fundamental_eval(const Point& z0, const Point& z, const Point& zeta,
                        const CoefficientField& field, const DriftMatrix& D) {
  const Point w = group_compose(group_inverse(zeta, D), z, D);
  return gamma_eval(z0, w, field, D, KernelVariant::full).value;
}

double kernel_mass(const FrozenKernel& k, double t, int panels, int nodes) {
  if (!(t > 0.0)) throw NonPositiveTime("kernel mass needs t > 0");
  const FrozenKernel::Slice s = k.slice(t);
  const Mat map = std::sqrt(2.0) * s.L;
  const Rule r = composite_gauss_legendre(uniform_breaks(-9.0, 9.0, panels), nodes);
  double sum = 0.0;
  for_each_tensor(std::vector<Rule>(static_cast<std::size_t>(k.N()), r),
                  [&](const Vec& y, double w) { sum += w * k.value(s, map * y); });
  return sum * map.determinant();
}

double pde_residual(const Point& z0, const Point& z, const CoefficientField& field,
                    const DriftMatrix& D, double h, KernelVariant variant) {
  const double norm = hom_norm(z, D.structure());
  if (h > 0.1 * norm) throw StepTooLarge("finite-difference step exceeds 0.1 of the norm of z");
  const FrozenKernel k(z0, field, D, variant);
  const Mat& B = variant == KernelVariant::full ? D.B() : D.B0();
  const Mat A = k.A0();
  const int N = D.N(), p0 = D.p0();
  auto f = [&](const Vec& x, double t) { return k.eval(Point(x, t)).value; };
  auto shifted = [&](int i, double a, int j, double b) {
    Vec x = z.x;
    if (i >= 0) x[i] += a;
    if (j >= 0) x[j] += b;
    return f(x, z.t);
  };
  const double f0 = f(z.x, z.t);
  double second = 0.0;
  for (int i = 0; i < p0; ++i) {
    for (int j = 0; j < p0; ++j) {
      double d2;
      if (i == j) {
        d2 = (shifted(i, h, -1, 0) - 2.0 * f0 + shifted(i, -h, -1, 0)) / (h * h);
      } else {
        d2 = (shifted(i, h, j, h) - shifted(i, h, j, -h) - shifted(i, -h, j, h) +
              shifted(i, -h, j, -h)) /
             (4.0 * h * h);
      }
      second += A(i, j) * d2;
    }
  }
  Vec grad(N);
  for (int j = 0; j < N; ++j) grad[j] = (shifted(j, h, -1, 0) - shifted(j, -h, -1, 0)) / (2.0 * h);
  const double drift = z.x.dot(B * grad);
  const double dt = (f(z.x, z.t + h) - f(z.x, z.t - h)) / (2.0 * h);
  return std::abs(second + drift - dt);
}

namespace {

constexpr std::int64_t kChunk = 1 << 16;

// Calls visit(chunk, w) for every simulated increment w = x_start - E(t)X_t.
template <typename Visit>
void simulate_increments(const Point& z0, const Vec& x_start, double t,
                         const CoefficientField& field, const DriftMatrix& D,
                         std::int64_t paths, std::uint64_t seed, Visit&& visit) {
  const int N = D.N();
  const Mat A = embed_diffusion(field.evaluate(z0), N);
  // Law of X_t: mean e^{tBᵀ}x_start, covariance 2∫_0^t e^{uBᵀ} A e^{uB} du.
  const Mat Sigma = integrated_gram(D.B().transpose(), 2.0 * A, t);
  const Mat root = Eigen::LLT<Mat>(Sigma).matrixL();
  const Mat forward = D.E(-t);  // e^{tBᵀ}
  const Mat back = D.E(t);
  const Vec mean = forward * x_start;
  const std::int64_t chunks = (paths + kChunk - 1) / kChunk;
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(c)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    const std::int64_t begin = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t end = std::min(paths, begin + kChunk);
    Vec g(N);
    for (std::int64_t p = begin; p < end; ++p) {
      for (int k = 0; k < N; ++k) g[k] = normal(rng);
      const Vec X = mean + root * g;
      visit(c, Vec(x_start - back * X));
    }
  });
}

}  // namespace

McReport mc_transition_density(const Point& z0, const Vec& x_start, double t,
                               const CoefficientField& field, const DriftMatrix& D,
                               std::int64_t paths, std::uint64_t seed, int binsPerDim) {
  if (paths < 10000) throw PathCountTooSmall("at least 1e4 paths are required");
  if (!(t > 0.0)) throw NonPositiveTime("transition density needs t > 0");
  const int N = D.N();
  const FrozenKernel k(z0, field, D, KernelVariant::full);
  const FrozenKernel::Slice sl = k.slice(t);
  const Mat C = k.cov(t);

  McReport rep;
  rep.paths = paths;
  rep.binsPerDim = binsPerDim;
  rep.lo.resize(N);
  rep.hi.resize(N);
  for (int j = 0; j < N; ++j) {
    rep.hi[j] = 4.0 * std::sqrt(2.0 * C(j, j));
    rep.lo[j] = -rep.hi[j];
  }
  std::size_t nbins = 1;
  for (int j = 0; j < N; ++j) nbins *= static_cast<std::size_t>(binsPerDim);

  const std::int64_t chunks = (paths + kChunk - 1) / kChunk;
  std::vector<std::vector<std::int64_t>> counts(chunks, std::vector<std::int64_t>(nbins, 0));
  std::vector<Vec> sum(chunks, Vec::Zero(N)), sumsq(chunks, Vec::Zero(N));
  simulate_increments(z0, x_start, t, field, D, paths, seed, [&](std::size_t c, const Vec& w) {
    sum[c] += w;
    sumsq[c] += w.cwiseAbs2();
    std::size_t idx = 0;
    for (int j = 0; j < N; ++j) {
      const double u = (w[j] - rep.lo[j]) / (rep.hi[j] - rep.lo[j]);
      if (u < 0.0 || u >= 1.0) return;
      idx = idx * binsPerDim + static_cast<std::size_t>(u * binsPerDim);
    }
    ++counts[c][idx];
  });

  Vec s = Vec::Zero(N), s2 = Vec::Zero(N);
  std::vector<std::int64_t> total(nbins, 0);
  for (std::int64_t c = 0; c < chunks; ++c) {
    s += sum[c];
    s2 += sumsq[c];
    for (std::size_t b = 0; b < nbins; ++b) total[b] += counts[c][b];
  }
  const double n = static_cast<double>(paths);
  rep.sampleVariance = (s2 - s.cwiseAbs2() / n) / (n - 1.0);

  const double scale = std::exp(t * D.traceB());
  rep.peak = k.value(sl, Vec::Zero(N)) * scale;
  Vec width(N);
  double binVol = 1.0;
  for (int j = 0; j < N; ++j) {
    width[j] = (rep.hi[j] - rep.lo[j]) / binsPerDim;
    binVol *= width[j];
  }
  rep.empirical.resize(nbins);
  rep.analytic.resize(nbins);
  std::vector<int> digits(N);
  for (std::size_t b = 0; b < nbins; ++b) {
    std::size_t rem = b;
    for (int j = N - 1; j >= 0; --j) {
      digits[j] = static_cast<int>(rem % binsPerDim);
      rem /= binsPerDim;
    }
    std::vector<Rule> rules(N);
    for (int j = 0; j < N; ++j) {
      const double a = rep.lo[j] + digits[j] * width[j];
      rules[j] = gauss_legendre(3, a, a + width[j]);
    }
    double avg = 0.0;
    for_each_tensor(rules, [&](const Vec& x, double w) { avg += w * k.value(sl, x); });
    rep.analytic[b] = scale * avg / binVol;
    rep.empirical[b] = static_cast<double>(total[b]) / (n * binVol);
    rep.supDiscrepancy =
        std::max(rep.supDiscrepancy, std::abs(rep.empirical[b] - rep.analytic[b]) / rep.peak);
  }
  return rep;
}

double mc_variance_slope(const Point& z0, const std::vector<double>& times, int component,
                         const CoefficientField& field, const DriftMatrix& D,
                         std::int64_t paths, std::uint64_t seed) {
  if (paths < 10000) throw PathCountTooSmall("at least 1e4 paths are required");
  const Vec start = Vec::Zero(D.N());
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const std::int64_t chunks = (paths + kChunk - 1) / kChunk;
    std::vector<double> s(chunks, 0.0), s2(chunks, 0.0);
    simulate_increments(z0, start, times[i], field, D, paths, seed + i,
                        [&](std::size_t c, const Vec& w) {
                          s[c] += w[component];
                          s2[c] += w[component] * w[component];
                        });
    double a = 0.0, b = 0.0;
    for (std::int64_t c = 0; c < chunks; ++c) {
      a += s[c];
      b += s2[c];
    }
    const double n = static_cast<double>(paths);
    lx.push_back(std::log(times[i]));
    ly.push_back(std::log((b - a * a / n) / (n - 1.0)));
  }
  const double m = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace hypoou
