#include "hypoou/covering.hpp"

#include "hypoou/errors.hpp"
#include "hypoou/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hypoou {

namespace {

// Integers m with a < m < b.
std::int64_t open_count(double a, double b) {
  const double first = std::floor(a) + 1.0;
  const double last = std::ceil(b) - 1.0;
  return last >= first ? static_cast<std::int64_t>(last - first) + 1 : 0;
}

bool lower_triangular(const Mat& E) {
  const double tol = 1e-12 * (1.0 + E.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < E.rows(); ++i) {
    if (std::abs(E(i, i)) < tol) return false;
    for (Eigen::Index j = i + 1; j < E.cols(); ++j)
      if (std::abs(E(i, j)) > tol) return false;
  }
  return true;
}

// Lattice points ξ with Σ_j |x_j - (Eξ)_j|^{1/q_j} < budget, E lower triangular.
struct TriangularCounter {
  const Mat& E;
  const Vec& x;
  const Vec& h;
  const std::vector<int>& q;
  Vec xi;

  std::int64_t run(Eigen::Index j, double budget) {
    const double w = std::pow(budget, q[j]);
    double c = x(j);
    for (Eigen::Index k = 0; k < j; ++k) c -= E(j, k) * xi(k);
    const double e = E(j, j) * h(j);
    double a = (c - w) / e, b = (c + w) / e;
    if (a > b) std::swap(a, b);
    if (j + 1 == x.size()) return open_count(a, b);
    std::int64_t total = 0;
    for (double m = std::floor(a) + 1.0; m < b; m += 1.0) {
      xi(j) = m * h(j);
      const double rest = budget - std::pow(std::abs(c - E(j, j) * xi(j)), 1.0 / q[j]);
      if (rest > 0.0) total += run(j + 1, rest);
    }
    return total;
  }
};

// Brute force over the bounding box of the preimage, any invertible E.
std::int64_t box_count(const Mat& E, const Vec& x, const Vec& h, const std::vector<int>& q,
                       double budget) {
  const Eigen::Index N = x.size();
  Vec w(N);
  for (Eigen::Index j = 0; j < N; ++j) w(j) = std::pow(budget, q[j]);
  const Mat Einv = E.inverse();
  const Vec mid = Einv * x;
  const Vec half = Einv.cwiseAbs() * w;
  std::vector<std::int64_t> lo(N), hi(N);
  double cells = 1.0;
  for (Eigen::Index j = 0; j < N; ++j) {
    lo[j] = static_cast<std::int64_t>(std::floor((mid(j) - half(j)) / h(j)));
    hi[j] = static_cast<std::int64_t>(std::ceil((mid(j) + half(j)) / h(j)));
    cells *= static_cast<double>(hi[j] - lo[j] + 1);
  }
  if (cells > 5e7) throw ValidationError("covering count box too large for a non-triangular flow");
  std::vector<std::int64_t> m(lo);
  Vec xi(N);
  std::int64_t total = 0;
  for (;;) {
    for (Eigen::Index j = 0; j < N; ++j) xi(j) = static_cast<double>(m[j]) * h(j);
    const Vec d = x - E * xi;
    double s = 0.0;
    for (Eigen::Index j = 0; j < N; ++j) s += std::pow(std::abs(d(j)), 1.0 / q[j]);
    if (s < budget) ++total;
    Eigen::Index j = 0;
    while (j < N && ++m[j] > hi[j]) m[j] = lo[j], ++j;
    if (j == N) break;
  }
  return total;
}

// Upper bound on the lattice points in a norm ball of radius ρ, for unit lower
// triangular E: the i-th closest point along a coordinate is at least
// (i-1)h/2 away.
double ball_bound(double rho, std::size_t j, const Vec& h, const std::vector<int>& q) {
  if (rho <= 0.0) return 0.0;
  const double w = std::pow(rho, q[j]);
  if (j + 1 == static_cast<std::size_t>(h.size())) return std::floor(2.0 * w / h(j)) + 1.0;
  double total = 0.0;
  for (int i = 0;; ++i) {
    const double d = std::max(0, i - 1) * 0.5 * h(j);
    if (d >= w) break;
    total += ball_bound(rho - std::pow(d, 1.0 / q[j]), j + 1, h, q);
  }
  return total;
}

Point uniform_point(std::mt19937_64& rng, int N, double R, double T) {
  std::uniform_real_distribution<double> ux(-R, R), ut(-T, T);
  Vec x(N);
  for (int j = 0; j < N; ++j) x(j) = ux(rng);
  return {x, ut(rng)};
}

}  // namespace

Covering::Covering(double r, double K, double T, const BlockStructure& s)
    : r_(r), K_(K), T_(T), h_(s.N()), q_(s.q()) {
  // α(N+1) < 1 leaves room for one half-step per coordinate and the time gap.
  const double a = r / (s.N() + 2);
  for (int j = 0; j < s.N(); ++j) h_(j) = 2.0 * std::pow(a, q_[j]);
  const int n = std::max(1, static_cast<int>(std::ceil(2.0 * T / (2.0 * a * a))));
  for (int k = 0; k <= n; ++k) layers_.push_back(-T + 2.0 * T * k / n);
}

std::int64_t Covering::count_within(const Point& z, double radius, const DriftMatrix& D) const {
  std::int64_t total = 0;
  for (double tk : layers_) {
    const double dt = z.t - tk;
    const double budget = radius - std::sqrt(std::abs(dt));
    if (budget <= 0.0) continue;
    const Mat E = D.is_principal() ? D.E0(dt) : D.E(dt);
    if (lower_triangular(E)) {
      TriangularCounter tc{E, z.x, h_, q_, Vec::Zero(z.x.size())};
      total += tc.run(0, budget);
    } else {
      total += box_count(E, z.x, h_, q_, budget);
    }
  }
  return total;
}

std::vector<Point> Covering::centers(double R) const {
  const Eigen::Index N = h_.size();
  std::vector<std::int64_t> lo(N), hi(N);
  for (Eigen::Index j = 0; j < N; ++j) {
    lo[j] = static_cast<std::int64_t>(std::ceil(-R / h_(j)));
    hi[j] = static_cast<std::int64_t>(std::floor(R / h_(j)));
  }
  std::vector<Point> out;
  std::vector<std::int64_t> m(lo);
  for (;;) {
    Vec xi(N);
    for (Eigen::Index j = 0; j < N; ++j) xi(j) = static_cast<double>(m[j]) * h_(j);
    for (double tk : layers_) out.emplace_back(xi, tk);
    Eigen::Index j = 0;
    while (j < N && ++m[j] > hi[j]) m[j] = lo[j], ++j;
    if (j == N) break;
  }
  return out;
}

std::int64_t Covering::certified_overlap(const DriftMatrix& D) const {
  if (!D.is_principal()) return -1;
  const double R = K_ * r_;
  double best = 0.0;
  for (std::size_t m = 0; m + 1 < layers_.size(); ++m) {
    const double lo = layers_[m], hi = layers_[m + 1];
    double sum = 0.0;
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      const double tk = layers_[k];
      const double gap = tk < lo ? lo - tk : (tk > hi ? tk - hi : 0.0);
      sum += ball_bound(R - std::sqrt(gap), 0, h_, q_);
    }
    best = std::max(best, sum);
  }
  if (layers_.size() == 1) best = ball_bound(R, 0, h_, q_);
  return static_cast<std::int64_t>(best);
}

Covering build_covering(const StripSpec& strip, double r0, double K, const DriftMatrix& D,
                        std::size_t buildSamples, std::uint64_t seed) {
  if (!(strip.T > 0.0)) throw ValidationError("strip half-width T must be positive");
  if (!(r0 > 0.0)) throw ValidationError("r0 must be positive");
  if (!(K > 1.0)) throw ValidationError("K must exceed 1");
  std::mt19937_64 rng(seed);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < buildSamples; ++i)
    pts.push_back(uniform_point(rng, D.N(), strip.boxRadius, strip.T));
  for (double r = 0.5 * r0; r >= std::ldexp(r0, -20); r *= 0.5) {
    Covering c(r, K, strip.T, D.structure());
    std::vector<char> hit(pts.size(), 0);
    parallel_for(pts.size(), [&](std::size_t i) { hit[i] = c.count_within(pts[i], r, D) > 0; });
    if (std::all_of(hit.begin(), hit.end(), [](char b) { return b != 0; })) return c;
  }
  throw NoCoverageAtMinR("no lattice radius down to 2^-20 r0 covers the samples");
}

CoverReport verify_covering_at(const Covering& c, const std::vector<Point>& points,
                               const DriftMatrix& D) {
  std::vector<char> hit(points.size(), 0);
  std::vector<std::int64_t> overlap(points.size(), 0);
  parallel_for(points.size(), [&](std::size_t i) {
    hit[i] = c.count_within(points[i], c.r(), D) > 0;
    overlap[i] = c.count_within(points[i], c.K() * c.r(), D);
  });
  CoverReport rep;
  rep.samples = points.size();
  std::size_t covered = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    covered += hit[i] ? 1 : 0;
    rep.maxOverlap = std::max(rep.maxOverlap, overlap[i]);
  }
  rep.coverageFraction = points.empty() ? 1.0 : static_cast<double>(covered) / points.size();
  rep.certified = c.certified_overlap(D);
  return rep;
}

CoverReport verify_covering(const Covering& c, const StripSpec& strip, const DriftMatrix& D,
                            std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Point> pts;
  pts.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i)
    pts.push_back(uniform_point(rng, D.N(), strip.boxRadius, strip.T));
  return verify_covering_at(c, pts, D);
}

}  // namespace hypoou
