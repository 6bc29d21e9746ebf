#include "hypoou/bounds.hpp"

#include "hypoou/errors.hpp"
#include "hypoou/optimize.hpp"
#include "hypoou/parallel.hpp"
#include "hypoou/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace hypoou {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Unit vector of the raw norm through (v, sign).
Point direction(const Vec& v, double sign, const BlockStructure& s) {
  const Point p(v, sign);
  return dilate(1.0 / hom_norm(p, s), p, s);
}

// Slice points spread like C̃(1), widened so the tails are visited too. The
// first one is v = 0 (the peak of γ at fixed t).
std::vector<Vec> direction_seeds(const DriftMatrix& D, int count, std::uint64_t seed) {
  const int N = D.N();
  const Mat L = CholeskyFactor(covariance(Mat::Identity(D.p0(), D.p0()), 1.0, D, CovKind::Ctilde)).L();
  Halton h(2 * ((N + 1) / 2), 1 + seed);
  std::vector<Vec> out{Vec::Zero(N)};
  while (static_cast<int>(out.size()) < count) {
    const Vec g = box_muller(h.next()).head(N);
    out.push_back(1.5 * std::sqrt(2.0) * L * g);
  }
  return out;
}

struct ShellSweep {
  double sup = 0.0;
  Point zeta;
  std::vector<ShellMax> shells;
};

ShellSweep sweep_shells(const FrozenKernel& k, const SweepSpec& spec, int shells, int directions,
                        double tMax) {
  const BlockStructure& s = k.drift().structure();
  const double lo = std::max(spec.rhoMin, spec.excludeRadius);
  const std::vector<Vec> seeds = direction_seeds(k.drift(), directions, spec.seed);
  std::vector<Point> dirs;
  for (const Vec& v : seeds) dirs.push_back(direction(v, 1.0, s));
  ShellSweep out;
  out.zeta = Point::origin(k.N());
  struct Candidate {
    double value;
    Vec v;
    double logRho;
  };
  std::vector<Candidate> best;
  for (int i = 0; i < shells; ++i) {
    const double rho = shells == 1 ? lo : lo * std::pow(spec.rhoMax / lo, double(i) / (shells - 1));
    ShellMax sm{rho, 0.0};
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      const Point zeta = dilate(rho, dirs[d], s);
      if (zeta.t > tMax) continue;
      const double m = bound_measure(k, zeta, spec.order);
      sm.value = std::max(sm.value, m);
      best.push_back({m, seeds[d], std::log(rho)});
      if (m > out.sup) out.sup = m, out.zeta = zeta;
    }
    out.shells.push_back(sm);
  }
  if (!spec.polish || best.empty()) return out;
  std::partial_sort(best.begin(), best.begin() + std::min<std::size_t>(3, best.size()), best.end(),
                    [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
  const double logLo = std::log(lo), logHi = std::log(spec.rhoMax);
  auto objective = [&](const Vec& p) {
    const double lr = p(p.size() - 1);
    if (lr < logLo || lr > logHi) return kInf;
    const Point zeta = dilate(std::exp(lr), direction(p.head(p.size() - 1), 1.0, s), s);
    if (zeta.t > tMax) return kInf;
    return -bound_measure(k, zeta, spec.order);
  };
  for (std::size_t c = 0; c < std::min<std::size_t>(3, best.size()); ++c) {
    Vec p0(best[c].v.size() + 1);
    p0 << best[c].v, best[c].logRho;
    const NelderMeadResult r = nelder_mead(objective, p0, 0.1, 150);
    if (-r.value > out.sup) {
      out.sup = -r.value;
      out.zeta = dilate(std::exp(r.x(r.x.size() - 1)), direction(r.x.head(r.x.size() - 1), 1.0, s), s);
    }
  }
  return out;
}

double max_abs_diff(const KernelValue& a, const KernelValue& b, int order) {
  if (order == 0) return std::abs(a.value - b.value);
  if (order == 1) return (a.grad - b.grad).cwiseAbs().maxCoeff();
  return (a.hess - b.hess).cwiseAbs().maxCoeff();
}

// Extreme generalized eigenvalues of A x = λ B x.
Interval gen_eig(const Mat& A, const Mat& B) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(A, B, Eigen::EigenvaluesOnly);
  return {ges.eigenvalues().minCoeff(), ges.eigenvalues().maxCoeff()};
}

double spread(const Interval& i) { return std::max(i.hi, 1.0 / i.lo); }

}  // namespace

double bound_measure(const FrozenKernel& k, const Point& zeta, int order) {
  if (zeta.t <= 0.0) return 0.0;
  const KernelValue v = k.eval(zeta);
  const BlockStructure& s = k.drift().structure();
  const double scale = std::pow(hom_norm(zeta, s), s.Q() + order);
  switch (order) {
    case 0:
      return scale * std::abs(v.value);
    case 1:
      return scale * v.grad.cwiseAbs().maxCoeff();
    case 2:
      return scale * v.hess.cwiseAbs().maxCoeff();
  }
  throw ValidationError("order must be 0, 1 or 2");
}

BoundReport kernel_bound_sweep(const SweepSpec& spec, const CoefficientField& field,
                               const DriftMatrix& D) {
  if (spec.order < 0 || spec.order > 2) throw ValidationError("order must be 0, 1 or 2");
  if (spec.z0Samples.empty()) throw ValidationError("no z0 samples");
  const std::size_t nz = spec.z0Samples.size();
  std::vector<ShellSweep> base(nz), fine(nz);
  parallel_for(nz, [&](std::size_t i) {
    const FrozenKernel k(spec.z0Samples[i], field, D, KernelVariant::full);
    base[i] = sweep_shells(k, spec, spec.shells, spec.directions, 2.0 * spec.T);
    fine[i] = sweep_shells(k, spec, 2 * spec.shells, 2 * spec.directions, 2.0 * spec.T);
  });
  BoundReport rep;
  rep.perShellMax.assign(base.front().shells.size(), ShellMax{});
  for (std::size_t i = 0; i < nz; ++i) {
    rep.perZ0.push_back(base[i].sup);
    if (base[i].sup > rep.supConstant) {
      rep.supConstant = base[i].sup;
      rep.argmaxZ0 = spec.z0Samples[i];
      rep.argmaxZeta = base[i].zeta;
    }
    rep.refinedSup = std::max(rep.refinedSup, fine[i].sup);
    for (std::size_t j = 0; j < base[i].shells.size(); ++j) {
      rep.perShellMax[j].rho = base[i].shells[j].rho;
      rep.perShellMax[j].value = std::max(rep.perShellMax[j].value, base[i].shells[j].value);
    }
    rep.samples += static_cast<std::size_t>(spec.shells) * spec.directions;
  }
  rep.relChange = std::abs(rep.refinedSup - rep.supConstant) / rep.refinedSup;
  rep.stableUnderRefinement = rep.relChange <= 0.1;

  // Homogeneity makes the principal per-shell constant invariant.
  const FrozenKernel principal(spec.z0Samples.front(), field, D, KernelVariant::principal);
  const ShellSweep p = sweep_shells(principal, spec, spec.shells, spec.directions, 1.0);
  rep.principalSup = p.sup;
  double lo = kInf, hi = 0.0;
  for (const ShellMax& sm : p.shells) {
    if (sm.rho > 1.0 || sm.value <= 0.0) continue;
    lo = std::min(lo, sm.value);
    hi = std::max(hi, sm.value);
  }
  rep.principalShellSpread = hi > 0.0 ? hi / lo : 0.0;

  const Eigen::SelfAdjointEigenSolver<Mat> es(
      covariance(Mat::Identity(D.p0(), D.p0()), 1.0, D, CovKind::Ctilde));
  rep.lambdaCtilde = es.eigenvalues().minCoeff();
  rep.LambdaCtilde = es.eigenvalues().maxCoeff();
  return rep;
}

BoundReport lipschitz_quotient_sweep(const LipschitzSpec& spec, const CoefficientField& field,
                                     const DriftMatrix& D) {
  if (spec.order < 0 || spec.order > 2) throw ValidationError("order must be 0, 1 or 2");
  if (spec.z0Samples.empty()) throw ValidationError("no z0 samples");
  const BlockStructure& s = D.structure();
  const int N = D.N();
  const double expo = s.Q() + spec.order + 1;
  std::vector<FrozenKernel> kernels;
  for (const Point& z0 : spec.z0Samples) kernels.emplace_back(z0, field, D, KernelVariant::full);
  auto eval = [&](const FrozenKernel& k, const Point& p) {
    return k.eval(spec.reflected ? group_inverse(p, D) : p);
  };
  const Mat L = 1.5 * std::sqrt(2.0) *
                CholeskyFactor(covariance(Mat::Identity(D.p0(), D.p0()), 1.0, D, CovKind::Ctilde)).L();

  struct Triple {
    std::size_t z0;
    Point zeta, v;
  };
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_direction = [&]() {
    Vec g(N);
    for (int j = 0; j < N; ++j) g(j) = normal(rng);
    return direction(L * g, unit(rng) < 0.5 ? -1.0 : 1.0, s);
  };
  const double lo = spec.excludeRadius, hi = 10.0;
  std::vector<Triple> triples;
  const std::size_t want = 2 * static_cast<std::size_t>(spec.pairs);
  for (std::size_t attempt = 0; triples.size() < want && attempt < 50 * want; ++attempt) {
    const std::size_t i = attempt % kernels.size();
    const double rho = lo * std::pow(hi / lo, unit(rng));
    const Point zeta = dilate(rho, random_direction(), s);
    const Point theta = random_direction();
    const double sv = spec.M * rho * unit(rng);
    if (std::abs(zeta.t) > 2.0 * spec.T || sv < spec.minSeparation) continue;
    if (((zeta.x - spec.H.lo).array() < 0.0).any() || ((spec.H.hi - zeta.x).array() < 0.0).any())
      continue;
    triples.push_back({i, zeta, dilate(sv, theta, s)});
  }
  if (triples.size() < want) throw NoAdmissibleTriples("admissible triples too rare in H");

  std::vector<double> q(triples.size());
  parallel_for(triples.size(), [&](std::size_t n) {
    const Triple& t = triples[n];
    const FrozenKernel& k = kernels[t.z0];
    const double diff = max_abs_diff(eval(k, group_compose(t.zeta, t.v, D)), eval(k, t.zeta), spec.order);
    q[n] = diff * std::pow(hom_norm(t.zeta, s), expo) / hom_norm(t.v, s);
  });
  BoundReport rep;
  for (std::size_t n = 0; n < triples.size(); ++n) {
    if (n < static_cast<std::size_t>(spec.pairs) && q[n] > rep.supConstant) {
      rep.supConstant = q[n];
      rep.argmaxZ0 = spec.z0Samples[triples[n].z0];
      rep.argmaxZeta = triples[n].zeta;
    }
    rep.refinedSup = std::max(rep.refinedSup, q[n]);
  }
  rep.samples = static_cast<std::size_t>(spec.pairs);
  rep.relChange = rep.refinedSup > 0.0 ? (rep.refinedSup - rep.supConstant) / rep.refinedSup : 0.0;
  rep.stableUnderRefinement = rep.relChange <= 0.1;

  // Negative control: w⁻¹∘z̄ = δ(s)θ runs into the pole while ζ stays fixed,
  // so ‖z⁻¹∘z̄‖ ≤ M‖w⁻¹∘z‖ fails and the quotient must blow up.
  Vec v0 = Vec::Constant(N, 0.5);
  const Point theta = direction(v0, 1.0, s);
  const Point zeta = dilate(0.5, direction(-v0, 1.0, s), s);
  const FrozenKernel& k = kernels.front();
  for (double r : {1e-1, 1e-2, 1e-3}) {
    const Point target = dilate(r, theta, s);
    const Point v = group_compose(group_inverse(zeta, D), target, D);
    const double diff = max_abs_diff(eval(k, target), eval(k, zeta), spec.order);
    rep.controlRadii.push_back(r);
    rep.controlQuotients.push_back(diff * std::pow(hom_norm(zeta, s), expo) / hom_norm(v, s));
  }
  return rep;
}

SandwichReport sandwich_report(const std::vector<double>& tGrid,
                               const std::vector<Point>& z0Samples,
                               const CoefficientField& field, const DriftMatrix& D,
                               std::size_t samples, std::uint64_t seed) {
  for (double t : tGrid)
    if (!(t > 0.0)) throw NonPositiveTime("sandwich times must be positive");
  if (z0Samples.empty()) throw ValidationError("no z0 samples");
  const int N = D.N(), p0 = D.p0();
  const BlockStructure& s = D.structure();
  SandwichReport rep;
  rep.Lambda = field.Lambda();
  const Mat I = Mat::Identity(p0, p0);
  const Mat Ct1 = covariance(I, 1.0, D, CovKind::Ctilde);
  const Eigen::SelfAdjointEigenSolver<Mat> es(Ct1);
  rep.lambdaCtilde = es.eigenvalues().minCoeff();
  rep.LambdaCtilde = es.eigenvalues().maxCoeff();
  const double Lam = rep.Lambda, tol = 1e-12;
  rep.inverseEnvelope = {1.0 / (Lam * rep.LambdaCtilde), Lam / rep.lambdaCtilde};
  rep.covRatio = rep.detRatio = rep.scaledInverse = {kInf, 0.0};

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const std::size_t nz = z0Samples.size();
  const std::size_t per = std::max<std::size_t>(1, samples / nz);
  const double detLam = std::pow(Lam, N);
  std::vector<double> devT(tGrid.size(), 0.0);
  for (std::size_t zi = 0; zi < nz; ++zi) {
    const Mat A0 = field.evaluate(z0Samples[zi]);
    const Mat C01 = covariance(A0, 1.0, D, CovKind::C0);
    const double dr = C01.determinant() / Ct1.determinant();
    rep.detRatio = {std::min(rep.detRatio.lo, dr), std::max(rep.detRatio.hi, dr)};
    if (dr < (1.0 - tol) / detLam || dr > (1.0 + tol) * detLam) ++rep.detViolations;
    std::vector<Mat> C0inv;
    for (double t : tGrid) C0inv.push_back(CholeskyFactor(covariance(A0, t, D, CovKind::C0)).inverse());
    for (std::size_t n = 0; n < per; ++n) {
      Vec y(N);
      for (int j = 0; j < N; ++j) y(j) = normal(rng);
      const double r = y.dot(C01 * y) / y.dot(Ct1 * y);
      rep.covRatio = {std::min(rep.covRatio.lo, r), std::max(rep.covRatio.hi, r)};
      if (r < (1.0 - tol) / Lam || r > (1.0 + tol) * Lam) ++rep.covViolations;
      const std::size_t ti = n % tGrid.size();
      const double st = std::sqrt(tGrid[ti]);
      const Vec x = dilation_matrix(st, DilationMode::space, s) * y;
      const double b = x.dot(C0inv[ti] * x) / y.squaredNorm();
      rep.scaledInverse = {std::min(rep.scaledInverse.lo, b), std::max(rep.scaledInverse.hi, b)};
      if (b < rep.inverseEnvelope.lo * (1.0 - 1e-9) || b > rep.inverseEnvelope.hi * (1.0 + 1e-9))
        ++rep.inverseViolations;
      ++rep.samples;
    }
    double m = 1.0;
    for (std::size_t ti = 0; ti < tGrid.size(); ++ti) {
      const double t = tGrid[ti];
      const Mat C = covariance(A0, t, D, CovKind::C);
      const Mat C0 = covariance(A0, t, D, CovKind::C0);
      const Mat Ct = covariance(I, t, D, CovKind::Ctilde);
      const CholeskyFactor cf(C);
      const Mat Cinv = cf.inverse();
      const auto dinv = dilation_matrix(1.0 / std::sqrt(t), DilationMode::space, s);
      const Mat Dsq = Mat(dinv) * Mat(dinv);
      const double a = spread(gen_eig(C, Ct));
      const double det = C.determinant() / Ct.determinant();
      const double c = spread(gen_eig(Cinv, Dsq));
      const double inv = spread(gen_eig(Cinv, C0inv[ti]));
      rep.Mcov = std::max(rep.Mcov, a);
      rep.Mdet = std::max(rep.Mdet, std::max(det, 1.0 / det));
      rep.Minv = std::max(rep.Minv, inv);
      m = std::max({m, a, det, 1.0 / det, c});
      const Interval dev = gen_eig(C, C0);
      devT[ti] = std::max({devT[ti], std::abs(dev.lo - 1.0), std::abs(dev.hi - 1.0)});
    }
    rep.mPerZ0.push_back(m);
  }
  rep.m = *std::max_element(rep.mPerZ0.begin(), rep.mPerZ0.end());
  rep.mFirstHalf = *std::max_element(rep.mPerZ0.begin(), rep.mPerZ0.begin() + (nz + 1) / 2);

  std::vector<double> lx, ly;
  for (std::size_t ti = 0; ti < tGrid.size(); ++ti)
    if (devT[ti] > 1e-12) lx.push_back(std::log(tGrid[ti])), ly.push_back(std::log(devT[ti]));
  if (lx.size() >= 2) {
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < lx.size(); ++k)
      sx += lx[k], sy += ly[k], sxx += lx[k] * lx[k], sxy += lx[k] * ly[k];
    rep.deviationSlope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  } else {
    rep.deviationSlope = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

std::vector<Point> sample_strip(int N, double R, double T, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-R, R), ut(-T, T);
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vec x(N);
    for (int j = 0; j < N; ++j) x(j) = ux(rng);
    out.emplace_back(x, ut(rng));
  }
  return out;
}

}  // namespace hypoou
