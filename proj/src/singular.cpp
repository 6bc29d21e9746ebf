#include "hypoou/singular.hpp"

#include "hypoou/errors.hpp"
#include "hypoou/parallel.hpp"
#include "hypoou/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hypoou {

namespace {

// Gauge of (x, t) without temporaries; same formulas as algebra's gauge().
double fast_gauge(const Vec& x, double t, const GaugeSpec& g, const std::vector<int>& q) {
  const auto N = x.size();
  auto part = [&](Eigen::Index k) {
    const double a = std::abs(x[k]);
    const int qk = q[static_cast<std::size_t>(k)];
    return qk == 1 ? a : qk == 3 ? std::cbrt(a) : std::pow(a, 1.0 / qk);
  };
  if (g.kind == GaugeKind::raw) {
    double n = std::sqrt(std::abs(t));
    for (Eigen::Index k = 0; k < N; ++k) n += part(k);
    return n;
  }
  double m = std::sqrt(std::abs(t));
  for (Eigen::Index k = 0; k < N; ++k) m = std::max(m, part(k));
  if (m == 0.0) return 0.0;
  const double p = 2.0 * g.kappa;
  double s = std::pow(std::sqrt(std::abs(t)) / m, p);
  for (Eigen::Index k = 0; k < N; ++k) s += std::pow(part(k) / m, p);
  return m * std::pow(s, 1.0 / p);
}

Rule panel_rule(double lo, double hi, double width, int nodes) {
  const int panels = std::max(2, static_cast<int>(std::ceil((hi - lo) / width - 1e-9)));
  return composite_gauss_legendre(uniform_breaks(lo, hi, panels), nodes);
}

// 0, f, f·r, f·r², ... up to b, with a sliver last panel merged.
std::vector<double> graded_breaks(double b, double first, double ratio) {
  std::vector<double> br{0.0};
  for (double x = first; x < b; x *= ratio) br.push_back(x);
  if (br.size() > 2 && b - br.back() < 0.3 * (br.back() - br[br.size() - 2]))
    br.back() = b;
  else
    br.push_back(b);
  return br;
}

// Covariance shape of the principal kernel on the slice t = ±1.
Mat slice_shape(const FrozenKernel& principal, bool reflected) {
  const Mat C1 = principal.cov(1.0);
  if (!reflected) return C1;
  const Mat E = principal.drift().E0(-1.0);
  return E * C1 * E.transpose();
}

CijReport cij_from_kernel(const FrozenKernel& principal, int i, int j, const CijMesh& mesh,
                          const GaugeSpec& g) {
  const DriftMatrix& D = principal.drift();
  const BlockStructure& s = D.structure();
  const int N = D.N();
  if (i < 0 || j < 0 || i >= D.p0() || j >= D.p0()) throw ValidationError("c_ij needs i, j < p0");
  const FrozenKernel::Slice one = principal.slice(1.0);
  const Mat C1 = principal.cov(1.0);
  auto integrand = [&](const Vec& v) {
    const Point z(v, 1.0);
    const KernelValue kv = principal.eval(one, v);
    const double n = gauge(z, g, s);
    return -2.0 * kv.grad[i] * gauge_grad_x(z, g, s)[j] / n;
  };
  auto evaluate = [&](int level) {
    std::vector<Rule> rules;
    double jac = 1.0;
    Mat map = Mat::Identity(N, N);
    if (g.kind == GaugeKind::raw) {
      // Box in v graded towards the coordinate hyperplanes where N is not smooth.
      for (int k = 0; k < N; ++k) {
        const double R = 8.0 * std::sqrt(2.0 * C1(k, k));
        std::vector<double> half{0.0};
        for (int m = level - 1; m >= 0; --m) half.push_back(R * std::ldexp(1.0, -m));
        std::vector<double> br;
        for (auto it = half.rbegin(); it != half.rend(); ++it) br.push_back(-*it);
        br.insert(br.end(), half.begin() + 1, half.end());
        rules.push_back(composite_gauss_legendre(br, mesh.nodes));
      }
    } else {
      const Mat L = Eigen::LLT<Mat>(C1).matrixL();
      map = std::sqrt(2.0) * L;
      jac = map.determinant();
      const Rule r = composite_gauss_legendre(uniform_breaks(-8.0, 8.0, 2 * level), mesh.nodes);
      rules.assign(static_cast<std::size_t>(N), r);
    }
    double sum = 0.0;
    std::size_t count = 0;
    for_each_tensor(rules, [&](const Vec& y, double w) {
      sum += w * integrand(map * y);
      ++count;
    });
    return std::make_pair(jac * sum, count);
  };
  const auto coarse = evaluate(mesh.panels);
  const auto fine = evaluate(2 * mesh.panels);
  CijReport r;
  r.kind = g.kind;
  r.coarse = coarse.first;
  r.value = fine.first;
  r.nodes = fine.second;
  r.relChange = std::abs(fine.first - coarse.first) / std::max(std::abs(fine.first), 1e-300);
  if (r.relChange > 0.05 && std::abs(fine.first - coarse.first) > 1e-12)
    throw MeshTooCoarse("c_ij changed by more than 5% under refinement");
  return r;
}

}  // namespace

double cutoff_profile(double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  const double u3 = u * u * u;
  return 1.0 - u3 * (10.0 - 15.0 * u + 6.0 * u * u);
}

double cutoff_eval(const CutoffSpec& spec, const Point& z, const BlockStructure& s) {
  const double half = 0.5 * spec.rho0;
  return cutoff_profile((gauge(z, spec.gauge, s) - half) / half);
}

KernelSplit kernel_split(const Point& z0, const Point& z, int i, int j,
                         const CoefficientField& field, const DriftMatrix& D,
                         const CutoffSpec& spec) {
  const KernelValue k = gamma_eval(z0, z, field, D, KernelVariant::full);
  const double h = k.hess(i, j);
  const double eta = cutoff_eval(spec, z, D.structure());
  return {eta * h, (1.0 - eta) * h};
}

CijReport cij_constant(const Point& z0, int i, int j, const CoefficientField& field,
                       const DriftMatrix& D, const CijMesh& mesh, const GaugeSpec* gauge) {
  const FrozenKernel principal(z0, field, D, KernelVariant::principal);
  const GaugeSpec g = gauge ? *gauge
                            : (mesh.kind == GaugeKind::raw ? GaugeSpec::raw_for(D.structure())
                                                           : GaugeSpec::smooth_for(D.structure()));
  return cij_from_kernel(principal, i, j, mesh, g);
}

Source source_of(const TestFunction& u) {
  return {[&u](const Point& z) { return u.value(z); }, u.support()};
}

Source operator_image(const TestFunction& u, const Mat& A0, const DriftMatrix& D) {
  return {[&u, A0, B = D.B()](const Point& z) {
            return apply_operator(u.jet(z), A0, B, z.x, OperatorMode::evolutionL);
          },
          u.support()};
}

SingularKernel::SingularKernel(const Point& z0, int i, int j, const CoefficientField& field,
                               const DriftMatrix& D, CutoffSpec spec, ConvGrid grid,
                               ShellGrid shells)
    : z0_(z0),
      i_(i),
      j_(j),
      gamma_(z0, field, D, KernelVariant::full),
      spec_(spec),
      grid_(grid),
      shells_(shells) {
  if (i < 0 || j < 0 || i >= D.p0() || j >= D.p0()) throw ValidationError("kernel indices must be < p0");
  if (!(spec.rho0 > 0.0)) throw ValidationError("rho0 must be positive");
}

void SingularKernel::build_nodes() const {
  const DriftMatrix& D = drift();
  const int N = D.N(), p0 = D.p0();
  const double r2 = spec_.rho0 * spec_.rho0;
  std::vector<double> br = graded_breaks(r2, grid_.tauFirst * r2, grid_.tauRatio);
  const double step = std::min(0.25 * r2, 0.1);
  for (double t = r2 + step; t < grid_.horizon + 1e-12; t += step) br.push_back(std::min(t, grid_.horizon));
  if (br.back() < grid_.horizon) br.push_back(grid_.horizon);
  const Rule tau = composite_gauss_legendre(br, grid_.tauNodes);
  const Rule cube = panel_rule(-grid_.yRadius, grid_.yRadius, grid_.yPanelWidth, grid_.yNodes);
  const std::vector<Rule> cubeRules(static_cast<std::size_t>(N), cube);
  nodes_.resize(tau.size());
  parallel_for(tau.size(), [&](std::size_t k) {
    Node& n = nodes_[k];
    n.tau = tau.x[k];
    n.w = tau.w[k];
    n.slice = gamma_.slice(n.tau);
    n.sqrt2L = std::sqrt(2.0) * n.slice.L;
    n.yMap = n.sqrt2L.triangularView<Eigen::Lower>().solve(Mat::Identity(N, N));
    n.gradMap = std::sqrt(2.0) * n.slice.L.transpose().triangularView<Eigen::Upper>()
                                     .solve(Mat::Identity(N, N))
                                     .topRows(p0);
    n.Eneg = D.E(-n.tau);
    n.Epos = D.E(n.tau);
    n.jac = std::pow(2.0, 0.5 * N) * n.slice.L.diagonal().prod();
    if (n.tau <= r2) {
      double sum = 0.0;
      Vec omega(N);
      for_each_tensor(cubeRules, [&](const Vec& y, double w) {
        omega.noalias() = n.sqrt2L * y;
        double eta;
        const double h = kernel_at(n, y, omega, eta);
        sum += w * eta * h;
      });
      n.I0 = n.jac * sum;
    }
  });
  for (const Node& n : nodes_) {
    I0nodes_ += n.w * n.I0;
    J0_ += n.w * std::expm1(n.tau * D.traceB()) * n.I0;
  }
}

double SingularKernel::I0tot_nodes() const {
  std::call_once(nodesOnce_, [this] { build_nodes(); });
  return I0nodes_;
}

double SingularKernel::J0() const {
  std::call_once(nodesOnce_, [this] { build_nodes(); });
  return J0_;
}

double SingularKernel::I0tot() const {
  std::call_once(massOnce_, [this] { I0tot_ = shell_mass(); });
  return I0tot_;
}

double SingularKernel::shell_mass() const {
  // -∫dv ∫_{ρ₀/2}^{ρ₀N(v,1)} ds (1-η(s)) ∂²γ(D(√τ)v, τ) τ^{Q/2} 2s/N(v,1)², τ = s²/N(v,1)².
  const DriftMatrix& D = drift();
  const BlockStructure& s = D.structure();
  const int N = D.N();
  const FrozenKernel principal(D, gamma_.A0(), KernelVariant::principal);
  const Mat map = std::sqrt(2.0) * Mat(Eigen::LLT<Mat>(slice_shape(principal, false)).matrixL());
  const double jac = map.determinant();
  const Rule yr = panel_rule(-shells_.yRadius, shells_.yRadius, shells_.massPanelWidth, shells_.massNodes);
  std::vector<Point> vs;
  std::vector<double> ws;
  for_each_tensor(std::vector<Rule>(static_cast<std::size_t>(N), yr), [&](const Vec& y, double w) {
    vs.emplace_back(map * y, 1.0);
    ws.push_back(w);
  });
  const double rho = spec_.rho0, Q = s.Q();
  std::vector<double> part(vs.size());
  parallel_for(vs.size(), [&](std::size_t k) {
    const Vec& v = vs[k].x;
    const double n1 = fast_gauge(v, 1.0, spec_.gauge, s.q());
    std::vector<double> br{0.5 * rho, rho};
    if (rho * n1 > rho * (1.0 + 1e-12)) br.push_back(rho * n1);
    const Rule sr = composite_gauss_legendre(br, shells_.sNodes);
    double sum = 0.0;
    for (std::size_t m = 0; m < sr.size(); ++m) {
      const double sv = sr.x[m];
      const double tau = sv * sv / (n1 * n1);
      const Point w(dilation_matrix(std::sqrt(tau), DilationMode::space, s) * v, tau);
      const double eta = cutoff_profile((sv - 0.5 * rho) / (0.5 * rho));
      sum += sr.w[m] * (1.0 - eta) * hessian(w) * std::pow(tau, 0.5 * Q) * 2.0 * sv / (n1 * n1);
    }
    part[k] = ws[k] * sum;
  });
  double total = 0.0;
  for (double p : part) total += p;
  return -jac * total;
}

double SingularKernel::kernel_at(const Node& n, const Vec& y, const Vec& omega,
                                 double& eta) const {
  const double r2 = spec_.rho0 * spec_.rho0;
  if (n.tau >= r2) {
    eta = 0.0;
  } else {
    const double g = fast_gauge(omega, n.tau, spec_.gauge, drift().structure().q());
    eta = cutoff_profile((g - 0.5 * spec_.rho0) / (0.5 * spec_.rho0));
  }
  const double v = std::exp(n.slice.logNorm - 0.5 * y.squaredNorm());
  const double gi = n.gradMap.row(i_).dot(y);
  const double gj = n.gradMap.row(j_).dot(y);
  return v * (0.25 * gi * gj - 0.5 * n.slice.CinvTop(i_, j_));
}

double SingularKernel::hessian(const Point& w) const {
  if (!(w.t > 0.0)) return 0.0;
  return gamma_.eval(w).hess(i_, j_);
}

double SingularKernel::k0(const Point& w) const {
  if (!(w.t > 0.0)) return 0.0;
  const double eta = cutoff_eval(spec_, w, drift().structure());
  return eta == 0.0 ? 0.0 : eta * hessian(w);
}

double SingularKernel::kinf(const Point& w) const {
  if (!(w.t > 0.0)) return 0.0;
  return (1.0 - cutoff_eval(spec_, w, drift().structure())) * hessian(w);
}

double SingularKernel::k0_reflected(const Point& w) const {
  return k0(group_inverse(w, drift()));
}

double SingularKernel::min_eps() const {
  return 2.0 * std::sqrt(grid_.tauFirst) * spec_.rho0;
}

double SingularKernel::shell_integral(double r1, double r2, bool reflected) const {
  r2 = std::min(r2, spec_.rho0);
  if (!(r1 < r2)) return 0.0;
  const DriftMatrix& D = drift();
  const BlockStructure& s = D.structure();
  const int N = D.N();
  const FrozenKernel principal(D, gamma_.A0(), KernelVariant::principal);
  const Mat L0 = Eigen::LLT<Mat>(slice_shape(principal, reflected)).matrixL();
  const Mat map = std::sqrt(2.0) * L0;
  const double jac = map.determinant();
  const double sgn = reflected ? -1.0 : 1.0;
  // s breakpoints: ρ₀/2 (the cutoff starts) and panels no wider than ρ₀/8.
  std::vector<double> br{r1};
  for (double b = spec_.rho0 / 8.0; b < r2 - 1e-15; b += spec_.rho0 / 8.0)
    if (b > r1 + 1e-15) br.push_back(b);
  br.push_back(r2);
  const Rule sr = composite_gauss_legendre(br, shells_.sNodes);
  const Rule yr = panel_rule(-shells_.yRadius, shells_.yRadius, shells_.yPanelWidth, shells_.yNodes);
  const std::vector<Rule> yRules(static_cast<std::size_t>(N), yr);
  const double Q = s.Q();
  std::vector<double> partial(sr.size(), 0.0);
  parallel_for(sr.size(), [&](std::size_t k) {
    const double sv = sr.x[k];
    double sum = 0.0;
    for_each_tensor(yRules, [&](const Vec& y, double w) {
      const Vec v = map * y;
      const double n1 = fast_gauge(v, sgn, spec_.gauge, s.q());
      const double tau = sv * sv / (n1 * n1);
      const Point pt(dilation_matrix(std::sqrt(tau), DilationMode::space, s) * v, sgn * tau);
      const double kv = reflected ? k0_reflected(pt) : k0(pt);
      sum += w * kv * std::pow(tau, 0.5 * Q) * 2.0 * sv / (n1 * n1);
    });
    partial[k] = sr.w[k] * jac * sum;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double SingularKernel::cancellation(double r1, double r2, bool reflected) const {
  if (r1 >= r2) return 0.0;
  return shell_integral(r1, r2, reflected);
}

std::vector<double> SingularKernel::cancellation_from(const std::vector<double>& radii,
                                                      bool reflected) const {
  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::map<double, double> value;
  double acc = 0.0, upper = spec_.rho0;
  for (double r : sorted) {
    std::unique_lock<std::mutex> lock(cacheMutex_);
    auto hit = cancelCache_.find({r, reflected});
    lock.unlock();
    if (hit != cancelCache_.end()) {
      acc = hit->second;
    } else {
      acc += shell_integral(std::min(r, spec_.rho0), upper, reflected);
      lock.lock();
      cancelCache_[{r, reflected}] = acc;
    }
    upper = std::min(r, spec_.rho0);
    value[r] = acc;
  }
  std::vector<double> out;
  for (double r : radii) out.push_back(value[r]);
  return out;
}

SlicePass SingularKernel::pass(const Source& f, const Point& z, bool reflected) const {
  const DriftMatrix& D = drift();
  const int N = D.N();
  const double r2 = spec_.rho0 * spec_.rho0;
  std::call_once(nodesOnce_, [this] { build_nodes(); });
  SlicePass out;
  out.fz = f.f(z);
  const Box& sup = f.support;
  if (!reflected && z.t - sup.tlo > grid_.horizon + 1e-12)
    throw ValidationError("convolution horizon shorter than the time support of f");
  const Vec pc = 0.5 * (sup.lo + sup.hi);
  const Vec hw = 0.5 * (sup.hi - sup.lo);
  const double R = grid_.yRadius;
  Vec omega(N), diff(N), lo(N), hi(N);
  Point pt(Vec(N), 0.0);
  for (const Node& n : nodes_) {
    if (reflected && n.tau > r2) break;
    const double modular = reflected ? 1.0 : std::exp(n.tau * D.traceB());
    const double scale = modular * n.jac;
    const double subtract = n.tau <= r2 ? out.fz * modular * n.I0 : 0.0;
    const double tp = reflected ? z.t + n.tau : z.t - n.tau;
    bool empty = tp < sup.tlo || tp > sup.thi;
    Vec yc, half;
    if (!empty) {
      if (reflected) {
        yc = n.yMap * (pc - n.Epos * z.x);
        half = n.yMap.cwiseAbs() * hw;
      } else {
        yc = n.yMap * (z.x - n.Epos * pc);
        half = (n.yMap * n.Epos).cwiseAbs() * hw;
      }
      lo = (yc - half).cwiseMax(-R);
      hi = (yc + half).cwiseMin(R);
      empty = ((hi - lo).array() <= 0.0).any();
    }
    if (empty) {
      out.k0Diff -= n.w * subtract;
      continue;
    }
    const bool full = ((lo.array() <= -R).all() && (hi.array() >= R).all());
    std::vector<Rule> rules;
    for (int k = 0; k < N; ++k)
      rules.push_back(panel_rule(lo[k], hi[k], grid_.yPanelWidth, grid_.yNodes));
    double s0 = 0.0, sinf = 0.0, sd = 0.0;
    pt.t = tp;
    for_each_tensor(rules, [&](const Vec& y, double w) {
      omega.noalias() = n.sqrt2L * y;
      if (reflected) {
        pt.x.noalias() = n.Epos * z.x;
        pt.x += omega;
      } else {
        diff = z.x - omega;
        pt.x.noalias() = n.Eneg * diff;
      }
      const double fv = f.f(pt);
      double eta;
      const double h = kernel_at(n, y, omega, eta);
      s0 += w * fv * eta * h;
      sinf += w * fv * (1.0 - eta) * h;
      if (full) sd += w * (fv - out.fz) * eta * h;
      ++out.evaluations;
    });
    s0 *= scale;
    sinf *= scale;
    sd = full ? sd * scale : s0 - subtract;
    out.k0 += n.w * s0;
    out.kinf += n.w * sinf;
    out.k0Diff += n.w * sd;
  }
  // Replace the grid total of I0 by the accurate one; the grid only resolves
  // the cutoff transition to a few digits.
  out.k0Diff += out.fz * (I0tot_nodes() - I0tot());
  if (reflected) out.kinf = 0.0;
  return out;
}

double group_convolve(const Source& f, const SingularKernel& k, KernelPart part, const Point& z,
                      bool pv, double eps) {
  const bool reflected = part == KernelPart::k0Reflected;
  const bool singular = part == KernelPart::k0 || reflected;
  if (singular && pv && eps < k.min_eps())
    throw EpsTooSmallForGrid("eps is below the resolution of the tau grid");
  const SlicePass p = k.pass(f, z, reflected);
  switch (part) {
    case KernelPart::kinf:
      return p.kinf;
    case KernelPart::full:
      return p.k0 + p.kinf;
    case KernelPart::k0:
      if (!pv) return p.k0;
      return p.k0Diff + p.fz * k.J0() + p.fz * k.cancellation_from({eps})[0];
    case KernelPart::k0Reflected:
      if (!pv) return p.k0;
      return p.k0Diff - p.fz * k.J0() + p.fz * k.cancellation_from({eps}, true)[0];
  }
  return 0.0;
}

double cancellation_integral(const Point& z0, int i, int j, double r1, double r2,
                             const DriftMatrix& D, const CoefficientField& field,
                             const CutoffSpec& spec, ShellGrid shells) {
  ConvGrid none;
  none.horizon = 0.0;
  none.tauFirst = 1.0;  // one τ panel: the slice grid is not used here
  const SingularKernel k(z0, i, j, field, D, spec, none, shells);
  return k.cancellation(r1, r2);
}

namespace {

// Richardson limit of K(r) ≈ K0 - c·r along a decreasing sequence.
double extrapolate(const std::vector<double>& r, const std::vector<double>& K) {
  double scale = 0.0;
  for (double k : K) scale = std::max(scale, std::abs(k));
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < K.size(); ++k) {
    const double d = std::abs(K[k] - K[k - 1]);
    if (d > prev + 1e-9 * (1.0 + scale)) throw NoConvergence("truncated integrals are not Cauchy");
    prev = d;
  }
  const std::size_t n = K.size() - 1;
  return (r[n - 1] * K[n] - r[n] * K[n - 1]) / (r[n - 1] - r[n]);
}

void check_rseq(const std::vector<double>& rseq) {
  if (rseq.size() < 2) throw ValidationError("rseq needs at least two radii");
  for (std::size_t k = 0; k < rseq.size(); ++k) {
    if (!(rseq[k] > 0.0)) throw ValidationError("rseq radii must be positive");
    if (k && !(rseq[k] < rseq[k - 1])) throw ValidationError("rseq must be decreasing");
  }
}

}  // namespace

HReport h_functions(const SingularKernel& k, const Point& z, const TestFunction& a,
                    const TestFunction& b, const std::vector<double>& rseq) {
  check_rseq(rseq);
  const Source sa = source_of(a), sb = source_of(b);
  const double az = a.value(z), bz = b.value(z);
  HReport r;
  const SlicePass fwd = k.pass(sb, z, false);
  const SlicePass bwd = k.pass(sa, z, true);
  const std::vector<double> K = k.cancellation_from(rseq, false);
  const std::vector<double> Kr = k.cancellation_from(rseq, true);
  r.h1 = az * fwd.k0Diff;
  r.h2 = az * bz * k.J0();
  r.h1star = bz * bwd.k0Diff;
  r.h2star = -az * bz * k.J0();
  for (std::size_t n = 0; n < rseq.size(); ++n) {
    r.truncated.push_back(r.h1 + r.h2 + az * bz * K[n]);
    r.truncatedStar.push_back(r.h1star + r.h2star + az * bz * Kr[n]);
  }
  r.h3 = az * bz * extrapolate(rseq, K);
  r.h3star = az * bz * extrapolate(rseq, Kr);
  r.h = r.h1 + r.h2 + r.h3;
  r.hstar = r.h1star + r.h2star + r.h3star;
  return r;
}

HolderReport h_difference_quotient(const SingularKernel& k, const TestFunction& a,
                                   const TestFunction& b, const std::vector<double>& rseq,
                                   int pairs, std::uint64_t seed) {
  const DriftMatrix& D = k.drift();
  const int N = D.N();
  const Box box = a.support();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<std::pair<Point, Point>> samples;
  for (int n = 0; n < pairs; ++n) {
    Vec x(N);
    for (int c = 0; c < N; ++c)
      x[c] = 0.5 * (box.lo[c] + box.hi[c]) + 0.3 * (box.hi[c] - box.lo[c]) * unit(rng);
    const double t = 0.5 * (box.tlo + box.thi) + 0.3 * (box.thi - box.tlo) * unit(rng);
    Vec dx(N);
    for (int c = 0; c < N; ++c) dx[c] = unit(rng);
    const double rho = 0.02 + 0.03 * (0.5 + 0.5 * unit(rng));
    const Point step = dilate(rho, Point(dx, unit(rng)), D.structure());
    const Point z(x, t);
    samples.emplace_back(z, group_compose(z, step, D));
  }
  std::vector<double> q(samples.size());
  parallel_for(samples.size(), [&](std::size_t n) {
    const auto& [z, zb] = samples[n];
    const HReport h1 = h_functions(k, z, a, b, rseq);
    const HReport h2 = h_functions(k, zb, a, b, rseq);
    const double dist = hom_norm(group_compose(group_inverse(z, D), zb, D), D.structure());
    q[n] = std::abs((h1.h - h1.hstar) - (h2.h - h2.hstar)) / dist;
  });
  HolderReport r;
  r.pairs = q.size();
  for (double v : q) {
    r.maxQuotient = std::max(r.maxQuotient, v);
    r.meanQuotient += v / static_cast<double>(q.size());
  }
  return r;
}

ReprReport representation_check(const TestFunction& u, const SingularKernel& k, double eps,
                                const ReprGrid& grid) {
  if (eps < k.min_eps()) throw EpsTooSmallForGrid("eps is below the resolution of the tau grid");
  const DriftMatrix& D = k.drift();
  const int N = D.N();
  const Source f = operator_image(u, k.gamma().A0(), D);
  const FrozenKernel principal(D, k.gamma().A0(), KernelVariant::principal);
  CijMesh mesh = CijMesh::smooth();
  mesh.kind = k.cutoff().gauge.kind;
  ReprReport r;
  r.cij = cij_from_kernel(principal, k.i(), k.j(), mesh, k.cutoff().gauge).value;
  r.K = k.cancellation_from({eps})[0];
  r.I0tot = k.I0tot();
  r.eps = eps;
  const Box box = u.support();
  Vec c(N + 1), h(N + 1);
  c << 0.5 * (box.lo + box.hi), 0.5 * (box.tlo + box.thi);
  h << 0.5 * (box.hi - box.lo), 0.5 * (box.thi - box.tlo);
  h *= grid.boxFraction;
  std::vector<Rule> rules;
  for (int d = 0; d <= N; ++d)
    rules.push_back(composite_gauss_legendre(uniform_breaks(c[d] - h[d], c[d] + h[d], grid.panels),
                                             grid.nodes));
  std::vector<Vec> pts;
  std::vector<double> wts;
  for_each_tensor(rules, [&](const Vec& p, double w) {
    pts.push_back(p);
    wts.push_back(w);
  });
  std::vector<double> err(pts.size()), exact(pts.size());
  std::vector<std::size_t> evals(pts.size());
  parallel_for(pts.size(), [&](std::size_t n) {
    const Point z(pts[n].head(N), pts[n][N]);
    const SlicePass p = k.pass(f, z, false);
    const double pv = p.k0Diff + p.fz * k.J0() + p.fz * r.K;
    const double rhs = -pv - p.kinf + r.cij * p.fz;
    exact[n] = u.jet(z).hess(k.i(), k.j());
    err[n] = rhs - exact[n];
    evals[n] = p.evaluations;
  });
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < pts.size(); ++n) {
    num += wts[n] * err[n] * err[n];
    den += wts[n] * exact[n] * exact[n];
    r.maxAbsError = std::max(r.maxAbsError, std::abs(err[n]));
    r.evaluations += evals[n];
  }
  r.points = pts.size();
  r.relL2Error = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  return r;
}

}  // namespace hypoou
