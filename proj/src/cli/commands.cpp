#include "hypoou/cli/commands.hpp"

#include "hypoou/bounds.hpp"
#include "hypoou/covering.hpp"
#include "hypoou/errors.hpp"
#include "hypoou/harness.hpp"
#include "hypoou/singular.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#ifndef HYPOOU_GIT_DESCRIBE
#define HYPOOU_GIT_DESCRIBE "unknown"
#endif

namespace hypoou::cli {

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string short_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["blocks"] = c.blocks;
  j["B"] = c.B;
  j["field"] = {{"kind", c.field.kind},
                {"Lambda", c.field.Lambda},
                {"frequency", c.field.frequency},
                {"timeDependent", c.field.timeDependent},
                {"file", c.field.file}};
  j["T"] = c.T;
  j["boxRadius"] = c.boxRadius;
  j["z0Count"] = c.z0Count;
  j["samples"] = c.samples;
  j["shells"] = c.shells;
  j["directions"] = c.directions;
  j["order"] = c.order;
  j["rho0"] = c.rho();
  return j;
}

std::vector<Point> z0_samples(const RunConfig& c, std::size_t count) {
  return sample_strip(c.drift().N(), c.boxRadius, c.T, count, c.seed);
}

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double span_ratio(const std::vector<double>& v) {
  double lo = INFINITY, hi = 0.0;
  for (double x : v) lo = std::min(lo, std::abs(x)), hi = std::max(hi, std::abs(x));
  return hi / lo;
}

// ---- structure ------------------------------------------------------------

void structure_validate(const RunConfig& c, Report& r) {
  const DriftMatrix D = c.drift();
  const HypoellipticityReport h = hypoellipticity_check(D.B(), c.blocks);
  r.measure("N", D.N(), -1, 1, "block sizes");
  r.measure("Q", D.structure().Q(), -1, 1, "sum of dilation exponents");
  r.measure("traceB", D.traceB(), -1, 1, "drift matrix");
  r.columns({"t", "minEigCtilde"});
  for (const auto& [t, e] : h.minEigCtilde) r.row({t, e});
  r.check("structural rank condition", h.structural, h.reason);
  r.check("covariance positive", h.numerical, "smallest eigenvalue of normalized C~(t) > 0");
  r.check("structural and numerical tests agree", h.agree, "");
}

// ---- kernel ---------------------------------------------------------------

void kernel_eval(const RunConfig& c, Report& r) {
  const DriftMatrix D = c.drift();
  const auto field = c.make_field();
  const Point z0 = z0_samples(c, 1).front();
  std::mt19937_64 rng(c.seed + 1);
  std::uniform_real_distribution<double> ux(-c.boxRadius, c.boxRadius), ut(0.05, 2.0 * c.T);
  std::vector<std::string> head;
  for (int k = 0; k < D.N(); ++k) head.push_back("x" + std::to_string(k + 1));
  head.insert(head.end(), {"t", "gamma", "gamma0"});
  r.columns(head);
  bool finite = true;
  for (int n = 0; n < c.points; ++n) {
    Vec x(D.N());
    for (int k = 0; k < D.N(); ++k) x(k) = ux(rng);
    const Point z(x, ut(rng));
    const double g = gamma_eval(z0, z, *field, D, KernelVariant::full).value;
    const double g0 = gamma_eval(z0, z, *field, D, KernelVariant::principal).value;
    finite = finite && std::isfinite(g) && std::isfinite(g0) && g >= 0.0;
    std::vector<double> row(x.data(), x.data() + x.size());
    row.insert(row.end(), {z.t, g, g0});
    r.row(row);
  }
  r.check("kernel values finite and nonnegative", finite, "");
}

void kernel_residual(const RunConfig& c, Report& r) {
  const DriftMatrix D = c.drift();
  const auto field = c.make_field();
  const Point z0 = z0_samples(c, 1).front();
  const double h1 = c.steps[0], h2 = c.steps[1];
  const double expected = (h1 / h2) * (h1 / h2);
  // Points are drawn inside the bulk of the slice Gaussian, x = √2 L(t) y with
  // |y_k| ≤ 1.5: far out in the tails the residual sinks to rounding level
  // and the ratio measures nothing.
  const FrozenKernel k(z0, *field, D, KernelVariant::full);
  std::mt19937_64 rng(c.seed + 2);
  std::uniform_real_distribution<double> ux(-1.5, 1.5), ut(0.2, 1.0);
  std::vector<std::string> head;
  for (int k = 0; k < D.N(); ++k) head.push_back("x" + std::to_string(k + 1));
  head.insert(head.end(), {"t", "residual_h1", "residual_h2", "ratio"});
  r.columns(head);
  double worst = 0.0;
  for (int n = 0; n < c.points; ++n) {
    Vec y(D.N());
    for (int m = 0; m < D.N(); ++m) y(m) = ux(rng);
    const double t = ut(rng);
    const Vec x = std::sqrt(2.0) * k.slice(t).L * y;
    const Point z(x, t);
    const double a = pde_residual(z0, z, *field, D, h1);
    const double b = pde_residual(z0, z, *field, D, h2);
    const double ratio = a / b;
    worst = std::max(worst, std::abs(ratio - expected));
    std::vector<double> row(x.data(), x.data() + x.size());
    row.insert(row.end(), {z.t, a, b, ratio});
    r.row(row);
  }
  r.measure("maxRatioDeviation", worst, 0.5, c.points, "second-order central differences");
  r.check("Richardson ratio", worst <= 0.5, "|ratio - (h1/h2)^2| <= 0.5 at every point");
}

void kernel_normalize(const RunConfig& c, Report& r) {
  const DriftMatrix D = c.drift();
  const auto field = c.make_field();
  const Point z0 = z0_samples(c, 1).front();
  const FrozenKernel k(z0, *field, D, KernelVariant::full);
  r.columns({"t", "mass", "expected", "relError"});
  double worst = 0.0;
  for (double t : c.times) {
    const double mass = kernel_mass(k, t);
    const double expected = std::exp(-t * D.traceB());
    const double rel = std::abs(mass - expected) / expected;
    worst = std::max(worst, rel);
    r.row({t, mass, expected, rel});
  }
  r.measure("maxRelError", worst, 1e-6, c.times.size(), "tensor Gauss-Legendre, 60 nodes per axis");
  r.check("mass equals exp(-t trB)", worst <= 1e-6, "");
}

// ---- mc -------------------------------------------------------------------

void mc_density(const RunConfig& c, Report& r) {
  const DriftMatrix D = c.drift();
  const auto field = c.make_field();
  const Point z0 = z0_samples(c, 1).front();
  const McReport m = mc_transition_density(z0, Vec::Zero(D.N()), c.mcTime, *field, D, c.paths,
                                           c.seed, c.bins);
  r.measure("supDiscrepancy", m.supDiscrepancy, 0.03, static_cast<std::size_t>(c.paths),
            "sup over bins of |empirical - analytic| / peak");
  r.check("density discrepancy", m.supDiscrepancy <= 0.03, "");
  const int comp = D.N() - 1;
  const double q = D.structure().q()[comp];
  const double slope = mc_variance_slope(z0, c.mcTimes, comp, *field, D, c.paths, c.seed + 1);
  r.measure("varianceSlope", slope, 0.1, static_cast<std::size_t>(c.paths) * c.mcTimes.size(),
            "least squares on log var against log t; expected the dilation exponent");
  r.check("variance slope", std::abs(slope - q) <= 0.1, "expected " + std::to_string(q));
  r.columns({"bin", "empirical", "analytic"});
  for (std::size_t b = 0; b < m.empirical.size(); ++b)
    r.row({static_cast<double>(b), m.empirical[b], m.analytic[b]});
}

// ---- bounds ---------------------------------------------------------------

void bounds_sweep(const RunConfig& c, int order, Report& r) {
  const DriftMatrix D = c.drift();
  const auto field = c.make_field();
  SweepSpec s;
  s.z0Samples = z0_samples(c, static_cast<std::size_t>(c.z0Count));
  s.shells = c.shells;
  s.directions = c.directions;
  s.T = c.T;
  s.order = order;
  s.seed = c.seed;
  const BoundReport b = kernel_bound_sweep(s, *field, D);
  const std::size_t n = b.samples;
  r.measure("supConstant", b.supConstant, 0.1, n, "refinement threshold");
  r.measure("refinedSup", b.refinedSup, 0.1, 4 * n, "doubled shells and directions");
  r.measure("relChange", b.relChange, 0.1, n, "refinement threshold");
  double lo = INFINITY, hi = 0.0;
  for (double v : b.perZ0) lo = std::min(lo, v), hi = std::max(hi, v);
  r.measure("z0Variation", (hi - lo) / hi, 0.2, b.perZ0.size(), "uniformity threshold");
  r.measure("principalSup", b.principalSup, -1, n / b.perZ0.size(), "principal kernel, |t| <= 1");
  r.measure("principalShellSpread", b.principalShellSpread - 1.0, 1e-8, static_cast<std::size_t>(c.shells),
            "homogeneity");
  r.measure("lambdaCtilde", b.lambdaCtilde, -1, 1, "eigenvalue");
  r.measure("LambdaCtilde", b.LambdaCtilde, -1, 1, "eigenvalue");
  r.columns({"rho", "shellMax"});
  for (const ShellMax& m : b.perShellMax) r.row({m.rho, m.value});
  r.check("sup finite", std::isfinite(b.supConstant) && b.supConstant > 0.0, "");
  r.check("stable under refinement", b.stableUnderRefinement, "relChange <= 0.1");
  r.check("uniform in z0", (hi - lo) / hi <= 0.2, "(max - min)/max <= 0.2");
  r.check("principal shells invariant", std::abs(b.principalShellSpread - 1.0) <= 1e-8, "");
}

void bounds_sandwich(const RunConfig& c, Report& r) {
  const DriftMatrix D = c.drift();
  const auto field = c.make_field();
  const auto z0s = z0_samples(c, static_cast<std::size_t>(c.z0Count));
  const SandwichReport s = sandwich_report(c.tGrid, z0s, *field, D, c.samples, c.seed);
  r.measure("covRatioMin", s.covRatio.lo, 1e-12, s.samples, "relative slack on [1/Lambda, Lambda]");
  r.measure("covRatioMax", s.covRatio.hi, 1e-12, s.samples, "relative slack on [1/Lambda, Lambda]");
  r.measure("detRatioMin", s.detRatio.lo, 1e-12, z0s.size(), "relative slack on Lambda^N");
  r.measure("detRatioMax", s.detRatio.hi, 1e-12, z0s.size(), "relative slack on Lambda^N");
  r.measure("scaledInverseMin", s.scaledInverse.lo, 1e-9, s.samples, "relative slack on the envelope");
  r.measure("scaledInverseMax", s.scaledInverse.hi, 1e-9, s.samples, "relative slack on the envelope");
  r.measure("inverseEnvelopeLo", s.inverseEnvelope.lo, -1, 1, "1/(Lambda Lambda_C~)");
  r.measure("inverseEnvelopeHi", s.inverseEnvelope.hi, -1, 1, "Lambda/lambda_C~");
  r.measure("Mcov", s.Mcov, -1, z0s.size() * c.tGrid.size(), "generalized eigenvalues");
  r.measure("Mdet", s.Mdet, -1, z0s.size() * c.tGrid.size(), "determinant ratio");
  r.measure("Minv", s.Minv, -1, z0s.size() * c.tGrid.size(), "generalized eigenvalues");
  r.measure("m", s.m, 0.1, z0s.size(), "z0 stability threshold");
  r.measure("mFirstHalf", s.mFirstHalf, 0.1, (z0s.size() + 1) / 2, "z0 stability threshold");
  r.measure("deviationSlope", std::isnan(s.deviationSlope) ? -1.0 : s.deviationSlope, -1,
            c.tGrid.size(), "log-log fit; -1 when C equals C0");
  // T is a configuration choice; m per time shows how far the constant holds.
  for (double t : c.tGrid) {
    const SandwichReport st = sandwich_report({t}, z0s, *field, D, c.samples / c.tGrid.size() + 1, c.seed);
    r.measure("m(t=" + short_number(t) + ")", st.m, -1, z0s.size(), "sandwich constant at one time");
  }
  r.columns({"z0", "m"});
  for (std::size_t i = 0; i < s.mPerZ0.size(); ++i) r.row({static_cast<double>(i), s.mPerZ0[i]});
  r.check("C0 vs C~ ratios inside [1/Lambda, Lambda]", s.covViolations == 0,
          std::to_string(s.covViolations) + " violations");
  r.check("determinant ratios inside [Lambda^-N, Lambda^N]", s.detViolations == 0,
          std::to_string(s.detViolations) + " violations");
  r.check("scaled inverse inside its envelope", s.inverseViolations == 0,
          std::to_string(s.inverseViolations) + " violations");
  r.check("m stable over z0", std::isfinite(s.m) && (s.m - s.mFirstHalf) / s.m <= 0.1,
          "max over all z0 within 10% of max over the first half");
}

void bounds_lipschitz(const RunConfig& c, int order, Report& r) {
  const DriftMatrix D = c.drift();
  const auto field = c.make_field();
  LipschitzSpec s;
  s.z0Samples = z0_samples(c, static_cast<std::size_t>(c.z0Count));
  s.order = order;
  s.M = c.M;
  s.T = c.T;
  s.H.lo = Vec::Constant(D.N(), -2.0 * c.boxRadius);
  s.H.hi = Vec::Constant(D.N(), 2.0 * c.boxRadius);
  s.seed = c.seed;
  s.pairs = static_cast<int>(std::min<std::size_t>(c.samples, 5000));
  for (bool reflected : {false, true}) {
    s.reflected = reflected;
    const BoundReport b = lipschitz_quotient_sweep(s, *field, D);
    const std::string tag = reflected ? "reflected" : "direct";
    r.measure(tag + "Sup", b.supConstant, 0.1, b.samples, "sample doubling threshold");
    r.measure(tag + "RefinedSup", b.refinedSup, 0.1, 2 * b.samples, "sample doubling threshold");
    r.check(tag + " quotient finite and stable", std::isfinite(b.supConstant) && b.stableUnderRefinement, "");
    if (!reflected) {
      r.columns({"controlRadius", "controlQuotient"});
      bool grows = true;
      for (std::size_t i = 0; i < b.controlRadii.size(); ++i) {
        r.row({b.controlRadii[i], b.controlQuotients[i]});
        if (i > 0) grows = grows && b.controlQuotients[i] > 10.0 * b.controlQuotients[i - 1];
      }
      r.check("negative control blows up", grows && b.controlQuotients.back() > 100.0 * b.supConstant,
              "quotient without the admissibility constraint");
    }
  }
}

// ---- singular -------------------------------------------------------------

CutoffSpec cutoff(const RunConfig& c, const DriftMatrix& D) {
  return CutoffSpec::make(c.rho(), D.structure());
}

void singular_split(const RunConfig& c, Report& r) {
  const DriftMatrix D = c.drift();
  const auto field = c.make_field();
  const CutoffSpec spec = cutoff(c, D);
  const Point z0 = Point::origin(D.N());
  std::mt19937_64 rng(c.seed + 3);
  std::uniform_real_distribution<double> u(-1.0, 1.0), ut(0.0, 1.0);
  r.columns({"gauge", "eta", "k0", "kinf", "hessian"});
  double worst = 0.0;
  for (int n = 0; n < std::max(c.points, 100); ++n) {
    Vec x(D.N());
    for (int k = 0; k < D.N(); ++k) x(k) = u(rng);
    const Point w = dilate(2.0 * c.rho() * ut(rng), Point(x, ut(rng)), D.structure());
    const KernelSplit s = kernel_split(z0, w, c.i, c.j, *field, D, spec);
    const double h = gamma_eval(z0, w, *field, D, KernelVariant::full).hess(c.i, c.j);
    worst = std::max(worst, std::abs(s.k0 + s.kinf - h) / std::max(std::abs(h), 1e-300));
    r.row({gauge(w, spec.gauge, D.structure()), cutoff_eval(spec, w, D.structure()), s.k0, s.kinf, h});
  }
  r.measure("reconstructionError", worst, 1e-14, std::max(c.points, 100), "rounding");
  r.check("k0 + kinf equals the kernel", worst <= 1e-14, "");
}

void singular_cij(const RunConfig& c, Report& r) {
  const DriftMatrix D = c.drift();
  const auto field = c.make_field();
  const CutoffSpec spec = cutoff(c, D);
  const Point z0 = Point::origin(D.N());
  const CijReport raw = cij_constant(z0, c.i, c.j, *field, D);
  const CijReport smooth = cij_constant(z0, c.i, c.j, *field, D, CijMesh::smooth(), &spec.gauge);
  r.measure("cRaw", raw.value, 0.05, raw.nodes, "mesh doubling threshold");
  r.measure("cRawRelChange", raw.relChange, 0.05, raw.nodes, "mesh doubling threshold");
  r.measure("cSmooth", smooth.value, 0.05, smooth.nodes, "mesh doubling threshold");
  r.measure("cSmoothRelChange", smooth.relChange, 0.05, smooth.nodes, "mesh doubling threshold");
  r.check("raw gauge constant converged", raw.relChange <= 0.05, "");
  r.check("smooth gauge constant converged", smooth.relChange <= 0.05, "");
}

void singular_cancel(const RunConfig& c, Report& r) {
  const DriftMatrix D = c.drift();
  const auto field = c.make_field();
  const CutoffSpec spec = cutoff(c, D);
  const auto z0s = z0_samples(c, static_cast<std::size_t>(std::min(c.z0Count, 10)));
  r.columns({"z0", "r1", "value"});
  double worstSpan = 1.0, largest = 0.0;
  for (std::size_t n = 0; n < z0s.size(); ++n) {
    const SingularKernel k(z0s[n], c.i, c.j, *field, D, spec);
    const std::vector<double> v = k.cancellation_from(c.radii);
    for (std::size_t m = 0; m < v.size(); ++m) {
      r.row({static_cast<double>(n), c.radii[m], v[m]});
      largest = std::max(largest, std::abs(v[m]));
    }
    worstSpan = std::max(worstSpan, span_ratio(v));
  }
  const bool vanishing = largest <= 1e-8;
  r.measure("maxAbsValue", largest, 1e-8, z0s.size() * c.radii.size(), "shell quadrature");
  r.measure("span", vanishing ? 1.0 : worstSpan, 2.0, z0s.size(), "max/min |value| over r1, per z0");
  r.check("cancellation bounded", vanishing || worstSpan < 2.0,
          vanishing ? "values vanish to quadrature accuracy" : "span < 2");
}

void singular_repr(const RunConfig& c, Report& r) {
  const DriftMatrix D = c.drift();
  const auto field = c.make_field();
  const CutoffSpec spec = cutoff(c, D);
  const Point z0 = Point::origin(D.N());
  if (static_cast<int>(c.bumpWidths.size()) != D.N() + 1)
    throw ValidationError("bump_widths needs N+1 entries");
  const ProductBump u = ProductBump::make(BumpKind::gaussianBump, z0, to_vec(c.bumpWidths), D.structure());
  ConvGrid coarse;
  coarse.yNodes = 4;
  coarse.tauNodes = 5;
  const SingularKernel kc(z0, c.i, c.j, *field, D, spec, coarse);
  const SingularKernel kf(z0, c.i, c.j, *field, D, spec);
  const ReprReport a = representation_check(u, kc, 10.0 * c.eps);
  const ReprReport b = representation_check(u, kf, c.eps);
  r.measure("coarseRelL2", a.relL2Error, 0.05, a.points, "error budget");
  r.measure("fineRelL2", b.relL2Error, 0.05, b.points, "error budget");
  r.measure("fineMaxAbs", b.maxAbsError, -1, b.points, "pointwise");
  r.measure("cij", b.cij, 0.05, 1, "mesh doubling threshold");
  r.measure("cancellation", b.K, -1, 1, "shell quadrature");
  r.measure("I0tot", b.I0tot, -1, 1, "shell quadrature");
  r.measure("evaluations", static_cast<double>(a.evaluations + b.evaluations), -1, 1, "count");
  r.check("relative L2 error <= 5%", b.relL2Error <= 0.05, "");
  r.check("error improves under refinement", b.relL2Error < a.relL2Error, "");
}

void singular_hfun(const RunConfig& c, Report& r) {
  const DriftMatrix D = c.drift();
  const auto field = c.make_field();
  const CutoffSpec spec = cutoff(c, D);
  const Point z0 = Point::origin(D.N());
  const Vec w = to_vec(c.bumpWidths);
  const ProductBump a = ProductBump::make(BumpKind::gaussianBump, z0, w, D.structure());
  Point cb = z0;
  cb.x(0) += 0.5 * w(0);
  const ProductBump b = ProductBump::make(BumpKind::gaussianBump, cb, 1.5 * w, D.structure());
  const SingularKernel k(z0, c.i, c.j, *field, D, spec);
  const std::vector<double> rseq{0.1, 0.05, 0.025};
  Point z = z0;
  z.x(0) += 0.1 * w(0);
  const HReport h = h_functions(k, z, a, b, rseq);
  r.measure("h", h.h, -1, rseq.size(), "extrapolated along radii");
  r.measure("hstar", h.hstar, -1, rseq.size(), "extrapolated along radii");
  r.measure("h1", h.h1, -1, 1, "split");
  r.measure("h2", h.h2, -1, 1, "split");
  r.measure("h3", h.h3, -1, 1, "split");
  const HolderReport q = h_difference_quotient(k, a, b, rseq, 100, c.seed);
  r.measure("maxLipschitzQuotient", q.maxQuotient, -1, q.pairs, "sampled pairs");
  r.measure("meanLipschitzQuotient", q.meanQuotient, -1, q.pairs, "sampled pairs");
  r.columns({"radius", "h", "hstar"});
  for (std::size_t i = 0; i < rseq.size(); ++i) r.row({rseq[i], h.truncated[i], h.truncatedStar[i]});
  r.check("limits finite", std::isfinite(h.h) && std::isfinite(h.hstar), "");
  r.check("Lipschitz quotient bounded", std::isfinite(q.maxQuotient), "");
}

// ---- cover ----------------------------------------------------------------

void cover(const RunConfig& c, bool verify, Report& r) {
  const DriftMatrix D = c.drift();
  StripSpec strip{c.T, c.boxRadius};
  const Covering cov = build_covering(strip, c.r0, c.K, D);
  const std::int64_t cert = cov.certified_overlap(D);
  r.measure("r", cov.r(), -1, 2000, "halving from r0/2 until covered");
  r.measure("layers", static_cast<double>(cov.layers().size()), -1, 1, "time lattice");
  r.measure("certifiedOverlap", static_cast<double>(cert), -1, 1, "lattice geometry bound");
  if (!verify) {
    r.check("covering built", true, "");
    return;
  }
  r.columns({"boxRadius", "coverage", "maxOverlap", "certified"});
  std::vector<CoverReport> reps;
  for (double R : {c.boxRadius, 2.0 * c.boxRadius}) {
    strip.boxRadius = R;
    reps.push_back(verify_covering(cov, strip, D, c.samples, c.seed));
    r.row({R, reps.back().coverageFraction, static_cast<double>(reps.back().maxOverlap),
           static_cast<double>(reps.back().certified)});
  }
  const double m1 = static_cast<double>(reps[0].maxOverlap), m2 = static_cast<double>(reps[1].maxOverlap);
  const double change = std::abs(m2 - m1) / std::max(m1, m2);
  r.measure("coverage", std::min(reps[0].coverageFraction, reps[1].coverageFraction), 0.0, c.samples,
            "exact");
  r.measure("maxOverlap", m1, 0.05, c.samples, "box doubling threshold");
  r.measure("maxOverlapDoubledBox", m2, 0.05, c.samples, "box doubling threshold");
  r.check("full coverage", reps[0].coverageFraction == 1.0 && reps[1].coverageFraction == 1.0, "");
  r.check("overlap unchanged when the box doubles", change <= 0.05,
          "relative change of the sampled maximum <= 5%");
  if (cert >= 0)
    r.check("overlap within the certified bound", reps[0].maxOverlap <= cert && reps[1].maxOverlap <= cert, "");
}

// ---- lp -------------------------------------------------------------------

void lp_strip(const RunConfig& c, Report& r) {
  const DriftMatrix D = c.drift();
  const auto field = c.make_field();
  if (static_cast<int>(c.lpWidths.size()) != D.N() + 1) throw ValidationError("lp_widths needs N+1 entries");
  const Vec base = to_vec(c.lpWidths);
  std::vector<double> max1(c.p.size(), 0.0), max2(c.p.size(), 0.0);
  r.columns({"member", "sigmaIndex", "p", "ratio"});
  const auto big = bump_family(base, c.T, 2 * c.family);
  for (std::size_t m = 0; m < big.size(); ++m) {
    const auto reps = strip_ratios(big[m], *field, D, c.p);
    const bool inSmall = m % 2 == 0;  // the doubled family interleaves midpoints
    for (std::size_t k = 0; k < c.p.size(); ++k) {
      max2[k] = std::max(max2[k], reps[k].ratio);
      if (inSmall) max1[k] = std::max(max1[k], reps[k].ratio);
      r.row({static_cast<double>(m), static_cast<double>(m) / 2.0, c.p[k], reps[k].ratio});
    }
  }
  bool ok = true;
  for (std::size_t k = 0; k < c.p.size(); ++k) {
    const double change = (max2[k] - max1[k]) / max2[k];
    const std::string tag = "p" + std::to_string(c.p[k]).substr(0, 4);
    r.measure(tag + "MaxRatio", max1[k], 0.1, static_cast<std::size_t>(c.family), "family extension threshold");
    r.measure(tag + "MaxRatioExtended", max2[k], 0.1, static_cast<std::size_t>(2 * c.family),
              "family extension threshold");
    ok = ok && std::isfinite(max1[k]) && change <= 0.1;
  }
  r.check("ratios bounded and stable under family extension", ok, "max ratio changes <= 10%");
  // Growth with the strip width, reported only.
  for (double T : {0.5 * c.T, c.T, 2.0 * c.T}) {
    double worst = 0.0;
    for (const ProductBump& u : bump_family(base, T, c.family))
      worst = std::max(worst, strip_ratio(u, *field, D, 2.0).ratio);
    r.measure("p2MaxRatio(T=" + short_number(T) + ")", worst, -1, static_cast<std::size_t>(c.family),
              "strip width sweep");
  }
}

void lp_stationary(const RunConfig& c, Report& r) {
  const DriftMatrix D = c.drift();
  const auto field = c.make_field();
  if (static_cast<int>(c.lpWidths.size()) != D.N() + 1) throw ValidationError("lp_widths needs N+1 entries");
  Vec w = to_vec(c.lpWidths);
  std::vector<Profile> prof(static_cast<std::size_t>(D.N()), Profile::polynomial);
  prof.push_back(Profile::flat);
  r.columns({"sigma", "p", "secondDerivRatio", "driftRatio", "liftRatio"});
  bool ok = true;
  for (double sigma : {0.5, 1.0, 2.0}) {
    Vec ws = w;
    ws.head(D.N()) *= sigma;
    const ProductBump spatial(Point::origin(D.N()), ws, prof);
    for (double p : c.p) {
      const StationaryReport s = stationary_ratio(spatial, c.T, *field, D, p);
      r.row({sigma, p, s.secondDerivRatio, s.driftRatio, s.liftRatio});
      ok = ok && std::isfinite(s.secondDerivRatio) && std::isfinite(s.driftRatio) && std::isfinite(s.liftRatio);
    }
  }
  r.check("stationary ratios finite", ok, "");
}

using Runner = std::function<void(const RunConfig&, const Options&, Report&)>;

const std::map<std::string, Runner>& table() {
  static const std::map<std::string, Runner> t = {
      {"structure validate", [](auto& c, auto&, auto& r) { structure_validate(c, r); }},
      {"kernel eval", [](auto& c, auto&, auto& r) { kernel_eval(c, r); }},
      {"kernel residual", [](auto& c, auto&, auto& r) { kernel_residual(c, r); }},
      {"kernel normalize", [](auto& c, auto&, auto& r) { kernel_normalize(c, r); }},
      {"mc density", [](auto& c, auto&, auto& r) { mc_density(c, r); }},
      {"bounds sweep", [](auto& c, auto& o, auto& r) { bounds_sweep(c, o.order.value_or(c.order), r); }},
      {"bounds sandwich", [](auto& c, auto&, auto& r) { bounds_sandwich(c, r); }},
      {"bounds lipschitz",
       [](auto& c, auto& o, auto& r) { bounds_lipschitz(c, o.order.value_or(c.order), r); }},
      {"singular split", [](auto& c, auto&, auto& r) { singular_split(c, r); }},
      {"singular cij", [](auto& c, auto&, auto& r) { singular_cij(c, r); }},
      {"singular cancel", [](auto& c, auto&, auto& r) { singular_cancel(c, r); }},
      {"singular repr-check", [](auto& c, auto&, auto& r) { singular_repr(c, r); }},
      {"singular hfun", [](auto& c, auto&, auto& r) { singular_hfun(c, r); }},
      {"cover build", [](auto& c, auto&, auto& r) { cover(c, false, r); }},
      {"cover verify", [](auto& c, auto&, auto& r) { cover(c, true, r); }},
      {"lp strip", [](auto& c, auto&, auto& r) { lp_strip(c, r); }},
      {"lp stationary", [](auto& c, auto&, auto& r) { lp_stationary(c, r); }},
  };
  return t;
}

}  // namespace

Report::Report(std::string command, const RunConfig& cfg)
    : command_(std::move(command)), config_(config_json(cfg)), seed_(cfg.seed), warnings_(cfg.warnings) {}

void Report::measure(const std::string& name, double value, double tolerance, std::size_t samples,
                     const std::string& provenance) {
  nlohmann::ordered_json j;
  j["value"] = value;
  j["tolerance"] = tolerance < 0.0 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(tolerance);
  j["samples"] = samples;
  j["provenance"] = provenance;
  results_[name] = j;
}

void Report::check(const std::string& name, bool passed, const std::string& detail) {
  checks_.push_back({{"name", name}, {"passed", passed}, {"detail", detail}});
}

void Report::columns(std::vector<std::string> header) { header_ = std::move(header); }

void Report::row(std::vector<double> values) { rows_.push_back(std::move(values)); }

bool Report::passed() const {
  for (const auto& c : checks_)
    if (!c["passed"].get<bool>()) return false;
  return true;
}

nlohmann::ordered_json Report::json(bool withTimestamp) const {
  nlohmann::ordered_json j;
  j["schemaVersion"] = 1;
  j["command"] = command_;
  j["gitDescribe"] = HYPOOU_GIT_DESCRIBE;
  j["seed"] = seed_;
  if (withTimestamp) {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["timestamp"] = buf;
  }
  j["config"] = config_;
  j["warnings"] = warnings_;
  j["results"] = results_;
  j["assertions"] = checks_;
  j["passed"] = passed();
  return j;
}

std::string Report::csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << header_[i];
  os << "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << "\n";
  }
  return os.str();
}

void Report::write(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  std::string stem = command_;
  std::replace(stem.begin(), stem.end(), ' ', '_');
  std::ofstream(dir + "/" + stem + ".json") << json().dump(2) << "\n";
  if (!header_.empty()) std::ofstream(dir + "/" + stem + ".csv") << csv();
}

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto& [name, run] : table()) out.push_back(name);
  return out;
}

Report run_command(const RunConfig& cfg, const std::string& group, const std::string& action,
                   const Options& opts) {
  const std::string name = group + " " + action;
  const auto it = table().find(name);
  if (it == table().end()) throw UnknownCommand("unknown command '" + name + "'");
  Report r(name, cfg);
  it->second(cfg, opts, r);
  return r;
}

int dispatch(const RunConfig& cfg, const std::string& group, const std::string& action,
             const Options& opts, std::ostream& log) {
  for (const auto& w : cfg.warnings) log << "warning: " << w << "\n";
  const auto t0 = std::chrono::steady_clock::now();
  const Report r = run_command(cfg, group, action, opts);
  r.write(opts.out);
  if (!opts.quiet) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto j = r.json(false);
    for (const auto& c : j["assertions"])
      log << (c["passed"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << "\n";
    log << r.command() << ": " << (r.passed() ? "passed" : "failed") << " in " << std::fixed
        << std::setprecision(2) << secs << " s; report in " << opts.out << "\n";
  }
  return r.passed() ? 0 : 2;
}

}  // namespace hypoou::cli
