// Runs every acceptance criterion once and prints one PASS/FAIL line each.
// Exit status 0 only when all pass.

#include "hypoou/cli/commands.hpp"
#include "hypoou/covariance.hpp"
#include "hypoou/errors.hpp"
#include "hypoou/kernel.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#ifndef HYPOOU_CONFIG_DIR
#define HYPOOU_CONFIG_DIR "configs"
#endif

using namespace hypoou;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

cli::RunConfig config(const std::string& name) {
  return cli::load_config(std::string(HYPOOU_CONFIG_DIR) + "/" + name);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double result(const cli::Report& r, const std::string& key) {
  return r.json(false)["results"][key]["value"].get<double>();
}

std::string failed_checks(const cli::Report& r) {
  std::string out;
  for (const auto& c : r.json(false)["assertions"])
    if (!c["passed"].get<bool>()) out += " [failed: " + c["name"].get<std::string>() + "]";
  return out;
}

DriftMatrix three_chain() {
  Mat B = Mat::Zero(3, 3);
  B(0, 1) = 1.0;
  B(1, 2) = 1.0;
  return validate_structure(B, {1, 1, 1});
}

DriftMatrix two_block3() {
  Mat B = Mat::Zero(3, 3);
  B(0, 2) = 1.0;
  B(1, 1) = 0.4;
  B(2, 2) = -0.2;
  return validate_structure(B, {2, 1});
}

Outcome closed_form_covariance() {
  const DriftMatrix D = kolmogorov2d();
  const Mat A0 = Mat::Identity(1, 1);
  double worst = 0.0, worstDet = 0.0, worstQuad = 0.0;
  for (double t : {0.1, 1.0, 2.0}) {
    Mat exact(2, 2);
    exact << t, -t * t / 2.0, -t * t / 2.0, t * t * t / 3.0;
    const Mat C0 = covariance(A0, t, D, CovKind::C0);
    const Mat Cq = covariance_quadrature(A0, t, D, CovKind::C0);
    worst = std::max(worst, ((C0 - exact).array() / exact.array()).abs().maxCoeff());
    const double det = std::pow(t, 4) / 12.0;
    worstDet = std::max(worstDet, std::abs(C0.determinant() - det) / det);
    worstQuad = std::max(worstQuad, ((C0 - Cq).array() / exact.array()).abs().maxCoeff());
  }
  return {worst <= 1e-10 && worstDet <= 1e-10 && worstQuad <= 1e-9,
          fmt("entry rel %.1e, det rel %.1e, exponential vs quadrature %.1e", worst, worstDet, worstQuad)};
}

Outcome scaling_law() {
  Mat B4 = Mat::Zero(4, 4);
  B4(0, 2) = 1.0;
  B4(1, 3) = 1.0;
  double worst = 0.0;
  for (const DriftMatrix& D : {kolmogorov2d(), three_chain(), validate_structure(B4, {2, 2})}) {
    const OscillatingField f(D.p0(), D.N(), 2.0, 3.0);
    const Point z0(Vec::Constant(D.N(), 0.3), 0.1);
    for (double t : {1e-3, 1e-2, 0.1, 1.0, 10.0}) worst = std::max(worst, scaling_check(z0, t, f, D));
  }
  return {worst <= 1e-8, fmt("max rel deviation %.1e over 3 structures x 5 times", worst)};
}

Outcome normalization() {
  double worst = 0.0;
  for (const DriftMatrix& D : {kolmogorov2d(), two_block3()}) {
    const OscillatingField f(D.p0(), D.N(), 2.0, 3.0);
    const FrozenKernel k(Point(Vec::Constant(D.N(), 0.2), 0.0), f, D, KernelVariant::full);
    for (double t : {0.1, 1.0}) {
      const double e = std::exp(-t * D.traceB());
      worst = std::max(worst, std::abs(kernel_mass(k, t) - e) / e);
    }
  }
  return {worst <= 1e-6, fmt("max rel error %.1e", worst)};
}

Outcome residual() {
  const cli::Report r = cli::run_command(config("kolm2d.cfg"), "kernel", "residual", {});
  return {r.passed(), fmt("max |ratio - 4| = %.3f at 10 points", result(r, "maxRatioDeviation")) +
                          failed_checks(r)};
}

Outcome homogeneity() {
  double worst = 0.0;
  for (const DriftMatrix& D : {kolmogorov2d(), two_block3()}) {
    const BlockStructure& s = D.structure();
    const OscillatingField f(D.p0(), D.N(), 2.0, 3.0);
    const Point z0(Vec::Constant(D.N(), 0.4), 0.0);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ut(0.1, 1.0);
    for (int n = 0; n < 100; ++n) {
      Vec x(D.N());
      for (int k = 0; k < D.N(); ++k) x(k) = u(rng);
      const Point z(x, ut(rng));
      const KernelValue a = gamma_eval(z0, z, f, D, KernelVariant::principal);
      for (double lambda : {0.5, 2.0, 5.0}) {
        const KernelValue b = gamma_eval(z0, dilate(lambda, z, s), f, D, KernelVariant::principal);
        const double sv = std::pow(lambda, -s.Q()), sh = sv / (lambda * lambda);
        if (a.value > 1e-250) worst = std::max(worst, std::abs(b.value - sv * a.value) / (sv * a.value));
        const double hmax = a.hess.cwiseAbs().maxCoeff();
        if (hmax > 1e-250) worst = std::max(worst, (b.hess - sh * a.hess).cwiseAbs().maxCoeff() / (sh * hmax));
      }
    }
  }
  return {worst <= 1e-10, fmt("max rel deviation %.1e (value and Hessian, 100 points, 3 scales)", worst)};
}

Outcome appendix_bounds() {
  const cli::RunConfig c = config("kolm2d.cfg");
  bool ok = true;
  std::string detail;
  for (int order : {0, 1, 2}) {
    cli::Options o;
    o.order = order;
    const cli::Report r = cli::run_command(c, "bounds", "sweep", o);
    ok = ok && r.passed();
    detail += fmt("k=%.0f sup %.4g refine %.1e", order, result(r, "supConstant"), result(r, "relChange")) +
              fmt(" z0 var %.3f; ", result(r, "z0Variation")) + failed_checks(r);
  }
  return {ok, detail};
}

Outcome sandwich() {
  const cli::Report r = cli::run_command(config("kolm2d.cfg"), "bounds", "sandwich", {});
  return {r.passed(), fmt("cov ratio [%.4f, %.4f], ", result(r, "covRatioMin"), result(r, "covRatioMax")) +
                          fmt("scaled inverse [%.4f, %.4f] in [%.4f, ", result(r, "scaledInverseMin"), result(r, "scaledInverseMax"),
                              result(r, "inverseEnvelopeLo")) +
                          fmt("%.4f], m %.4g (first half %.4g)", result(r, "inverseEnvelopeHi"), result(r, "m"),
                              result(r, "mFirstHalf")) +
                          failed_checks(r)};
}

Outcome cancellation() {
  const cli::Report r = cli::run_command(config("nonprincipal2d.cfg"), "singular", "cancel", {});
  return {r.passed(), fmt("span %.3f, max |value| %.4g over 10 z0", result(r, "span"), result(r, "maxAbsValue")) +
                          failed_checks(r)};
}

Outcome representation() {
  const cli::Report r = cli::run_command(config("kolm2d.cfg"), "singular", "repr-check", {});
  return {r.passed(), fmt("rel L2 %.2e (coarse %.2e), c %.6f", result(r, "fineRelL2"), result(r, "coarseRelL2"),
                          result(r, "cij")) +
                          failed_checks(r)};
}

Outcome covering() {
  const cli::Report r = cli::run_command(config("kolm2d.cfg"), "cover", "verify", {});
  return {r.passed(), fmt("r %.4g, coverage %.3f, overlap %.0f", result(r, "r"), result(r, "coverage"),
                          result(r, "maxOverlap")) +
                          fmt(" (doubled box %.0f, certified %.0f)", result(r, "maxOverlapDoubledBox"),
                              result(r, "certifiedOverlap")) +
                          failed_checks(r)};
}

Outcome lp_ratios() {
  const cli::RunConfig c = config("kolm2d.cfg");
  const cli::Report s = cli::run_command(c, "lp", "strip", {});
  const cli::Report t = cli::run_command(c, "lp", "stationary", {});
  return {s.passed() && t.passed(),
          fmt("max ratio p=1.5 %.4f, p=2 %.4f, p=4 %.4f; stationary finite", result(s, "p1.50MaxRatioExtended"),
              result(s, "p2.00MaxRatioExtended"), result(s, "p4.00MaxRatioExtended")) +
              failed_checks(s) + failed_checks(t)};
}

Outcome monte_carlo() {
  const cli::Report r = cli::run_command(config("kolm2d.cfg"), "mc", "density", {});
  return {r.passed(), fmt("sup-bin discrepancy %.4f, variance slope %.4f", result(r, "supDiscrepancy"),
                          result(r, "varianceSlope")) +
                          failed_checks(r)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form covariance", closed_form_covariance},
      {"covariance scaling law", scaling_law},
      {"kernel normalization", normalization},
      {"PDE residual Richardson ratio", residual},
      {"principal kernel homogeneity", homogeneity},
      {"uniform kernel bounds", appendix_bounds},
      {"sandwich envelopes", sandwich},
      {"cancellation", cancellation},
      {"representation formula", representation},
      {"covering", covering},
      {"Lp ratios", lp_ratios},
      {"Monte Carlo oracle", monte_carlo},
  };
  int failures = 0;
  for (std::size_t n = 0; n < criteria.size(); ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[n].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2zu %s (%.1f s): %s\n", o.passed ? "PASS" : "FAIL", n + 1, criteria[n].first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
    failures += o.passed ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
