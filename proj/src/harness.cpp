#include "hypoou/harness.hpp"

#include "hypoou/errors.hpp"
#include "hypoou/parallel.hpp"
#include "hypoou/quadrature.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace hypoou {

namespace {

// exp(-s²) < 1e-12 beyond this.
constexpr double kGaussCut = 5.257;

struct Factor {
  double f = 1.0, d1 = 0.0, d2 = 0.0;
};

Factor profile_eval(Profile p, double s) {
  switch (p) {
    case Profile::gaussian: {
      if (std::abs(s) > kGaussCut) return {0.0, 0.0, 0.0};
      const double e = std::exp(-s * s);
      return {e, -2.0 * s * e, (4.0 * s * s - 2.0) * e};
    }
    case Profile::polynomial: {
      if (std::abs(s) >= 1.0) return {0.0, 0.0, 0.0};
      const double a = 1.0 - s * s;
      const double a2 = a * a, a3 = a2 * a;
      return {a3 * a, -8.0 * s * a3, -8.0 * a3 + 48.0 * s * s * a2};
    }
    case Profile::flat:
      return {1.0, 0.0, 0.0};
  }
  return {};
}

double profile_radius(Profile p) {
  switch (p) {
    case Profile::gaussian:
      return kGaussCut;
    case Profile::polynomial:
      return 1.0;
    case Profile::flat:
      return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

const char* profile_name(Profile p) {
  switch (p) {
    case Profile::gaussian:
      return "gaussian";
    case Profile::polynomial:
      return "polynomial";
    case Profile::flat:
      return "flat";
  }
  return "?";
}

// Nodes and weights of a tensor tiling of [lo, hi] (one entry per axis).
struct Nodes {
  std::vector<Vec> points;
  std::vector<double> weights;
};

Nodes tile_nodes(const Vec& lo, const Vec& hi, const TileGrid& grid) {
  std::vector<Rule> rules;
  for (Eigen::Index k = 0; k < lo.size(); ++k)
    rules.push_back(composite_gauss_legendre(uniform_breaks(lo[k], hi[k], grid.panels), grid.nodes));
  Nodes n;
  for_each_tensor(rules, [&](const Vec& p, double w) {
    if (w == 0.0) return;
    n.points.push_back(p);
    n.weights.push_back(w);
  });
  return n;
}

// Per-node quantities shared by the ratio experiments.
struct Sampled {
  std::vector<std::vector<double>> d2;  // p0*p0 columns, row-major over (i,j)
  std::vector<double> op, u, drift;
};

template <typename JetAt, typename AAt>
Sampled sample(const Nodes& nodes, int p0, const Mat& B, OperatorMode mode, JetAt&& jetAt,
               AAt&& aAt) {
  const std::size_t n = nodes.points.size();
  Sampled s;
  s.d2.assign(static_cast<std::size_t>(p0 * p0), std::vector<double>(n));
  s.op.resize(n);
  s.u.resize(n);
  s.drift.resize(n);
  parallel_for(n, [&](std::size_t k) {
    const Vec& p = nodes.points[k];
    const Jet j = jetAt(p);
    const Vec x = p.head(B.rows());
    const Mat A = aAt(p);
    for (int a = 0; a < p0; ++a)
      for (int b = 0; b < p0; ++b) s.d2[static_cast<std::size_t>(a * p0 + b)][k] = j.hess(a, b);
    s.op[k] = apply_operator(j, A, B, x, mode);
    s.u[k] = j.value;
    s.drift[k] = x.dot(B * j.grad);
  });
  return s;
}

}  // namespace

ProductBump::ProductBump(Point center, Vec widths, std::vector<Profile> profiles, double amplitude)
    : center_(std::move(center)),
      widths_(std::move(widths)),
      profiles_(std::move(profiles)),
      amplitude_(amplitude) {
  const auto n = static_cast<std::size_t>(center_.x.size() + 1);
  if (static_cast<std::size_t>(widths_.size()) != n || profiles_.size() != n)
    throw ValidationError("bump needs N+1 widths and profiles");
  if ((widths_.array() <= 0.0).any()) throw ValidationError("bump widths must be positive");
}

ProductBump ProductBump::make(BumpKind kind, const Point& center, const Vec& widths,
                              const BlockStructure& s, double sigma) {
  const int N = static_cast<int>(center.x.size());
  std::vector<Profile> prof(static_cast<std::size_t>(N + 1),
                            kind == BumpKind::polynomialBump ? Profile::polynomial
                                                             : Profile::gaussian);
  Vec w = widths;
  if (kind == BumpKind::anisotropicBump) {
    for (int k = 0; k < N; ++k) w[k] *= std::pow(sigma, s.q()[static_cast<std::size_t>(k)]);
    w[N] *= sigma * sigma;
  }
  return ProductBump(center, w, prof);
}

ProductBump ProductBump::lift(const ProductBump& spatial, double T) {
  ProductBump out = spatial;
  const auto n = out.profiles_.size();
  out.profiles_[n - 1] = Profile::polynomial;
  out.widths_[static_cast<Eigen::Index>(n - 1)] = T;
  out.center_.t = 0.0;
  return out;
}

ProductBump ProductBump::scaled(double a) const {
  ProductBump out = *this;
  out.amplitude_ *= a;
  return out;
}

double ProductBump::value(const Point& z) const {
  const int N = this->N();
  double v = amplitude_;
  for (int k = 0; k <= N; ++k) {
    const double c = k < N ? center_.x[k] : center_.t;
    const double y = k < N ? z.x[k] : z.t;
    v *= profile_eval(profiles_[static_cast<std::size_t>(k)], (y - c) / widths_[k]).f;
    if (v == 0.0) return 0.0;
  }
  return v;
}

Jet ProductBump::jet(const Point& z) const {
  const int N = this->N();
  std::vector<Factor> f(static_cast<std::size_t>(N + 1));
  for (int k = 0; k <= N; ++k) {
    const double c = k < N ? center_.x[k] : center_.t;
    const double y = k < N ? z.x[k] : z.t;
    Factor g = profile_eval(profiles_[static_cast<std::size_t>(k)], (y - c) / widths_[k]);
    g.d1 /= widths_[k];
    g.d2 /= widths_[k] * widths_[k];
    f[static_cast<std::size_t>(k)] = g;
  }
  // Product over all factors except the listed ones.
  auto others = [&](int a, int b) {
    double p = amplitude_;
    for (int k = 0; k <= N; ++k)
      if (k != a && k != b) p *= f[static_cast<std::size_t>(k)].f;
    return p;
  };
  Jet j;
  j.value = others(-1, -1);
  j.grad = Vec::Zero(N);
  j.hess = Mat::Zero(N, N);
  for (int a = 0; a < N; ++a) {
    const Factor& fa = f[static_cast<std::size_t>(a)];
    const double ra = others(a, -1);
    j.grad[a] = fa.d1 * ra;
    j.hess(a, a) = fa.d2 * ra;
    for (int b = a + 1; b < N; ++b) {
      j.hess(a, b) = fa.d1 * f[static_cast<std::size_t>(b)].d1 * others(a, b);
      j.hess(b, a) = j.hess(a, b);
    }
  }
  j.dt = f[static_cast<std::size_t>(N)].d1 * others(N, -1);
  return j;
}

Box ProductBump::support() const {
  const int N = this->N();
  Box b;
  b.lo.resize(N);
  b.hi.resize(N);
  for (int k = 0; k <= N; ++k) {
    const double r = profile_radius(profiles_[static_cast<std::size_t>(k)]) * widths_[k];
    const double c = k < N ? center_.x[k] : center_.t;
    if (k < N) {
      b.lo[k] = c - r;
      b.hi[k] = c + r;
    } else {
      b.tlo = c - r;
      b.thi = c + r;
    }
  }
  return b;
}

std::string ProductBump::describe() const {
  std::ostringstream os;
  os << "bump(";
  for (std::size_t k = 0; k < profiles_.size(); ++k)
    os << (k ? "," : "") << profile_name(profiles_[k]) << ":" << widths_[static_cast<Eigen::Index>(k)];
  os << ")";
  return os.str();
}

TranslatedFunction::TranslatedFunction(TestFunctionPtr base, Point g, DriftMatrix D)
    : base_(std::move(base)), g_(std::move(g)), D_(std::move(D)) {}

double TranslatedFunction::value(const Point& z) const {
  return base_->value(group_compose(g_, z, D_));
}

Jet TranslatedFunction::jet(const Point& z) const {
  Jet j = base_->jet(group_compose(g_, z, D_));
  j.dt += j.grad.dot(-D_.B().transpose() * (D_.E(z.t) * g_.x));
  return j;
}

Box TranslatedFunction::support() const {
  const Box s = base_->support();
  Box b;
  b.tlo = s.tlo - g_.t;
  b.thi = s.thi - g_.t;
  const int N = base_->N();
  b.lo = Vec::Constant(N, std::numeric_limits<double>::infinity());
  b.hi = -b.lo;
  // x = y - E(t)x_g with y in the base support; E(t)x_g sampled densely in t.
  const int steps = 64;
  for (int k = 0; k <= steps; ++k) {
    const double t = b.tlo + (b.thi - b.tlo) * k / steps;
    const Vec shift = D_.E(t) * g_.x;
    b.lo = b.lo.cwiseMin(s.lo - shift);
    b.hi = b.hi.cwiseMax(s.hi - shift);
  }
  const Vec pad = 0.05 * (b.hi - b.lo);
  b.lo -= pad;
  b.hi += pad;
  return b;
}

double apply_operator(const Jet& u, const Mat& A, const Mat& B, const Vec& x, OperatorMode mode) {
  const auto p0 = A.rows();
  double v = (A.array() * u.hess.topLeftCorner(p0, p0).array()).sum();
  v += x.dot(B * u.grad);
  if (mode == OperatorMode::evolutionL) v -= u.dt;
  return v;
}

double apply_operator(const TestFunction& u, const CoefficientField& field, const DriftMatrix& D,
                      OperatorMode mode, const Point& z) {
  return apply_operator(u.jet(z), field.evaluate(z), D.B(), z.x, mode);
}

double lp_norm(const std::vector<double>& values, const std::vector<double>& weights, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw BadExponent("p must lie in (1, inf)");
  if (values.size() != weights.size()) throw ValidationError("values and weights differ in length");
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, std::abs(v));
  if (vmax == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) s += weights[k] * std::pow(std::abs(values[k]) / vmax, p);
  return vmax * std::pow(s, 1.0 / p);
}

std::vector<LpReport> strip_ratios(const TestFunction& u, const CoefficientField& field,
                                   const DriftMatrix& D, const std::vector<double>& ps,
                                   const TileGrid& grid) {
  const int N = D.N(), p0 = D.p0();
  const Box box = u.support();
  Vec lo(N + 1), hi(N + 1);
  lo << box.lo, box.tlo;
  hi << box.hi, box.thi;
  const Nodes nodes = tile_nodes(lo, hi, grid);
  auto pointOf = [N](const Vec& p) { return Point(p.head(N), p[N]); };
  const Sampled s = sample(
      nodes, p0, D.B(), OperatorMode::evolutionL, [&](const Vec& p) { return u.jet(pointOf(p)); },
      [&](const Vec& p) { return field.evaluate(pointOf(p)); });
  std::vector<LpReport> out;
  for (double p : ps) {
    LpReport r;
    r.p = p;
    r.samples = nodes.points.size();
    r.d2.resize(p0, p0);
    for (int a = 0; a < p0; ++a)
      for (int b = 0; b < p0; ++b)
        r.d2(a, b) = lp_norm(s.d2[static_cast<std::size_t>(a * p0 + b)], nodes.weights, p);
    r.Lu = lp_norm(s.op, nodes.weights, p);
    r.u = lp_norm(s.u, nodes.weights, p);
    r.drift = lp_norm(s.drift, nodes.weights, p);
    r.ratio = r.d2.sum() / (r.Lu + r.u);
    out.push_back(r);
  }
  return out;
}

LpReport strip_ratio(const TestFunction& u, const CoefficientField& field, const DriftMatrix& D,
                     double p, const TileGrid& grid) {
  return strip_ratios(u, field, D, {p}, grid).front();
}

StationaryReport stationary_ratio(const ProductBump& spatial, double T,
                                  const CoefficientField& field, const DriftMatrix& D, double p,
                                  const TileGrid& grid) {
  if (field.time_dependent()) throw ValidationError("stationary ratio needs a time-independent field");
  const int N = D.N(), p0 = D.p0();
  const Box box = spatial.support();
  const Nodes nodes = tile_nodes(box.lo, box.hi, grid);
  const Sampled s = sample(
      nodes, p0, D.B(), OperatorMode::stationaryA,
      [&](const Vec& x) { return spatial.jet(Point(x, spatial.center().t)); },
      [&](const Vec& x) { return field.evaluate(Point(x, 0.0)); });
  StationaryReport r;
  r.p = p;
  for (const auto& col : s.d2) r.d2sum += lp_norm(col, nodes.weights, p);
  r.Au = lp_norm(s.op, nodes.weights, p);
  r.u = lp_norm(s.u, nodes.weights, p);
  r.drift = lp_norm(s.drift, nodes.weights, p);
  r.secondDerivRatio = r.d2sum / (r.Au + r.u);
  r.driftRatio = r.drift / (r.Au + r.u);
  r.liftRatio = strip_ratio(ProductBump::lift(spatial, T), field, D, p, grid).ratio;
  (void)N;
  return r;
}

std::vector<ProductBump> bump_family(const Vec& baseWidths, double T, int count) {
  if (count < 1) throw ValidationError("family needs at least one member");
  const int N = static_cast<int>(baseWidths.size()) - 1;
  std::vector<ProductBump> out;
  for (int k = 0; k < count; ++k) {
    const double sigma = std::pow(4.0, -1.0 + 2.0 * k / count);
    Vec w = baseWidths;
    w.head(N) *= sigma;
    w[N] = std::min(w[N], T);
    out.emplace_back(Point::origin(N), w,
                     std::vector<Profile>(static_cast<std::size_t>(N + 1), Profile::polynomial));
  }
  return out;
}

double interpolation_constant(const TestFunction& u, int m, double p,
                              const std::vector<double>& eps, const TileGrid& grid) {
  const int N = u.N();
  const Box box = u.support();
  Vec lo(N + 1), hi(N + 1);
  lo << box.lo, box.tlo;
  hi << box.hi, box.thi;
  const Nodes nodes = tile_nodes(lo, hi, grid);
  std::vector<double> d1(nodes.points.size()), d2(d1.size()), v(d1.size());
  for (std::size_t k = 0; k < d1.size(); ++k) {
    const Vec& q = nodes.points[k];
    const Jet j = u.jet(Point(q.head(N), q[N]));
    d1[k] = j.grad[m];
    d2[k] = j.hess(m, m);
    v[k] = j.value;
  }
  const double g = lp_norm(d1, nodes.weights, p);
  const double h = lp_norm(d2, nodes.weights, p);
  const double n = lp_norm(v, nodes.weights, p);
  double c = 0.0;
  for (double e : eps) c = std::max(c, e * (g - e * h) / n);
  return c;
}

}  // namespace hypoou
