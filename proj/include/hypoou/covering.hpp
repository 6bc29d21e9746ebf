#pragma once

// Bounded-overlap covering of the strip R^N x [-T,T] by quasidistance balls.
// Centers form an anisotropic lattice ξ ∈ h·Z^N (h_j ∝ r^{q_j}) repeated on
// time layers spaced ∝ r²; membership always goes through the group law.

#include "hypoou/algebra.hpp"

#include <cstdint>
#include <vector>

namespace hypoou {

struct StripSpec {
  double T = 0.5;
  double boxRadius = 1.0;  // spatial truncation, used for sampling only
};

class Covering {
 public:
  Covering(double r, double K, double T, const BlockStructure& s);

  double r() const { return r_; }
  double K() const { return K_; }
  double T() const { return T_; }
  const Vec& steps() const { return h_; }
  const std::vector<double>& layers() const { return layers_; }

  /// Number of centers z_i with ‖z_i⁻¹∘z‖ < radius. Exact lattice count; no
  /// spatial truncation.
  std::int64_t count_within(const Point& z, double radius, const DriftMatrix& D) const;

  /// Centers whose spatial part lies in [-R,R]^N.
  std::vector<Point> centers(double R) const;

  /// A bound on Σ_i χ_{B_{Kr}(z_i)} valid at every point of the strip, derived
  /// from the lattice geometry alone. -1 when E(τ) is not unit lower
  /// triangular (non-principal drift), where no closed bound is attempted.
  std::int64_t certified_overlap(const DriftMatrix& D) const;

  int observedOverlap = 0;

 private:
  double r_, K_, T_;
  Vec h_;
  std::vector<double> layers_;
  std::vector<int> q_;
};

struct CoverReport {
  double coverageFraction = 0.0;
  std::int64_t maxOverlap = 0;
  std::int64_t certified = -1;
  std::size_t samples = 0;
};

/// r starts at r0/2 and halves until buildSamples strip points are covered.
Covering build_covering(const StripSpec& strip, double r0, double K, const DriftMatrix& D,
                        std::size_t buildSamples = 2000, std::uint64_t seed = 1);

/// Uniform samples in [-R,R]^N x [-T,T].
CoverReport verify_covering(const Covering& c, const StripSpec& strip, const DriftMatrix& D,
                            std::size_t samples, std::uint64_t seed);

/// Same report at the given points.
CoverReport verify_covering_at(const Covering& c, const std::vector<Point>& points,
                               const DriftMatrix& D);

}  // namespace hypoou
