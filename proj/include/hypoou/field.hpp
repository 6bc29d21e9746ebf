#pragma once

// Diffusion coefficient fields z ↦ A(z), symmetric p0×p0 with eigenvalues in
// [1/Λ, Λ] and a modulus of continuity ω.

#include "hypoou/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace hypoou {

class CoefficientField {
 public:
  virtual ~CoefficientField() = default;

  virtual Mat evaluate(const Point& z) const = 0;
  virtual double Lambda() const = 0;
  /// Upper bound for max_ij |a_ij(z1) - a_ij(z2)| over |z1 - z2| ≤ r (Euclidean).
  virtual double omega(double r) const = 0;
  virtual bool time_dependent() const { return false; }
  virtual int p0() const = 0;
  virtual std::string name() const = 0;
};

using FieldPtr = std::shared_ptr<const CoefficientField>;

class IdentityField final : public CoefficientField {
 public:
  explicit IdentityField(int p0) : p0_(p0) {}
  Mat evaluate(const Point&) const override { return Mat::Identity(p0_, p0_); }
  double Lambda() const override { return 1.0; }
  double omega(double) const override { return 0.0; }
  int p0() const override { return p0_; }
  std::string name() const override { return "identity"; }

 private:
  int p0_;
};

/// A fixed matrix; Λ is the smallest constant with spectrum in [1/Λ, Λ].
class ConstantField final : public CoefficientField {
 public:
  explicit ConstantField(Mat A);
  static ConstantField scalar(int p0, double c) { return ConstantField(c * Mat::Identity(p0, p0)); }

  Mat evaluate(const Point&) const override { return A_; }
  double Lambda() const override { return Lambda_; }
  double omega(double) const override { return 0.0; }
  int p0() const override { return static_cast<int>(A_.rows()); }
  std::string name() const override { return "constant"; }

 private:
  Mat A_;
  double Lambda_;
};

/// A(z) = R(z) diag(Λ^{s_k(z)}) R(z)ᵀ with s_k = sin(k·phase + shift) and a
/// Givens rotation R(z) mixing the first two coordinates.
class OscillatingField final : public CoefficientField {
 public:
  OscillatingField(int p0, int N, double Lambda, double frequency, bool timeDependent = false);

  Mat evaluate(const Point& z) const override;
  double Lambda() const override { return Lambda_; }
  double omega(double r) const override;
  bool time_dependent() const override { return timeDependent_; }
  int p0() const override { return p0_; }
  std::string name() const override { return "oscillating"; }
  double frequency() const { return freq_; }

 private:
  int p0_;
  int N_;
  double Lambda_;
  double freq_;
  bool timeDependent_;
};

/// Piecewise-linear in x1 between tabulated symmetric matrices; constant outside.
class TabulatedField final : public CoefficientField {
 public:
  TabulatedField(std::vector<double> nodes, std::vector<Mat> values);
  /// CSV with header; columns x1 then the upper triangle of A row by row.
  static TabulatedField from_csv(const std::string& path, int p0);

  Mat evaluate(const Point& z) const override;
  double Lambda() const override { return Lambda_; }
  double omega(double r) const override;
  int p0() const override { return static_cast<int>(values_.front().rows()); }
  std::string name() const override { return "tabulated"; }

 private:
  std::vector<double> nodes_;
  std::vector<Mat> values_;
  double Lambda_ = 1.0;
  double slope_ = 0.0;
  double osc_ = 0.0;
};

/// N×N matrix with A in the leading p0×p0 block.
Mat embed_diffusion(const Mat& A, int N);

}  // namespace hypoou
