#include "hypoou/field.hpp"

#include "hypoou/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hypoou {

namespace {

double spectral_lambda(const Mat& A) {
  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) throw ValidationError("diffusion matrix is not positive definite");
  return std::max({1.0, hi, 1.0 / lo});
}

}  // namespace

ConstantField::ConstantField(Mat A) : A_(std::move(A)) {
  if (A_.rows() != A_.cols() || (A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-14)
    throw ValidationError("diffusion matrix must be square and symmetric");
  Lambda_ = spectral_lambda(A_);
}

OscillatingField::OscillatingField(int p0, int N, double Lambda, double frequency,
                                   bool timeDependent)
    : p0_(p0), N_(N), Lambda_(Lambda), freq_(frequency), timeDependent_(timeDependent) {
  if (!(Lambda >= 1.0)) throw ValidationError("ellipticity constant must be at least 1");
}

Mat OscillatingField::evaluate(const Point& z) const {
  double phase = z.x.sum();
  if (timeDependent_) phase += z.t;
  phase *= freq_;
  Vec d(p0_);
  for (int k = 0; k < p0_; ++k) d[k] = std::pow(Lambda_, std::sin(phase + 1.3 * k));
  Mat R = Mat::Identity(p0_, p0_);
  if (p0_ >= 2) {
    const double c = std::cos(phase), s = std::sin(phase);
    R(0, 0) = c;
    R(0, 1) = -s;
    R(1, 0) = s;
    R(1, 1) = c;
  }
  return R * d.asDiagonal() * R.transpose();
}

double OscillatingField::omega(double r) const {
  // |∇phase| ≤ freq·sqrt(N+1); eigenvalue speed Λ lnΛ, rotation speed 2(Λ - 1/Λ).
  const double osc = Lambda_ - 1.0 / Lambda_;
  const double lip = freq_ * std::sqrt(N_ + 1.0) *
                     (Lambda_ * std::log(Lambda_) + (p0_ >= 2 ? 2.0 * osc : 0.0));
  return std::min(osc, lip * r);
}

TabulatedField::TabulatedField(std::vector<double> nodes, std::vector<Mat> values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
  if (nodes_.empty() || nodes_.size() != values_.size())
    throw ValidationError("tabulated field needs matching nonempty node and value lists");
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (k > 0 && !(nodes_[k] > nodes_[k - 1]))
      throw ValidationError("tabulated field nodes must be strictly increasing");
    Lambda_ = std::max(Lambda_, spectral_lambda(values_[k]));
    for (std::size_t m = 0; m < k; ++m)
      osc_ = std::max(osc_, (values_[k] - values_[m]).cwiseAbs().maxCoeff());
    if (k > 0)
      slope_ = std::max(slope_, (values_[k] - values_[k - 1]).cwiseAbs().maxCoeff() /
                                    (nodes_[k] - nodes_[k - 1]));
  }
}

TabulatedField TabulatedField::from_csv(const std::string& path, int p0) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open tabulated field file: " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> nodes;
  std::vector<Mat> values;
  int lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::vector<double> row;
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError(lineNo, path, "not a number: '" + cell + "'");
      }
    }
    const std::size_t need = 1 + static_cast<std::size_t>(p0 * (p0 + 1) / 2);
    if (row.size() != need)
      throw ParseError(lineNo, path, "expected " + std::to_string(need) + " columns");
    Mat A(p0, p0);
    std::size_t c = 1;
    for (int i = 0; i < p0; ++i)
      for (int j = i; j < p0; ++j) A(i, j) = A(j, i) = row[c++];
    nodes.push_back(row[0]);
    values.push_back(A);
  }
  return TabulatedField(std::move(nodes), std::move(values));
}

Mat TabulatedField::evaluate(const Point& z) const {
  const double x = z.x[0];
  if (x <= nodes_.front()) return values_.front();
  if (x >= nodes_.back()) return values_.back();
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - nodes_.begin());
  const double s = (x - nodes_[k - 1]) / (nodes_[k] - nodes_[k - 1]);
  return (1.0 - s) * values_[k - 1] + s * values_[k];
}

double TabulatedField::omega(double r) const { return std::min(osc_, slope_ * r); }

Mat embed_diffusion(const Mat& A, int N) {
  Mat out = Mat::Zero(N, N);
  out.topLeftCorner(A.rows(), A.cols()) = A;
  return out;
}

}  // namespace hypoou
