#pragma once

// Run configuration: a flat `key = value` document. Values are numbers, bare
// words or bracketed lists; `#` starts a comment.

#include "hypoou/algebra.hpp"
#include "hypoou/field.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace hypoou::cli {

struct FieldConfig {
  std::string kind = "oscillating";  // identity | constant | oscillating | tabulated
  double Lambda = 2.0;
  double frequency = 3.0;  // slope of the modulus ω(r) for the oscillating field
  bool timeDependent = false;
  std::string file;  // tabulated field CSV
};

struct RunConfig {
  std::vector<int> blocks;
  std::vector<double> B;  // row-major
  FieldConfig field;

  double T = 0.5;
  double boxRadius = 1.0;

  std::uint64_t seed = 1;
  int z0Count = 20;
  std::size_t samples = 10000;
  int shells = 24;
  int directions = 24;
  int order = 0;
  double M = 0.5;

  std::vector<double> times{0.1, 1.0};
  std::vector<double> steps{1e-2, 5e-3};
  int points = 10;

  std::int64_t paths = 1000000;
  double mcTime = 0.1;
  std::vector<double> mcTimes{0.01, 0.02, 0.05, 0.1};
  int bins = 24;

  double rho0 = 0.0;  // 0 means T
  int i = 0, j = 0;
  double eps = 1e-3;
  std::vector<double> radii{1e-3, 1e-2, 1e-1};
  std::vector<double> bumpWidths{0.25, 0.25, 0.08};

  double r0 = 0.25;
  double K = 4.0;

  std::vector<double> p{1.5, 2.0, 4.0};
  int family = 20;
  std::vector<double> lpWidths{0.2, 0.2, 0.4};
  std::vector<double> tGrid{0.01, 0.1, 0.5};

  std::vector<std::string> warnings;

  DriftMatrix drift() const;
  std::unique_ptr<CoefficientField> make_field() const;
  double rho() const { return rho0 > 0.0 ? rho0 : T; }
};

/// Throws ParseError(line, key) on syntax errors and unknown keys, and
/// ValidationError when the structure rules reject blocks/B.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// One line per key with its default, for --help.
std::string config_reference();

}  // namespace hypoou::cli
