#include "hypoou/cli/config.hpp"

#include "hypoou/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <type_traits>

namespace hypoou::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_number(const std::string& text, int line, const std::string& key) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ParseError(line, key, "expected a number, got '" + t + "'");
  return v;
}

std::vector<double> to_list(const std::string& text, int line, const std::string& key) {
  const std::string t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']')
    throw ParseError(line, key, "expected a [..] list");
  std::vector<double> out;
  std::stringstream ss(t.substr(1, t.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(to_number(item, line, key));
  }
  if (out.empty()) throw ParseError(line, key, "empty list");
  return out;
}

bool to_bool(const std::string& text, int line, const std::string& key) {
  const std::string t = trim(text);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ParseError(line, key, "expected true or false");
}

using Setter = std::function<void(RunConfig&, const std::string&, int, const std::string&)>;

struct KeyInfo {
  Setter set;
  std::string help;
};

template <typename T>
Setter number(T RunConfig::*member) {
  return [member](RunConfig& c, const std::string& v, int line, const std::string& key) {
    const double x = to_number(v, line, key);
    if constexpr (std::is_floating_point_v<T>) {
      c.*member = x;
    } else {
      if (x != std::floor(x) || (std::is_unsigned_v<T> && x < 0.0))
        throw ParseError(line, key, "expected a nonnegative integer");
      c.*member = static_cast<T>(x);
    }
  };
}

Setter list(std::vector<double> RunConfig::*member) {
  return [member](RunConfig& c, const std::string& v, int line, const std::string& key) {
    c.*member = to_list(v, line, key);
  };
}

const std::map<std::string, KeyInfo>& keys() {
  static const std::map<std::string, KeyInfo> table = {
      {"blocks",
       {[](RunConfig& c, const std::string& v, int line, const std::string& key) {
          c.blocks.clear();
          for (double b : to_list(v, line, key)) c.blocks.push_back(static_cast<int>(b));
        },
        "block sizes p0 >= p1 >= ... (required)"}},
      {"B", {list(&RunConfig::B), "drift matrix entries, row-major (required)"}},
      {"field",
       {[](RunConfig& c, const std::string& v, int line, const std::string& key) {
          const std::string t = trim(v);
          if (t != "identity" && t != "constant" && t != "oscillating" && t != "tabulated")
            throw ParseError(line, key, "unknown field '" + t + "'");
          c.field.kind = t;
        },
        "identity | constant | oscillating | tabulated (oscillating)"}},
      {"Lambda",
       {[](RunConfig& c, const std::string& v, int line, const std::string& key) {
          c.field.Lambda = to_number(v, line, key);
        },
        "ellipticity constant of the field (2)"}},
      {"frequency",
       {[](RunConfig& c, const std::string& v, int line, const std::string& key) {
          c.field.frequency = to_number(v, line, key);
        },
        "oscillation rate, the slope of the modulus of continuity (3)"}},
      {"time_dependent",
       {[](RunConfig& c, const std::string& v, int line, const std::string& key) {
          c.field.timeDependent = to_bool(v, line, key);
        },
        "oscillating field also varies in t (false)"}},
      {"field_file",
       {[](RunConfig& c, const std::string& v, int, const std::string&) { c.field.file = trim(v); },
        "CSV for the tabulated field"}},
      {"T", {number(&RunConfig::T), "strip half-width (0.5)"}},
      {"boxRadius", {number(&RunConfig::boxRadius), "spatial sampling box [-R,R]^N (1)"}},
      {"seed", {number(&RunConfig::seed), "random seed; HYPOOU_SEED overrides (1)"}},
      {"z0_count", {number(&RunConfig::z0Count), "frozen points sampled in the strip (20)"}},
      {"samples", {number(&RunConfig::samples), "random samples for sandwich/cover (10000)"}},
      {"shells", {number(&RunConfig::shells), "gauge shells per sweep (24)"}},
      {"directions", {number(&RunConfig::directions), "directions per shell (24)"}},
      {"order", {number(&RunConfig::order), "derivative order 0..2 for bounds (0)"}},
      {"M", {number(&RunConfig::M), "admissibility constant of the Lipschitz sweep (0.5)"}},
      {"times", {list(&RunConfig::times), "times for kernel normalize ([0.1, 1])"}},
      {"steps", {list(&RunConfig::steps), "two FD steps for kernel residual ([1e-2, 5e-3])"}},
      {"points", {number(&RunConfig::points), "random points for kernel residual/eval (10)"}},
      {"paths", {number(&RunConfig::paths), "Monte Carlo paths (1000000)"}},
      {"mc_time", {number(&RunConfig::mcTime), "horizon of the density histogram (0.1)"}},
      {"mc_times", {list(&RunConfig::mcTimes), "times of the variance slope fit"}},
      {"bins", {number(&RunConfig::bins), "histogram bins per dimension (24)"}},
      {"rho0", {number(&RunConfig::rho0), "cutoff radius of the kernel split (T)"}},
      {"i", {number(&RunConfig::i), "first derivative index (0)"}},
      {"j", {number(&RunConfig::j), "second derivative index (0)"}},
      {"eps", {number(&RunConfig::eps), "principal value excision radius (1e-3)"}},
      {"radii", {list(&RunConfig::radii), "inner radii for the cancellation integral"}},
      {"bump_widths", {list(&RunConfig::bumpWidths), "Gaussian bump widths (x..., t)"}},
      {"r0", {number(&RunConfig::r0), "upper bound on the covering radius (0.25)"}},
      {"K", {number(&RunConfig::K), "ball enlargement in the overlap count (4)"}},
      {"p", {list(&RunConfig::p), "exponents for the Lp ratios ([1.5, 2, 4])"}},
      {"family", {number(&RunConfig::family), "bump family size (20)"}},
      {"lp_widths", {list(&RunConfig::lpWidths), "base widths of the bump family (x..., t)"}},
      {"tgrid", {list(&RunConfig::tGrid), "times for the sandwich report"}},
  };
  return table;
}

}  // namespace

DriftMatrix RunConfig::drift() const {
  int N = 0;
  for (int b : blocks) N += b;
  if (static_cast<int>(B.size()) != N * N)
    throw ValidationError("B has " + std::to_string(B.size()) + " entries, expected " +
                          std::to_string(N * N));
  Mat m(N, N);
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < N; ++c) m(r, c) = B[static_cast<std::size_t>(r * N + c)];
  return validate_structure(m, blocks);
}

std::unique_ptr<CoefficientField> RunConfig::make_field() const {
  const int p0 = blocks.front();
  int N = 0;
  for (int b : blocks) N += b;
  if (field.kind == "identity") return std::make_unique<IdentityField>(p0);
  if (field.kind == "constant")
    return std::make_unique<ConstantField>(ConstantField::scalar(p0, field.Lambda));
  if (field.kind == "tabulated")
    return std::make_unique<TabulatedField>(TabulatedField::from_csv(field.file, p0));
  return std::make_unique<OscillatingField>(p0, N, field.Lambda, field.frequency,
                                            field.timeDependent);
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string body = trim(raw.substr(0, raw.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(line, body, "expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto it = keys().find(key);
    if (it == keys().end()) throw ParseError(line, key, "unknown key");
    if (seen.count(key)) throw ParseError(line, key, "duplicate key");
    if (value.empty()) throw ParseError(line, key, "missing value");
    it->second.set(cfg, value, line, key);
    seen[key] = line;
  }
  if (!seen.count("blocks")) throw ParseError(line, "blocks", "required key missing");
  if (!seen.count("B")) throw ParseError(line, "B", "required key missing");
  if (!seen.count("Lambda") && cfg.field.kind != "identity" && cfg.field.kind != "tabulated")
    cfg.warnings.push_back("Lambda not set; using the default 2");
  if (cfg.field.kind == "tabulated" && cfg.field.file.empty())
    throw ParseError(line, "field_file", "tabulated field needs field_file");
  if (!(cfg.T > 0.0)) throw ParseError(seen.count("T") ? seen["T"] : line, "T", "must be positive");
  if (cfg.order < 0 || cfg.order > 2)
    throw ParseError(seen.count("order") ? seen["order"] : line, "order", "must be 0, 1 or 2");
  if (cfg.steps.size() != 2) throw ParseError(seen.count("steps") ? seen["steps"] : line, "steps", "needs two steps");
  cfg.drift();  // structure rules
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string config_reference() {
  std::string out = "config keys (key = value, # comments, lists as [a, b]):\n";
  for (const auto& [k, info] : keys()) out += "  " + k + ": " + info.help + "\n";
  return out;
}

}  // namespace hypoou::cli
