#pragma once

#include "hypoou/cli/config.hpp"

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hypoou::cli {

/// Collects the measured numbers, the assertions and the per-sample table of
/// one command run. Every number carries its tolerance and sample count.
class Report {
 public:
  Report(std::string command, const RunConfig& cfg);

  /// tolerance < 0 means "no tolerance applies" and is emitted as null.
  void measure(const std::string& name, double value, double tolerance, std::size_t samples,
               const std::string& provenance);
  void check(const std::string& name, bool passed, const std::string& detail);
  void columns(std::vector<std::string> header);
  void row(std::vector<double> values);

  bool passed() const;
  nlohmann::ordered_json json(bool withTimestamp = true) const;
  std::string csv() const;
  /// Writes <dir>/<command>.json and, when rows exist, <dir>/<command>.csv.
  void write(const std::string& dir) const;
  const std::string& command() const { return command_; }

 private:
  std::string command_;
  nlohmann::ordered_json config_;
  std::uint64_t seed_;
  nlohmann::ordered_json results_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json checks_ = nlohmann::ordered_json::array();
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::string> warnings_;
};

struct Options {
  std::string out = "reports";
  std::optional<int> order;
  bool quiet = false;
};

/// Exit status: 0 all assertions passed, 2 some assertion failed, 1 error.
/// Throws UnknownCommand for names outside the command table.
int dispatch(const RunConfig& cfg, const std::string& group, const std::string& action,
             const Options& opts, std::ostream& log);

/// Runs a command and returns its report without touching the filesystem.
Report run_command(const RunConfig& cfg, const std::string& group, const std::string& action,
                   const Options& opts);

/// "group action" pairs understood by dispatch.
std::vector<std::string> command_names();

}  // namespace hypoou::cli
