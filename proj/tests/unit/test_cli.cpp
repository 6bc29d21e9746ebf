#include "hypoou/cli/commands.hpp"
#include "hypoou/errors.hpp"

#include <gtest/gtest.h>

using namespace hypoou;
using hypoou::cli::parse_config;

namespace {

const char* kolm = "blocks = [1, 1]\nB = [0, 1, 0, 0]\nLambda = 1.5\n";

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Config, ParsesKolmogorov) {
  const cli::RunConfig c = parse_config(std::string("# comment\n") + kolm + "T = 0.25 # strip\n");
  EXPECT_EQ(c.blocks, (std::vector<int>{1, 1}));
  EXPECT_DOUBLE_EQ(c.field.Lambda, 1.5);
  EXPECT_DOUBLE_EQ(c.T, 0.25);
  EXPECT_TRUE(c.warnings.empty());
  EXPECT_TRUE(c.drift().is_principal());
}

TEST(Config, ReportsLineOfBadInput) {
  EXPECT_EQ(error_line(std::string(kolm) + "colour = red\n"), 4);
  EXPECT_EQ(error_line(std::string(kolm) + "T = 0.5\nT = 1\n"), 5);
  EXPECT_EQ(error_line(std::string(kolm) + "samples = 1.5\n"), 4);
  EXPECT_EQ(error_line(std::string(kolm) + "radii = [1e-3, x]\n"), 4);
  EXPECT_EQ(error_line(std::string(kolm) + "seed =\n"), 4);
  EXPECT_EQ(error_line("B = [0, 1, 0, 0]\n"), 1);
}

TEST(Config, StructureRulesApply) {
  EXPECT_THROW(parse_config("blocks = [1, 2]\nB = [0,0,0, 0,0,0, 0,0,0]\n"), ValidationError);
  EXPECT_THROW(parse_config("blocks = [1, 1]\nB = [0, 1, 0]\n"), ValidationError);
}

TEST(Config, MissingLambdaWarns) {
  const cli::RunConfig c = parse_config("blocks = [1, 1]\nB = [0, 1, 0, 0]\n");
  EXPECT_DOUBLE_EQ(c.field.Lambda, 2.0);
  ASSERT_EQ(c.warnings.size(), 1u);
}

TEST(Config, ReferenceListsEveryKey) {
  const std::string ref = cli::config_reference();
  for (const char* key : {"blocks", "B", "Lambda", "T", "seed", "rho0", "K", "tgrid"})
    EXPECT_NE(ref.find(std::string("  ") + key + ":"), std::string::npos) << key;
}

TEST(Report, DeterministicModuloTimestamp) {
  const cli::RunConfig c = parse_config(kolm);
  const cli::Report a = cli::run_command(c, "kernel", "residual", {});
  const cli::Report b = cli::run_command(c, "kernel", "residual", {});
  EXPECT_EQ(a.json(false).dump(), b.json(false).dump());
  EXPECT_EQ(a.csv(), b.csv());
  EXPECT_TRUE(a.json().contains("timestamp"));
  EXPECT_EQ(a.json()["schemaVersion"], 1);
}

TEST(Report, EveryNumberCarriesToleranceAndSamples) {
  const cli::RunConfig c = parse_config(kolm);
  const auto j = cli::run_command(c, "bounds", "sweep", {}).json(false);
  ASSERT_TRUE(j["results"].contains("supConstant"));
  for (const auto& [name, r] : j["results"].items()) {
    EXPECT_TRUE(r.contains("tolerance")) << name;
    EXPECT_TRUE(r.contains("samples")) << name;
    EXPECT_TRUE(r.contains("provenance")) << name;
  }
}

TEST(Report, CsvHasHeader) {
  const cli::RunConfig c = parse_config(kolm);
  const std::string csv = cli::run_command(c, "kernel", "normalize", {}).csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,mass,expected,relError");
}

TEST(Dispatch, UnknownCommand) {
  const cli::RunConfig c = parse_config(kolm);
  EXPECT_THROW(cli::run_command(c, "kernel", "nope", {}), UnknownCommand);
}
