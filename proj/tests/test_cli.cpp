#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zyg/cli/config.hpp"
#include "zyg/report.hpp"

namespace fs = std::filesystem;
using namespace zyg;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("zyglab_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int zyglab(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(ZYGLAB_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json load(const fs::path& p) { return Json::parse(slurp(p)); }

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(ConfigFile, ParsesKeysAndComments) {
  const auto m = cli::parse_config_text("# experiment\nfield = affine:slope=3  # inline\n\n  seed=4\n");
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.at("field"), "affine:slope=3");
  EXPECT_EQ(m.at("seed"), "4");
}

TEST(ConfigFile, RejectsMalformedAndDuplicateLines) {
  EXPECT_THROW(cli::parse_config_text("field\n"), ConfigurationError);
  EXPECT_THROW(cli::parse_config_text("a = 1\na = 2\n"), ConfigurationError);
  EXPECT_THROW(cli::parse_config_text("= 2\n"), ConfigurationError);
  EXPECT_THROW(cli::load_config("/nonexistent/zyglab.conf"), ConfigurationError);
}

TEST(ConfigFile, LayeringAndUnknownKeys) {
  const cli::CommandSchema schema{"x", "", {{"a", "1", ""}, {"b", "", "", true}, {"c", "auto", ""}}};
  const auto r = cli::resolve(schema, {{"a", "2"}, {"b", "file"}}, {{"b", "flag"}});
  EXPECT_EQ(r.at("a"), "2");
  EXPECT_EQ(r.at("b"), "flag");
  const cli::Settings s(r);
  EXPECT_FALSE(s.has("c"));
  EXPECT_EQ(s.integer("a"), 2);
  EXPECT_THROW(cli::resolve(schema, {{"zz", "1"}}, {}), ConfigurationError);
  EXPECT_THROW(cli::resolve(schema, {}, {}), ConfigurationError);
}

TEST(Cli, SeminormOfAffineField) {
  const auto out = scratch("seminorm");
  ASSERT_EQ(zyglab("seminorm --field affine:slope=3 --output " + out.string()), 0);
  std::istringstream csv(slurp(out / "seminorm.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "scale,max_second_ratio,max_first_ratio");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    EXPECT_LT(std::stod(line.substr(a + 1, b - a - 1)), 1e-12) << line;
  }
  EXPECT_EQ(rows, 17);
  const auto j = load(out / "seminorm.json");
  EXPECT_EQ(j["verdict"], "pass");
  EXPECT_EQ(j["header"]["config"]["field"], "affine:slope=3");
  EXPECT_EQ(j["header"]["config"]["x_samples"], "4096");
  EXPECT_TRUE(j["header"].contains("generated_at"));
}

TEST(Cli, MissingConfigFileIsStatusTwo) {
  EXPECT_EQ(zyglab("run --config missing.toml"), 2);
  EXPECT_EQ(zyglab("seminorm --config missing.toml --field abs"), 2);
}

TEST(Cli, InvalidInputsAreStatusTwo) {
  const auto out = scratch("invalid");
  const std::string o = " --output " + out.string();
  EXPECT_EQ(zyglab("seminorm --field affine:slope=3 --nonsense 1" + o), 2);
  EXPECT_EQ(zyglab("seminorm --field peano" + o), 2);
  EXPECT_EQ(zyglab("balls --field abs --M 0.5" + o), 2);
  EXPECT_EQ(zyglab("balls --field abs --M 2 --r 0.2" + o), 2);
  EXPECT_EQ(zyglab("measure --measure dyadic:n=2,beta=0.9" + o), 2);
  EXPECT_EQ(zyglab("seminorm" + o), 2);
  EXPECT_EQ(zyglab(""), 2);
  write(out / "bad.conf", "command = seminorm\nfield = abs\nbogus = 1\n");
  EXPECT_EQ(zyglab("run --config " + (out / "bad.conf").string() + o), 2);
  write(out / "wrong.conf", "command = measure\nfield = abs\n");
  EXPECT_EQ(zyglab("seminorm --config " + (out / "wrong.conf").string() + o), 2);
}

TEST(Cli, FailedVerdictIsStatusOneWithReport) {
  const auto out = scratch("fail");
  EXPECT_EQ(zyglab("measure --measure dyadic:n=2,depth=10,beta=0.1,seed=7 --samples 40 --claimed_C 4 --output " +
                   out.string()),
            1);
  const auto j = load(out / "measure.json");
  EXPECT_EQ(j["verdict"], "fail");
  EXPECT_FALSE(j["violations"].empty());
  EXPECT_TRUE(fs::exists(out / "weights.txt"));
  EXPECT_TRUE(fs::exists(out / "doubling.csv"));
}

TEST(Cli, ExhaustedScheduleWritesFailingCertificate) {
  const auto out = scratch("exhausted");
  EXPECT_EQ(zyglab("certify --field constant:c=0.5 --measure dyadic:n=2,depth=14,beta=0.25,seed=1 --epsilon 0.1 "
                   "--output " + out.string()),
            1);
  const auto j = load(out / "certificate.json");
  EXPECT_EQ(j["verdict"], "fail");
  EXPECT_EQ(j["certificate"]["delta_search"].size(), 10u);
}

TEST(Cli, RunFromConfigWithFlagOverrides) {
  const auto out = scratch("run");
  write(out / "flat.conf",
        "command = certify\nfield = constant:c=0.5\nmeasure = dyadic:n=2,depth=14,beta=0.25,seed=1\nepsilon = 0.1\n");
  // The file alone exhausts the schedule; the flag lifts epsilon.
  EXPECT_EQ(zyglab("certify --config " + (out / "flat.conf").string() + " --epsilon 1000 --output " + out.string()),
            0);
  const auto j = load(out / "certificate.json");
  EXPECT_EQ(j["verdict"], "pass");
  EXPECT_EQ(j["header"]["config"]["epsilon"], "1000");
  EXPECT_TRUE(chain_holds(j["certificate"]));
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const auto out = scratch("env");
  EXPECT_EQ(zyglab("seminorm --field abs --x_samples 65", "ZYGLAB_OUTPUT_DIR=" + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "seminorm.csv"));
  EXPECT_FALSE(fs::exists(out / "seminorm.csv.tmp"));
}

TEST(Cli, ReportsAreReproducible) {
  const auto a = scratch("repro_a");
  const auto b = scratch("repro_b");
  const std::string args = "balls --field weierstrass:a=0.5,b=2,N=48 --r 0.015625 --balls 64 --output ";
  ASSERT_EQ(zyglab(args + a.string()), 0);
  ASSERT_EQ(zyglab(args + b.string()), 0);
  EXPECT_EQ(slurp(a / "pairs.jsonl"), slurp(b / "pairs.jsonl"));
  EXPECT_EQ(without_timestamp(load(a / "balls.json")), without_timestamp(load(b / "balls.json")));

  const std::string m = "measure --measure dyadic:n=2,depth=12,beta=0.1,seed=7 --samples 30 --output ";
  ASSERT_EQ(zyglab(m + a.string()), 0);
  ASSERT_EQ(zyglab(m + b.string()), 0);
  EXPECT_EQ(slurp(a / "doubling.csv"), slurp(b / "doubling.csv"));
  EXPECT_EQ(slurp(a / "weights.txt"), slurp(b / "weights.txt"));
  EXPECT_EQ(without_timestamp(load(a / "measure.json")), without_timestamp(load(b / "measure.json")));
}

TEST(Cli, OtherCommandsRun) {
  const auto out = scratch("others");
  const std::string o = " --output " + out.string();
  EXPECT_EQ(zyglab("fit --field square --center 0 --radius 0.5" + o), 0);
  const auto fit = load(out / "fit.json");
  EXPECT_NEAR(fit["fit"]["sup_error"].get<double>(), 0.125, 1e-4);
  EXPECT_EQ(zyglab("porosity --field constant:c=0 --k_min 3 --k_max 4 --centers 0.5" + o), 0);
  EXPECT_EQ(load(out / "porosity.json")["min_best_a"], 0.49);
  EXPECT_EQ(zyglab("profile --field constant:c=0.5 --measure dyadic:n=2,depth=10,beta=0.25,seed=1 --k_max 6" + o), 0);
  EXPECT_EQ(load(out / "profile.json")["rows"].size(), 4u);
}
