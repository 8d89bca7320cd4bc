#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tehom/cli.hpp"

namespace {

using namespace tehom;
namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tehom_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

TEST(Config, RoundTrip) {
  ExperimentConfig c;
  c.domain = "square:-3,3";
  c.medium.tensor = "checkerboard";
  c.medium.index = "voids";
  c.medium.a2 = 0.1 + 0.2;  // not representable in few digits
  c.medium.angle = std::acos(-1.0) / 7.0;
  c.epsilons = {1.0 / 3, 0.25, 1e-3};
  c.k_min = 0.7;
  c.count = 4;
  c.divisions = 72;
  c.allow_voids = true;
  c.seed = 123456789012ULL;
  c.output = "runs/a b";
  const ExperimentConfig back = parse_config(emit_config(c));
  EXPECT_TRUE(back == c);
  EXPECT_EQ(emit_config(back), emit_config(c));
  EXPECT_TRUE(parse_config(emit_config(ExperimentConfig{})) == ExperimentConfig{});
}

TEST(Config, CommentsAndWhitespace) {
  const auto c = parse_config(
      "# experiment\n[domain]\n  shape = disk:2   # radius two\n\n[medium]\nindex=sincos\n[run]\nepsilons = 0.5, "
      "0.25\r\n");
  EXPECT_EQ(c.domain, "disk:2");
  EXPECT_EQ(c.medium.index, "sincos");
  ASSERT_EQ(c.epsilons.size(), 2u);
  EXPECT_EQ(c.epsilons[1], 0.25);
}

TEST(Config, Errors) {
  auto kind = [](const std::string& text) {
    try {
      parse_config(text).validate();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::UnsupportedOrder;  // sentinel: nothing thrown
  };
  EXPECT_EQ(kind("[run]\nbogus = 1\n"), ErrorKind::Parse);
  EXPECT_EQ(kind("shape = disk:1\n"), ErrorKind::Parse);
  EXPECT_EQ(kind("[run]\nk_min = fast\n"), ErrorKind::Parse);
  EXPECT_EQ(kind("[run]\ncount = 1.5\n"), ErrorKind::Parse);
  EXPECT_EQ(kind("[run\n"), ErrorKind::Parse);
  EXPECT_EQ(kind("[run]\nallow_voids = maybe\n"), ErrorKind::Parse);
  EXPECT_EQ(kind("[domain]\nshape = hexagon:1\n"), ErrorKind::Parse);
  EXPECT_EQ(kind("[run]\nepsilons = 0.5, -1\n"), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind("[run]\nk_min = 3\nk_max = 2\n"), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind("[run]\ndirections = 48\n"), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind("[medium]\ntensor = fancy\n"), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind("[domain]\nshape = square:1,1\n"), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind("[run]\nepsilons = 0.5\n"), ErrorKind::UnsupportedOrder);
}

TEST(Csv, Dialect) {
  CsvTable t({"a", "b", "c"});
  t.add({1.0 / 3.0, -0.0, "x"});
  t.add({1e-20, 123456789012345.0, 7});
  EXPECT_EQ(t.str(), "a,b,c\n0.333333333333,0,x\n1e-20,1.23456789012e+14,7\n");
  EXPECT_THROW(t.add({1.0, 2.0}), Error);
  EXPECT_THROW(t.add({1.0, 2.0, "p,q"}), Error);
  EXPECT_THROW(t.add({1.0, 2.0, "p\nq"}), Error);
}

TEST(Csv, HashAndAtomicWrite) {
  EXPECT_EQ(content_hash(""), "cbf29ce484222325");
  EXPECT_EQ(content_hash("a"), "af63dc4c8601ec8c");
  EXPECT_NE(content_hash("k = 1"), content_hash("k = 2"));
  const fs::path dir = scratch("atomic");
  write_atomic(dir / "x.csv", "one\n");
  write_atomic(dir / "x.csv", "two\n");
  EXPECT_EQ(slurp(dir / "x.csv"), "two\n");
  EXPECT_FALSE(fs::exists(dir / "x.csv.tmp"));
}

RunRequest request(const fs::path& out) {
  RunRequest r;
  r.config.output = out.string();
  return r;
}

TEST(Cli, AnalyticFirstRow) {
  RunRequest r = request(scratch("analytic"));
  r.config.domain = "disk:2";
  r.config.medium.tensor = "constant";
  r.config.medium.a = 1.0;
  r.config.medium.n = 3.0;
  r.config.count = 2;
  std::ostringstream diag;
  const RunOutcome o = run_subcommand("te-analytic", r, diag);
  ASSERT_EQ(o.exit_code, kExitOk) << o.message;
  ASSERT_EQ(o.artifacts.size(), 1u);
  std::istringstream csv(slurp(o.artifacts[0]));
  std::string header, first;
  std::getline(csv, header);
  std::getline(csv, first);
  EXPECT_EQ(header, "method,epsilon,k_index,k_value,residual,h");
  const auto cells = split(first);
  ASSERT_EQ(cells.size(), 6u);
  EXPECT_EQ(cells[0], "analytic");
  EXPECT_EQ(cells[2], "1");
  EXPECT_NEAR(std::stod(cells[3]), 2.07962, 1e-5);
  const std::string manifest = slurp(o.artifacts[0].string() + ".manifest");
  EXPECT_NE(manifest.find("config_hash = "), std::string::npos);
  EXPECT_NE(manifest.find("shape = disk:2"), std::string::npos);
}

TEST(Cli, HomogenizeHalfIdentity) {
  RunRequest r = request(scratch("homogenize"));
  r.config.medium.tensor = "sincos";
  r.config.medium.index = "sincos";
  std::ostringstream diag;
  const RunOutcome o = run_subcommand("homogenize", r, diag);
  ASSERT_EQ(o.exit_code, kExitOk) << o.message;
  std::istringstream csv(slurp(o.artifacts[0]));
  std::string line;
  std::getline(csv, line);
  std::getline(csv, line);
  const auto a = split(line);
  ASSERT_EQ(a[0], "a_h");
  EXPECT_NEAR(std::stod(a[1]), 0.5, 1e-6);
  EXPECT_NEAR(std::stod(a[2]), 0.0, 1e-6);
  EXPECT_NEAR(std::stod(a[4]), 0.5, 1e-6);
}

TEST(Cli, ValidationFailsWithoutArtifacts) {
  const fs::path out = scratch("invalid");
  RunRequest r = request(out);
  r.config.epsilons = {0.5, -0.25};
  std::ostringstream diag;
  for (const char* sub : {"te-fem", "rate", "homogenize"}) {
    const RunOutcome o = run_subcommand(sub, r, diag);
    EXPECT_EQ(o.exit_code, kExitInvalid) << sub;
    EXPECT_TRUE(o.artifacts.empty());
  }
  EXPECT_FALSE(fs::exists(out));

  RunRequest t = request(out);
  t.table = "t10";
  EXPECT_EQ(run_subcommand("paper-table", t, diag).exit_code, kExitInvalid);
  EXPECT_EQ(run_subcommand("no-such-command", t, diag).exit_code, kExitInvalid);
  RunRequest noisy = request(out);
  noisy.k = 2.0;
  noisy.config.delta = 0.01;
  EXPECT_EQ(run_subcommand("farfield-synth", noisy, diag).exit_code, kExitInvalid);
  RunRequest square = request(out);
  square.config.domain = "square:0,1";
  EXPECT_EQ(run_subcommand("te-analytic", square, diag).exit_code, kExitInvalid);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, SolverFailureExitCode) {
  const fs::path out = scratch("solver");
  RunRequest r = request(out);
  r.k1 = 0.01;  // below every index eigenvalue of the unit disk in the bracket
  std::ostringstream diag;
  const RunOutcome o = run_subcommand("reconstruct", r, diag);
  EXPECT_EQ(o.exit_code, kExitSolver) << o.message;
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, DeterministicArtifacts) {
  std::string first;
  for (int rep = 0; rep < 2; ++rep) {
    RunRequest r = request(scratch("determinism" + std::to_string(rep)));
    r.k = 2.5;
    r.config.medium.n = 2.5;
    r.config.directions = 16;
    r.config.seed = 7;
    r.seed_given = true;
    std::ostringstream diag;
    const RunOutcome o = run_subcommand("farfield-synth", r, diag);
    ASSERT_EQ(o.exit_code, kExitOk) << o.message;
    const std::string text = slurp(o.artifacts[0]);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 16 * 16 + 1);
    if (rep == 0) first = text;
    else EXPECT_EQ(text, first);
  }
}

TEST(Cli, ReconstructAndPaperTable) {
  RunRequest r = request(scratch("reconstruct"));
  r.k1 = 5.046;
  std::ostringstream diag;
  RunOutcome o = run_subcommand("reconstruct", r, diag);
  ASSERT_EQ(o.exit_code, kExitOk) << o.message;
  std::istringstream csv(slurp(o.artifacts[0]));
  std::string line;
  std::getline(csv, line);
  std::getline(csv, line);
  const auto cells = split(line);
  EXPECT_EQ(cells[0], "index");
  EXPECT_EQ(cells[1], "disk:1");
  EXPECT_EQ(cells[7], "yes");

  RunRequest t = request(scratch("table"));
  t.table = "t4";
  o = run_subcommand("paper-table", t, diag);
  ASSERT_EQ(o.exit_code, kExitOk) << o.message;
  ASSERT_EQ(o.artifacts.size(), 1u);
  EXPECT_EQ(o.artifacts[0].filename(), "t4.csv");
  const std::string text = slurp(o.artifacts[0]);
  EXPECT_EQ(text.rfind("item,param,computed,published,rel_diff,tolerance,pass,h,reference\n", 0), 0u);
  EXPECT_NE(text.find("2.5188"), std::string::npos);
}

TEST(Cli, RateFromGivenValues) {
  RunRequest r = request(scratch("rate"));
  r.config.epsilons = {0.5, 0.25, 0.125, 0.0625};
  r.k1s = {2.0 + 0.5 * 0.5 * 0.5, 2.0 + 0.5 * 0.25 * 0.25, 2.0 + 0.5 * 0.125 * 0.125, 2.0 + 0.5 * 0.0625 * 0.0625};
  r.k_ref = 2.0;
  std::ostringstream diag;
  const RunOutcome o = run_subcommand("rate", r, diag);
  ASSERT_EQ(o.exit_code, kExitOk) << o.message;
  ASSERT_EQ(o.artifacts.size(), 2u);
  std::istringstream csv(slurp(o.artifacts[1]));
  std::string line;
  std::getline(csv, line);
  std::getline(csv, line);
  const auto cells = split(line);
  EXPECT_EQ(cells[0], "absolute");
  EXPECT_NEAR(std::stod(cells[1]), 2.0, 1e-9);
}

}  // namespace
