#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"
#include "config.hpp"
#include "expression.hpp"

using namespace splitma;
using namespace splitma::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "splitma");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("splitma_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump();
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json small_torus(const std::string& kind) {
  return {{"backend", {{"kind", "torus4d"}, {"sizes", {6, 6, 6, 6}}}},
          {"problem", {{"kind", kind}, {"p", 0.5}, {"q", 1.0}, {"F", {{"kind", "random"}, {"seed", 3}, {"amplitude", 0.3}}}}}};
}

}  // namespace

TEST(Expression, Arithmetic) {
  const std::vector<double> v{0.25, 2.0};
  EXPECT_DOUBLE_EQ(Expression("1 + 2*3", {"x", "s"})(v), 7.0);
  EXPECT_DOUBLE_EQ(Expression("-s^2", {"x", "s"})(v), -4.0);
  EXPECT_DOUBLE_EQ(Expression("2^-1", {})(v), 0.5);
  EXPECT_DOUBLE_EQ(Expression("2^3^2", {})(v), 512.0);
  EXPECT_DOUBLE_EQ(Expression("(1-s)/4", {"x", "s"})(v), -0.25);
  EXPECT_NEAR(Expression("0.1*cos(2*pi*x)", {"x"})(v), 0.1 * std::cos(std::numbers::pi / 2), 1e-17);
  EXPECT_DOUBLE_EQ(Expression("exp(log(3)) + sqrt(16) + abs(-1e-1)", {})(v), 3.0 + 4.0 + 0.1);
}

TEST(Expression, Errors) {
  for (const char* bad : {"1 +", "foo(1)", "x*", "(1", "y", "2 3", "sin 1"}) {
    try {
      Expression(bad, {"x"});
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Config) << bad;
    }
  }
}

TEST(Config, Defaults) {
  const Config c = parse_config(json::object());
  EXPECT_EQ(c.backend.kind, BackendKind::Torus4D);
  EXPECT_EQ(c.backend.sizes, (std::vector<std::size_t>{8, 8, 8, 8}));
  EXPECT_EQ(c.problem.kind, "nonlinear");
  EXPECT_EQ(c.solver.tol, 1e-11);
  const Config h = parse_config({{"backend", {{"kind", "hopf"}, {"params", {{"alpha", 1}, {"beta", 2}}}}}});
  EXPECT_EQ(h.backend.sizes.size(), 2u);
  EXPECT_EQ(h.backend.beta, 2.0);
}

TEST(Config, UnknownKeysAreListed) {
  try {
    parse_config({{"backend", {{"kind", "torus4d"}, {"size", 4}}}, {"extra", 1}, {"problem", {{"F", {{"kind", "zero"}, {"seeds", 1}}}}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("backend.size"), std::string::npos) << msg;
    EXPECT_NE(msg.find("extra"), std::string::npos) << msg;
    EXPECT_NE(msg.find("problem.F.seeds"), std::string::npos) << msg;
  }
}

TEST(Config, BadValues) {
  EXPECT_THROW(parse_config({{"backend", {{"sizes", {8, 8, 8}}}}}), Error);
  EXPECT_THROW(parse_config({{"backend", {{"sizes", {8, 8, 8, 2}}}}}), Error);
  EXPECT_THROW(parse_config({{"problem", {{"signs", {1, 0}}}}}), Error);
  EXPECT_THROW(parse_config({{"problem", {{"p", "one"}}}}), Error);
  EXPECT_THROW(parse_config({{"solver", {{"max_newton", 1.5}}}}), Error);
  EXPECT_THROW(parse_config({{"problem", {{"F", {{"kind", "random"}, {"seed", -1}}}}}}), Error);
  EXPECT_THROW(parse_config({{"backend", {{"kind", "inoue"}, {"params", {{"y_lo", 2}, {"y_hi", 1}}}}}}), Error);
}

TEST(Cli, InvalidBackendExitsThree) {
  auto dir = scratch("badbackend");
  auto cfg = write_config(dir, {{"backend", {{"kind", "klein"}}}});
  auto r = call({"solve", "--config", cfg.string(), "-o", (dir / "out").string()});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("backend.kind"), std::string::npos) << r.err;
  EXPECT_EQ(call({"solve", "--config", (dir / "missing.json").string()}).code, kExitConfig);
}

TEST(Cli, SolveWritesDeterministicReport) {
  auto dir = scratch("solve");
  auto cfg = write_config(dir, small_torus("nonlinear"));
  auto a = call({"solve", "--config", cfg.string(), "-o", (dir / "a").string()});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  auto b = call({"solve", "--config", cfg.string(), "-o", (dir / "b").string()});
  ASSERT_EQ(b.code, kExitOk) << b.err;
  EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
  EXPECT_EQ(slurp(dir / "a" / "u.csv"), slurp(dir / "b" / "u.csv"));
  EXPECT_TRUE(fs::exists(dir / "a" / "metadata.json"));

  const json rep = json::parse(slurp(dir / "a" / "report.json"));
  EXPECT_TRUE(rep["converged"].get<bool>());
  EXPECT_TRUE(rep["passed"].get<bool>());
  EXPECT_LE(std::abs(rep["xi"].get<double>()), 0.3 + 1e-8);
  EXPECT_FALSE(rep.contains("seconds"));
  EXPECT_EQ(rep["path"].size(), 10u);

  std::istringstream csv(slurp(dir / "a" / "u.csv"));
  std::string header, first;
  std::getline(csv, header);
  std::getline(csv, first);
  EXPECT_EQ(header, "axis0,axis1,axis2,axis3,value");
  EXPECT_EQ(first.substr(0, 8), "0,0,0,0,");
  std::size_t rows = 1;
  for (std::string line; std::getline(csv, line);) ++rows;
  EXPECT_EQ(rows, 6u * 6u * 6u * 6u);

  // u.min() is 0 after normalization; the largest value round-trips through %.17g
  double umax = 0.0;
  std::istringstream again(slurp(dir / "a" / "u.csv"));
  std::getline(again, header);
  for (std::string line; std::getline(again, line);) umax = std::max(umax, std::stod(line.substr(line.rfind(',') + 1)));
  EXPECT_EQ(umax, rep["u_max"].get<double>());

  auto summary = call({"report", (dir / "a").string()});
  EXPECT_EQ(summary.code, kExitOk);
  EXPECT_NE(summary.out.find("xi = "), std::string::npos);
}

TEST(Cli, OtherProblemKinds) {
  auto dir = scratch("kinds");
  for (const char* kind : {"linear", "prescribe", "decompose"}) {
    json j = small_torus(kind);
    if (std::string(kind) == "decompose") j["problem"]["F"] = {{"kind", "expression"}, {"expression", "0.01*cos(2*pi*x1)*sin(2*pi*x4)"}};
    auto cfg = write_config(dir, j);
    auto r = call({"solve", "--config", cfg.string(), "-o", (dir / kind).string()});
    EXPECT_EQ(r.code, kExitOk) << kind << " " << r.err;
  }
  const json d = json::parse(slurp(dir / "decompose" / "report.json"));
  EXPECT_LT(d["residual"].get<double>(), 1e-8);
  const json p = json::parse(slurp(dir / "prescribe" / "report.json"));
  EXPECT_LT(p["ricci_error"].get<double>(), 1e-8);

  json inoue{{"backend", {{"kind", "inoue"}, {"sizes", {33}}}}, {"problem", {{"kind", "flatten"}, {"p", 1}, {"q", 2}}}};
  auto r = call({"solve", "--config", write_config(dir, inoue).string(), "-o", (dir / "flatten").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(json::parse(slurp(dir / "flatten" / "report.json"))["xi"].get<double>(), 0.0, 1e-10);

  for (const char* sub : {"gauduchon", "ricci", "bracket"}) {
    auto s = call({sub, "--config", write_config(dir, small_torus("nonlinear")).string(), "-o", (dir / sub).string()});
    EXPECT_EQ(s.code, kExitOk) << sub << " " << s.err;
    EXPECT_TRUE(fs::exists(dir / sub / "report.json")) << sub;
  }
}

TEST(Cli, SolverFailureStillWritesReport) {
  auto dir = scratch("failure");
  json j = small_torus("nonlinear");
  j["solver"] = {{"floor", 10.0}};
  auto r = call({"solve", "--config", write_config(dir, j).string(), "-o", (dir / "out").string()});
  EXPECT_EQ(r.code, kExitSolver);
  const json rep = json::parse(slurp(dir / "out" / "report.json"));
  EXPECT_FALSE(rep["converged"].get<bool>());
  EXPECT_EQ(rep["error"]["kind"], "not-converged");
  EXPECT_EQ(call({"report", (dir / "out").string()}).code, kExitSolver);
}

TEST(Cli, EllipticityIsAConfigError) {
  auto dir = scratch("elliptic");
  json j = small_torus("nonlinear");
  j["problem"]["signs"] = {1, 1};
  EXPECT_EQ(call({"solve", "--config", write_config(dir, j).string(), "-o", (dir / "out").string()}).code, kExitConfig);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  auto dir = scratch("env");
  auto cfg = write_config(dir, small_torus("linear"));
  ::setenv("SPLITMA_OUTPUT_DIR", (dir / "from_env").c_str(), 1);
  auto r = call({"solve", "--config", cfg.string()});
  ::unsetenv("SPLITMA_OUTPUT_DIR");
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir / "from_env" / "report.json"));
}

TEST(Cli, HopfBracketsCsv) {
  auto r = call({"hopf", "--alpha", "1", "--beta", "2", "--check", "brackets", "--nx", "512", "--ns", "16", "--t", "-1,0.5,2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream csv(r.out);
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "t,bracket,c_t");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    double t, b, ct;
    char c1, c2;
    std::istringstream(line) >> t >> c1 >> b >> c2 >> ct;
    EXPECT_NEAR(ct, 4 * std::numbers::pi * std::numbers::pi * t, 1e-12);
    EXPECT_NEAR(b, ct, 1e-4 * std::abs(ct));
  }
  EXPECT_EQ(rows, 3);
  EXPECT_EQ(call({"hopf", "--check", "nonsense"}).code, kExitUsage);
}

TEST(Cli, Presets) {
  auto dir = scratch("preset");
  auto r = call({"--preset", "A7", "-o", (dir / "a7").string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.substr(0, 8), "A7 PASS ");
  const json rep = json::parse(slurp(dir / "a7" / "report.json"));
  EXPECT_EQ(rep["criterion"], "A7");
  EXPECT_TRUE(rep["passed"].get<bool>());
  auto r2 = call({"solve", "--preset", "A12", "-o", (dir / "a12").string()});
  EXPECT_EQ(r2.code, kExitOk) << r2.err;
  EXPECT_EQ(call({"--preset", "A99", "-o", (dir / "x").string()}).code, kExitConfig);
}
